#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace so3agg {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the domain where a formula is defined (e.g. the cut locus).
class DomainError : public Error {
 public:
  using Error::Error;
};

class DegenerateInput : public Error {
 public:
  using Error::Error;
};

/// Two particles are (numerically) antipodal, so the interaction is undefined.
class CutLocusError : public Error {
 public:
  CutLocusError(std::size_t i, std::size_t j, double distance);

  std::size_t first() const { return first_; }
  std::size_t second() const { return second_; }
  double distance() const { return distance_; }

 private:
  std::size_t first_;
  std::size_t second_;
  double distance_;
};

/// The angle-axis chart degenerated (theta near 0 or pi) during integration.
class ChartSingularity : public Error {
 public:
  ChartSingularity(std::size_t particle, double theta);

  std::size_t particle() const { return particle_; }
  double theta() const { return theta_; }

 private:
  std::size_t particle_;
  double theta_;
};

class NoConvergence : public Error {
 public:
  NoConvergence(const std::string& what, double residual);

  double residual() const { return residual_; }

 private:
  double residual_;
};

class InvalidForSingleParticle : public Error {
 public:
  using Error::Error;
};

/// A failure inside a simulation run, tagged with the step that raised it.
class StepError : public Error {
 public:
  StepError(std::size_t step, const std::string& cause);

  std::size_t step() const { return step_; }

 private:
  std::size_t step_;
};

}  // namespace so3agg
