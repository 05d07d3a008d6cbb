#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "oracles.hpp"
#include "so3agg/commands.hpp"
#include "so3agg/csv.hpp"
#include "so3agg/transport.hpp"

using namespace so3agg;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Proc {
  int code = -1;
  std::string out;
};

// Runs the so3agg executable with stderr merged into the captured output.
Proc cli(const std::string& args) {
  const std::string cmd = std::string(SO3AGG_CLI) + " " + args + " 2>&1";
  Proc p;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return p;
  char buf[4096];
  while (std::fgets(buf, sizeof buf, pipe)) p.out += buf;
  const int status = pclose(pipe);
  p.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return p;
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "so3agg_test_cli" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::vector<std::string> lines_of(const fs::path& p) {
  std::ifstream in(p);
  std::vector<std::string> out;
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

void write_state(const fs::path& p, const std::vector<AxisAngle>& atoms) {
  std::ofstream out(p);
  out << "theta,ax,ay,az\n";
  for (const AxisAngle& a : atoms) {
    out << format_csv_double(a.theta) << ',' << format_csv_double(a.axis.x()) << ','
        << format_csv_double(a.axis.y()) << ',' << format_csv_double(a.axis.z()) << '\n';
  }
}

std::vector<AxisAngle> random_atoms(std::size_t n, std::mt19937_64& rng) {
  std::vector<AxisAngle> out;
  std::uniform_real_distribution<double> u(0.0, 1.2);
  for (std::size_t i = 0; i < n; ++i) {
    out.push_back(AxisAngle::make(u(rng), oracle::gaussian_vec(rng)));
  }
  return out;
}

}  // namespace

TEST(Cli, MissingConfigExitsWithConfigCode) {
  const Proc p = cli("simulate --config /nonexistent/run.cfg");
  EXPECT_EQ(p.code, 2);
  EXPECT_NE(p.out.find("/nonexistent/run.cfg"), std::string::npos) << p.out;
}

TEST(Cli, UsageErrorsExitWithConfigCode) {
  EXPECT_EQ(cli("").code, 2);
  EXPECT_EQ(cli("simulate --preset nope").code, 2);
  EXPECT_EQ(cli("simulate --set sim.dt").code, 2);
  EXPECT_EQ(cli("simulate --set sim.bogus=1").code, 2);
  EXPECT_EQ(cli("--help").code, 0);
}

TEST(Cli, ZeroStepsWritesOneRow) {
  const fs::path dir = scratch("zero");
  const Proc p = cli("simulate --set sim.steps=0 --output-dir " + dir.string());
  ASSERT_EQ(p.code, 0) << p.out;
  EXPECT_EQ(lines_of(dir / "diagnostics.csv").size(), 2u);
  std::ifstream in(dir / "summary.json");
  const json s = json::parse(in);
  EXPECT_EQ(s["steps_taken"], 0);
  EXPECT_EQ(s["final_time"], 0.0);
  EXPECT_EQ(s["status"], "completed");
  EXPECT_FALSE(s["consensus"].get<bool>());
  EXPECT_EQ(s["config"]["sim.steps"], "0");
  for (const char* key : {"final_diameter", "wall_time_s", "seed"}) EXPECT_TRUE(s.contains(key));
}

TEST(Cli, SimulationFailureExitsWithSimulationCode) {
  const fs::path dir = scratch("fail");
  // Every particle starts within 1e-9 of the identity, where the angle-axis chart is singular.
  const Proc p = cli("simulate --set sim.integrator=rk4_axis_angle --set init.radius=1e-9 "
                     "--set sim.consensus_tol=1e-15 --set sim.equilibrium_tol=0 --set sim.steps=5 --output-dir " +
                     dir.string());
  EXPECT_EQ(p.code, 3) << p.out;
  EXPECT_NE(p.out.find("step 1"), std::string::npos) << p.out;
}

TEST(Cli, SweepEmptyValuesExits2) {
  const fs::path dir = scratch("sweep_empty");
  EXPECT_EQ(cli("sweep --param potential.q --output-dir " + dir.string()).code, 2);
  EXPECT_EQ(cli("sweep --param sim.bogus --values 1 --output-dir " + dir.string()).code, 2);
}

TEST(Cli, SweepWritesOneDirectoryPerValue) {
  const fs::path dir = scratch("sweep_dt");
  const Proc p = cli("sweep --param sim.dt --values 0.01,0.005 --set sim.particles=6 "
                     "--set sim.consensus_tol=1e-12 --set sim.equilibrium_tol=0 "
                     "--set sim.steps=200 --output-dir " +
                     dir.string());
  ASSERT_EQ(p.code, 0) << p.out;
  EXPECT_TRUE(fs::exists(dir / "dt_0.01" / "diagnostics.csv"));
  EXPECT_TRUE(fs::exists(dir / "dt_0.005" / "diagnostics.csv"));
  const auto rows = lines_of(dir / "sweep_summary.csv");
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[0], "param,value,status,reached,time_to_threshold,final_time,final_diameter");
  std::ifstream a(dir / "dt_0.01" / "summary.json");
  std::ifstream b(dir / "dt_0.005" / "summary.json");
  const json ja = json::parse(a);
  const json jb = json::parse(b);
  EXPECT_DOUBLE_EQ(ja["final_time"].get<double>(), 2.0);
  EXPECT_DOUBLE_EQ(jb["final_time"].get<double>(), 1.0);
}

TEST(Cli, SweepOverTimeStepMatchesAtEqualHorizon) {
  const fs::path dir = scratch("sweep_dt_horizon");
  CommonOptions opts;
  opts.sets = {"sim.particles=6", "sim.equilibrium_tol=0", "sim.consensus_tol=1e-12"};
  opts.output_dir = dir.string();
  std::ostringstream out, err;
  // Same horizon t = 2 for both: 200 and 400 steps.
  opts.sets.push_back("sim.steps=200");
  ASSERT_EQ(cmd_sweep(opts, "dt", {"0.01"}, 0.01, out, err), kExitOk) << err.str();
  opts.sets.back() = "sim.steps=400";
  opts.output_dir = (dir / "half").string();
  ASSERT_EQ(cmd_sweep(opts, "dt", {"0.005"}, 0.01, out, err), kExitOk) << err.str();
  std::ifstream a(dir / "dt_0.01" / "summary.json");
  std::ifstream b(dir / "half" / "dt_0.005" / "summary.json");
  const double da = json::parse(a)["final_diameter"].get<double>();
  const double db = json::parse(b)["final_diameter"].get<double>();
  EXPECT_NEAR(da, db, 1e-8 * da);
}

TEST(Cli, KarcherOfTwoAtomsIsMidpoint) {
  const fs::path dir = scratch("karcher");
  const AxisAngle a = AxisAngle::make(0.2, Vec3(0, 0, 1));
  const AxisAngle b = AxisAngle::make(0.8, Vec3(0, 0, 1));
  write_state(dir / "two.csv", {a, b});
  const Proc p = cli("karcher " + (dir / "two.csv").string());
  ASSERT_EQ(p.code, 0) << p.out;
  const json j = json::parse(p.out);
  EXPECT_NEAR(j["center"][0].get<double>(), 0.5, 1e-10);
  EXPECT_NEAR(j["center"][3].get<double>(), 1.0, 1e-10);
  EXPECT_NEAR(j["mean_radius"].get<double>(), 0.3, 1e-10);
  EXPECT_NEAR(j["radius_std"].get<double>(), 0.0, 1e-7);
  EXPECT_EQ(j["particles"], 2);
}

TEST(Cli, KarcherOfConsensusRun) {
  const fs::path dir = scratch("karcher_consensus");
  ASSERT_EQ(cli("simulate --preset fig1_consensus_q2 --set sim.particles=8 --set sim.consensus_tol=1e-13 "
                "--output-dir " +
                dir.string())
                .code,
            0);
  const Proc p = cli("karcher " + (dir / "trajectory.csv").string());
  ASSERT_EQ(p.code, 0) << p.out;
  const json j = json::parse(p.out);
  EXPECT_LE(j["radius_std"].get<double>(), 1e-12);
  EXPECT_LE(j["mean_radius"].get<double>(), 1e-12);
  EXPECT_EQ(cli("karcher " + (dir / "missing.csv").string()).code, 2);
}

TEST(Cli, ConstantsMatchLibraryExactly) {
  const Proc p = cli("constants --preset fig2b_morse_text --epsilon 0.2");
  ASSERT_EQ(p.code, 0) << p.out;
  const json j = json::parse(p.out);
  const StabilityConstants k = stability_constants(Potential::morse(0.5, 0.25, 2.0), 0.2);
  EXPECT_EQ(j["C_f"].get<double>(), k.C_f);
  EXPECT_EQ(j["L_f"].get<double>(), k.L_f);
  EXPECT_EQ(j["C_gp"].get<double>(), k.C_gp);
  EXPECT_EQ(j["L_gp"].get<double>(), k.L_gp);
  EXPECT_EQ(j["L"].get<double>(), k.L);
  EXPECT_EQ(j["Lip"].get<double>(), k.Lip);
  EXPECT_EQ(j["C_eps"].get<double>(), k.C_eps);
  EXPECT_EQ(j["rate"][1]["r"].get<double>(), stability_rate(k, 0.1));
  EXPECT_EQ(j["potential"]["kind"], "morse");
  EXPECT_EQ(cli("constants --epsilon 2").code, 2);
}

TEST(Cli, W1Values) {
  const fs::path dir = scratch("w1");
  std::mt19937_64 rng(21);
  const auto a = random_atoms(4, rng);
  const auto b = random_atoms(4, rng);
  write_state(dir / "a.csv", a);
  write_state(dir / "b.csv", b);
  write_state(dir / "p.csv", {a[0]});
  write_state(dir / "q.csv", {b[0]});

  EXPECT_EQ(cli("w1 " + (dir / "a.csv").string() + " " + (dir / "a.csv").string()).out, "0\n");

  const Proc single = cli("w1 " + (dir / "p.csv").string() + " " + (dir / "q.csv").string());
  ASSERT_EQ(single.code, 0) << single.out;
  const Rotation ra = exp_axis_angle(a[0]);
  const Rotation rb = exp_axis_angle(b[0]);
  EXPECT_NEAR(std::stod(single.out), oracle::trace_angle(ra.matrix().transpose() * rb.matrix()),
              1e-11);

  const Proc four = cli("w1 " + (dir / "a.csv").string() + " " + (dir / "b.csv").string());
  ASSERT_EQ(four.code, 0) << four.out;
  Eigen::MatrixXd cost(4, 4);
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      cost(i, j) = oracle::trace_angle(exp_axis_angle(a[i]).matrix().transpose() *
                                       exp_axis_angle(b[j]).matrix());
    }
  }
  EXPECT_NEAR(std::stod(four.out), oracle::brute_force_assignment(cost) / 4, 1e-11);
  EXPECT_EQ(cli("w1 " + (dir / "a.csv").string() + " " + (dir / "none.csv").string()).code, 2);
}
