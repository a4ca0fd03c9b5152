#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <string>

#include <json.hpp>

#include "grasstensor/io_util.hpp"
#include "grasstensor/tensor_io.hpp"

namespace {

using nlohmann::json;

struct RunResult {
  int code = -1;
  std::string out;
  std::string err;
};

std::string fresh_dir(const std::string& name) {
  const auto dir = std::filesystem::path(::testing::TempDir()) / "grasstensor_cli" / name;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir.string();
}

RunResult run_cli(const std::string& args, const std::string& dir) {
  const std::string out_file = dir + "/cmd_stdout.txt";
  const std::string err_file = dir + "/cmd_stderr.txt";
  const std::string cmd = std::string(GT_CLI_PATH) + " " + args + " > '" + out_file + "' 2> '" + err_file + "'";
  const int raw = std::system(cmd.c_str());
  RunResult r;
  r.code = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  r.out = gt::read_file(out_file);
  r.err = gt::read_file(err_file);
  return r;
}

std::string data_file(const std::string& name) { return std::string(GT_DATA_DIR) + "/" + name; }

json result_json(const std::string& dir) { return json::parse(gt::read_file(dir + "/result.json")); }

TEST(Cli, ApproxSmokeProducesArtifacts) {
  const std::string dir = fresh_dir("approx");
  const auto r = run_cli("approx --input " + data_file("sample_2x2x2.json") + " --ranks 1,1,1 --out " + dir, dir);
  EXPECT_EQ(r.code, 0) << r.err;

  const json res = result_json(dir);
  EXPECT_EQ(res.at("command"), "approx");
  EXPECT_EQ(res.at("status"), "converged");
  EXPECT_GE(res.at("rel_residual").get<double>(), 0.0);
  EXPECT_LE(res.at("rel_residual").get<double>(), 1.0);
  EXPECT_LE(res.at("rho_hosvd").get<double>(), res.at("rho_final").get<double>() + 1e-12);

  const std::string trace = gt::read_file(dir + "/trace.csv");
  EXPECT_EQ(trace.substr(0, trace.find('\n')), "iter,rho,relgrad,alpha,millis");
  const auto approx = gt::load_tensor(dir + "/approximation.gten");
  EXPECT_EQ(approx.shape(), (std::vector<gt::Index>{2, 2, 2}));
}

TEST(Cli, SameSeedGivesByteIdenticalTraces) {
  const std::string d1 = fresh_dir("bench1");
  const std::string d2 = fresh_dir("bench2");
  const std::string args = "bench --dims 6,6,6 --ranks 2,2,2 --seed 3 --out ";
  ASSERT_EQ(run_cli(args + d1, d1).code, 0);
  ASSERT_EQ(run_cli(args + d2, d2).code, 0);
  for (const std::string m : {"newton", "rcg", "hooi"}) {
    const std::string a = gt::read_file(d1 + "/trace_" + m + ".csv");
    const std::string b = gt::read_file(d2 + "/trace_" + m + ".csv");
    EXPECT_EQ(a, b) << m;
    EXPECT_EQ(a.substr(0, a.find('\n')), "iter,rho,relgrad,alpha,millis");
  }
  const json res = result_json(d1);
  EXPECT_LE(res.at("methods").at("newton").at("iters").get<int>(),
            res.at("methods").at("rcg").at("iters").get<int>());
  EXPECT_EQ(res.at("methods").at("newton").at("millis").get<int>(), 0);  // timing is opt-in
}

TEST(Cli, ClusterRecoversBundledPlanes) {
  const std::string dir = fresh_dir("cluster");
  const auto r = run_cli("cluster --input " + data_file("two_planes.csv") + " --truth " +
                             data_file("two_planes_truth.json") + " --format csv --out " + dir,
                         dir);
  EXPECT_EQ(r.code, 0) << r.err;
  const json res = result_json(dir);
  EXPECT_LT(res.at("err_trace_angle_deg").get<double>(), 1e-4);
  EXPECT_LT(res.at("rho").get<double>(), 1e-10);
  EXPECT_EQ(res.at("labels").size(), 400u);
  const std::string labels = gt::read_file(dir + "/labels.csv");
  EXPECT_EQ(std::count(labels.begin(), labels.end(), '\n'), 400);
}

TEST(Cli, SelectReportsOneBasedIndexSets) {
  const std::string dir = fresh_dir("select");
  const auto r = run_cli("select --input " + data_file("select_2x2.csv") + " --ranks 1,1 --out " + dir, dir);
  EXPECT_EQ(r.code, 0) << r.err;
  const json res = result_json(dir);
  EXPECT_EQ(res.at("rows"), json::array({2}));
  EXPECT_EQ(res.at("cols"), json::array({2}));
  EXPECT_EQ(res.at("value").get<double>(), 4.0);
}

TEST(Cli, EntangleBellStateDistance) {
  const std::string dir = fresh_dir("entangle");
  const auto r = run_cli("entangle --input " + data_file("bell_state.json") + " --out " + dir, dir);
  EXPECT_EQ(r.code, 0) << r.err;
  const json res = result_json(dir);
  EXPECT_NEAR(res.at("delta").get<double>(), 2.0 - std::sqrt(2.0), 1e-8);
  EXPECT_NEAR(res.at("rho_star").get<double>(), 0.5, 1e-10);
}

TEST(Cli, ExitCodesDistinguishOutcomes) {
  const std::string dir = fresh_dir("codes");
  const auto capped = run_cli("approx --input " + data_file("sample_2x2x2.json") +
                                  " --ranks 1,1,1 --warm-hooi 0 --max-iter 1 --out " + dir,
                              dir);
  EXPECT_EQ(capped.code, 2);
  EXPECT_EQ(result_json(dir).at("status"), "max_iter");

  const auto missing = run_cli("approx --input /nonexistent.gten --ranks 1,1,1 --out " + dir, dir);
  EXPECT_EQ(missing.code, 1);
  EXPECT_NE(missing.err.find("/nonexistent.gten"), std::string::npos);

  const auto bad_ranks = run_cli("approx --input " + data_file("sample_2x2x2.json") + " --ranks 9,1,1 --out " + dir, dir);
  EXPECT_EQ(bad_ranks.code, 1);
  EXPECT_NE(bad_ranks.err.find("rank"), std::string::npos);
}

TEST(Cli, ConfigFileYieldsToExplicitFlags) {
  const std::string dir = fresh_dir("config");
  gt::atomic_write_file(dir + "/cfg.json", R"({"method":"newton","seed":5})");
  const std::string base = "select --input " + data_file("select_2x2.csv") + " --ranks 1,1 --config " + dir +
                           "/cfg.json --out " + dir;
  ASSERT_EQ(run_cli(base, dir).code, 0);
  json res = result_json(dir);
  EXPECT_EQ(res.at("method"), "newton");
  EXPECT_EQ(res.at("seed").get<int>(), 5);

  ASSERT_EQ(run_cli(base + " --method rcg", dir).code, 0);
  res = result_json(dir);
  EXPECT_EQ(res.at("method"), "rcg");
  EXPECT_EQ(res.at("seed").get<int>(), 5);
}

TEST(Cli, CheckBatteryPassesAndToleranceHookTrips) {
  const std::string dir = fresh_dir("check");
  const auto ok = run_cli("check", dir);
  EXPECT_EQ(ok.code, 0) << ok.out;
  EXPECT_EQ(ok.out.find("FAIL"), std::string::npos);
  EXPECT_NE(ok.out.find("checks passed"), std::string::npos);

  const auto hook = run_cli("check --tolerance-scale 1e-9", dir);
  EXPECT_EQ(hook.code, 1);
  EXPECT_NE(hook.out.find("FAIL"), std::string::npos);
}

}  // namespace
