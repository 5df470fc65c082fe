#include <gtest/gtest.h>

#include <array>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "ciro/cli.hpp"

using namespace ciro;
using namespace ciro::cli;

namespace {

const fs::path kDir = CIRO_SCENARIO_DIR;

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

template <class Opt, class Fn>
Outcome call(Fn fn, const Opt& opt) {
  std::ostringstream out, err;
  const int code = fn(opt, Streams{out, err});
  return {code, out.str(), err.str()};
}

Outcome lambda_of(const fs::path& scenario) { return call(cmd_lambda, LambdaOptions{scenario, {}, {}, {}, 0}); }

// runs the built binary and captures stdout
Outcome shell(const std::string& args) {
  const std::string cmd = std::string(CIRO_CLI_PATH) + " " + args + " 2>/dev/null";
  FILE* p = popen(cmd.c_str(), "r");
  std::string out;
  std::array<char, 512> buf{};
  while (std::fgets(buf.data(), static_cast<int>(buf.size()), p)) out += buf.data();
  const int status = pclose(p);
  return {WEXITSTATUS(status), out, {}};
}

fs::path temp_dir(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / ("ciro_" + name + "_" + std::to_string(::getpid()));
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

std::vector<std::string> lines(const std::string& s) {
  std::vector<std::string> v;
  std::istringstream in(s);
  for (std::string l; std::getline(in, l);) v.push_back(l);
  return v;
}

}  // namespace

TEST(Cli, LambdaTables) {
  Outcome r = lambda_of(kDir / "table2_sac.json");
  EXPECT_EQ(r.code, kExitOk);
  EXPECT_NE(r.out.find("lambda = -2.1\n"), std::string::npos) << r.out;
  r = lambda_of(kDir / "table5.json");
  EXPECT_NE(r.out.find("lambda = -7.2\n"), std::string::npos) << r.out;
  r = lambda_of(kDir / "zero_mass.json");
  EXPECT_NE(r.out.find("lambda = 0.0\n"), std::string::npos) << r.out;
}

TEST(Cli, LambdaOracleScenario) {
  const Outcome r = lambda_of(kDir / "oracle_two_parts.json");
  EXPECT_EQ(r.code, kExitOk);
  EXPECT_NE(r.out.find("lambda = -2.1\n"), std::string::npos) << r.out;
}

TEST(Cli, LambdaCsvFiles) {
  const fs::path d = temp_dir("csv");
  LambdaOptions opt{kDir / "table2_sac.json", {}, d / "r.csv", d / "s.csv", 0};
  EXPECT_EQ(call(cmd_lambda, opt).code, kExitOk);
  std::ifstream f(d / "s.csv");
  std::string header;
  std::getline(f, header);
  EXPECT_EQ(header, "time_s,mass_kg");
  std::ifstream g(d / "r.csv");
  std::getline(g, header);
  EXPECT_EQ(header, "field,value");
  fs::remove_all(d);
}

TEST(Cli, LambdaRejectsMissingFile) {
  const Outcome r = lambda_of(kDir / "does_not_exist.json");
  EXPECT_EQ(r.code, kExitInput);
  EXPECT_FALSE(r.err.empty());
}

TEST(Cli, ValidatePrintsCounts) {
  const Outcome r = call(cmd_validate, ValidateOptions{kDir / "table3.json"});
  EXPECT_EQ(r.code, kExitOk);
  EXPECT_NE(r.out.find("n_v = 3, n_a = 3, n_c = 6"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("solids topology: yes"), std::string::npos);
}

TEST(Cli, ReproduceTables) {
  const Outcome r = call(cmd_reproduce_tables, ReproduceOptions{kDir});
  EXPECT_EQ(r.code, kExitOk) << r.out;
  const auto rows = reproduce_tables(kDir);
  EXPECT_EQ(rows.size(), 5u);
  for (const auto& row : rows) EXPECT_TRUE(row.pass);
  EXPECT_NE(r.out.find("5 distinct rows, all PASS"), std::string::npos);
}

TEST(Cli, ReproduceTablesDetectsPerturbation) {
  const fs::path d = temp_dir("perturbed");
  for (const auto& e : fs::directory_iterator(kDir)) fs::copy_file(e.path(), d / e.path().filename());
  // s = 0 row: the reuse time sets alpha there
  nlohmann::json j = nlohmann::json::parse(std::ifstream(d / "table2_td3.json"));
  j["timing"]["T_r"] = 2592000.0 * 1.1;
  std::ofstream(d / "table2_td3.json") << j.dump(2);
  const Outcome r = call(cmd_reproduce_tables, ReproduceOptions{d});
  EXPECT_EQ(r.code, kExitMismatch);
  EXPECT_NE(r.out.find("FAIL"), std::string::npos);
  EXPECT_NE(r.out.find("diff:"), std::string::npos);
  fs::remove_all(d);
}

TEST(Cli, ReproduceTablesMissingDir) {
  EXPECT_EQ(call(cmd_reproduce_tables, ReproduceOptions{kDir / "nope"}).code, kExitInput);
}

TEST(Cli, SweepSuccessIncreasing) {
  SweepOptions opt;
  opt.scenario = kDir / "table3.json";
  opt.var = "s";
  opt.from = 0;
  opt.to = 100;
  opt.steps = 11;
  const Outcome r = call(cmd_sweep, opt);
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const auto ls = lines(r.out);
  ASSERT_EQ(ls.size(), 12u);
  double prev = -1e300;
  for (std::size_t i = 1; i < ls.size(); ++i) {
    std::stringstream row(ls[i]);
    std::string var, value, exact;
    std::getline(row, var, ',');
    std::getline(row, value, ',');
    std::getline(row, exact, ',');
    EXPECT_EQ(var, "s");
    EXPECT_GT(std::stod(exact), prev);
    prev = std::stod(exact);
  }
}

TEST(Cli, SweepDisassemblyTimeIsFlat) {
  SweepOptions opt;
  opt.scenario = kDir / "table2_sac.json";
  opt.var = "T_d";
  opt.from = 0.4;
  opt.to = 86400;
  opt.steps = 5;
  const Outcome r = call(cmd_sweep, opt);
  ASSERT_EQ(r.code, kExitOk) << r.err;
  std::vector<double> v;
  for (std::size_t i = 1; i < lines(r.out).size(); ++i) {
    std::stringstream row(lines(r.out)[i]);
    std::string cell;
    for (int k = 0; k < 3; ++k) std::getline(row, cell, ',');
    v.push_back(std::stod(cell));
  }
  ASSERT_EQ(v.size(), 5u);
  EXPECT_LT(*std::max_element(v.begin(), v.end()) - *std::min_element(v.begin(), v.end()), 0.1);
}

TEST(Cli, SweepRejectsBadInput) {
  SweepOptions opt;
  opt.scenario = kDir / "table3.json";
  opt.var = "s";
  opt.steps = 1;
  EXPECT_EQ(call(cmd_sweep, opt).code, kExitInput);
  opt.steps = 3;
  opt.var = "speed";
  EXPECT_EQ(call(cmd_sweep, opt).code, kExitInput);
}

TEST(Cli, PipelineZeroSteps) {
  PipelineOptions opt;
  opt.task = "TwoPartsOneTarget";
  opt.steps = 0;
  const Outcome r = call(cmd_pipeline, opt);
  EXPECT_EQ(r.code, kExitOk) << r.err;
  EXPECT_NE(r.out.find("zeta=0 "), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("lambda_rounded=-3.1"), std::string::npos) << r.out;
}

TEST(Cli, PipelineUnknownTask) {
  PipelineOptions opt;
  opt.task = "Nope";
  EXPECT_EQ(call(cmd_pipeline, opt).code, kExitInput);
}

TEST(Cli, EvalOracle) {
  EvalOptions opt;
  opt.policy = "oracle";
  opt.task = "FourPartsChassis";
  const Outcome r = call(cmd_eval, opt);
  EXPECT_EQ(r.code, kExitOk) << r.err;
  EXPECT_NE(r.out.find(" s=100 "), std::string::npos) << r.out;
  opt.task.reset();
  EXPECT_EQ(call(cmd_eval, opt).code, kExitInput);
}

TEST(Cli, TrainSaveEval) {
  const fs::path d = temp_dir("train");
  TrainOptions t;
  t.task = "TwoPartsOneTarget";
  t.seed = 2;
  t.out = d / "p.bin";
  t.csv = d / "log.csv";
  const Outcome tr = call(cmd_train, t);
  ASSERT_EQ(tr.code, kExitOk) << tr.err;
  EvalOptions e;
  e.policy = (d / "p.bin").string();
  const Outcome ev = call(cmd_eval, e);
  EXPECT_EQ(ev.code, kExitOk) << ev.err;
  EXPECT_NE(ev.out.find("task=TwoPartsOneTarget"), std::string::npos);
  e.task = "FourPartsChassis";
  EXPECT_EQ(call(cmd_eval, e).code, kExitInput);
  fs::remove_all(d);
}

TEST(CliBinary, ReproduceTablesExitCode) {
  const Outcome r = shell("reproduce-tables --scenarios-dir " + kDir.string());
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("all PASS"), std::string::npos);
}

TEST(CliBinary, LambdaIsByteStable) {
  const std::string args = "lambda --scenario " + (kDir / "table2_tqc.json").string();
  const Outcome a = shell(args);
  const Outcome b = shell(args);
  EXPECT_EQ(a.code, 0);
  EXPECT_EQ(a.out, b.out);
  EXPECT_NE(a.out.find("lambda = -2.3"), std::string::npos) << a.out;
}

TEST(CliBinary, UsageErrors) {
  EXPECT_EQ(shell("sweep --scenario " + (kDir / "table3.json").string() + " --var s --steps 1").code, 2);
  EXPECT_EQ(shell("lambda --bogus").code, 2);
  EXPECT_EQ(shell("reproduce-tables --scenarios-dir /nonexistent").code, 2);
}
