#pragma once

// Command implementations behind the `ciro` executable. Each command writes
// to the given streams and returns the process exit code:
//   0 success, 1 table reproduction mismatch, 2 input error.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <tuple>
#include <vector>

#include "json.hpp"

#include "ciro/circularity.hpp"
#include "ciro/disassembler.hpp"
#include "ciro/error.hpp"
#include "ciro/flows.hpp"
#include "ciro/network.hpp"
#include "ciro/scenario.hpp"

namespace ciro::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitMismatch = 1;
inline constexpr int kExitInput = 2;

namespace fs = std::filesystem;

struct Streams {
  std::ostream& out;
  std::ostream& err;
};

inline std::string fmt(double x) { return detail::fmt_g(x); }

inline std::string fmt_fixed(double x, int decimals) { return detail::fmt_fixed(x, decimals); }

inline void report_error(std::ostream& err, const Error& e) { err << "error: " << e.what() << '\n'; }

/// Table I timing with the two materials of the tasks: beta_1 (c = 0.1) and
/// beta_2 (c = 0.95) on the solids network.
inline ScenarioFile default_scenario(double beta1_mass = 1.0, double beta2_mass = 1.0) {
  ScenarioFile sc;
  sc.compartments = solids_network().compartments();
  sc.materials = {{"beta_1", 0.1, beta1_mass}, {"beta_2", 0.95, beta2_mass}};
  sc.outcome = DisassemblyOutcome{};
  return sc;
}

inline ScenarioFile load_scenario(const fs::path& path, std::optional<double> delta) {
  ScenarioFile sc = parse_scenario(path);
  if (delta) {
    if (!(*delta > 0.0) || !std::isfinite(*delta)) {
      throw Error(ErrorCode::InvalidParameter, "--delta must be > 0");
    }
    sc.params.delta = *delta;
  }
  return sc;
}

/// Evaluates a policy reference: "oracle", "random" or a policy file.
inline disassembly::Evaluation evaluate_reference(const PolicyReference& ref, const fs::path& base_dir,
                                                  std::uint64_t seed) {
  using namespace disassembly;
  const TaskSpec spec = make_task(ref.task);
  if (ref.policy == "oracle") {
    OraclePolicy oracle;
    return evaluate(oracle, spec, ref.episodes);
  }
  if (ref.policy == "random") return evaluate(RandomPolicy(seed), spec, ref.episodes);
  fs::path file = ref.policy;
  if (file.is_relative()) file = base_dir / file;
  const QPolicy policy = load_policy(file.string());
  if (policy.task != ref.task) {
    throw Error(ErrorCode::InvalidParameter, "policy was trained on " + std::string(to_string(policy.task)) +
                                                 ", not " + std::string(to_string(ref.task)));
  }
  return evaluate(policy, spec, ref.episodes);
}

inline DisassemblyOutcome resolve_outcome(const ScenarioFile& sc, const fs::path& scenario_path, std::uint64_t seed) {
  if (const auto* lit = std::get_if<DisassemblyOutcome>(&sc.outcome)) return *lit;
  return evaluate_reference(std::get<PolicyReference>(sc.outcome), scenario_path.parent_path(), seed).outcome;
}

// ---------------------------------------------------------------------------

struct ValidateOptions {
  fs::path scenario;
};

inline int cmd_validate(const ValidateOptions& opt, Streams io) {
  try {
    const ScenarioFile sc = parse_scenario(opt.scenario);
    const TMNetwork net = sc.network();
    io.out << "scenario: " << opt.scenario.string() << '\n'
           << "network: n_v = " << net.node_count() << ", n_a = " << net.arc_count()
           << ", n_c = " << net.compartment_count() << '\n';
    for (const auto& [node, arcs] : compartmental_digraph(net)) {
      io.out << "  c" << node << " (" << to_string(net.at(node).role) << ") ->";
      if (arcs.empty()) io.out << " none";
      for (const auto& a : arcs) io.out << " c" << a.arc << ":c" << a.sink;
      io.out << '\n';
    }
    const TopologyCheck check = validate_solids_topology(net);
    io.out << "solids topology: " << (check.ok ? "yes" : "no") << '\n';
    for (const auto& r : check.reasons) io.out << "  " << r << '\n';
    io.out << "weighted initial mass m0 [kg]: " << fmt(sc.initial_mass()) << '\n' << "valid\n";
    return kExitOk;
  } catch (const Error& e) {
    report_error(io.err, e);
    return kExitInput;
  }
}

struct LambdaOptions {
  fs::path scenario;
  std::optional<double> delta;
  std::optional<fs::path> csv;
  std::optional<fs::path> schedule_csv;
  std::uint64_t seed = 0;
};

inline int cmd_lambda(const LambdaOptions& opt, Streams io) {
  CircularityReport report;
  int rounding = 1;
  try {
    const ScenarioFile sc = load_scenario(opt.scenario, opt.delta);
    const TopologyCheck check = validate_solids_topology(sc.network());
    if (!check) {
      std::string why;
      for (const auto& r : check.reasons) why += "; " + r;
      throw Error(ErrorCode::ValidationError, "network is not the solids chain" + why);
    }
    const DisassemblyOutcome outcome = resolve_outcome(sc, opt.scenario, opt.seed);
    report = circularity_report(sc.params, sc.initial_mass(), outcome, sc.mu_mode);
    rounding = sc.rounding;
  } catch (const Error& e) {
    report_error(io.err, e);
    return kExitInput;
  }
  write_report_text(io.out, report, rounding);
  if (opt.csv) {
    std::ofstream f(*opt.csv);
    if (!f) {
      io.err << "error: cannot write " << opt.csv->string() << '\n';
      return kExitInput;
    }
    write_report_csv(f, report);
  }
  if (opt.schedule_csv) {
    std::ofstream f(*opt.schedule_csv);
    if (!f) {
      io.err << "error: cannot write " << opt.schedule_csv->string() << '\n';
      return kExitInput;
    }
    write_schedule_csv(f, report.schedule);
  }
  return kExitOk;
}

struct SweepOptions {
  fs::path scenario;
  std::string var;
  double from = 0.0;
  double to = 100.0;
  std::size_t steps = 11;
  std::optional<double> delta;
  std::uint64_t seed = 0;
};

inline int cmd_sweep(const SweepOptions& opt, Streams io) {
  std::vector<SweepRow> rows;
  try {
    const SweepVar var = parse_sweep_var(opt.var);
    if (opt.steps < 2) throw Error(ErrorCode::UnknownVariable, "--steps must be >= 2");
    const ScenarioFile sc = load_scenario(opt.scenario, opt.delta);
    const DisassemblyOutcome base = resolve_outcome(sc, opt.scenario, opt.seed);
    SweepGrid grid;
    const std::vector<double> values = linspace(opt.from, opt.to, opt.steps);
    switch (var) {
      case SweepVar::Success: grid.success = values; break;
      case SweepVar::DisassemblyTime: grid.disassembly_time = values; break;
      case SweepVar::InitialMass: grid.initial_mass = values; break;
    }
    rows = sensitivity_sweep(sc.params, sc.initial_mass(), base, grid);
  } catch (const Error& e) {
    report_error(io.err, e);
    return kExitInput;
  }
  write_sweep_csv(io.out, rows);
  return kExitOk;
}

struct TrainOptions {
  std::string task;
  std::optional<std::uint64_t> steps;  // default budget of the task when empty
  std::uint64_t seed = 0;
  std::optional<fs::path> out;  // policy file
  std::optional<fs::path> csv;  // training log
};

inline int cmd_train(const TrainOptions& opt, Streams io) {
  using namespace disassembly;
  const auto kind = parse_task(opt.task);
  if (!kind) {
    io.err << "error: unknown task '" << opt.task << "'\n";
    return kExitInput;
  }
  try {
    Hyperparams hp = default_hyperparams(*kind);
    if (opt.steps) hp.steps = *opt.steps;
    DisassemblyEnv env = make_env(make_task(*kind), opt.seed);
    const TrainResult r = train(env, hp, opt.seed);
    if (opt.out) save_policy(opt.out->string(), r.policy);
    if (opt.csv) {
      std::ofstream f(*opt.csv);
      if (!f) throw Error(ErrorCode::ParseError, "cannot write " + opt.csv->string());
      write_training_log(f, r.stats);
    }
    const Evaluation& ev = r.stats.final_evaluation;
    io.out << "task=" << to_string(*kind) << " steps=" << hp.steps << " seed=" << opt.seed
           << " episodes=" << r.stats.episodes.size() << " r_s=" << fmt(r.stats.initial_reward)
           << " r_e=" << fmt(r.stats.final_reward) << " zeta=" << fmt(r.stats.progress)
           << " s=" << fmt(ev.outcome.success) << " T_d=" << fmt(ev.outcome.disassembly_time) << '\n';
  } catch (const Error& e) {
    report_error(io.err, e);
    return kExitInput;
  }
  return kExitOk;
}

struct EvalOptions {
  std::string policy;  // "oracle", "random" or a policy file
  std::optional<std::string> task;
  int episodes = disassembly::kEvalEpisodes;
  std::uint64_t seed = 0;
};

inline int cmd_eval(const EvalOptions& opt, Streams io) {
  using namespace disassembly;
  try {
    PolicyReference ref;
    ref.policy = opt.policy;
    ref.episodes = opt.episodes;
    if (opt.task) {
      const auto kind = parse_task(*opt.task);
      if (!kind) throw Error(ErrorCode::InvalidParameter, "unknown task '" + *opt.task + "'");
      ref.task = *kind;
    } else if (opt.policy == "oracle" || opt.policy == "random") {
      throw Error(ErrorCode::InvalidParameter, "--task is required with --policy " + opt.policy);
    } else {
      ref.task = load_policy(opt.policy).task;
    }
    if (ref.episodes < 1) throw Error(ErrorCode::InvalidParameter, "--episodes must be >= 1");
    const Evaluation ev = evaluate_reference(ref, fs::current_path(), opt.seed);
    io.out << "task=" << to_string(ref.task) << " policy=" << opt.policy << " episodes=" << ev.episodes
           << " successes=" << ev.successes << " s=" << fmt(ev.outcome.success)
           << " T_d=" << fmt(ev.outcome.disassembly_time) << " mean_return=" << fmt(ev.mean_return) << '\n';
  } catch (const Error& e) {
    report_error(io.err, e);
    return kExitInput;
  }
  return kExitOk;
}

struct PipelineOptions {
  std::string task;
  std::optional<std::uint64_t> steps;
  std::uint64_t seed = 0;
  std::optional<fs::path> scenario;  // timing and materials; task defaults when absent
  std::optional<double> delta;
};

struct PipelineResult {
  disassembly::TrainingStats stats;
  DisassemblyOutcome outcome;
  double lambda = 0.0;
  double initial_mass = 0.0;
};

/// Train, evaluate, then evaluate lambda in closed form.
inline PipelineResult run_pipeline(disassembly::TaskKind kind, std::uint64_t steps, std::uint64_t seed,
                                   const ScenarioFile& sc) {
  using namespace disassembly;
  Hyperparams hp = default_hyperparams(kind);
  hp.steps = steps;
  DisassemblyEnv env = make_env(make_task(kind), seed);
  PipelineResult r;
  r.stats = train(env, hp, seed).stats;
  r.outcome = r.stats.final_evaluation.outcome;
  r.initial_mass = sc.initial_mass();
  r.lambda = lambda_closed_form(sc.params, r.initial_mass, r.outcome).lambda;
  return r;
}

/// Scenario implied by a task: Table I timing, beta masses of its parts.
inline ScenarioFile task_scenario(disassembly::TaskKind kind) {
  const auto [b1, b2] = disassembly::make_task(kind).material_masses();
  return default_scenario(b1, b2);
}

inline int cmd_pipeline(const PipelineOptions& opt, Streams io) {
  using namespace disassembly;
  const auto kind = parse_task(opt.task);
  if (!kind) {
    io.err << "error: unknown task '" << opt.task << "'\n";
    return kExitInput;
  }
  try {
    const ScenarioFile sc = opt.scenario ? load_scenario(*opt.scenario, opt.delta) : task_scenario(*kind);
    const std::uint64_t steps = opt.steps.value_or(default_budget(*kind));
    const PipelineResult r = run_pipeline(*kind, steps, opt.seed, sc);
    io.out << "task=" << to_string(*kind) << " steps=" << steps << " seed=" << opt.seed
           << " r_s=" << fmt(r.stats.initial_reward) << " r_e=" << fmt(r.stats.final_reward)
           << " zeta=" << fmt(r.stats.progress) << " s=" << fmt(r.outcome.success)
           << " T_d=" << fmt(r.outcome.disassembly_time) << " m0=" << fmt(r.initial_mass)
           << " lambda=" << fmt(r.lambda) << " lambda_rounded=" << fmt_fixed(r.lambda, sc.rounding) << '\n';
  } catch (const Error& e) {
    report_error(io.err, e);
    return kExitInput;
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// table reproduction

struct TableEntry {
  std::string table;
  std::string controller;
  std::string scenario;
  double expected = 0.0;
};

struct ReproductionRow {
  double initial_mass = 0.0;
  DisassemblyOutcome outcome;
  std::vector<std::string> labels;  // table rows sharing these inputs
  double expected = 0.0;
  double computed = 0.0;  // unrounded closed form
  bool pass = false;
};

/// Reads `tables.json` in `dir` and evaluates every listed scenario. Rows with
/// identical (m0, s, T_d) are collapsed, in order of first appearance.
inline std::vector<ReproductionRow> reproduce_tables(const fs::path& dir) {
  using nlohmann::json;
  const fs::path manifest = dir / "tables.json";
  std::ifstream in(manifest);
  if (!in) throw Error(ErrorCode::ParseError, "cannot read " + manifest.string());
  json root;
  try {
    root = json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, manifest.string() + ": " + e.what());
  }
  std::vector<TableEntry> entries;
  try {
    for (const auto& e : root.at("rows")) {
      entries.push_back({e.at("table").get<std::string>(), e.at("controller").get<std::string>(),
                         e.at("scenario").get<std::string>(), e.at("expected_lambda").get<double>()});
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, manifest.string() + ": " + e.what());
  }
  if (entries.empty()) throw Error(ErrorCode::ParseError, manifest.string() + ": no rows");

  std::vector<ReproductionRow> rows;
  std::map<std::tuple<double, double, double>, std::size_t> index;
  for (const auto& e : entries) {
    const ScenarioFile sc = parse_scenario(dir / e.scenario);
    const auto* lit = std::get_if<DisassemblyOutcome>(&sc.outcome);
    if (!lit) throw Error(ErrorCode::ValidationError, e.scenario + ": table scenarios need a literal outcome");
    const double m0 = sc.initial_mass();
    const double lambda = lambda_closed_form(sc.params, m0, *lit).lambda;
    const auto key = std::make_tuple(m0, lit->success, lit->disassembly_time);
    const std::string label = "Table " + e.table + " " + e.controller;
    const bool pass = round_to(lambda, 1) == round_to(e.expected, 1);
    if (auto it = index.find(key); it != index.end()) {
      ReproductionRow& row = rows[it->second];
      row.labels.push_back(label);
      row.pass = row.pass && pass && round_to(row.expected, 1) == round_to(e.expected, 1);
      continue;
    }
    index.emplace(key, rows.size());
    rows.push_back({m0, *lit, {label}, e.expected, lambda, pass});
  }
  return rows;
}

struct ReproduceOptions {
  fs::path scenarios_dir;
};

inline int cmd_reproduce_tables(const ReproduceOptions& opt, Streams io) {
  std::vector<ReproductionRow> rows;
  try {
    rows = reproduce_tables(opt.scenarios_dir);
  } catch (const Error& e) {
    report_error(io.err, e);
    return kExitInput;
  }
  bool all = true;
  char line[160];
  std::snprintf(line, sizeof line, "%-8s %-6s %-10s %-9s %-9s %-12s %s\n", "m0_kg", "s", "T_d_s", "expected",
                "computed", "lambda", "status");
  io.out << line;
  for (const auto& r : rows) {
    std::snprintf(line, sizeof line, "%-8s %-6s %-10s %-9s %-9s %-12.6f %s\n", fmt(r.initial_mass).c_str(),
                  fmt(r.outcome.success).c_str(), fmt(r.outcome.disassembly_time).c_str(),
                  fmt_fixed(r.expected, 1).c_str(), fmt_fixed(r.computed, 1).c_str(), r.computed,
                  r.pass ? "PASS" : "FAIL");
    io.out << line;
    std::string labels;
    for (const auto& l : r.labels) labels += (labels.empty() ? "" : ", ") + l;
    io.out << "    " << labels << '\n';
    if (!r.pass) {
      all = false;
      io.out << "    diff: expected " << fmt_fixed(r.expected, 1) << ", got " << fmt_fixed(r.computed, 1) << " ("
             << fmt(r.computed) << ")\n";
    }
  }
  io.out << rows.size() << " distinct rows, " << (all ? "all PASS" : "mismatch") << '\n';
  return all ? kExitOk : kExitMismatch;
}

}  // namespace ciro::cli
