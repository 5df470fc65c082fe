// ciro: circularity of the solids material network and the disassembly
// surrogate that feeds it.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "ciro/cli.hpp"

#ifndef CIRO_SCENARIO_DIR
#define CIRO_SCENARIO_DIR "scenarios"
#endif

int main(int argc, char** argv) {
  namespace cli = ciro::cli;

  CLI::App app{"ciro - time-window circularity of thermodynamical material networks"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string scenario;
  std::uint64_t seed = 0;
  std::string csv;
  std::optional<double> delta;
  app.add_option("--scenario", scenario, "Scenario JSON file");
  app.add_option("--seed", seed, "Random seed");
  app.add_option("--csv", csv, "Write CSV output to this file");
  app.add_option("--delta", delta, "Flow-to-mass interval in seconds (overrides the scenario)");

  auto* validate = app.add_subcommand("validate", "Parse and validate a scenario");

  auto* lambda = app.add_subcommand("lambda", "Report circularity for a scenario");
  std::string schedule_csv;
  lambda->add_option("--schedule-csv", schedule_csv, "Write the batch mass schedule as CSV");

  auto* sweep = app.add_subcommand("sweep", "Sweep s, T_d or m0 and print CSV");
  cli::SweepOptions sweep_opt;
  sweep->add_option("--var", sweep_opt.var, "s, T_d or m0")->required();
  sweep->add_option("--from", sweep_opt.from, "First value")->required();
  sweep->add_option("--to", sweep_opt.to, "Last value")->required();
  sweep->add_option("--steps", sweep_opt.steps, "Number of grid points (>= 2)");

  auto* train = app.add_subcommand("train", "Train a tabular policy on a disassembly task");
  cli::TrainOptions train_opt;
  std::string policy_out;
  std::optional<std::uint64_t> train_steps;
  train->add_option("--task", train_opt.task, "Task name")->required();
  train->add_option("--steps", train_steps, "Training step budget");
  train->add_option("--out", policy_out, "Policy file to write");

  auto* eval = app.add_subcommand("eval", "Evaluate a policy over 100 episodes");
  cli::EvalOptions eval_opt;
  std::string eval_task;
  eval->add_option("--policy", eval_opt.policy, "Policy file, 'oracle' or 'random'")->required();
  eval->add_option("--task", eval_task, "Task name");
  eval->add_option("--episodes", eval_opt.episodes, "Evaluation episodes");

  auto* pipeline = app.add_subcommand("pipeline", "Train, evaluate and compute lambda");
  cli::PipelineOptions pipe_opt;
  std::optional<std::uint64_t> pipe_steps;
  pipeline->add_option("--task", pipe_opt.task, "Task name")->required();
  pipeline->add_option("--steps", pipe_steps, "Training step budget");

  auto* reproduce = app.add_subcommand("reproduce-tables", "Check lambda against the published tables");
  std::string scenarios_dir = CIRO_SCENARIO_DIR;
  reproduce->add_option("--scenarios-dir", scenarios_dir, "Directory holding tables.json");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return cli::kExitInput;
  }

  cli::Streams io{std::cout, std::cerr};
  auto need_scenario = [&]() {
    if (scenario.empty()) std::cerr << "error: --scenario is required\n";
    return !scenario.empty();
  };
  auto opt_path = [](const std::string& s) -> std::optional<std::filesystem::path> {
    if (s.empty()) return std::nullopt;
    return std::filesystem::path(s);
  };

  if (validate->parsed()) {
    if (!need_scenario()) return cli::kExitInput;
    return cli::cmd_validate({scenario}, io);
  }
  if (lambda->parsed()) {
    if (!need_scenario()) return cli::kExitInput;
    return cli::cmd_lambda({scenario, delta, opt_path(csv), opt_path(schedule_csv), seed}, io);
  }
  if (sweep->parsed()) {
    if (!need_scenario()) return cli::kExitInput;
    sweep_opt.scenario = scenario;
    sweep_opt.delta = delta;
    sweep_opt.seed = seed;
    return cli::cmd_sweep(sweep_opt, io);
  }
  if (train->parsed()) {
    train_opt.steps = train_steps;
    train_opt.seed = seed;
    train_opt.out = opt_path(policy_out);
    train_opt.csv = opt_path(csv);
    return cli::cmd_train(train_opt, io);
  }
  if (eval->parsed()) {
    if (!eval_task.empty()) eval_opt.task = eval_task;
    eval_opt.seed = seed;
    return cli::cmd_eval(eval_opt, io);
  }
  if (pipeline->parsed()) {
    pipe_opt.steps = pipe_steps;
    pipe_opt.seed = seed;
    pipe_opt.scenario = opt_path(scenario);
    pipe_opt.delta = delta;
    return cli::cmd_pipeline(pipe_opt, io);
  }
  if (reproduce->parsed()) return cli::cmd_reproduce_tables({scenarios_dir}, io);
  return cli::kExitInput;
}
