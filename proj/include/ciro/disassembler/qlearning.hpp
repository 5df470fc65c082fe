#pragma once

// Goal-conditioned tabular Q-learning with final-state goal relabeling.
//
// Values are indexed by (state, goal, action). After every episode the
// transitions are replayed backwards twice: once with the episode goal and
// once with the goal the episode actually achieved at its last state, with
// rewards recomputed for that goal. Time-limit and collision truncations
// bootstrap from the next state; only reaching the goal is terminal.

#include <algorithm>
#include <array>
#include <cstdint>
#include <ostream>
#include <random>
#include <unordered_map>
#include <vector>

#include "ciro/disassembler/env.hpp"
#include "ciro/disassembler/evaluate.hpp"

namespace ciro::disassembly {

using ActionValues = std::array<double, kActionCount>;

struct Hyperparams {
  std::uint64_t steps = 200'000;
  double learning_rate = 0.5;
  double discount = 0.95;
  double epsilon_start = 1.0;
  double epsilon_end = 0.05;
  double epsilon_decay_fraction = 0.5;  // share of the budget over which epsilon decays linearly
  bool goal_relabeling = true;
  int eval_episodes = kEvalEpisodes;
  std::uint64_t eval_seed = kEvalSeed;
};

/// Step budgets per task, in the order of the task list.
inline std::uint64_t default_budget(TaskKind kind) {
  switch (kind) {
    case TaskKind::TwoPartsOneTarget: return 200'000;
    case TaskKind::TwoPartsTwoTargets: return 150'000;
    case TaskKind::FourPartsTwoTargetsTwoObstacles: return 200'000;
    case TaskKind::FourPartsChassis: return 250'000;
  }
  return 200'000;
}

inline Hyperparams default_hyperparams(TaskKind kind) {
  Hyperparams hp;
  hp.steps = default_budget(kind);
  return hp;
}

struct QPolicy {
  TaskKind task = TaskKind::TwoPartsOneTarget;
  double learning_rate = 0.5;
  double discount = 0.95;
  double epsilon_start = 1.0;
  double epsilon_end = 0.05;
  double epsilon_decay_fraction = 0.5;
  std::unordered_map<std::uint64_t, ActionValues> table;

  double epsilon(std::uint64_t step, std::uint64_t budget) const {
    const double horizon = epsilon_decay_fraction * static_cast<double>(budget);
    if (horizon <= 0.0 || static_cast<double>(step) >= horizon) return epsilon_end;
    return epsilon_start + (epsilon_end - epsilon_start) * static_cast<double>(step) / horizon;
  }

  ActionValues values(std::uint64_t key) const {
    const auto it = table.find(key);
    return it == table.end() ? ActionValues{} : it->second;
  }

  /// Highest-valued action; ties go to the lowest action index.
  Action greedy(const EnvState& s, const Goal& g) const {
    const ActionValues q = values(DisassemblyEnv::encode(s, g));
    return static_cast<Action>(std::max_element(q.begin(), q.end()) - q.begin());
  }

  Action operator()(const DisassemblyEnv&, const EnvState& s, const Goal& g) const { return greedy(s, g); }

  friend bool operator==(const QPolicy&, const QPolicy&) = default;
};

struct EpisodeLog {
  std::uint64_t step = 0;  // global step count at the end of the episode
  std::uint64_t episode = 0;
  int length = 0;
  double episode_return = 0.0;
  friend bool operator==(const EpisodeLog&, const EpisodeLog&) = default;
};

struct TrainingStats {
  double initial_reward = 0.0;  // r_s: mean evaluation return before training
  double final_reward = 0.0;    // r_e: same after training
  double progress = 0.0;        // zeta = r_e - r_s
  std::vector<EpisodeLog> episodes;
  std::uint64_t seed = 0;
  std::uint64_t steps = 0;
  Evaluation final_evaluation;

  /// Mean episode length over the first or last `fraction` of training episodes.
  double mean_length(double fraction, bool from_end) const {
    if (episodes.empty()) return 0.0;
    const auto n = std::max<std::size_t>(1, static_cast<std::size_t>(fraction * episodes.size()));
    double sum = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      sum += episodes[from_end ? episodes.size() - 1 - k : k].length;
    }
    return sum / static_cast<double>(n);
  }
};

struct TrainResult {
  QPolicy policy;
  TrainingStats stats;
};

namespace detail {

struct Transition {
  EnvState from;
  Action action;
  EnvState to;
};

inline void td_update(QPolicy& q, const DisassemblyEnv& env, const Transition& t, const Goal& g) {
  const double reward = env.reward(t.to, g);
  const bool terminal = !t.to.collided && env.goal_met(t.to, g);
  double target = reward;
  if (!terminal) {
    const ActionValues next = q.values(DisassemblyEnv::encode(t.to, g));
    target += q.discount * *std::max_element(next.begin(), next.end());
  }
  double& value = q.table[DisassemblyEnv::encode(t.from, g)][static_cast<int>(t.action)];
  value += q.learning_rate * (target - value);
}

inline void replay_backwards(QPolicy& q, const DisassemblyEnv& env, const std::vector<Transition>& episode,
                             const Goal& g) {
  for (auto it = episode.rbegin(); it != episode.rend(); ++it) {
    if (env.goal_met(it->from, g)) continue;  // already absorbed under this goal
    td_update(q, env, *it, g);
  }
}

}  // namespace detail

/// Trains a fresh policy on `env`'s task. r_s and r_e come from greedy
/// evaluation before and after training on the same evaluation layouts.
inline TrainResult train(DisassemblyEnv& env, const Hyperparams& hp, std::uint64_t seed) {
  TrainResult out;
  QPolicy& q = out.policy;
  q.task = env.spec().kind;
  q.learning_rate = hp.learning_rate;
  q.discount = hp.discount;
  q.epsilon_start = hp.epsilon_start;
  q.epsilon_end = hp.epsilon_end;
  q.epsilon_decay_fraction = hp.epsilon_decay_fraction;

  TrainingStats& stats = out.stats;
  stats.seed = seed;
  stats.steps = hp.steps;
  stats.initial_reward = evaluate(q, env.spec(), hp.eval_episodes, hp.eval_seed).mean_return;

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  std::uniform_int_distribution<int> random_action(0, kActionCount - 1);
  env.reseed(seed);

  std::vector<detail::Transition> episode;
  std::uint64_t step = 0;
  while (step < hp.steps) {
    EnvState s = env.reset();
    const Goal goal = env.goal();
    episode.clear();
    double ret = 0.0;
    bool done = env.goal_met(s, goal);
    while (!done && step < hp.steps) {
      const double eps = q.epsilon(step, hp.steps);
      const Action a = coin(rng) < eps ? static_cast<Action>(random_action(rng)) : q.greedy(s, goal);
      const StepResult r = env.step(a);
      ++step;
      ret += r.reward;
      episode.push_back({s, a, r.state});
      detail::td_update(q, env, episode.back(), goal);
      s = r.state;
      done = r.terminated || r.truncated;
    }
    stats.episodes.push_back({step, stats.episodes.size(), static_cast<int>(episode.size()), ret});

    detail::replay_backwards(q, env, episode, goal);
    if (hp.goal_relabeling && !episode.empty()) {
      const Goal achieved = env.achieved_goal(episode.back().to);
      if (achieved != goal) detail::replay_backwards(q, env, episode, achieved);
    }
  }

  stats.final_evaluation = evaluate(q, env.spec(), hp.eval_episodes, hp.eval_seed);
  stats.final_reward = stats.final_evaluation.mean_return;
  stats.progress = stats.final_reward - stats.initial_reward;
  return out;
}

/// CSV with header `step,episode,episode_length,return`.
inline void write_training_log(std::ostream& out, const TrainingStats& stats) {
  out << "step,episode,episode_length,return\n";
  for (const auto& e : stats.episodes) {
    out << e.step << ',' << e.episode << ',' << e.length << ',' << e.episode_return << '\n';
  }
}

}  // namespace ciro::disassembly
