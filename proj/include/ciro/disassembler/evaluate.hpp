#pragma once

#include <cstdint>
#include <random>

#include "ciro/disassembler/env.hpp"
#include "ciro/error.hpp"
#include "ciro/flows.hpp"

namespace ciro::disassembly {

/// Real time represented by one controller step, in seconds.
inline constexpr double kSecondsPerStep = 0.040;
inline constexpr int kEvalEpisodes = 100;
inline constexpr std::uint64_t kEvalSeed = 0x5eed'c1a0ULL;

struct Evaluation {
  DisassemblyOutcome outcome;
  double mean_return = 0.0;
  int episodes = 0;
  int successes = 0;
  double mean_success_length = 0.0;  // steps; 0 when nothing succeeded
  double mean_length = 0.0;
};

/// Uniformly random actions; owns its generator.
class RandomPolicy {
 public:
  explicit RandomPolicy(std::uint64_t seed) : rng_(seed) {}
  Action operator()(const DisassemblyEnv&, const EnvState&, const Goal&) {
    return static_cast<Action>(pick_(rng_));
  }

 private:
  std::mt19937_64 rng_;
  std::uniform_int_distribution<int> pick_{0, kActionCount - 1};
};

/// Runs `n_episodes` episodes from layouts drawn with `eval_seed`. s is the
/// percentage of episodes that reach the goal; T_d is the mean step count of
/// successful episodes times kSecondsPerStep, or one day when none succeed.
template <class PolicyFn>
Evaluation evaluate(PolicyFn&& policy, const TaskSpec& spec, int n_episodes = kEvalEpisodes,
                    std::uint64_t eval_seed = kEvalSeed) {
  if (n_episodes < 1) throw Error(ErrorCode::InvalidParameter, "need at least one evaluation episode");
  DisassemblyEnv env(spec, eval_seed);
  Evaluation ev;
  ev.episodes = n_episodes;
  double total_return = 0.0, success_steps = 0.0, all_steps = 0.0;
  for (int e = 0; e < n_episodes; ++e) {
    env.reset();
    StepResult r;
    r.terminated = env.goal_met(env.state(), env.goal());
    double ret = 0.0;
    while (!r.terminated && !r.truncated) {
      r = env.step(policy(env, env.state(), env.goal()));
      ret += r.reward;
    }
    total_return += ret;
    all_steps += env.steps();
    if (r.terminated) {
      ++ev.successes;
      success_steps += env.steps();
    }
  }
  ev.mean_return = total_return / n_episodes;
  ev.mean_length = all_steps / n_episodes;
  ev.outcome.success = 100.0 * ev.successes / n_episodes;
  if (ev.successes > 0) {
    ev.mean_success_length = success_steps / ev.successes;
    ev.outcome.disassembly_time = kSecondsPerStep * ev.mean_success_length;
  } else {
    ev.outcome.disassembly_time = kFailedDisassemblyTime;
  }
  return ev;
}

}  // namespace ciro::disassembly
