#pragma once

// Exact planner for the deterministic disassembly MDP. Every non-colliding
// action costs one step, so breadth-first search over reachable states gives
// shortest successful action sequences.

#include <algorithm>
#include <cstdint>
#include <deque>
#include <optional>
#include <unordered_map>
#include <vector>

#include "ciro/disassembler/env.hpp"
#include "ciro/error.hpp"

namespace ciro::disassembly {

inline constexpr std::size_t kOracleStateLimit = 1'000'000;

struct Plan {
  bool reachable = false;
  std::vector<Action> actions;
  std::size_t explored = 0;  // states discovered by the search

  std::optional<std::size_t> length() const {
    return reachable ? std::optional<std::size_t>(actions.size()) : std::nullopt;
  }
};

/// Shortest collision-free action sequence from `start` to a state meeting `goal`.
inline Plan shortest_plan(const DisassemblyEnv& env, const EnvState& start, const Goal& goal,
                          std::size_t state_limit = kOracleStateLimit) {
  Plan plan;
  if (env.goal_met(start, goal)) {
    plan.reachable = true;
    plan.explored = 1;
    return plan;
  }
  struct Parent {
    std::uint64_t key;
    Action action;
  };
  std::unordered_map<std::uint64_t, Parent> parents;
  parents.reserve(1 << 16);
  const std::uint64_t root = DisassemblyEnv::encode_state(start);
  parents.emplace(root, Parent{root, Action::North});
  std::deque<std::uint64_t> frontier{root};

  while (!frontier.empty()) {
    const std::uint64_t key = frontier.front();
    frontier.pop_front();
    const EnvState s = env.decode_state(key);
    for (int a = 0; a < kActionCount; ++a) {
      const Action action = static_cast<Action>(a);
      const EnvState next = env.transition(s, action);
      if (next.collided) continue;
      const std::uint64_t next_key = DisassemblyEnv::encode_state(next);
      if (!parents.emplace(next_key, Parent{key, action}).second) continue;
      if (parents.size() > state_limit) {
        throw Error(ErrorCode::StateSpaceTooLarge,
                    "search exceeded " + std::to_string(state_limit) + " states");
      }
      if (env.goal_met(next, goal)) {
        for (std::uint64_t k = next_key; k != root; k = parents.at(k).key) {
          plan.actions.push_back(parents.at(k).action);
        }
        std::reverse(plan.actions.begin(), plan.actions.end());
        plan.reachable = true;
        plan.explored = parents.size();
        return plan;
      }
      frontier.push_back(next_key);
    }
  }
  plan.explored = parents.size();
  return plan;
}

/// Follows shortest plans. Plans are computed on first use from a state and
/// memoized along their whole path.
class OraclePolicy {
 public:
  explicit OraclePolicy(std::size_t state_limit = kOracleStateLimit) : state_limit_(state_limit) {}

  Action operator()(const DisassemblyEnv& env, const EnvState& s, const Goal& g) {
    const std::uint64_t key = DisassemblyEnv::encode(s, g);
    if (auto it = next_.find(key); it != next_.end()) return it->second;
    const Plan plan = shortest_plan(env, s, g, state_limit_);
    if (!plan.reachable || plan.actions.empty()) {
      // unreachable, or already solved: any action will do
      next_.emplace(key, Action::Pick);
      return Action::Pick;
    }
    EnvState cur = s;
    for (Action a : plan.actions) {
      next_.emplace(DisassemblyEnv::encode(cur, g), a);
      cur = env.transition(cur, a);
    }
    return next_.at(key);
  }

 private:
  std::size_t state_limit_;
  std::unordered_map<std::uint64_t, Action> next_;
};

struct OracleResult {
  OraclePolicy policy;
  std::optional<std::size_t> optimal_length;  // empty when no plan exists
  Plan plan;
};

/// Optimal policy and episode length from the environment's current state.
inline OracleResult plan_oracle(const DisassemblyEnv& env, std::size_t state_limit = kOracleStateLimit) {
  OracleResult r{OraclePolicy(state_limit), std::nullopt, shortest_plan(env, env.state(), env.goal(), state_limit)};
  r.optimal_length = r.plan.length();
  return r;
}

}  // namespace ciro::disassembly
