#pragma once

// Discrete desk-scale disassembly tasks. Parts sit in stacks on the cells of
// a small grid; a gripper moves between cells, picks the top part of a stack
// and places it on top of the stack under it. Target parts have goal cells.
// In the chassis task some cells belong to a fixed chassis; moving the
// gripper onto one is a collision that is penalized and truncates the episode.

#include <algorithm>
#include <array>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ciro/error.hpp"

namespace ciro::disassembly {

inline constexpr int kMaxParts = 4;
inline constexpr int kMaxTargets = 2;
inline constexpr int kMaxCells = 63;
inline constexpr int kActionCount = 6;

inline constexpr double kStepReward = -1.0;
inline constexpr double kSuccessReward = 0.0;
inline constexpr double kCollisionReward = -10.0;

enum class TaskKind { TwoPartsOneTarget, TwoPartsTwoTargets, FourPartsTwoTargetsTwoObstacles, FourPartsChassis };

inline constexpr std::array kAllTasks = {TaskKind::TwoPartsOneTarget, TaskKind::TwoPartsTwoTargets,
                                         TaskKind::FourPartsTwoTargetsTwoObstacles, TaskKind::FourPartsChassis};

constexpr std::string_view to_string(TaskKind kind) {
  switch (kind) {
    case TaskKind::TwoPartsOneTarget: return "TwoPartsOneTarget";
    case TaskKind::TwoPartsTwoTargets: return "TwoPartsTwoTargets";
    case TaskKind::FourPartsTwoTargetsTwoObstacles: return "FourPartsTwoTargetsTwoObstacles";
    case TaskKind::FourPartsChassis: return "FourPartsChassis";
  }
  return "?";
}

inline std::optional<TaskKind> parse_task(std::string_view name) {
  for (TaskKind k : kAllTasks) {
    if (to_string(k) == name) return k;
  }
  return std::nullopt;
}

enum class Action : std::uint8_t { North, South, East, West, Pick, Place };

constexpr std::string_view to_string(Action a) {
  constexpr std::array<std::string_view, kActionCount> names = {"north", "south", "east", "west", "pick", "place"};
  return names[static_cast<int>(a)];
}

inline Action action_from_index(int index) {
  if (index < 0 || index >= kActionCount) {
    throw Error(ErrorCode::InvalidAction, "action index " + std::to_string(index) + " not in [0, 6)");
  }
  return static_cast<Action>(index);
}

enum class Material { Beta1, Beta2 };

struct PartSpec {
  std::string name;
  Material material = Material::Beta1;
  double mass = 1.0;  // kg
};

struct Stack {
  int cell = 0;
  std::vector<int> parts;  // bottom to top
};

struct TaskSpec {
  TaskKind kind = TaskKind::TwoPartsOneTarget;
  int rows = 5;
  int cols = 5;
  std::vector<PartSpec> parts;
  std::vector<Stack> stacks;
  std::vector<int> target_parts;  // parts that must rest on a goal cell
  std::vector<int> goal_cells;    // goal of target_parts[n]
  std::vector<int> chassis_cells;
  double chassis_mass = 0.0;  // kg of beta_1, fixed in place
  int max_episode_length = 50;

  int cell(int row, int col) const { return row * cols + col; }
  int cell_count() const { return rows * cols; }

  /// (beta_1, beta_2) masses in kg, chassis included.
  std::pair<double, double> material_masses() const {
    double b1 = chassis_mass, b2 = 0.0;
    for (const auto& p : parts) (p.material == Material::Beta1 ? b1 : b2) += p.mass;
    return {b1, b2};
  }
};

/// Default layout of each task on a grid of at least 5x5 cells.
inline TaskSpec make_task(TaskKind kind, int rows = 5, int cols = 5) {
  TaskSpec t;
  t.kind = kind;
  t.rows = rows;
  t.cols = cols;
  const bool two_parts = kind == TaskKind::TwoPartsOneTarget || kind == TaskKind::TwoPartsTwoTargets;
  const int parts = two_parts ? 2 : 4;
  const int goals = kind == TaskKind::TwoPartsOneTarget ? 1 : 2;
  if (rows < 1 || cols < 1 || rows * cols < parts + goals) {
    throw Error(ErrorCode::GridTooSmall, std::to_string(parts) + " parts and " + std::to_string(goals) +
                                             " goals do not fit in " + std::to_string(rows) + "x" +
                                             std::to_string(cols));
  }
  if (rows < 5 || cols < 5) {
    throw Error(ErrorCode::GridTooSmall, "task layouts need at least 5x5 cells");
  }
  if (rows * cols > kMaxCells) throw Error(ErrorCode::InvalidParameter, "grids are limited to 63 cells");

  switch (kind) {
    case TaskKind::TwoPartsOneTarget:
      t.parts = {{"top", Material::Beta1, 1.0}, {"bottom", Material::Beta2, 1.0}};
      t.stacks = {{t.cell(2, 1), {1, 0}}};
      t.target_parts = {0};
      t.goal_cells = {t.cell(2, 3)};
      t.max_episode_length = 50;
      break;
    case TaskKind::TwoPartsTwoTargets:
      t.parts = {{"top", Material::Beta1, 1.0}, {"bottom", Material::Beta2, 1.0}};
      t.stacks = {{t.cell(2, 2), {1, 0}}};
      t.target_parts = {0, 1};
      t.goal_cells = {t.cell(0, 2), t.cell(4, 2)};
      t.max_episode_length = 100;
      break;
    case TaskKind::FourPartsTwoTargetsTwoObstacles:
    case TaskKind::FourPartsChassis:
      t.parts = {{"target_a", Material::Beta1, 1.0},
                 {"target_b", Material::Beta2, 1.0},
                 {"obstacle_a", Material::Beta2, 1.0},
                 {"obstacle_b", Material::Beta1, 1.0}};
      t.stacks = {{t.cell(1, 1), {0, 2}}, {t.cell(3, 3), {1, 3}}};
      t.target_parts = {0, 1};
      t.goal_cells = {t.cell(1, 3), t.cell(3, 1)};
      t.max_episode_length = 100;
      if (kind == TaskKind::FourPartsChassis) {
        t.chassis_cells = {t.cell(2, 1), t.cell(2, 2), t.cell(2, 3)};
        t.chassis_mass = 3.0;
        t.max_episode_length = 150;
      }
      break;
  }
  return t;
}

struct EnvState {
  std::array<std::int8_t, kMaxParts> cell{};   // -1 while held
  std::array<std::int8_t, kMaxParts> level{};  // height in the stack, 0 = bottom
  std::int8_t gripper = 0;
  std::int8_t held = -1;
  bool collided = false;

  friend bool operator==(const EnvState&, const EnvState&) = default;
};

/// Goal cell of each target part, in TaskSpec::target_parts order.
struct Goal {
  std::array<std::int8_t, kMaxTargets> cells{-1, -1};
  friend bool operator==(const Goal&, const Goal&) = default;
};

struct StepResult {
  EnvState state;
  double reward = 0.0;
  bool terminated = false;
  bool truncated = false;
};

class DisassemblyEnv {
 public:
  DisassemblyEnv(TaskSpec spec, std::uint64_t seed) : spec_(std::move(spec)), rng_(seed) {
    validate();
    goal_.cells.fill(-1);
    for (std::size_t n = 0; n < spec_.goal_cells.size(); ++n) {
      goal_.cells[n] = static_cast<std::int8_t>(spec_.goal_cells[n]);
    }
    for (int c = 0; c < spec_.cell_count(); ++c) {
      if (!is_chassis(c) && !is_stack_cell(c)) start_cells_.push_back(c);
    }
    if (start_cells_.empty()) throw Error(ErrorCode::GridTooSmall, "no free cell for the gripper");
    reset();
  }

  const TaskSpec& spec() const noexcept { return spec_; }
  const EnvState& state() const noexcept { return state_; }
  const Goal& goal() const noexcept { return goal_; }
  int steps() const noexcept { return steps_; }
  int part_count() const noexcept { return static_cast<int>(spec_.parts.size()); }

  /// Initial layout with the gripper on a uniformly drawn free cell.
  EnvState reset() {
    std::uniform_int_distribution<std::size_t> pick(0, start_cells_.size() - 1);
    return reset_at(start_cells_[pick(rng_)]);
  }

  EnvState reset_at(int gripper_cell) {
    state_ = initial_state(gripper_cell);
    steps_ = 0;
    return state_;
  }

  void reseed(std::uint64_t seed) { rng_.seed(seed); }

  /// Places the environment in an arbitrary state; the step counter restarts.
  void set_state(const EnvState& s) {
    state_ = s;
    steps_ = 0;
  }

  EnvState initial_state(int gripper_cell) const {
    EnvState s;
    s.cell.fill(-1);
    s.level.fill(0);
    for (const Stack& st : spec_.stacks) {
      for (std::size_t h = 0; h < st.parts.size(); ++h) {
        s.cell[st.parts[h]] = static_cast<std::int8_t>(st.cell);
        s.level[st.parts[h]] = static_cast<std::int8_t>(h);
      }
    }
    s.gripper = static_cast<std::int8_t>(gripper_cell);
    return s;
  }

  StepResult step(int action_index) { return step(action_from_index(action_index)); }

  StepResult step(Action action) {
    if (goal_met(state_, goal_)) return {state_, kSuccessReward, true, false};
    const EnvState next = transition(state_, action);
    state_ = next;
    ++steps_;
    StepResult r;
    r.state = next;
    r.reward = reward(next, goal_);
    r.terminated = !next.collided && goal_met(next, goal_);
    r.truncated = next.collided || (!r.terminated && steps_ >= spec_.max_episode_length);
    return r;
  }

  /// Deterministic transition model. A move onto a chassis cell leaves the
  /// gripper where it was and sets `collided`.
  EnvState transition(const EnvState& s, Action action) const {
    EnvState n = s;
    n.collided = false;
    const int row = s.gripper / spec_.cols;
    const int col = s.gripper % spec_.cols;
    auto move_to = [&](int r, int c) {
      if (r < 0 || r >= spec_.rows || c < 0 || c >= spec_.cols) return;  // wall: stay
      const int target = spec_.cell(r, c);
      if (is_chassis(target)) {
        n.collided = true;
        return;
      }
      n.gripper = static_cast<std::int8_t>(target);
    };
    switch (action) {
      case Action::North: move_to(row - 1, col); break;
      case Action::South: move_to(row + 1, col); break;
      case Action::East: move_to(row, col + 1); break;
      case Action::West: move_to(row, col - 1); break;
      case Action::Pick:
        if (s.held < 0) {
          const int top = top_part(s, s.gripper);
          if (top >= 0) {
            n.held = static_cast<std::int8_t>(top);
            n.cell[top] = -1;
            n.level[top] = 0;
          }
        }
        break;
      case Action::Place:
        if (s.held >= 0) {
          n.cell[s.held] = s.gripper;
          n.level[s.held] = static_cast<std::int8_t>(stack_height(s, s.gripper));
          n.held = -1;
        }
        break;
    }
    return n;
  }

  bool goal_met(const EnvState& s, const Goal& g) const {
    for (std::size_t n = 0; n < spec_.target_parts.size(); ++n) {
      if (s.cell[spec_.target_parts[n]] != g.cells[n]) return false;
    }
    return true;
  }

  /// Where the target parts currently are; a held part counts at the gripper.
  Goal achieved_goal(const EnvState& s) const {
    Goal g;
    for (std::size_t n = 0; n < spec_.target_parts.size(); ++n) {
      const int p = spec_.target_parts[n];
      g.cells[n] = s.held == p ? s.gripper : s.cell[p];
    }
    return g;
  }

  double reward(const EnvState& next, const Goal& g) const {
    if (next.collided) return kCollisionReward;
    return goal_met(next, g) ? kSuccessReward : kStepReward;
  }

  /// Exact 41-bit encoding of a state (collision flag excluded).
  static std::uint64_t encode_state(const EnvState& s) {
    std::uint64_t key = static_cast<std::uint64_t>(s.gripper) & 0x3f;
    key |= static_cast<std::uint64_t>(s.held + 1) << 6;
    for (int p = 0; p < kMaxParts; ++p) {
      const std::uint64_t cell = s.cell[p] < 0 ? 0 : static_cast<std::uint64_t>(s.cell[p]);
      const std::uint64_t slot = cell | (static_cast<std::uint64_t>(s.level[p] & 0x3) << 6);
      key |= slot << (9 + 8 * p);
    }
    return key;
  }

  EnvState decode_state(std::uint64_t key) const {
    EnvState s;
    s.gripper = static_cast<std::int8_t>(key & 0x3f);
    s.held = static_cast<std::int8_t>(static_cast<int>((key >> 6) & 0x7) - 1);
    for (int p = 0; p < kMaxParts; ++p) {
      const std::uint64_t slot = (key >> (9 + 8 * p)) & 0xff;
      s.cell[p] = static_cast<std::int8_t>(slot & 0x3f);
      s.level[p] = static_cast<std::int8_t>(slot >> 6);
      if (p >= part_count() || s.held == p) s.cell[p] = -1;
    }
    return s;
  }

  /// State and goal packed into one table key.
  static std::uint64_t encode(const EnvState& s, const Goal& g) {
    std::uint64_t key = encode_state(s);
    for (int n = 0; n < kMaxTargets; ++n) {
      const std::uint64_t c = g.cells[n] < 0 ? 0x3f : static_cast<std::uint64_t>(g.cells[n]);
      key |= c << (41 + 6 * n);
    }
    return key;
  }

  bool is_chassis(int cell) const {
    return std::find(spec_.chassis_cells.begin(), spec_.chassis_cells.end(), cell) != spec_.chassis_cells.end();
  }

  int top_part(const EnvState& s, int cell) const {
    int top = -1, best = -1;
    for (int p = 0; p < part_count(); ++p) {
      if (s.cell[p] == cell && s.level[p] > best) {
        best = s.level[p];
        top = p;
      }
    }
    return top;
  }

  int stack_height(const EnvState& s, int cell) const {
    int h = 0;
    for (int p = 0; p < part_count(); ++p) h += s.cell[p] == cell ? 1 : 0;
    return h;
  }

 private:
  bool is_stack_cell(int cell) const {
    return std::any_of(spec_.stacks.begin(), spec_.stacks.end(), [&](const Stack& st) { return st.cell == cell; });
  }

  void validate() const {
    const TaskSpec& t = spec_;
    if (t.rows < 1 || t.cols < 1) throw Error(ErrorCode::GridTooSmall, "empty grid");
    const int parts = static_cast<int>(t.parts.size());
    if (parts < 1 || parts > kMaxParts) throw Error(ErrorCode::InvalidParameter, "1 to 4 parts supported");
    if (t.cell_count() < parts + static_cast<int>(t.goal_cells.size())) {
      throw Error(ErrorCode::GridTooSmall, "parts and goals exceed the grid cells");
    }
    if (t.cell_count() > kMaxCells) throw Error(ErrorCode::InvalidParameter, "grids are limited to 63 cells");
    if (t.target_parts.empty() || t.target_parts.size() > kMaxTargets ||
        t.target_parts.size() != t.goal_cells.size()) {
      throw Error(ErrorCode::InvalidParameter, "need 1 or 2 target parts, each with one goal cell");
    }
    if (t.max_episode_length < 1) throw Error(ErrorCode::InvalidParameter, "max episode length must be >= 1");
    auto in_grid = [&](int c) { return c >= 0 && c < t.cell_count(); };
    std::vector<int> seen(parts, 0);
    for (const Stack& st : t.stacks) {
      if (!in_grid(st.cell)) throw Error(ErrorCode::InvalidParameter, "stack cell outside the grid");
      if (st.parts.size() > 4) throw Error(ErrorCode::InvalidParameter, "stacks are at most 4 high");
      for (int p : st.parts) {
        if (p < 0 || p >= parts) throw Error(ErrorCode::InvalidParameter, "stack references unknown part");
        ++seen[p];
      }
    }
    if (std::any_of(seen.begin(), seen.end(), [](int n) { return n != 1; })) {
      throw Error(ErrorCode::InvalidParameter, "every part must sit in exactly one stack");
    }
    for (std::size_t a = 0; a < t.stacks.size(); ++a) {
      for (std::size_t b = a + 1; b < t.stacks.size(); ++b) {
        if (t.stacks[a].cell == t.stacks[b].cell) throw Error(ErrorCode::InvalidParameter, "two stacks share a cell");
      }
    }
    for (int p : t.target_parts) {
      if (p < 0 || p >= parts) throw Error(ErrorCode::InvalidParameter, "unknown target part");
    }
    for (int c : t.goal_cells) {
      if (!in_grid(c) || is_chassis(c)) throw Error(ErrorCode::InvalidParameter, "goal cell unusable");
    }
    for (int c : t.chassis_cells) {
      if (!in_grid(c) || is_stack_cell(c)) throw Error(ErrorCode::InvalidParameter, "chassis cell unusable");
    }
  }

  TaskSpec spec_;
  std::mt19937_64 rng_;
  std::vector<int> start_cells_;
  EnvState state_;
  Goal goal_;
  int steps_ = 0;
};

/// Environment for a task's default layout, initial state drawn from `seed`.
inline DisassemblyEnv make_env(const TaskSpec& spec, std::uint64_t seed) { return DisassemblyEnv(spec, seed); }

}  // namespace ciro::disassembly
