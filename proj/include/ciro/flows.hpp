#pragma once

// Material bookkeeping for the solids network: criticality weighting, the
// success split at the disassembler and the piecewise-constant schedule of
// weighted finite-time sustainable mass.

#include <cmath>
#include <cstdio>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "ciro/error.hpp"

namespace ciro {

inline constexpr double kSecondsPerDay = 86400.0;
inline constexpr double kSecondsPerMonth = 2592000.0;

/// Disassembly time used when disassembly fails: the disassembler then acts
/// as a waste collection centre and stores the batch for one day.
inline constexpr double kFailedDisassemblyTime = kSecondsPerDay;

struct MaterialSpec {
  std::string name;
  double criticality = 1.0;  // in (0, 1]
  double mass = 0.0;         // kg
  friend bool operator==(const MaterialSpec&, const MaterialSpec&) = default;
};

/// One breakpoint of a right-open piecewise-constant function.
struct Breakpoint {
  double time = 0.0;
  double value = 0.0;
  friend bool operator==(const Breakpoint&, const Breakpoint&) = default;
};

/// Piecewise-constant rate, in weighted kg/s. The last value extends to
/// infinity. An empty rate is identically zero.
struct PiecewiseRate {
  std::vector<Breakpoint> breakpoints;

  bool is_zero() const {
    for (const auto& b : breakpoints) {
      if (b.value != 0.0) return false;
    }
    return true;
  }
  friend bool operator==(const PiecewiseRate&, const PiecewiseRate&) = default;
};

struct ScenarioParams {
  double t_supply = kSecondsPerMonth;   // t_{2,in,4}: reservoir -> disassembler arrival
  double t_transport = 3600.0;          // T_t: disassembler -> incinerator, not disassembled
  double t_reuse = kSecondsPerMonth;    // T_r: disassembler -> incinerator via reuse
  double t_incineration = kSecondsPerDay;  // T_i
  double delta = 1.0;                   // flow-to-mass conversion interval
  unsigned discarded_functional = 1;    // l
  PiecewiseRate continuous_rate;        // weighted continuous flow, zero by default

  friend bool operator==(const ScenarioParams&, const ScenarioParams&) = default;
};

/// Validates the ordering and sign constraints of the timing parameters.
inline void check_params(const ScenarioParams& p) {
  auto finite = [](double x) { return std::isfinite(x); };
  if (!finite(p.t_supply) || p.t_supply < 0.0) {
    throw Error(ErrorCode::InvalidParameter, "t_2in4 must be finite and >= 0");
  }
  if (!finite(p.t_transport) || p.t_transport <= 0.0) {
    throw Error(ErrorCode::InvalidParameter, "T_t must be finite and > 0");
  }
  if (!finite(p.t_reuse) || p.t_reuse <= 0.0) throw Error(ErrorCode::InvalidParameter, "T_r must be finite and > 0");
  if (!finite(p.t_incineration) || p.t_incineration <= 0.0) {
    throw Error(ErrorCode::InvalidParameter, "T_i must be finite and > 0");
  }
  if (!finite(p.delta) || p.delta <= 0.0) throw Error(ErrorCode::InvalidParameter, "delta must be finite and > 0");
  if (p.t_transport >= p.t_reuse) {
    throw Error(ErrorCode::NonMonotoneBreakpoints, "T_t must be smaller than T_r");
  }
  const auto& bps = p.continuous_rate.breakpoints;
  for (std::size_t n = 0; n < bps.size(); ++n) {
    if (!finite(bps[n].time) || !finite(bps[n].value)) {
      throw Error(ErrorCode::InvalidParameter, "continuous rate breakpoints must be finite");
    }
    if (n == 0 && bps[n].time != 0.0) {
      throw Error(ErrorCode::NonMonotoneBreakpoints, "continuous rate must start at t = 0");
    }
    if (n > 0 && bps[n].time <= bps[n - 1].time) {
      throw Error(ErrorCode::NonMonotoneBreakpoints, "continuous rate times must increase strictly");
    }
  }
}

struct DisassemblyOutcome {
  double success = 0.0;          // s, percent
  double disassembly_time = kFailedDisassemblyTime;  // T_d, seconds

  friend bool operator==(const DisassemblyOutcome&, const DisassemblyOutcome&) = default;
};

inline void check_success(double s) {
  if (!(s >= 0.0 && s <= 100.0)) {
    throw Error(ErrorCode::SuccessOutOfRange, "s = " + std::to_string(s) + " outside [0, 100]");
  }
}

inline void check_outcome(const DisassemblyOutcome& o) {
  check_success(o.success);
  if (!(std::isfinite(o.disassembly_time) && o.disassembly_time > 0.0)) {
    throw Error(ErrorCode::InvalidParameter, "T_d must be finite and > 0");
  }
}

inline void check_material(const MaterialSpec& m) {
  if (!(m.criticality > 0.0 && m.criticality <= 1.0)) {
    throw Error(ErrorCode::InvalidCriticality,
                "criticality of '" + m.name + "' = " + std::to_string(m.criticality) + " outside (0, 1]");
  }
  if (!(std::isfinite(m.mass) && m.mass >= 0.0)) {
    throw Error(ErrorCode::NegativeMass, "mass of '" + m.name + "' must be finite and >= 0");
  }
}

/// Weighted mass of finite-time sustainable material extracted: sum of c_i * m_i.
inline double weighted_initial_mass(std::span<const MaterialSpec> materials) {
  if (materials.empty()) throw Error(ErrorCode::InvalidParameter, "no materials");
  double total = 0.0;
  for (const auto& m : materials) {
    check_material(m);
    total += m.criticality * m.mass;
  }
  return total;
}

struct MassSplit {
  double not_disassembled = 0.0;  // m_u, sent straight to incineration
  double reused = 0.0;            // m_r
};

inline MassSplit split_by_success(double initial_mass, double s) {
  check_success(s);
  if (!(std::isfinite(initial_mass) && initial_mass >= 0.0)) {
    throw Error(ErrorCode::NegativeMass, "weighted initial mass must be finite and >= 0");
  }
  const double reused = initial_mass * s / 100.0;
  // computed as a difference so that m_u + m_r == m0 holds to rounding
  return {initial_mass - reused, reused};
}

/// mu_{f,b} = 1 + l.
constexpr double functionality_coefficient(unsigned discarded_functional) {
  return 1.0 + static_cast<double>(discarded_functional);
}

/// Right-open piecewise-constant weighted batch mass on [0, end_time).
struct BatchSchedule {
  std::vector<Breakpoint> breakpoints;
  double end_time = 0.0;

  double value_at(double t) const {
    double v = 0.0;
    for (const auto& b : breakpoints) {
      if (b.time <= t) v = b.value;
    }
    return v;
  }
  double segment_end(std::size_t n) const {
    return n + 1 < breakpoints.size() ? breakpoints[n + 1].time : end_time;
  }
  friend bool operator==(const BatchSchedule&, const BatchSchedule&) = default;
};

inline void check_schedule(const BatchSchedule& sched) {
  const auto& bps = sched.breakpoints;
  if (bps.empty()) throw Error(ErrorCode::EmptySchedule, "schedule has no breakpoints");
  if (bps.front().time != 0.0) throw Error(ErrorCode::NonMonotoneBreakpoints, "first breakpoint must be at t = 0");
  for (std::size_t n = 0; n < bps.size(); ++n) {
    if (n > 0 && !(bps[n].time > bps[n - 1].time)) {
      throw Error(ErrorCode::NonMonotoneBreakpoints, "breakpoint times must increase strictly");
    }
    if (!(bps[n].value >= 0.0)) throw Error(ErrorCode::NegativeMass, "schedule masses must be >= 0");
  }
  if (!(sched.end_time > bps.back().time)) {
    throw Error(ErrorCode::NonMonotoneBreakpoints, "end time must follow the last breakpoint");
  }
}

/// Arrival times along the solids chain.
struct ChainTimes {
  double not_disassembled_arrival = 0.0;  // t_{3,in,5}
  double reused_arrival = 0.0;            // t_{3,in,6}
  double final_time = 0.0;                // t_f
};

inline ChainTimes chain_times(const ScenarioParams& p, double disassembly_time) {
  const double leave = p.t_supply + disassembly_time;
  return {leave + p.t_transport, leave + p.t_reuse, leave + p.t_reuse + p.t_incineration};
}

/// Three segments: m0 until the not-disassembled batch reaches the
/// incinerator, m0 + m_u until the reused batch arrives, then m0 + m_u + m_r
/// until the end of incineration.
inline BatchSchedule batch_mass_schedule(const ScenarioParams& p, double initial_mass,
                                         const DisassemblyOutcome& outcome) {
  check_params(p);
  check_outcome(outcome);
  const MassSplit split = split_by_success(initial_mass, outcome.success);
  const ChainTimes t = chain_times(p, outcome.disassembly_time);
  BatchSchedule sched;
  sched.breakpoints = {
      {0.0, initial_mass},
      {t.not_disassembled_arrival, initial_mass + split.not_disassembled},
      {t.reused_arrival, initial_mass + split.not_disassembled + split.reused},
  };
  sched.end_time = t.final_time;
  check_schedule(sched);
  return sched;
}

/// CSV with header `time_s,mass_kg`; the closing row repeats the last value at t_f.
inline void write_schedule_csv(std::ostream& out, const BatchSchedule& sched) {
  char buf[64];
  out << "time_s,mass_kg\n";
  for (const auto& b : sched.breakpoints) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", b.time, b.value);
    out << buf;
  }
  if (!sched.breakpoints.empty()) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", sched.end_time, sched.breakpoints.back().value);
    out << buf;
  }
}

}  // namespace ciro
