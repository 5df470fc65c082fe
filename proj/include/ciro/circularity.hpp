#pragma once

// Time-window circularity of the solids network: exact integration over the
// piecewise-constant batch schedule, the closed form for l = 1, the
// long-horizon approximation, and parameter sweeps.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "ciro/error.hpp"
#include "ciro/flows.hpp"

namespace ciro {

/// Integral of a piecewise-constant rate over [0, end).
inline double integrate_rate(const PiecewiseRate& rate, double end) {
  const auto& bps = rate.breakpoints;
  double area = 0.0;
  for (std::size_t n = 0; n < bps.size(); ++n) {
    const double lo = std::min(bps[n].time, end);
    const double hi = n + 1 < bps.size() ? std::min(bps[n + 1].time, end) : end;
    if (hi > lo) area += bps[n].value * (hi - lo);
  }
  return area;
}

struct NumericLambda {
  double lambda = 0.0;
  double final_time = 0.0;
  std::vector<double> segment_areas;  // mu * m * duration per schedule segment, kg*s
  double continuous_area = 0.0;       // delta * integral of the continuous rate, kg*s
};

/// lambda = -(1/t_f) * integral over [0, t_f) of mu*m(t) + delta*rate(t),
/// summed exactly segment by segment.
inline NumericLambda lambda_numeric_detail(const BatchSchedule& schedule, const PiecewiseRate& continuous_rate,
                                           double mu, double delta) {
  check_schedule(schedule);
  const double tf = schedule.end_time;
  if (!(tf > 0.0)) throw Error(ErrorCode::InvalidParameter, "t_f must be > 0");
  NumericLambda out;
  out.final_time = tf;
  double total = 0.0;
  for (std::size_t n = 0; n < schedule.breakpoints.size(); ++n) {
    const double width = schedule.segment_end(n) - schedule.breakpoints[n].time;
    const double area = mu * schedule.breakpoints[n].value * width;
    out.segment_areas.push_back(area);
    total += area;
  }
  out.continuous_area = delta * integrate_rate(continuous_rate, tf);
  total += out.continuous_area;
  out.lambda = -total / tf;
  return out;
}

inline double lambda_numeric(const BatchSchedule& schedule, const PiecewiseRate& continuous_rate, double mu,
                             double delta) {
  return lambda_numeric_detail(schedule, continuous_rate, mu, delta).lambda;
}

struct ClosedFormLambda {
  double lambda = 0.0;
  double final_time = 0.0;
};

/// Closed form for the solids network with mu = 2 and no continuous flow.
inline ClosedFormLambda lambda_closed_form(const ScenarioParams& p, double initial_mass,
                                           const DisassemblyOutcome& outcome) {
  check_params(p);
  check_outcome(outcome);
  if (!(std::isfinite(initial_mass) && initial_mass >= 0.0)) {
    throw Error(ErrorCode::NegativeMass, "weighted initial mass must be finite and >= 0");
  }
  const double m0 = initial_mass;
  const double td = outcome.disassembly_time;
  const double tf = p.t_supply + td + p.t_reuse + p.t_incineration;
  const double bracket = m0 * (p.t_supply + td + p.t_transport) +
                         (m0 + m0 * (1.0 - outcome.success / 100.0)) * (p.t_reuse - p.t_transport) +
                         2.0 * m0 * p.t_incineration;
  return {-2.0 / tf * bracket, tf};
}

/// Sensitivity factor alpha(s) in [1, 2).
inline double alpha(const ScenarioParams& p, double s) {
  check_success(s);
  return (p.t_supply + (2.0 - s / 100.0) * p.t_reuse) / (p.t_supply + p.t_reuse);
}

/// Approximation valid when T_d, T_i, T_t are negligible against t_2in4 and T_r.
inline double lambda_approx(const ScenarioParams& p, double initial_mass, double s) {
  return -2.0 * initial_mass * alpha(p, s);
}

/// How the functionality coefficient enters the integrand.
enum class MuMode {
  Global,           // mu multiplies the whole batch integrand
  FunctionalBatch,  // mu multiplies only the not-disassembled batch once it is discarded
};

constexpr std::string_view to_string(MuMode mode) {
  return mode == MuMode::Global ? "global" : "functional_batch";
}

/// Numeric lambda with mu applied only to the discarded functional batch m_u;
/// every other mass enters with weight 1.
inline NumericLambda lambda_numeric_functional_batch(const ScenarioParams& p, double initial_mass,
                                                     const DisassemblyOutcome& outcome, double mu) {
  BatchSchedule sched = batch_mass_schedule(p, initial_mass, outcome);
  const MassSplit split = split_by_success(initial_mass, outcome.success);
  for (std::size_t n = 1; n < sched.breakpoints.size(); ++n) {
    sched.breakpoints[n].value += (mu - 1.0) * split.not_disassembled;
  }
  return lambda_numeric_detail(sched, p.continuous_rate, 1.0, p.delta);
}

/// Rounds half away from zero to `decimals` places; never yields -0.
inline double round_to(double x, int decimals) {
  const double scale = std::pow(10.0, decimals);
  const double r = std::round(x * scale) / scale;
  return r == 0.0 ? 0.0 : r;
}

struct CircularityReport {
  double lambda_numeric = 0.0;
  double lambda_closed_form = 0.0;
  double lambda_approx = 0.0;
  double alpha = 0.0;
  double final_time = 0.0;
  std::vector<double> segment_areas;
  double continuous_area = 0.0;
  BatchSchedule schedule;

  // inputs echo
  ScenarioParams params;
  double initial_mass = 0.0;
  DisassemblyOutcome outcome;
  double mu = 2.0;
  MuMode mu_mode = MuMode::Global;
};

inline CircularityReport circularity_report(const ScenarioParams& p, double initial_mass,
                                            const DisassemblyOutcome& outcome, MuMode mode = MuMode::Global) {
  CircularityReport r;
  r.params = p;
  r.initial_mass = initial_mass;
  r.outcome = outcome;
  r.mu = functionality_coefficient(p.discarded_functional);
  r.mu_mode = mode;
  r.schedule = batch_mass_schedule(p, initial_mass, outcome);
  const NumericLambda num = mode == MuMode::Global
                                ? lambda_numeric_detail(r.schedule, p.continuous_rate, r.mu, p.delta)
                                : lambda_numeric_functional_batch(p, initial_mass, outcome, r.mu);
  r.lambda_numeric = num.lambda;
  r.segment_areas = num.segment_areas;
  r.continuous_area = num.continuous_area;
  const ClosedFormLambda cf = lambda_closed_form(p, initial_mass, outcome);
  r.lambda_closed_form = cf.lambda;
  r.final_time = cf.final_time;
  r.lambda_approx = lambda_approx(p, initial_mass, outcome.success);
  r.alpha = alpha(p, outcome.success);
  return r;
}

namespace detail {
inline std::string fmt_g(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x == 0.0 ? 0.0 : x);
  return buf;
}
inline std::string fmt_fixed(double x, int decimals) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, round_to(x, decimals));
  return buf;
}
}  // namespace detail

inline void write_report_text(std::ostream& out, const CircularityReport& r, int decimals = 1) {
  using detail::fmt_fixed;
  using detail::fmt_g;
  out << "weighted initial mass m0 [kg]: " << fmt_g(r.initial_mass) << '\n'
      << "success s [%]:                 " << fmt_g(r.outcome.success) << '\n'
      << "disassembly time T_d [s]:      " << fmt_g(r.outcome.disassembly_time) << '\n'
      << "mu (mode " << to_string(r.mu_mode) << "):"
      << std::string(31 - std::min<std::size_t>(29, 11 + std::string_view(to_string(r.mu_mode)).size()), ' ')
      << fmt_g(r.mu) << '\n'
      << "delta [s]:                     " << fmt_g(r.params.delta) << '\n'
      << "t_f [s]:                       " << fmt_g(r.final_time) << '\n'
      << "lambda closed form:            " << fmt_g(r.lambda_closed_form) << '\n'
      << "lambda numeric:                " << fmt_g(r.lambda_numeric) << '\n'
      << "lambda approx:                 " << fmt_g(r.lambda_approx) << '\n'
      << "alpha(s):                      " << fmt_g(r.alpha) << '\n';
  for (std::size_t n = 0; n < r.segment_areas.size(); ++n) {
    out << "segment " << n + 1 << " [" << fmt_g(r.schedule.breakpoints[n].time) << ", "
        << fmt_g(r.schedule.segment_end(n)) << ") area [kg*s]: " << fmt_g(r.segment_areas[n]) << '\n';
  }
  out << "continuous area [kg*s]:        " << fmt_g(r.continuous_area) << '\n'
      << "lambda = " << fmt_fixed(r.lambda_closed_form, decimals) << '\n';
}

/// Two-column CSV (`field,value`).
inline void write_report_csv(std::ostream& out, const CircularityReport& r) {
  using detail::fmt_g;
  out << "field,value\n"
      << "m0_kg," << fmt_g(r.initial_mass) << '\n'
      << "s_percent," << fmt_g(r.outcome.success) << '\n'
      << "T_d_s," << fmt_g(r.outcome.disassembly_time) << '\n'
      << "mu," << fmt_g(r.mu) << '\n'
      << "mu_mode," << to_string(r.mu_mode) << '\n'
      << "delta_s," << fmt_g(r.params.delta) << '\n'
      << "t_f_s," << fmt_g(r.final_time) << '\n'
      << "lambda_closed_form," << fmt_g(r.lambda_closed_form) << '\n'
      << "lambda_numeric," << fmt_g(r.lambda_numeric) << '\n'
      << "lambda_approx," << fmt_g(r.lambda_approx) << '\n'
      << "alpha," << fmt_g(r.alpha) << '\n';
  for (std::size_t n = 0; n < r.segment_areas.size(); ++n) {
    out << "segment_" << n + 1 << "_area_kg_s," << fmt_g(r.segment_areas[n]) << '\n';
  }
  out << "continuous_area_kg_s," << fmt_g(r.continuous_area) << '\n';
}

// ---------------------------------------------------------------------------
// sweeps

enum class SweepVar { Success, DisassemblyTime, InitialMass };

constexpr std::string_view to_string(SweepVar v) {
  switch (v) {
    case SweepVar::Success: return "s";
    case SweepVar::DisassemblyTime: return "T_d";
    case SweepVar::InitialMass: return "m0";
  }
  return "?";
}

inline SweepVar parse_sweep_var(std::string_view name) {
  for (SweepVar v : {SweepVar::Success, SweepVar::DisassemblyTime, SweepVar::InitialMass}) {
    if (to_string(v) == name) return v;
  }
  throw Error(ErrorCode::UnknownVariable, "unknown sweep variable '" + std::string(name) + "' (expected s, T_d or m0)");
}

struct SweepGrid {
  std::vector<double> success;
  std::vector<double> disassembly_time;
  std::vector<double> initial_mass;
};

struct SweepRow {
  SweepVar var = SweepVar::Success;
  double value = 0.0;
  double lambda_exact = 0.0;
  double lambda_approx = 0.0;
  double alpha = 0.0;
};

/// Evenly spaced grid including both ends.
inline std::vector<double> linspace(double from, double to, std::size_t steps) {
  if (steps < 2) throw Error(ErrorCode::EmptyGrid, "a sweep needs at least 2 steps");
  std::vector<double> v(steps);
  for (std::size_t n = 0; n < steps; ++n) {
    v[n] = from + (to - from) * static_cast<double>(n) / static_cast<double>(steps - 1);
  }
  v.back() = to;
  return v;
}

/// One-at-a-time sweep around (initial_mass, base): each grid varies one
/// input with the others held at their base values. Rows are grouped by
/// variable (s, T_d, m0) and ordered by value within each group.
inline std::vector<SweepRow> sensitivity_sweep(const ScenarioParams& p, double initial_mass,
                                               const DisassemblyOutcome& base, const SweepGrid& grid) {
  if (grid.success.empty() && grid.disassembly_time.empty() && grid.initial_mass.empty()) {
    throw Error(ErrorCode::EmptyGrid, "sweep grid is empty");
  }
  std::vector<SweepRow> rows;
  auto add = [&](SweepVar var, std::vector<double> values) {
    std::sort(values.begin(), values.end());
    for (double v : values) {
      double m0 = initial_mass;
      DisassemblyOutcome o = base;
      switch (var) {
        case SweepVar::Success: o.success = v; break;
        case SweepVar::DisassemblyTime: o.disassembly_time = v; break;
        case SweepVar::InitialMass: m0 = v; break;
      }
      rows.push_back({var, v, lambda_closed_form(p, m0, o).lambda, lambda_approx(p, m0, o.success),
                      alpha(p, o.success)});
    }
  };
  add(SweepVar::Success, grid.success);
  add(SweepVar::DisassemblyTime, grid.disassembly_time);
  add(SweepVar::InitialMass, grid.initial_mass);
  return rows;
}

inline void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
  using detail::fmt_g;
  out << "var,value,lambda_exact,lambda_approx,alpha\n";
  for (const auto& r : rows) {
    out << to_string(r.var) << ',' << fmt_g(r.value) << ',' << fmt_g(r.lambda_exact) << ','
        << fmt_g(r.lambda_approx) << ',' << fmt_g(r.alpha) << '\n';
  }
}

}  // namespace ciro
