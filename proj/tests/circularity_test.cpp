#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "ciro/circularity.hpp"

using namespace ciro;

namespace {

// Independent oracle: composite trapezoid rule on uniform samples of the
// integrand, evaluated pointwise through BatchSchedule::value_at.
double trapezoid_lambda(const BatchSchedule& s, double mu, std::size_t samples) {
  const double tf = s.end_time;
  const double h = tf / static_cast<double>(samples);
  auto f = [&](double t) { return mu * s.value_at(std::min(t, std::nextafter(tf, 0.0))); };
  double sum = 0.5 * (f(0.0) + f(tf));
  for (std::size_t n = 1; n < samples; ++n) sum += f(h * static_cast<double>(n));
  return -sum * h / tf;
}

// Exact values from rational arithmetic on the segment areas (Table I timing).
constexpr double kLambdaSac = -2.134426226895399;    // m0 1.05, s 100, T_d 0.4
constexpr double kLambdaTqc = -2.3406966847758524;   // m0 1.05, s 80, T_d 0.8
constexpr double kLambdaFail = -3.148588709677419;   // m0 1.05, s 0, T_d 86400
constexpr double kLambdaFour = -6.297177419354838;   // m0 2.1
constexpr double kLambdaChassis = -7.196774193548387;  // m0 2.4

double closed(double m0, double s, double td) { return lambda_closed_form(ScenarioParams{}, m0, {s, td}).lambda; }

double numeric(double m0, double s, double td, const ScenarioParams& p = {}) {
  return lambda_numeric(batch_mass_schedule(p, m0, {s, td}), p.continuous_rate,
                        functionality_coefficient(p.discarded_functional), p.delta);
}

}  // namespace

TEST(Circularity, NumericConstantSchedule) {
  BatchSchedule s{{{0.0, 1.0}}, 10.0};
  EXPECT_DOUBLE_EQ(lambda_numeric(s, {}, 2.0, 1.0), -2.0);
  BatchSchedule zero{{{0.0, 0.0}}, 10.0};
  EXPECT_EQ(lambda_numeric(zero, {}, 2.0, 1.0), 0.0);
}

TEST(Circularity, NumericEmptySchedule) {
  try {
    lambda_numeric(BatchSchedule{}, {}, 2.0, 1.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::EmptySchedule);
  }
}

TEST(Circularity, NumericTableOne) {
  EXPECT_NEAR(numeric(1.05, 100, 0.4), kLambdaSac, 1e-12);
  EXPECT_NEAR(numeric(1.05, 0, 86400), kLambdaFail, 1e-12);
}

TEST(Circularity, NumericMatchesTrapezoidOracle) {
  for (auto [m0, s, td] : {std::tuple{1.05, 100.0, 0.4}, {1.05, 80.0, 0.8}, {2.4, 0.0, 86400.0}}) {
    const BatchSchedule sched = batch_mass_schedule(ScenarioParams{}, m0, {s, td});
    const double exact = lambda_numeric(sched, {}, 2.0, 1.0);
    EXPECT_NEAR(trapezoid_lambda(sched, 2.0, 1'000'000), exact, 1e-5 * std::abs(exact));
  }
}

TEST(Circularity, ContinuousFlowTerm) {
  ScenarioParams p;
  p.delta = 2.0;
  p.continuous_rate.breakpoints = {{0.0, 1e-6}, {1000.0, 0.0}};
  const BatchSchedule sched = batch_mass_schedule(p, 1.0, {100, 1});
  const NumericLambda with = lambda_numeric_detail(sched, p.continuous_rate, 2.0, p.delta);
  EXPECT_DOUBLE_EQ(with.continuous_area, 2.0 * 1e-6 * 1000.0);
  const double without = lambda_numeric(sched, {}, 2.0, p.delta);
  EXPECT_NEAR(with.lambda - without, -2e-3 / sched.end_time, 1e-14);
}

TEST(Circularity, ClosedFormTables) {
  EXPECT_NEAR(closed(1.05, 100, 0.4), kLambdaSac, 1e-12);
  EXPECT_NEAR(closed(1.05, 80, 0.8), kLambdaTqc, 1e-12);
  EXPECT_NEAR(closed(1.05, 0, 86400), kLambdaFail, 1e-12);
  EXPECT_NEAR(closed(2.1, 0, 86400), kLambdaFour, 1e-12);
  EXPECT_NEAR(closed(2.4, 0, 86400), kLambdaChassis, 1e-12);

  EXPECT_EQ(round_to(closed(1.05, 100, 0.4), 1), -2.1);
  EXPECT_EQ(round_to(closed(1.05, 80, 0.8), 1), -2.3);
  EXPECT_EQ(round_to(closed(1.05, 0, 86400), 1), -3.1);
  EXPECT_EQ(round_to(closed(2.1, 0, 86400), 1), -6.3);
  EXPECT_EQ(round_to(closed(2.4, 0, 86400), 1), -7.2);
  EXPECT_DOUBLE_EQ(lambda_closed_form(ScenarioParams{}, 1.05, {0, 86400}).final_time, 5356800.0);
}

TEST(Circularity, Rounding) {
  EXPECT_EQ(round_to(-2.25, 1), -2.3);
  EXPECT_EQ(round_to(2.25, 1), 2.3);
  EXPECT_EQ(round_to(-0.04, 1), 0.0);
  EXPECT_FALSE(std::signbit(round_to(-0.04, 1)));
}

TEST(Circularity, Approximation) {
  EXPECT_NEAR(lambda_approx(ScenarioParams{}, 1.05, 0), -3.15, 1e-12);
  EXPECT_NEAR(lambda_approx(ScenarioParams{}, 1.05, 100), -2.1, 1e-12);
  EXPECT_EQ(lambda_approx(ScenarioParams{}, 0.0, 37), 0.0);
}

TEST(Circularity, Alpha) {
  EXPECT_DOUBLE_EQ(alpha(ScenarioParams{}, 0), 1.5);
  EXPECT_DOUBLE_EQ(alpha(ScenarioParams{}, 100), 1.0);
  ScenarioParams far;
  far.t_reuse = 1e9 * far.t_supply;
  EXPECT_NEAR(alpha(far, 0), 2.0, 1e-6);
  EXPECT_LT(alpha(far, 0), 2.0);
  try {
    alpha(ScenarioParams{}, 101);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::SuccessOutOfRange);
  }
}

TEST(Circularity, PropertyEquivalenceMonotonicityScaling) {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> jitter(0.5, 1.5), succ(0.0, 100.0), mass(0.01, 10.0), k(0.1, 20.0);
  for (int n = 0; n < 1000; ++n) {
    ScenarioParams p;
    p.t_supply *= jitter(rng);
    p.t_transport *= jitter(rng);
    p.t_reuse *= jitter(rng);
    p.t_incineration *= jitter(rng);
    const double m0 = mass(rng);
    const double td = 0.4 * jitter(rng) * (n % 2 ? 1.0 : 2e5);
    const double s = succ(rng);
    const double cf = lambda_closed_form(p, m0, {s, td}).lambda;
    EXPECT_LE(std::abs(numeric(m0, s, td, p) - cf), 1e-9 * std::abs(cf));
    EXPECT_LT(cf, 0.0);

    const double s2 = std::min(100.0, s + 1.0);
    if (s2 > s) {
      EXPECT_GT(lambda_closed_form(p, m0, {s2, td}).lambda, cf);
    }

    const double scale = k(rng);
    EXPECT_NEAR(lambda_closed_form(p, scale * m0, {s, td}).lambda, scale * cf, 1e-12 * std::abs(scale * cf));

    const double a = alpha(p, s);
    EXPECT_GE(a, 1.0);
    EXPECT_LT(a, 2.0);
    if (s2 > s) {
      EXPECT_LE(alpha(p, s2), a);
    }
  }
  EXPECT_EQ(closed(0.0, 30, 5), 0.0);
}

TEST(Circularity, ApproximationQualityTableTiming) {
  for (double td : {0.04, 0.4, 60.0, 3600.0, 86400.0}) {
    for (double s = 0; s <= 100; s += 5) {
      const double exact = closed(1.05, s, td);
      EXPECT_LT(std::abs(lambda_approx(ScenarioParams{}, 1.05, s) - exact) / std::abs(exact), 0.02);
    }
  }
}

TEST(Circularity, SensitivityScalesWithMass) {
  const double d1 = closed(1.05, 100, 1) - closed(1.05, 0, 1);
  const double d2 = closed(2.4, 100, 1) - closed(2.4, 0, 1);
  EXPECT_NEAR(d2 / d1, 2.4 / 1.05, 1e-12);
}

TEST(Circularity, FunctionalBatchAlternative) {
  const ScenarioParams p;
  // with s = 100 nothing is discarded functional, so weight-1 integrand
  const NumericLambda perfect = lambda_numeric_functional_batch(p, 1.05, {100, 0.4}, 2.0);
  EXPECT_NEAR(perfect.lambda, kLambdaSac / 2.0, 1e-12);
  const NumericLambda l0 = lambda_numeric_functional_batch(p, 1.05, {0, 86400}, 1.0);
  EXPECT_NEAR(l0.lambda, kLambdaFail / 2.0, 1e-12);
}

TEST(Circularity, SweepRows) {
  const ScenarioParams p;
  SweepGrid g;
  g.success = {100, 0, 50};
  auto rows = sensitivity_sweep(p, 1.05, {0, 86400}, g);
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[0].value, 0);
  EXPECT_LT(rows[0].lambda_exact, rows[1].lambda_exact);
  EXPECT_LT(rows[1].lambda_exact, rows[2].lambda_exact);
  EXPECT_NEAR(rows[1].lambda_exact, -2.6412298387096773, 1e-12);
  EXPECT_DOUBLE_EQ(rows[0].alpha, 1.5);

  SweepGrid td;
  td.disassembly_time = {0.4, 3600};
  rows = sensitivity_sweep(p, 1.05, {100, 0.4}, td);
  EXPECT_LT(std::abs(rows[1].lambda_exact - rows[0].lambda_exact), 0.01);

  SweepGrid m;
  m.initial_mass = {1.05, 2.1};
  rows = sensitivity_sweep(p, 1.05, {0, 86400}, m);
  EXPECT_NEAR(rows[1].lambda_exact, 2.0 * rows[0].lambda_exact, 1e-12);
  EXPECT_EQ(round_to(rows[0].lambda_exact, 1), -3.1);
  EXPECT_EQ(round_to(rows[1].lambda_exact, 1), -6.3);

  try {
    sensitivity_sweep(p, 1.05, {}, SweepGrid{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::EmptyGrid);
  }
}

TEST(Circularity, SweepCsvHeader) {
  SweepGrid g;
  g.success = {0};
  std::ostringstream out;
  write_sweep_csv(out, sensitivity_sweep(ScenarioParams{}, 1.05, {0, 86400}, g));
  EXPECT_EQ(out.str().substr(0, out.str().find('\n')), "var,value,lambda_exact,lambda_approx,alpha");
  EXPECT_EQ(out.str().substr(out.str().find('\n') + 1, 4), "s,0,");
}

TEST(Circularity, ReportFields) {
  const CircularityReport r = circularity_report(ScenarioParams{}, 1.05, {100, 0.4});
  EXPECT_NEAR(r.lambda_numeric, r.lambda_closed_form, 1e-9 * std::abs(r.lambda_closed_form));
  EXPECT_EQ(r.segment_areas.size(), 3u);
  EXPECT_DOUBLE_EQ(r.final_time, 5270400.4);
  EXPECT_EQ(r.mu, 2.0);
  std::ostringstream text;
  write_report_text(text, r);
  EXPECT_NE(text.str().find("lambda = -2.1\n"), std::string::npos);
}
