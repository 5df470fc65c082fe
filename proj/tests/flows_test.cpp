#include <gtest/gtest.h>

#include <random>
#include <sstream>
#include <vector>

#include "ciro/flows.hpp"

using namespace ciro;

namespace {

ErrorCode error_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected an error";
  return ErrorCode::ValidationError;
}

}  // namespace

TEST(Flows, WeightedInitialMass) {
  const std::vector<MaterialSpec> two_parts{{"beta_1", 0.1, 1.0}, {"beta_2", 0.95, 1.0}};
  EXPECT_NEAR(weighted_initial_mass(two_parts), 1.05, 1e-15);
  const std::vector<MaterialSpec> chassis{{"beta_1", 0.1, 5.0}, {"beta_2", 0.95, 2.0}};
  EXPECT_NEAR(weighted_initial_mass(chassis), 2.4, 1e-15);
  const std::vector<MaterialSpec> empty_mass{{"x", 0.5, 0.0}};
  EXPECT_EQ(weighted_initial_mass(empty_mass), 0.0);
}

TEST(Flows, WeightedInitialMassErrors) {
  const std::vector<MaterialSpec> bad_c{{"x", 1.5, 1.0}};
  EXPECT_EQ(error_of([&] { weighted_initial_mass(bad_c); }), ErrorCode::InvalidCriticality);
  const std::vector<MaterialSpec> zero_c{{"x", 0.0, 1.0}};
  EXPECT_EQ(error_of([&] { weighted_initial_mass(zero_c); }), ErrorCode::InvalidCriticality);
  const std::vector<MaterialSpec> neg{{"x", 0.5, -1.0}};
  EXPECT_EQ(error_of([&] { weighted_initial_mass(neg); }), ErrorCode::NegativeMass);
}

TEST(Flows, SplitBySuccess) {
  auto full = split_by_success(1.05, 100);
  EXPECT_EQ(full.not_disassembled, 0.0);
  EXPECT_EQ(full.reused, 1.05);
  auto none = split_by_success(1.05, 0);
  EXPECT_EQ(none.not_disassembled, 1.05);
  EXPECT_EQ(none.reused, 0.0);
  auto part = split_by_success(1.05, 80);
  EXPECT_NEAR(part.not_disassembled, 0.21, 1e-15);
  EXPECT_NEAR(part.reused, 0.84, 1e-15);
  EXPECT_NEAR(part.not_disassembled + part.reused, 1.05, 1e-15);

  EXPECT_EQ(error_of([] { split_by_success(1.0, 100.5); }), ErrorCode::SuccessOutOfRange);
  EXPECT_EQ(error_of([] { split_by_success(1.0, -1); }), ErrorCode::SuccessOutOfRange);
}

TEST(Flows, SplitConservationProperty) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> mass(0.0, 1e3), succ(0.0, 100.0);
  for (int n = 0; n < 10000; ++n) {
    const double m0 = mass(rng);
    const MassSplit sp = split_by_success(m0, succ(rng));
    EXPECT_LE(std::abs(sp.not_disassembled + sp.reused - m0), 1e-12 * std::max(1.0, m0));
    EXPECT_GE(sp.not_disassembled, 0.0);
  }
}

TEST(Flows, FunctionalityCoefficient) {
  EXPECT_EQ(functionality_coefficient(1), 2.0);
  EXPECT_EQ(functionality_coefficient(0), 1.0);
  EXPECT_EQ(functionality_coefficient(3), 4.0);
}

TEST(Flows, ScheduleTableOnePerfectDisassembly) {
  const BatchSchedule s = batch_mass_schedule(ScenarioParams{}, 1.05, {100, 0.4});
  ASSERT_EQ(s.breakpoints.size(), 3u);
  EXPECT_EQ(s.breakpoints[0].time, 0.0);
  EXPECT_DOUBLE_EQ(s.breakpoints[1].time, 2595600.4);
  EXPECT_DOUBLE_EQ(s.breakpoints[2].time, 5184000.4);
  EXPECT_DOUBLE_EQ(s.end_time, 5270400.4);
  EXPECT_DOUBLE_EQ(s.breakpoints[0].value, 1.05);
  EXPECT_DOUBLE_EQ(s.breakpoints[1].value, 1.05);
  EXPECT_DOUBLE_EQ(s.breakpoints[2].value, 2.10);
}

TEST(Flows, ScheduleTableOneFailedDisassembly) {
  const BatchSchedule s = batch_mass_schedule(ScenarioParams{}, 1.05, {0, 86400});
  EXPECT_DOUBLE_EQ(s.breakpoints[1].value, 2.10);
  EXPECT_DOUBLE_EQ(s.breakpoints[2].value, 2.10);
  EXPECT_DOUBLE_EQ(s.end_time, 5356800.0);
}

TEST(Flows, ScheduleZeroMass) {
  const BatchSchedule s = batch_mass_schedule(ScenarioParams{}, 0.0, {50, 10});
  for (const auto& b : s.breakpoints) EXPECT_EQ(b.value, 0.0);
}

TEST(Flows, ScheduleRejectsTransportNotBeforeReuse) {
  ScenarioParams p;
  p.t_transport = p.t_reuse;
  EXPECT_EQ(error_of([&] { batch_mass_schedule(p, 1.0, {50, 1}); }), ErrorCode::NonMonotoneBreakpoints);
  EXPECT_EQ(error_of([] { batch_mass_schedule(ScenarioParams{}, 1.0, {50, 0.0}); }), ErrorCode::InvalidParameter);
  EXPECT_EQ(error_of([] { batch_mass_schedule(ScenarioParams{}, 1.0, {120, 1}); }), ErrorCode::SuccessOutOfRange);
}

TEST(Flows, ScheduleProperties) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> succ(0.0, 100.0), td(0.01, 86400.0), mass(0.0, 10.0), k(0.1, 10.0);
  for (int n = 0; n < 2000; ++n) {
    const DisassemblyOutcome o{succ(rng), td(rng)};
    const double m0 = mass(rng);
    const BatchSchedule s = batch_mass_schedule(ScenarioParams{}, m0, o);
    for (std::size_t i = 1; i < s.breakpoints.size(); ++i) {
      EXPECT_GE(s.breakpoints[i].value, s.breakpoints[i - 1].value);
    }
    const double scale = k(rng);
    const BatchSchedule scaled = batch_mass_schedule(ScenarioParams{}, scale * m0, o);
    for (std::size_t i = 0; i < s.breakpoints.size(); ++i) {
      EXPECT_EQ(scaled.breakpoints[i].time, s.breakpoints[i].time);
      EXPECT_NEAR(scaled.breakpoints[i].value, scale * s.breakpoints[i].value, 1e-12 * (1 + scaled.breakpoints[i].value));
    }
  }
  const BatchSchedule perfect = batch_mass_schedule(ScenarioParams{}, 3.0, {100, 1});
  EXPECT_EQ(perfect.breakpoints[0].value, perfect.breakpoints[1].value);
  const BatchSchedule failed = batch_mass_schedule(ScenarioParams{}, 3.0, {0, 1});
  EXPECT_EQ(failed.breakpoints[1].value, failed.breakpoints[2].value);
  EXPECT_EQ(failed.breakpoints[2].value, 6.0);
}

TEST(Flows, ScheduleCsv) {
  const BatchSchedule s = batch_mass_schedule(ScenarioParams{}, 1.05, {100, 0.4});
  std::ostringstream out;
  write_schedule_csv(out, s);
  EXPECT_EQ(out.str(),
            "time_s,mass_kg\n0,1.05\n2595600.3999999999,1.05\n5184000.4000000004,2.1000000000000001\n"
            "5270400.4000000004,2.1000000000000001\n");
}
