#include <gtest/gtest.h>

#include <atomic>
#include <cmath>
#include <set>

#include "cavityqed/scenario.hpp"

using namespace cavityqed;

namespace {

ScenarioConfig small(ScanKind kind) {
  ScenarioConfig c;
  c.scan.kind = kind;
  apply_range_defaults(c.scan);
  c.numerics.l_max = 60;
  return c;
}

}  // namespace

TEST(ParallelMap, OrderedAndComplete) {
  for (int jobs : {1, 3, 8}) {
    const auto v = parallel_map(101, jobs, [](std::size_t i) { return static_cast<int>(i * i); });
    ASSERT_EQ(v.size(), 101u);
    for (std::size_t i = 0; i < v.size(); ++i) EXPECT_EQ(v[i], static_cast<int>(i * i));
  }
  EXPECT_TRUE(parallel_map(0, 4, [](std::size_t) { return 1; }).empty());
}

TEST(ParallelMap, PropagatesExceptions) {
  EXPECT_THROW(parallel_map(50, 4,
                            [](std::size_t i) {
                              if (i == 17) throw SolverError("boom", 1e20);
                              return 0;
                            }),
               SolverError);
}

TEST(Jobs, EnvironmentOverride) {
  ::setenv("CAVITYQED_JOBS", "3", 1);
  EXPECT_EQ(default_jobs(), 3);
  ::setenv("CAVITYQED_JOBS", "zero", 1);
  EXPECT_GE(default_jobs(), 1);
  ::unsetenv("CAVITYQED_JOBS");
  EXPECT_GE(default_jobs(), 1);
}

TEST(Peak, GoldenRefinement) {
  const auto p = locate_peak([](double x) { return -(x - 0.123456) * (x - 0.123456); }, -1.0, 1.0, 21);
  EXPECT_NEAR(p.position, 0.123456, 1e-6);
}

TEST(Scenario, AxialProfileSchema) {
  auto c = small(ScanKind::axial_profile);
  c.scan.range = {0.0, 10.0, 6};
  c.numerics.methods = {"ray", "full"};
  const auto r = run_scenario(c, 2);
  const auto& cols = r.table.columns();
  ASSERT_EQ(cols.size(), 4u);
  EXPECT_EQ(cols[0].name, "kz");
  EXPECT_EQ(cols[1].name, "gamma_ratio");
  EXPECT_EQ(cols[2].name, "shift_ratio");
  EXPECT_EQ(cols[3].name, "method");
  EXPECT_EQ(r.table.rows().size(), 12u);
  EXPECT_EQ(r.table.provenance().config_hash, config_hash(c));
  EXPECT_EQ(r.table.provenance().methods.size(), 2u);
}

TEST(Scenario, ParallelismDoesNotChangeValues) {
  auto c = small(ScanKind::compare);
  c.scan.range = {0.0, 30.0, 7};
  const auto a = write_table(run_scenario(c, 1).table, TableFormat::csv);
  const auto b = write_table(run_scenario(c, 4).table, TableFormat::csv);
  const auto again = write_table(run_scenario(c, 4).table, TableFormat::csv);
  EXPECT_EQ(a, b);
  EXPECT_EQ(b, again);
}

TEST(Scenario, DetuningSweepColumnsPerDipole) {
  auto c = small(ScanKind::detuning_sweep);
  c.scan.range = {-1.0, 1.0, 5};
  c.dipoles = {DipoleOrientation::parallel(), DipoleOrientation::perpendicular()};
  const auto r = run_scenario(c, 2);
  EXPECT_TRUE(r.table.column_index("gamma_parallel"));
  EXPECT_TRUE(r.table.column_index("shift_perpendicular"));
  const auto phi = r.table.numbers("phi0");
  EXPECT_NEAR(phi.back(), linewidth_phase(0.98, 0.98), 1e-15);
  const auto s = r.table.numbers("shift_parallel");
  EXPECT_NEAR(s.front(), -s.back(), 1e-9);
  EXPECT_EQ(r.summary.size(), 2u);
}

TEST(Scenario, RadialMapAndDefocus) {
  auto c = small(ScanKind::radial_map);
  c.scan.range = {0.0, 4.0, 3};
  c.scan.second = {0.0, 4.0, 2};
  c.numerics.methods = {"ray", "full"};
  const auto m = run_scenario(c, 2);
  EXPECT_EQ(m.table.rows().size(), 6u);
  const auto ray = m.table.numbers("ray");
  const auto full = m.table.numbers("full");
  EXPECT_NEAR(full[0] / ray[0], 1.0, 0.05);

  auto d = small(ScanKind::defocus_study);
  d.scan.range = {-0.3, 0.3, 31};
  const auto r = run_scenario(d, 2);
  EXPECT_EQ(r.table.rows().size(), 62u);
  EXPECT_EQ(r.summary.size(), 2u);
}

TEST(Scenario, AiryCheckAgreement) {
  auto c = small(ScanKind::airy_check);
  c.scan.rhos = {0.5, 0.98};
  c.scan.range = {-1.5, 1.5, 7};
  const auto r = run_scenario(c, 2);
  EXPECT_EQ(r.table.rows().size(), 2u * 7u * 3u);
  for (double v : r.table.numbers("relative_deviation")) EXPECT_LT(v, 1e-5);
}

TEST(Scenario, RayValidityWarningSurfaces) {
  auto c = small(ScanKind::axial_profile);
  c.scan.range = {90.0, 130.0, 3};
  const auto r = run_scenario(c, 1);
  EXPECT_FALSE(r.warnings.empty());
}

TEST(Presets, SixValidPresets) {
  const auto ps = presets();
  ASSERT_EQ(ps.size(), 6u);
  std::set<std::string> names;
  for (const auto& p : ps) {
    names.insert(p.name);
    EXPECT_EQ(parse_config(serialize_config(p.config)), p.config) << p.name;
    EXPECT_EQ(p.config.geometry, CavityGeometry::reference()) << p.name;
  }
  EXPECT_EQ(names, (std::set<std::string>{"center-enhancement", "detuning-sweep", "axial-profile", "ray-vs-full",
                                          "defocus-study", "airy-check"}));
  const auto axial = find_preset("axial-profile");
  ASSERT_TRUE(axial);
  EXPECT_EQ(axial->config.scan.range.from, 0.0);
  EXPECT_EQ(axial->config.scan.range.to, 100.0);
  EXPECT_FALSE(find_preset("nope"));
  EXPECT_NE(list_presets().find("defocus-study"), std::string::npos);
}

TEST(ValidationChecks, AllPass) {
  for (const auto& c : validation_checks()) {
    const auto r = c.run();
    EXPECT_TRUE(r.pass) << r.name << ": " << r.detail;
  }
}
