#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "cavityqed/io_formats.hpp"

using namespace cavityqed;

namespace {

std::vector<std::string> problems_of(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.problems();
  }
  return {};
}

bool mentions(const std::vector<std::string>& problems, const std::string& what) {
  for (const auto& p : problems)
    if (p.find(what) != std::string::npos) return true;
  return false;
}

const char* paper_config = R"({
  "name": "paper",
  "geometry": {"kR": 100000, "theta_m": 0.7853981633974483, "rho": 0.98},
  "dipoles": ["parallel", "perpendicular", {"vector": [0.6, 0.0, 0.8]}],
  "scan": {"kind": "compare", "range": {"from": 0, "to": 100, "steps": 101}},
  "numerics": {"l_max": 150, "methods": ["full", "ray"]},
  "outputs": {"formats": ["csv"], "plot": false}
})";

}  // namespace

TEST(Config, MinimalConfigGetsDefaults) {
  const auto c = parse_config(R"({"scan": {"kind": "axial-profile"}})");
  EXPECT_EQ(c.numerics.l_max, 150);
  EXPECT_EQ(c.numerics.polar_order, 64);
  EXPECT_EQ(c.numerics.azimuthal_order, 32);
  EXPECT_EQ(c.geometry, CavityGeometry::reference());
  EXPECT_EQ(c.scan.range.from, 0.0);
  EXPECT_EQ(c.scan.range.to, 100.0);
  EXPECT_EQ(c.outputs.stem, "axial-profile");
  ASSERT_EQ(c.dipoles.size(), 1u);
  EXPECT_EQ(c.dipoles[0].kind, DipoleClass::isotropic);
}

TEST(Config, ReflectivityOutOfRange) {
  const auto p = problems_of(R"({"geometry": {"rho1": 1.2}, "scan": {"kind": "compare"}})");
  EXPECT_TRUE(mentions(p, "reflectivity out of [0,1]"));
}

TEST(Config, AllProblemsReportedAtOnce) {
  const auto p = problems_of(R"({"geometry": {"rho1": 1.2, "kR": -1, "colour": 3},
    "scan": {"kind": "nope"}, "numerics": {"l_max": "big", "methods": ["magic"]}})");
  EXPECT_TRUE(mentions(p, "rho1"));
  EXPECT_TRUE(mentions(p, "kR"));
  EXPECT_TRUE(mentions(p, "colour"));
  EXPECT_TRUE(mentions(p, "unknown scan kind"));
  EXPECT_TRUE(mentions(p, "l_max"));
  EXPECT_TRUE(mentions(p, "magic"));
}

TEST(Config, MissingScanKindAndSyntaxErrors) {
  EXPECT_TRUE(mentions(problems_of("{}"), "scan"));
  EXPECT_TRUE(mentions(problems_of(R"({"scan": {}})"), "scan.kind"));
  EXPECT_TRUE(mentions(problems_of("{\n  \"scan\": {\"kind\": \"compare\",}\n}"), "line 2"));
  EXPECT_TRUE(mentions(problems_of(R"({"scan": {"kind": "compare"}, "dipoles": [{"vector": [1, 1, 0]}]})"), "unit vector"));
  EXPECT_TRUE(mentions(problems_of(R"({"scan": {"kind": "compare"}, "outputs": {"stem": "../x"}})"), "plain file name"));
}

TEST(Config, PaperConfigRoundTripsExactly) {
  const auto c = parse_config(paper_config);
  EXPECT_EQ(c.geometry.theta_m1, c.geometry.theta_m2);
  EXPECT_EQ(c.dipoles.size(), 3u);
  const std::string s = serialize_config(c);
  const auto back = parse_config(s);
  EXPECT_EQ(back, c);
  EXPECT_EQ(serialize_config(back), s);
  EXPECT_EQ(config_hash(back), config_hash(c));
}

TEST(Config, RoundTripKeepsAwkwardDoubles) {
  ScenarioConfig c;
  c.scan.kind = ScanKind::radial_map;
  c.outputs.stem = "map";
  c.geometry.kR = 123456.78901234567;
  c.geometry.theta_m1 = 0.1 + 0.2;
  c.scan.phi0 = -1e-17;
  c.scan.rhos = {std::nextafter(0.5, 1.0)};
  EXPECT_EQ(parse_config(serialize_config(c)), c);
}

TEST(Config, HashChangesWithContent) {
  auto a = parse_config(paper_config);
  auto b = a;
  b.scan.phi0 = 1e-3;
  EXPECT_NE(config_hash(a), config_hash(b));
  EXPECT_EQ(config_hash(a).size(), 16u);
  EXPECT_EQ(fnv1a_hex(""), "cbf29ce484222325");
}

TEST(RangeSpec, EndpointsExact) {
  const RangeSpec r{-0.35, 0.35, 141};
  const auto v = r.values();
  ASSERT_EQ(v.size(), 141u);
  EXPECT_EQ(v.front(), -0.35);
  EXPECT_EQ(v.back(), 0.35);
}

TEST(Tables, EmptyTableIsHeaderOnly) {
  ResultTable t({{"kz", "1"}, {"gamma_ratio", "1"}, {"shift_ratio", "1"}, {"method", "", ColumnType::text}});
  EXPECT_EQ(write_table(t, TableFormat::csv), "kz [1],gamma_ratio [1],shift_ratio [1],method\r\n");
}

TEST(Tables, RowValidation) {
  ResultTable t({{"a", "1"}, {"b", "", ColumnType::text}});
  EXPECT_THROW(t.add_row({1.0}), std::invalid_argument);
  EXPECT_THROW(t.add_row({std::string("x"), std::string("y")}), std::invalid_argument);
  t.add_row({1.0, std::string("needs, \"quoting\"")});
  EXPECT_EQ(write_table(t, TableFormat::csv), "a [1],b\r\n1,\"needs, \"\"quoting\"\"\"\r\n");
  EXPECT_THROW(t.numbers("b"), std::invalid_argument);
}

TEST(Tables, JsonRoundTripIsBitExact) {
  ResultTable t({{"x", "rad"}, {"y", "1"}, {"tag", "", ColumnType::text}});
  t.add_row({0.1, 1.0 / 3.0, std::string("a")});
  t.add_row({-2.5e-300, std::numeric_limits<double>::max(), std::string("b")});
  t.add_row({std::nextafter(1.0, 2.0), std::numeric_limits<double>::infinity(), std::string("")});
  t.provenance().config_hash = "0123456789abcdef";
  t.provenance().methods = {"full"};
  t.provenance().accuracy = {{"l_max", 150}};
  const auto back = table_from_json(write_table(t, TableFormat::json));
  ASSERT_EQ(back.rows().size(), t.rows().size());
  for (std::size_t i = 0; i < t.rows().size(); ++i)
    for (std::size_t j = 0; j < 3; ++j) EXPECT_EQ(back.rows()[i][j], t.rows()[i][j]) << i << "," << j;
  EXPECT_EQ(back.provenance().config_hash, t.provenance().config_hash);
  EXPECT_EQ(back.provenance().methods, t.provenance().methods);
  EXPECT_EQ(back.provenance().version, std::string(version_string));
  EXPECT_EQ(write_table(back, TableFormat::json), write_table(t, TableFormat::json));
}

TEST(Tables, CsvNumbersRoundTrip) {
  ResultTable t(std::vector<Column>{{"v", "1"}});
  const double x = 0.1 + 0.7;
  t.add_row({x});
  const auto csv = write_table(t, TableFormat::csv);
  const auto line = csv.substr(csv.find("\r\n") + 2);
  EXPECT_EQ(std::stod(line), x);
}

TEST(Plots, DetuningSweepIsTwoPanels) {
  ResultTable t({{"detuning", "linewidth"}, {"phi0", "rad"}, {"gamma_parallel", "1"}, {"shift_parallel", "1"}});
  const auto g = emit_plot_script(t, "detuning-sweep", "sweep.csv");
  EXPECT_NE(g.find("multiplot layout 1,2"), std::string::npos);
  EXPECT_NE(g.find("using 1:3"), std::string::npos);
  EXPECT_NE(g.find("using 1:4"), std::string::npos);
  EXPECT_NE(g.find("sweep.png"), std::string::npos);
}

TEST(Plots, CompareOverlaysFullAndRay) {
  ResultTable t({{"kz", "1"}, {"full", "1"}, {"ray", "1"}, {"ray_naive", "1"}});
  const auto g = emit_plot_script(t, "compare", "c.csv");
  EXPECT_NE(g.find("using 1:2"), std::string::npos);
  EXPECT_NE(g.find("using 1:3"), std::string::npos);
  EXPECT_NE(g.find("using 1:4"), std::string::npos);
}

TEST(Plots, UnknownKindOrMissingColumnRejected) {
  ResultTable t(std::vector<Column>{{"kz", "1"}});
  EXPECT_THROW(emit_plot_script(t, "histogram", "x.csv"), std::invalid_argument);
  EXPECT_THROW(emit_plot_script(t, "compare", "x.csv"), std::invalid_argument);
  for (const auto& k : plot_kinds()) EXPECT_TRUE(scan_kind_from(k).has_value()) << k;
}
