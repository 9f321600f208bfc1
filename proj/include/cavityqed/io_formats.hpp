#pragma once

// Scenario configuration (JSON), result tables (CSV / JSON) and gnuplot
// scripts for them.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"

#include "cavityqed/core.hpp"
#include "cavityqed/dipole_response.hpp"
#include "cavityqed/geometry.hpp"

#ifndef CAVITYQED_VERSION
#define CAVITYQED_VERSION "0.1.0"
#endif

namespace cavityqed {

using ojson = nlohmann::ordered_json;

inline constexpr const char* version_string = CAVITYQED_VERSION;

// ---------------------------------------------------------------------------
// Configuration

enum class ScanKind { detuning_sweep, axial_profile, radial_map, compare, defocus_study, airy_check };

inline const std::vector<std::pair<ScanKind, std::string>>& scan_kind_names() {
  static const std::vector<std::pair<ScanKind, std::string>> names{
      {ScanKind::detuning_sweep, "detuning-sweep"}, {ScanKind::axial_profile, "axial-profile"},
      {ScanKind::radial_map, "radial-map"},         {ScanKind::compare, "compare"},
      {ScanKind::defocus_study, "defocus-study"},   {ScanKind::airy_check, "airy-check"}};
  return names;
}

inline std::string to_string(ScanKind k) {
  for (const auto& [kind, name] : scan_kind_names())
    if (kind == k) return name;
  return "?";
}

inline std::optional<ScanKind> scan_kind_from(const std::string& s) {
  for (const auto& [kind, name] : scan_kind_names())
    if (name == s) return kind;
  return std::nullopt;
}

struct RangeSpec {
  double from = 0.0;
  double to = 1.0;
  int steps = 2;

  std::vector<double> values() const {
    std::vector<double> v(static_cast<std::size_t>(steps));
    for (int i = 0; i < steps; ++i) v[static_cast<std::size_t>(i)] = (i == steps - 1) ? to : from + (to - from) * i / (steps - 1);
    return v;
  }
  bool operator==(const RangeSpec&) const = default;
};

// The meaning of `range` depends on the kind:
//   detuning-sweep  detuning (unit given by detuning_unit) at `point`
//   axial-profile   kz on the axis, at detuning phi0
//   compare         kz on the axis, full vs ray, at detuning phi0
//   radial-map      transverse kx; `second` spans kz
//   defocus-study   detuning (detuning_unit) for each entry of k_deltas, at the center
//   airy-check      phase phi for each entry of rhos
struct ScanConfig {
  ScanKind kind = ScanKind::axial_profile;
  RangeSpec range;
  RangeSpec second;
  std::string detuning_unit = "linewidth";
  double phi0 = 0.0;
  Vec3 point{};
  std::vector<double> k_deltas{0.0, 0.3};
  std::vector<double> rhos{0.1, 0.5, 0.9, 0.98};
  bool operator==(const ScanConfig&) const = default;
};

struct NumericsConfig {
  int l_max = 150;
  int polar_order = 64;
  int azimuthal_order = 32;
  double tail_tolerance = 1e-8;
  double pv_tolerance = 1e-10;
  std::vector<std::string> methods{"ray"};
  bool aberration = true;
  bool diffraction = true;
  std::string ray_method = "asymmetric";
  double validity_kr = 100.0;
  bool operator==(const NumericsConfig&) const = default;
};

struct OutputConfig {
  std::string stem;
  std::vector<std::string> formats{"csv", "json"};
  bool plot = true;
  bool operator==(const OutputConfig&) const = default;
};

struct ScenarioConfig {
  std::string name;
  CavityGeometry geometry;
  std::vector<DipoleOrientation> dipoles{DipoleOrientation::isotropic()};
  ScanConfig scan;
  NumericsConfig numerics;
  OutputConfig outputs;
  bool operator==(const ScenarioConfig&) const = default;

  RayOptions ray_options() const {
    RayOptions opt;
    opt.corrections = {numerics.aberration, numerics.diffraction};
    opt.method = numerics.ray_method == "symmetric" ? RayMethod::symmetric : RayMethod::asymmetric;
    opt.polar_order = numerics.polar_order;
    opt.azimuthal_order = numerics.azimuthal_order;
    opt.validity_kr = numerics.validity_kr;
    return opt;
  }
  bool uses(const std::string& method) const {
    for (const auto& m : numerics.methods)
      if (m == method) return true;
    return false;
  }
};

/// Default scan ranges per kind, used when the config omits them.
inline void apply_range_defaults(ScanConfig& s) {
  switch (s.kind) {
    case ScanKind::detuning_sweep: s.range = {-3.0, 3.0, 121}; break;
    case ScanKind::axial_profile: s.range = {0.0, 100.0, 201}; break;
    case ScanKind::compare: s.range = {0.0, 100.0, 101}; break;
    case ScanKind::radial_map:
      s.range = {0.0, 20.0, 11};
      s.second = {0.0, 20.0, 11};
      break;
    case ScanKind::defocus_study: s.range = {-0.35, 0.35, 141}; break;
    case ScanKind::airy_check: s.range = {-pi / 2 + pi / 64, pi / 2 - pi / 64, 32}; break;
  }
  if (s.kind == ScanKind::defocus_study) s.detuning_unit = "radian";
}

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<std::string> problems)
      : std::runtime_error(join(problems)), problems_(std::move(problems)) {}
  const std::vector<std::string>& problems() const { return problems_; }

 private:
  static std::string join(const std::vector<std::string>& p) {
    std::string s = "invalid configuration:";
    for (const auto& x : p) s += "\n  " + x;
    return s;
  }
  std::vector<std::string> problems_;
};

namespace detail {

// Collects violations while reading typed fields out of a JSON object.
class Reader {
 public:
  explicit Reader(std::vector<std::string>& problems) : problems_(problems) {}

  void fail(const std::string& path, const std::string& what) { problems_.push_back(path + ": " + what); }

  void check_keys(const ojson& obj, const std::string& path, std::initializer_list<const char*> allowed) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
      bool ok = false;
      for (const char* a : allowed) ok = ok || it.key() == a;
      if (!ok) fail(path + "." + it.key(), "unknown key");
    }
  }

  const ojson* object(const ojson& parent, const char* key, const std::string& path) {
    if (!parent.contains(key)) return nullptr;
    const auto& v = parent.at(key);
    if (!v.is_object()) {
      fail(path + "." + key, "must be an object");
      return nullptr;
    }
    return &v;
  }

  void number(const ojson& obj, const char* key, const std::string& path, double& out) {
    if (!obj.contains(key)) return;
    const auto& v = obj.at(key);
    if (!v.is_number()) return fail(path + "." + key, "must be a number");
    out = v.get<double>();
  }

  void integer(const ojson& obj, const char* key, const std::string& path, int& out) {
    if (!obj.contains(key)) return;
    const auto& v = obj.at(key);
    if (!v.is_number_integer()) return fail(path + "." + key, "must be an integer");
    out = v.get<int>();
  }

  void boolean(const ojson& obj, const char* key, const std::string& path, bool& out) {
    if (!obj.contains(key)) return;
    const auto& v = obj.at(key);
    if (!v.is_boolean()) return fail(path + "." + key, "must be true or false");
    out = v.get<bool>();
  }

  void string(const ojson& obj, const char* key, const std::string& path, std::string& out) {
    if (!obj.contains(key)) return;
    const auto& v = obj.at(key);
    if (!v.is_string()) return fail(path + "." + key, "must be a string");
    out = v.get<std::string>();
  }

  void numbers(const ojson& obj, const char* key, const std::string& path, std::vector<double>& out) {
    if (!obj.contains(key)) return;
    const auto& v = obj.at(key);
    if (!v.is_array()) return fail(path + "." + key, "must be an array of numbers");
    std::vector<double> tmp;
    for (const auto& e : v) {
      if (!e.is_number()) return fail(path + "." + key, "must be an array of numbers");
      tmp.push_back(e.get<double>());
    }
    out = std::move(tmp);
  }

  void strings(const ojson& obj, const char* key, const std::string& path, std::vector<std::string>& out) {
    if (!obj.contains(key)) return;
    const auto& v = obj.at(key);
    if (!v.is_array()) return fail(path + "." + key, "must be an array of strings");
    std::vector<std::string> tmp;
    for (const auto& e : v) {
      if (!e.is_string()) return fail(path + "." + key, "must be an array of strings");
      tmp.push_back(e.get<std::string>());
    }
    out = std::move(tmp);
  }

  void vec3(const ojson& obj, const char* key, const std::string& path, Vec3& out) {
    if (!obj.contains(key)) return;
    std::vector<double> v;
    numbers(obj, key, path, v);
    if (v.size() != 3) return fail(path + "." + key, "must have exactly 3 components");
    out = {v[0], v[1], v[2]};
  }

  void range(const ojson& obj, const char* key, const std::string& path, RangeSpec& out) {
    const ojson* r = object(obj, key, path);
    if (!r) return;
    const std::string p = path + "." + key;
    check_keys(*r, p, {"from", "to", "steps"});
    number(*r, "from", p, out.from);
    number(*r, "to", p, out.to);
    integer(*r, "steps", p, out.steps);
    if (!(std::isfinite(out.from) && std::isfinite(out.to)) || !(out.to > out.from)) fail(p, "range must be non-empty (to > from)");
    if (out.steps < 2) fail(p + ".steps", "must be >= 2");
  }

 private:
  std::vector<std::string>& problems_;
};

inline std::pair<std::size_t, std::size_t> line_column(const std::string& text, std::size_t byte) {
  std::size_t line = 1;
  std::size_t col = 1;
  for (std::size_t i = 0; i + 1 < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

}  // namespace detail

/// Parse and validate; throws ConfigError listing every violation found.
inline ScenarioConfig parse_config(const std::string& text) {
  ojson doc;
  try {
    doc = ojson::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    const auto [line, col] = detail::line_column(text, e.byte);
    std::ostringstream msg;
    msg << "parse error at line " << line << ", column " << col << ": " << e.what();
    throw ConfigError({msg.str()});
  }

  std::vector<std::string> problems;
  detail::Reader rd(problems);
  ScenarioConfig cfg;
  if (!doc.is_object()) throw ConfigError({"config: top level must be an object"});
  rd.check_keys(doc, "config", {"name", "geometry", "dipoles", "scan", "numerics", "outputs"});
  rd.string(doc, "name", "config", cfg.name);

  if (const ojson* g = rd.object(doc, "geometry", "config")) {
    const std::string p = "geometry";
    rd.check_keys(*g, p, {"kR", "theta_m", "theta_m1", "theta_m2", "rho", "rho1", "rho2", "k_delta"});
    auto& geo = cfg.geometry;
    double theta = geo.theta_m1;
    double rho = geo.rho1;
    if (g->contains("theta_m")) {
      rd.number(*g, "theta_m", p, theta);
      geo.theta_m1 = geo.theta_m2 = theta;
    }
    if (g->contains("rho")) {
      rd.number(*g, "rho", p, rho);
      geo.rho1 = geo.rho2 = rho;
    }
    rd.number(*g, "kR", p, geo.kR);
    rd.number(*g, "theta_m1", p, geo.theta_m1);
    rd.number(*g, "theta_m2", p, geo.theta_m2);
    rd.number(*g, "rho1", p, geo.rho1);
    rd.number(*g, "rho2", p, geo.rho2);
    rd.number(*g, "k_delta", p, geo.k_delta);
  }
  for (const auto& v : cfg.geometry.violations()) problems.push_back("geometry." + v);

  if (doc.contains("dipoles")) {
    const auto& d = doc.at("dipoles");
    if (!d.is_array() || d.empty()) {
      rd.fail("dipoles", "must be a non-empty array");
    } else {
      cfg.dipoles.clear();
      for (std::size_t i = 0; i < d.size(); ++i) {
        const std::string p = "dipoles[" + std::to_string(i) + "]";
        const auto& e = d[i];
        if (e.is_string()) {
          const auto s = e.get<std::string>();
          if (s == "parallel") cfg.dipoles.push_back(DipoleOrientation::parallel());
          else if (s == "perpendicular") cfg.dipoles.push_back(DipoleOrientation::perpendicular());
          else if (s == "isotropic") cfg.dipoles.push_back(DipoleOrientation::isotropic());
          else rd.fail(p, "unknown orientation '" + s + "' (parallel, perpendicular, isotropic or {\"vector\": [x,y,z]})");
        } else if (e.is_object()) {
          rd.check_keys(e, p, {"vector"});
          Vec3 v{};
          rd.vec3(e, "vector", p, v);
          const double n = norm(v);
          if (!(n > 0.0) || !std::isfinite(n)) rd.fail(p + ".vector", "must be a finite non-zero vector");
          else if (std::abs(n - 1.0) > 1e-12) rd.fail(p + ".vector", "must be a unit vector");
          else cfg.dipoles.push_back({DipoleClass::vector, v});
        } else {
          rd.fail(p, "must be an orientation name or {\"vector\": [x,y,z]}");
        }
      }
    }
  }

  const ojson* s = rd.object(doc, "scan", "config");
  if (!s) {
    rd.fail("scan", "required section missing");
  } else {
    const std::string p = "scan";
    rd.check_keys(*s, p, {"kind", "range", "second", "detuning_unit", "phi0", "point", "k_deltas", "rhos"});
    auto& sc = cfg.scan;
    std::string kind;
    rd.string(*s, "kind", p, kind);
    if (kind.empty()) {
      rd.fail("scan.kind", "required");
    } else if (auto k = scan_kind_from(kind)) {
      sc.kind = *k;
    } else {
      rd.fail("scan.kind", "unknown scan kind '" + kind + "'");
    }
    apply_range_defaults(sc);
    rd.range(*s, "range", p, sc.range);
    rd.range(*s, "second", p, sc.second);
    rd.string(*s, "detuning_unit", p, sc.detuning_unit);
    if (sc.detuning_unit != "linewidth" && sc.detuning_unit != "radian") rd.fail("scan.detuning_unit", "must be 'linewidth' or 'radian'");
    rd.number(*s, "phi0", p, sc.phi0);
    if (!std::isfinite(sc.phi0)) rd.fail("scan.phi0", "must be finite");
    rd.vec3(*s, "point", p, sc.point);
    rd.numbers(*s, "k_deltas", p, sc.k_deltas);
    rd.numbers(*s, "rhos", p, sc.rhos);
    if (sc.k_deltas.empty()) rd.fail("scan.k_deltas", "must not be empty");
    for (double kd : sc.k_deltas)
      if (!std::isfinite(kd)) rd.fail("scan.k_deltas", "entries must be finite");
    if (sc.rhos.empty()) rd.fail("scan.rhos", "must not be empty");
    for (double r : sc.rhos)
      if (!(r >= 0.0 && r < 1.0)) rd.fail("scan.rhos", "reflectivity out of [0,1)");
  }

  if (const ojson* n = rd.object(doc, "numerics", "config")) {
    const std::string p = "numerics";
    rd.check_keys(*n, p, {"l_max", "polar_order", "azimuthal_order", "tail_tolerance", "pv_tolerance", "methods", "aberration",
                          "diffraction", "ray_method", "validity_kr"});
    auto& nu = cfg.numerics;
    rd.integer(*n, "l_max", p, nu.l_max);
    rd.integer(*n, "polar_order", p, nu.polar_order);
    rd.integer(*n, "azimuthal_order", p, nu.azimuthal_order);
    rd.number(*n, "tail_tolerance", p, nu.tail_tolerance);
    rd.number(*n, "pv_tolerance", p, nu.pv_tolerance);
    rd.strings(*n, "methods", p, nu.methods);
    rd.boolean(*n, "aberration", p, nu.aberration);
    rd.boolean(*n, "diffraction", p, nu.diffraction);
    rd.string(*n, "ray_method", p, nu.ray_method);
    rd.number(*n, "validity_kr", p, nu.validity_kr);
  }
  {
    const auto& nu = cfg.numerics;
    if (nu.l_max < 0 || nu.l_max > 400) rd.fail("numerics.l_max", "must lie in [0, 400]");
    if (nu.polar_order < 2) rd.fail("numerics.polar_order", "must be >= 2");
    if (nu.azimuthal_order < 2) rd.fail("numerics.azimuthal_order", "must be >= 2");
    if (!(nu.tail_tolerance > 0.0)) rd.fail("numerics.tail_tolerance", "must be > 0");
    if (!(nu.pv_tolerance > 0.0)) rd.fail("numerics.pv_tolerance", "must be > 0");
    if (nu.methods.empty()) rd.fail("numerics.methods", "must not be empty");
    for (const auto& m : nu.methods)
      if (m != "ray" && m != "full") rd.fail("numerics.methods", "unknown method '" + m + "' (ray, full)");
    if (nu.ray_method != "symmetric" && nu.ray_method != "asymmetric") rd.fail("numerics.ray_method", "must be 'symmetric' or 'asymmetric'");
    if (nu.ray_method == "symmetric" &&
        !(cfg.geometry.rho1 == cfg.geometry.rho2 && cfg.geometry.theta_m1 == cfg.geometry.theta_m2))
      rd.fail("numerics.ray_method", "'symmetric' needs identical mirrors");
    if (!(nu.validity_kr > 0.0)) rd.fail("numerics.validity_kr", "must be > 0");
  }

  if (const ojson* o = rd.object(doc, "outputs", "config")) {
    const std::string p = "outputs";
    rd.check_keys(*o, p, {"stem", "formats", "plot"});
    rd.string(*o, "stem", p, cfg.outputs.stem);
    rd.strings(*o, "formats", p, cfg.outputs.formats);
    rd.boolean(*o, "plot", p, cfg.outputs.plot);
  }
  if (cfg.outputs.stem.empty()) cfg.outputs.stem = cfg.name.empty() ? to_string(cfg.scan.kind) : cfg.name;
  if (cfg.outputs.stem.find_first_of("/\\") != std::string::npos) rd.fail("outputs.stem", "must be a plain file name");
  if (cfg.outputs.formats.empty()) rd.fail("outputs.formats", "must not be empty");
  for (const auto& f : cfg.outputs.formats)
    if (f != "csv" && f != "json") rd.fail("outputs.formats", "unknown format '" + f + "' (csv, json)");

  if (!problems.empty()) throw ConfigError(problems);
  return cfg;
}

inline ojson config_to_json(const ScenarioConfig& c) {
  ojson j;
  j["name"] = c.name;
  const auto& g = c.geometry;
  j["geometry"] = {{"kR", g.kR}, {"theta_m1", g.theta_m1}, {"theta_m2", g.theta_m2},
                   {"rho1", g.rho1}, {"rho2", g.rho2}, {"k_delta", g.k_delta}};
  ojson dips = ojson::array();
  for (const auto& d : c.dipoles) {
    if (d.kind == DipoleClass::vector) dips.push_back({{"vector", {d.d.x, d.d.y, d.d.z}}});
    else dips.push_back(d.name());
  }
  j["dipoles"] = dips;
  const auto& s = c.scan;
  j["scan"] = {{"kind", to_string(s.kind)},
               {"range", {{"from", s.range.from}, {"to", s.range.to}, {"steps", s.range.steps}}},
               {"second", {{"from", s.second.from}, {"to", s.second.to}, {"steps", s.second.steps}}},
               {"detuning_unit", s.detuning_unit},
               {"phi0", s.phi0},
               {"point", {s.point.x, s.point.y, s.point.z}},
               {"k_deltas", s.k_deltas},
               {"rhos", s.rhos}};
  const auto& n = c.numerics;
  j["numerics"] = {{"l_max", n.l_max},
                   {"polar_order", n.polar_order},
                   {"azimuthal_order", n.azimuthal_order},
                   {"tail_tolerance", n.tail_tolerance},
                   {"pv_tolerance", n.pv_tolerance},
                   {"methods", n.methods},
                   {"aberration", n.aberration},
                   {"diffraction", n.diffraction},
                   {"ray_method", n.ray_method},
                   {"validity_kr", n.validity_kr}};
  j["outputs"] = {{"stem", c.outputs.stem}, {"formats", c.outputs.formats}, {"plot", c.outputs.plot}};
  return j;
}

inline std::string serialize_config(const ScenarioConfig& c) { return config_to_json(c).dump(2) + "\n"; }

/// 64-bit FNV-1a, printed as 16 hex digits.
inline std::string fnv1a_hex(const std::string& data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : data) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

inline std::string config_hash(const ScenarioConfig& c) { return fnv1a_hex(config_to_json(c).dump()); }

// ---------------------------------------------------------------------------
// Result tables

enum class ColumnType { number, text };

struct Column {
  std::string name;
  std::string unit;  // "1" for dimensionless ratios
  ColumnType type = ColumnType::number;
};

using Cell = std::variant<double, std::string>;

struct Provenance {
  std::string config_hash;
  std::string version = version_string;
  std::vector<std::string> methods;
  ojson accuracy = ojson::object();
  ojson config = ojson::object();
};

class ResultTable {
 public:
  ResultTable() = default;
  explicit ResultTable(std::vector<Column> columns) : columns_(std::move(columns)) {}

  const std::vector<Column>& columns() const { return columns_; }
  const std::vector<std::vector<Cell>>& rows() const { return rows_; }
  Provenance& provenance() { return provenance_; }
  const Provenance& provenance() const { return provenance_; }

  void add_row(std::vector<Cell> row) {
    if (row.size() != columns_.size())
      throw std::invalid_argument("ResultTable: row has " + std::to_string(row.size()) + " cells, table has " +
                                  std::to_string(columns_.size()) + " columns");
    for (std::size_t i = 0; i < row.size(); ++i) {
      const bool is_num = std::holds_alternative<double>(row[i]);
      if (is_num != (columns_[i].type == ColumnType::number))
        throw std::invalid_argument("ResultTable: wrong cell type in column '" + columns_[i].name + "'");
    }
    rows_.push_back(std::move(row));
  }

  std::optional<std::size_t> column_index(const std::string& name) const {
    for (std::size_t i = 0; i < columns_.size(); ++i)
      if (columns_[i].name == name) return i;
    return std::nullopt;
  }

  std::vector<double> numbers(const std::string& name) const {
    const auto idx = column_index(name);
    if (!idx || columns_[*idx].type != ColumnType::number) throw std::invalid_argument("ResultTable: no numeric column '" + name + "'");
    std::vector<double> v;
    v.reserve(rows_.size());
    for (const auto& r : rows_) v.push_back(std::get<double>(r[*idx]));
    return v;
  }

 private:
  std::vector<Column> columns_;
  std::vector<std::vector<Cell>> rows_;
  Provenance provenance_;
};

enum class TableFormat { csv, json };

namespace detail {

inline std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace detail

inline std::string column_header(const Column& c) { return c.unit.empty() ? c.name : c.name + " [" + c.unit + "]"; }

inline ojson table_to_json(const ResultTable& t) {
  ojson j;
  j["schema"] = "cavityqed.result-table/1";
  ojson cols = ojson::array();
  for (const auto& c : t.columns())
    cols.push_back({{"name", c.name}, {"unit", c.unit}, {"type", c.type == ColumnType::number ? "number" : "text"}});
  j["columns"] = cols;
  ojson rows = ojson::array();
  for (const auto& r : t.rows()) {
    ojson row = ojson::array();
    for (const auto& cell : r) {
      if (const double* d = std::get_if<double>(&cell)) {
        if (std::isfinite(*d)) row.push_back(*d);
        else row.push_back(detail::format_number(*d));
      } else {
        row.push_back(std::get<std::string>(cell));
      }
    }
    rows.push_back(row);
  }
  j["rows"] = rows;
  const auto& p = t.provenance();
  j["provenance"] = {{"config_hash", p.config_hash}, {"version", p.version}, {"methods", p.methods},
                     {"accuracy", p.accuracy},       {"config", p.config}};
  return j;
}

inline ResultTable table_from_json(const std::string& text) {
  const auto j = ojson::parse(text);
  std::vector<Column> cols;
  for (const auto& c : j.at("columns"))
    cols.push_back({c.at("name").get<std::string>(), c.at("unit").get<std::string>(),
                    c.at("type").get<std::string>() == "number" ? ColumnType::number : ColumnType::text});
  ResultTable t(cols);
  for (const auto& r : j.at("rows")) {
    std::vector<Cell> row;
    for (std::size_t i = 0; i < r.size(); ++i) {
      if (cols.at(i).type == ColumnType::number) {
        if (r[i].is_number()) row.emplace_back(r[i].get<double>());
        else row.emplace_back(std::stod(r[i].get<std::string>()));
      } else {
        row.emplace_back(r[i].get<std::string>());
      }
    }
    t.add_row(std::move(row));
  }
  const auto& p = j.at("provenance");
  auto& prov = t.provenance();
  prov.config_hash = p.at("config_hash").get<std::string>();
  prov.version = p.at("version").get<std::string>();
  prov.methods = p.at("methods").get<std::vector<std::string>>();
  prov.accuracy = p.at("accuracy");
  prov.config = p.at("config");
  return t;
}

inline std::string write_table(const ResultTable& t, TableFormat format) {
  if (format == TableFormat::json) return table_to_json(t).dump(2) + "\n";
  std::string out;
  for (std::size_t i = 0; i < t.columns().size(); ++i) {
    if (i) out += ',';
    out += detail::csv_field(column_header(t.columns()[i]));
  }
  out += "\r\n";
  for (const auto& r : t.rows()) {
    for (std::size_t i = 0; i < r.size(); ++i) {
      if (i) out += ',';
      if (const double* d = std::get_if<double>(&r[i])) out += detail::format_number(*d);
      else out += detail::csv_field(std::get<std::string>(r[i]));
    }
    out += "\r\n";
  }
  return out;
}

inline void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open '" + path + "' for writing");
  f << content;
  f.close();
  if (!f) throw std::runtime_error("write to '" + path + "' failed");
}

inline void write_table_file(const ResultTable& t, const std::string& path, TableFormat format) {
  write_text_file(path, write_table(t, format));
}

// ---------------------------------------------------------------------------
// Plot scripts

inline const std::vector<std::string>& plot_kinds() {
  static const std::vector<std::string> kinds{"detuning-sweep", "axial-profile", "compare",
                                              "radial-map",     "defocus-study", "airy-check"};
  return kinds;
}

/// gnuplot script that reads `data_file` (CSV written by write_table).
inline std::string emit_plot_script(const ResultTable& t, const std::string& kind, const std::string& data_file) {
  auto col = [&](const std::string& name) -> std::size_t {
    const auto idx = t.column_index(name);
    if (!idx) throw std::invalid_argument("emit_plot_script: plot kind '" + kind + "' needs column '" + name + "'");
    return *idx + 1;
  };
  auto title = [&](std::size_t c) { return column_header(t.columns()[c - 1]); };
  auto starts_with = [](const std::string& s, const std::string& p) { return s.rfind(p, 0) == 0; };

  std::ostringstream g;
  const std::string stem = data_file.substr(0, data_file.rfind('.'));
  g << "# gnuplot script; data in " << data_file << "\n"
    << "set datafile separator ','\n"
    << "set terminal pngcairo size 1200,600 enhanced\n"
    << "set output '" << stem << ".png'\n"
    << "set grid\n"
    << "data = '" << data_file << "'\n";

  if (kind == "detuning-sweep") {
    const std::size_t x = col("detuning");
    std::vector<std::size_t> gammas, shifts;
    for (std::size_t i = 0; i < t.columns().size(); ++i) {
      if (starts_with(t.columns()[i].name, "gamma_")) gammas.push_back(i + 1);
      if (starts_with(t.columns()[i].name, "shift_")) shifts.push_back(i + 1);
    }
    if (gammas.empty() || shifts.empty()) throw std::invalid_argument("emit_plot_script: detuning-sweep needs gamma_* and shift_* columns");
    g << "set multiplot layout 1,2\n"
      << "set xlabel '" << title(x) << "'\nset ylabel 'damping rate / free space'\nplot ";
    for (std::size_t i = 0; i < gammas.size(); ++i)
      g << (i ? ", " : "") << "data every ::1 using " << x << ":" << gammas[i] << " with lines title '" << title(gammas[i]) << "'";
    g << "\nset ylabel 'level shift / free-space damping'\nplot ";
    for (std::size_t i = 0; i < shifts.size(); ++i)
      g << (i ? ", " : "") << "data every ::1 using " << x << ":" << shifts[i] << " with lines title '" << title(shifts[i]) << "'";
    g << "\nunset multiplot\n";
  } else if (kind == "axial-profile") {
    const std::size_t x = col("kz");
    const std::size_t y = col("gamma_ratio");
    const std::size_t s = col("shift_ratio");
    g << "set xlabel '" << title(x) << "'\n"
      << "plot data every ::1 using " << x << ":" << y << " with lines title '" << title(y) << "', \\\n"
      << "     data every ::1 using " << x << ":" << s << " with lines title '" << title(s) << "'\n";
  } else if (kind == "compare") {
    const std::size_t x = col("kz");
    const std::size_t full = col("full");
    const std::size_t ray = col("ray");
    g << "set xlabel '" << title(x) << "'\nset ylabel 'vacuum fluctuations / free space'\n"
      << "plot data every ::1 using " << x << ":" << full << " with lines lw 2 title '" << title(full) << "', \\\n"
      << "     data every ::1 using " << x << ":" << ray << " with lines dt 2 title '" << title(ray) << "'";
    if (auto naive = t.column_index("ray_naive"))
      g << ", \\\n     data every ::1 using " << x << ":" << *naive + 1 << " with lines dt 3 title '" << title(*naive + 1) << "'";
    g << "\n";
  } else if (kind == "radial-map") {
    const std::size_t x = col("kx");
    const std::size_t z = col("kz");
    const std::size_t v = col("ray");
    g << "set view map\nset xlabel '" << title(x) << "'\nset ylabel '" << title(z) << "'\n"
      << "splot data every ::1 using " << x << ":" << z << ":" << v << " with points pointtype 5 palette title '" << title(v) << "'\n";
  } else if (kind == "defocus-study") {
    const std::size_t kd = col("k_delta");
    const std::size_t p = col("phi0");
    const std::size_t ray = col("ray");
    g << "set xlabel '" << title(p) << "'\nset ylabel 'center vacuum fluctuations / free space'\nset cblabel '" << title(kd) << "'\n"
      << "plot data every ::1 using " << p << ":" << ray << ":" << kd << " with points pointtype 7 pointsize 0.5 palette title '"
      << title(ray) << "'";
    if (auto full = t.column_index("full"))
      g << ", \\\n     data every ::1 using " << p << ":" << *full + 1 << " with lines lc 'black' title '" << title(*full + 1) << "'";
    g << "\n";
  } else if (kind == "airy-check") {
    const std::size_t p = col("phi");
    const std::size_t closed = col("closed_form");
    const std::size_t pv = col("pv_oracle");
    col("kernel");
    g << "set xlabel '" << title(p) << "'\n"
      << "plot data every ::1 using " << p << ":" << closed << " with lines title '" << title(closed) << "', \\\n"
      << "     data every ::1 using " << p << ":" << pv << " with points pointtype 6 title '" << title(pv) << "'\n";
  } else {
    throw std::invalid_argument("emit_plot_script: unknown plot kind '" + kind + "'");
  }
  return g.str();
}

}  // namespace cavityqed
