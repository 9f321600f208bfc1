#pragma once

// Scan execution for every ScenarioConfig kind, the bundled presets, and the
// named invariant checks run by `cavityqed validate`.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "cavityqed/airy_shift.hpp"
#include "cavityqed/dipole_response.hpp"
#include "cavityqed/io_formats.hpp"
#include "cavityqed/quadrature.hpp"
#include "cavityqed/ray_model.hpp"
#include "cavityqed/specfun.hpp"
#include "cavityqed/wave_ops.hpp"

namespace cavityqed {

/// Worker count from CAVITYQED_JOBS, else the hardware concurrency.
inline int default_jobs() {
  if (const char* env = std::getenv("CAVITYQED_JOBS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0 && v < 4096) return static_cast<int>(v);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

/// out[i] = f(i) for i < n on up to `jobs` threads; the first exception is rethrown.
template <class F>
auto parallel_map(std::size_t n, int jobs, F&& f) -> std::vector<decltype(f(std::size_t{}))> {
  using R = decltype(f(std::size_t{}));
  std::vector<std::optional<R>> slots(n);
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        slots[i].emplace(f(i));
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        next.store(n);
        return;
      }
    }
  };
  const int threads = static_cast<int>(std::min<std::size_t>(std::max(jobs, 1), std::max<std::size_t>(n, 1)));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (error) std::rethrow_exception(error);
  std::vector<R> out;
  out.reserve(n);
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

struct PeakLocation {
  double position = 0.0;
  double value = 0.0;
};

/// Maximum of f on [lo, hi]: coarse grid, then golden-section refinement around the best sample.
inline PeakLocation locate_peak(const std::function<double(double)>& f, double lo, double hi, int coarse = 141,
                                double tol = 1e-7) {
  double best_x = lo;
  double best = -std::numeric_limits<double>::infinity();
  const double h = (hi - lo) / (coarse - 1);
  for (int i = 0; i < coarse; ++i) {
    const double x = lo + h * i;
    const double v = f(x);
    if (v > best) {
      best = v;
      best_x = x;
    }
  }
  double a = std::max(lo, best_x - h);
  double b = std::min(hi, best_x + h);
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - g * (b - a);
  double d = a + g * (b - a);
  double fc = f(c);
  double fd = f(d);
  while (b - a > tol) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - g * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + g * (b - a);
      fd = f(d);
    }
  }
  const double x = 0.5 * (a + b);
  const double v = f(x);
  return v >= best ? PeakLocation{x, v} : PeakLocation{best_x, best};
}

struct ScenarioOutput {
  ResultTable table;
  std::vector<std::string> warnings;
  std::vector<std::string> summary;
};

namespace detail {

inline void add_warnings(std::vector<std::string>& into, const std::vector<std::string>& from) {
  for (const auto& w : from)
    if (std::find(into.begin(), into.end(), w) == into.end()) into.push_back(w);
}

inline std::string fmt(double v, int digits = 6) {
  std::ostringstream s;
  s.precision(digits);
  s << v;
  return s.str();
}

inline double detuning_to_phase(const ScenarioConfig& c, double value) {
  if (c.scan.detuning_unit == "radian") return value;
  return value * linewidth_phase(c.geometry.rho1, c.geometry.rho2);
}

inline std::shared_ptr<const CavityOperatorSet> operators_for(const ScenarioConfig& c, int m_limit) {
  const HarmonicBasis basis(c.numerics.l_max);
  const auto grid = operator_grid(c.geometry, basis.l_max, c.numerics.polar_order);
  return std::make_shared<const CavityOperatorSet>(build_operators(c.geometry, basis, grid, m_limit));
}

struct Accuracy {
  double max_condition = 1.0;
  double max_tail = 0.0;
  int max_polar_order = 0;
  int max_azimuthal_order = 0;

  void take(const EnhancementResult& r) {
    max_condition = std::max(max_condition, r.max_condition);
    max_tail = std::max(max_tail, r.truncation_tail);
  }
  void take(const ResponseResult& r) {
    max_polar_order = std::max(max_polar_order, r.polar_order);
    max_azimuthal_order = std::max(max_azimuthal_order, r.azimuthal_order);
  }
};

inline ojson accuracy_json(const ScenarioConfig& c, const Accuracy& a) {
  return {{"l_max", c.numerics.l_max},
          {"tail_tolerance", c.numerics.tail_tolerance},
          {"max_truncation_tail", a.max_tail},
          {"max_condition_estimate", a.max_condition},
          {"ray_polar_order_max", a.max_polar_order},
          {"ray_azimuthal_order_max", a.max_azimuthal_order}};
}

inline ScenarioOutput run_detuning_sweep(const ScenarioConfig& c, int jobs) {
  std::vector<Column> cols{{"detuning", c.scan.detuning_unit == "radian" ? "rad" : "linewidth"}, {"phi0", "rad"}};
  for (const auto& d : c.dipoles) {
    cols.push_back({"gamma_" + d.name(), "1"});
    cols.push_back({"shift_" + d.name(), "1"});
  }
  const bool full = c.uses("full");
  if (full) cols.push_back({"full", "1"});
  ScenarioOutput out{ResultTable(cols), {}, {}};

  const auto xs = c.scan.range.values();
  const FieldPoint point{c.scan.point};
  const auto opt = c.ray_options();
  std::shared_ptr<const CavityOperatorSet> ops;
  if (full) ops = operators_for(c, m_limit_for(point, HarmonicBasis(c.numerics.l_max)));

  struct Row {
    std::vector<ResponseResult> ray;
    std::optional<EnhancementResult> full;
  };
  const auto rows = parallel_map(xs.size(), jobs, [&](std::size_t i) {
    const double phi = detuning_to_phase(c, xs[i]);
    Row r;
    for (const auto& d : c.dipoles) r.ray.push_back(dipole_response(point, d, c.geometry, phi, opt));
    if (full) r.full = FullSolver(ops, phi).enhancement(point, c.numerics.tail_tolerance);
    return r;
  });

  Accuracy acc;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    std::vector<Cell> row{xs[i], detuning_to_phase(c, xs[i])};
    for (const auto& r : rows[i].ray) {
      row.emplace_back(r.gamma_ratio);
      row.emplace_back(r.shift_ratio);
      acc.take(r);
      add_warnings(out.warnings, r.warnings);
    }
    if (rows[i].full) {
      row.emplace_back(rows[i].full->value);
      acc.take(*rows[i].full);
      add_warnings(out.warnings, rows[i].full->warnings);
    }
    out.table.add_row(std::move(row));
  }
  for (std::size_t k = 0; k < c.dipoles.size(); ++k) {
    std::size_t ig = 0, is = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      if (rows[i].ray[k].gamma_ratio > rows[ig].ray[k].gamma_ratio) ig = i;
      if (rows[i].ray[k].shift_ratio > rows[is].ray[k].shift_ratio) is = i;
    }
    out.summary.push_back(c.dipoles[k].name() + ": peak damping " + fmt(rows[ig].ray[k].gamma_ratio) + " at detuning " +
                          fmt(xs[ig]) + ", max shift " + fmt(rows[is].ray[k].shift_ratio) + " at detuning " + fmt(xs[is]));
  }
  out.table.provenance().methods = {method_tag(opt)};
  if (full) out.table.provenance().methods.push_back("full");
  out.table.provenance().accuracy = accuracy_json(c, acc);
  return out;
}

inline ScenarioOutput run_axial_profile(const ScenarioConfig& c, int jobs) {
  ScenarioOutput out{ResultTable({{"kz", "1"}, {"gamma_ratio", "1"}, {"shift_ratio", "1"}, {"method", "", ColumnType::text}}), {}, {}};
  const auto zs = c.scan.range.values();
  const auto opt = c.ray_options();
  Accuracy acc;
  std::vector<std::string> methods;

  if (c.uses("ray")) {
    for (const auto& d : c.dipoles) {
      const auto res = parallel_map(zs.size(), jobs, [&](std::size_t i) {
        return dipole_response(FieldPoint::on_axis(zs[i]), d, c.geometry, c.scan.phi0, opt);
      });
      const std::string tag = method_tag(opt) + ":" + d.name();
      methods.push_back(tag);
      double peak = 0.0;
      for (std::size_t i = 0; i < zs.size(); ++i) {
        out.table.add_row({zs[i], res[i].gamma_ratio, res[i].shift_ratio, tag});
        acc.take(res[i]);
        add_warnings(out.warnings, res[i].warnings);
        peak = std::max(peak, res[i].gamma_ratio);
      }
      out.summary.push_back(tag + ": damping " + fmt(res.front().gamma_ratio) + " at kz = " + fmt(zs.front()) +
                            ", maximum " + fmt(peak));
    }
  }
  if (c.uses("full")) {
    auto ops = operators_for(c, 0);
    const FullSolver solver(ops, c.scan.phi0);
    const auto res = parallel_map(zs.size(), jobs, [&](std::size_t i) {
      return solver.enhancement(FieldPoint::on_axis(zs[i]), c.numerics.tail_tolerance);
    });
    methods.push_back("full");
    for (std::size_t i = 0; i < zs.size(); ++i) {
      out.table.add_row({zs[i], res[i].value, std::numeric_limits<double>::quiet_NaN(), std::string("full")});
      acc.take(res[i]);
      add_warnings(out.warnings, res[i].warnings);
    }
    out.summary.push_back("full: vacuum ratio " + fmt(res.front().value) + " at kz = " + fmt(zs.front()));
  }
  out.table.provenance().methods = methods;
  out.table.provenance().accuracy = accuracy_json(c, acc);
  return out;
}

inline ScenarioOutput run_compare(const ScenarioConfig& c, int jobs) {
  ScenarioOutput out{ResultTable({{"kz", "1"},
                                  {"full", "1"},
                                  {"ray", "1"},
                                  {"ray_naive", "1"},
                                  {"deviation_ray", "1"},
                                  {"deviation_naive", "1"}}),
                     {},
                     {}};
  const auto zs = c.scan.range.values();
  auto ops = operators_for(c, 0);
  const FullSolver solver(ops, c.scan.phi0);
  RayOptions corrected = c.ray_options();
  corrected.corrections = {true, true};
  RayOptions naive = corrected;
  naive.corrections = {false, false};

  struct Row {
    EnhancementResult full, ray, naive;
  };
  const auto rows = parallel_map(zs.size(), jobs, [&](std::size_t i) {
    const auto p = FieldPoint::on_axis(zs[i]);
    return Row{solver.enhancement(p, c.numerics.tail_tolerance), enhancement_ray(c.geometry, p, c.scan.phi0, corrected),
               enhancement_ray(c.geometry, p, c.scan.phi0, naive)};
  });
  Accuracy acc;
  double worst = 0.0, worst_naive = 0.0, at = 0.0, at_naive = 0.0;
  for (std::size_t i = 0; i < zs.size(); ++i) {
    const auto& r = rows[i];
    const double dev = std::abs(r.full.value - r.ray.value) / r.full.value;
    const double dev_naive = std::abs(r.full.value - r.naive.value) / r.full.value;
    out.table.add_row({zs[i], r.full.value, r.ray.value, r.naive.value, dev, dev_naive});
    acc.take(r.full);
    add_warnings(out.warnings, r.full.warnings);
    add_warnings(out.warnings, r.ray.warnings);
    if (dev > worst) worst = dev, at = zs[i];
    if (dev_naive > worst_naive) worst_naive = dev_naive, at_naive = zs[i];
  }
  const auto& first = rows.front();
  out.summary.push_back("kz = " + fmt(zs.front()) + ": full " + fmt(first.full.value) + ", ray (corrected) " +
                        fmt(first.ray.value) + ", ray (naive) " + fmt(first.naive.value));
  const auto diffraction_only = enhancement_ray(c.geometry, FieldPoint::on_axis(zs.front()), c.scan.phi0, RayCorrections{false, true});
  out.summary.push_back("diffraction correction at kz = " + fmt(zs.front()) + ": " + fmt(first.naive.value - diffraction_only.value));
  out.summary.push_back("max |full - ray|/full = " + fmt(worst) + " at kz = " + fmt(at));
  out.summary.push_back("max |full - ray naive|/full = " + fmt(worst_naive) + " at kz = " + fmt(at_naive));
  out.table.provenance().methods = {"full", method_tag(corrected), method_tag(naive)};
  out.table.provenance().accuracy = accuracy_json(c, acc);
  return out;
}

inline ScenarioOutput run_radial_map(const ScenarioConfig& c, int jobs) {
  const bool full = c.uses("full");
  std::vector<Column> cols{{"kx", "1"}, {"kz", "1"}, {"ray", "1"}};
  if (full) cols.push_back({"full", "1"});
  ScenarioOutput out{ResultTable(cols), {}, {}};
  const auto xs = c.scan.range.values();
  const auto zs = c.scan.second.values();
  const auto opt = c.ray_options();
  std::shared_ptr<const CavityOperatorSet> ops;
  std::unique_ptr<FullSolver> solver;
  if (full) {
    ops = operators_for(c, c.numerics.l_max);
    solver = std::make_unique<FullSolver>(ops, c.scan.phi0);
  }
  struct Cellv {
    EnhancementResult ray;
    std::optional<EnhancementResult> full;
  };
  const auto res = parallel_map(xs.size() * zs.size(), jobs, [&](std::size_t k) {
    const FieldPoint p{{xs[k / zs.size()], 0.0, zs[k % zs.size()]}};
    Cellv v{enhancement_ray(c.geometry, p, c.scan.phi0, opt), std::nullopt};
    if (full) v.full = solver->enhancement(p, c.numerics.tail_tolerance);
    return v;
  });
  Accuracy acc;
  for (std::size_t k = 0; k < res.size(); ++k) {
    std::vector<Cell> row{xs[k / zs.size()], zs[k % zs.size()], res[k].ray.value};
    add_warnings(out.warnings, res[k].ray.warnings);
    if (full) {
      row.emplace_back(res[k].full->value);
      acc.take(*res[k].full);
      add_warnings(out.warnings, res[k].full->warnings);
    }
    out.table.add_row(std::move(row));
  }
  out.summary.push_back("points: " + std::to_string(res.size()));
  out.table.provenance().methods = {method_tag(opt)};
  if (full) out.table.provenance().methods.push_back("full");
  out.table.provenance().accuracy = accuracy_json(c, acc);
  return out;
}

inline ScenarioOutput run_defocus_study(const ScenarioConfig& c, int jobs) {
  const bool full = c.uses("full");
  const bool ray = c.uses("ray");
  std::vector<Column> cols{{"k_delta", "1"}, {"phi0", "rad"}};
  if (ray) cols.push_back({"ray", "1"});
  if (full) cols.push_back({"full", "1"});
  ScenarioOutput out{ResultTable(cols), {}, {}};
  const auto xs = c.scan.range.values();
  const auto opt = c.ray_options();
  Accuracy acc;
  std::map<std::string, double> reference_peak;

  for (double kd : c.scan.k_deltas) {
    ScenarioConfig ck = c;
    ck.geometry.k_delta = kd;
    std::shared_ptr<const CavityOperatorSet> ops;
    if (full) ops = operators_for(ck, 0);
    struct Row {
      double ray = 0.0;
      std::optional<EnhancementResult> full;
    };
    const auto rows = parallel_map(xs.size(), jobs, [&](std::size_t i) {
      const double phi = detuning_to_phase(ck, xs[i]);
      Row r;
      if (ray) r.ray = enhancement_ray(ck.geometry, FieldPoint::origin(), phi, opt).value;
      if (full) r.full = FullSolver(ops, phi).enhancement(FieldPoint::origin(), c.numerics.tail_tolerance);
      return r;
    });
    for (std::size_t i = 0; i < xs.size(); ++i) {
      std::vector<Cell> row{kd, detuning_to_phase(ck, xs[i])};
      if (ray) row.emplace_back(rows[i].ray);
      if (full) {
        row.emplace_back(rows[i].full->value);
        acc.take(*rows[i].full);
        add_warnings(out.warnings, rows[i].full->warnings);
      }
      out.table.add_row(std::move(row));
    }
    const double lo = detuning_to_phase(ck, xs.front());
    const double hi = detuning_to_phase(ck, xs.back());
    auto report = [&](const std::string& name, const std::function<double(double)>& f) {
      const auto peak = locate_peak(f, lo, hi, static_cast<int>(xs.size()));
      std::string line = name + " k_delta = " + fmt(kd) + ": peak " + fmt(peak.value) + " at phi0 = " + fmt(peak.position);
      if (!reference_peak.count(name)) reference_peak[name] = peak.value;
      else line += " (" + fmt(peak.value / reference_peak[name], 4) + " of the first k_delta)";
      out.summary.push_back(line);
    };
    if (ray) report("ray", [&](double phi) { return enhancement_ray(ck.geometry, FieldPoint::origin(), phi, opt).value; });
    if (full) report("full", [&](double phi) { return FullSolver(ops, phi).enhancement(FieldPoint::origin()).value; });
  }
  if (ray) out.table.provenance().methods.push_back(method_tag(opt));
  if (full) out.table.provenance().methods.push_back("full");
  out.table.provenance().accuracy = accuracy_json(c, acc);
  return out;
}

struct AiryCheckRow {
  std::string kernel;
  double closed = 0.0;
  double pv = 0.0;
  double error_estimate = 0.0;
};

/// Closed-form shift kernels against numerical principal values.
inline std::vector<AiryCheckRow> airy_check_point(double rho, double phi, double tol) {
  std::vector<AiryCheckRow> rows;
  const FinesseParam f = FinesseParam::from_reflectivity(rho);
  const FinesseParam fp = FinesseParam::from_reflectivity(rho * rho);
  PvOptions o;
  o.tolerance = tol;
  o.period = pi;
  const auto d = pv_integrate([&](double x) { return airy_lorentzian(phi - x, f); }, o);
  rows.push_back({"shift", pv_shift(phi, rho), d.value, d.error_estimate});
  o.period = 2.0 * pi;
  const auto dc = pv_integrate([&](double x) { return airy_lorentzian(phi - x, fp) * std::cos(phi - x); }, o);
  rows.push_back({"cos", pv_shift_cos(phi, fp), dc.value, dc.error_estimate});
  const auto ds = pv_integrate([&](double x) { return airy_lorentzian(phi - x, fp) * std::sin(phi - x); }, o);
  rows.push_back({"sin", pv_shift_sin(phi, fp), ds.value, ds.error_estimate});
  return rows;
}

inline ScenarioOutput run_airy_check(const ScenarioConfig& c, int jobs) {
  ScenarioOutput out{ResultTable({{"rho", "1"},
                                  {"phi", "rad"},
                                  {"kernel", "", ColumnType::text},
                                  {"closed_form", "1"},
                                  {"pv_oracle", "1"},
                                  {"pv_error_estimate", "1"},
                                  {"relative_deviation", "1"}}),
                     {},
                     {}};
  const auto phis = c.scan.range.values();
  const auto& rhos = c.scan.rhos;
  const auto res = parallel_map(rhos.size() * phis.size(), jobs, [&](std::size_t k) {
    return airy_check_point(rhos[k / phis.size()], phis[k % phis.size()], c.numerics.pv_tolerance);
  });
  std::map<std::string, double> worst;
  for (std::size_t k = 0; k < res.size(); ++k) {
    for (const auto& r : res[k]) {
      const double rel = std::abs(r.closed - r.pv) / std::max(std::abs(r.closed), 1e-300);
      out.table.add_row({rhos[k / phis.size()], phis[k % phis.size()], r.kernel, r.closed, r.pv, r.error_estimate, rel});
      worst[r.kernel] = std::max(worst[r.kernel], rel);
    }
  }
  for (const auto& [k, v] : worst) out.summary.push_back("kernel " + k + ": max relative deviation " + fmt(v, 3));
  out.table.provenance().methods = {"closed-form", "pv-quadrature"};
  out.table.provenance().accuracy = {{"pv_tolerance", c.numerics.pv_tolerance}};
  return out;
}

}  // namespace detail

inline ScenarioOutput run_scenario(const ScenarioConfig& c, int jobs = 1) {
  ScenarioOutput out;
  switch (c.scan.kind) {
    case ScanKind::detuning_sweep: out = detail::run_detuning_sweep(c, jobs); break;
    case ScanKind::axial_profile: out = detail::run_axial_profile(c, jobs); break;
    case ScanKind::compare: out = detail::run_compare(c, jobs); break;
    case ScanKind::radial_map: out = detail::run_radial_map(c, jobs); break;
    case ScanKind::defocus_study: out = detail::run_defocus_study(c, jobs); break;
    case ScanKind::airy_check: out = detail::run_airy_check(c, jobs); break;
  }
  auto& p = out.table.provenance();
  p.config_hash = config_hash(c);
  p.config = config_to_json(c);
  return out;
}

// ---------------------------------------------------------------------------
// Presets

struct Preset {
  std::string name;
  std::string description;
  ScenarioConfig config;
};

inline std::vector<Preset> presets() {
  auto base = [](const std::string& name, ScanKind kind) {
    ScenarioConfig c;
    c.name = name;
    c.geometry = CavityGeometry::reference();
    c.scan.kind = kind;
    apply_range_defaults(c.scan);
    c.outputs.stem = name;
    return c;
  };
  std::vector<Preset> out;
  {
    auto c = base("center-enhancement", ScanKind::compare);
    c.scan.range = {0.0, 5.0, 6};
    out.push_back({c.name, "vacuum fluctuations at the center on resonance: full, corrected ray and naive ray", c});
  }
  {
    auto c = base("detuning-sweep", ScanKind::detuning_sweep);
    c.dipoles = {DipoleOrientation::parallel(), DipoleOrientation::perpendicular()};
    c.numerics.diffraction = false;
    out.push_back({c.name, "damping and level shift at the center versus detuning, parallel and perpendicular dipoles", c});
  }
  {
    auto c = base("axial-profile", ScanKind::axial_profile);
    c.numerics.methods = {"full", "ray"};
    out.push_back({c.name, "vacuum fluctuations along the axis, kz from 0 to 100, full and ray", c});
  }
  {
    auto c = base("ray-vs-full", ScanKind::compare);
    out.push_back({c.name, "full calculation against corrected and naive ray model along the axis", c});
  }
  {
    auto c = base("defocus-study", ScanKind::defocus_study);
    c.numerics.methods = {"ray", "full"};
    out.push_back({c.name, "center resonance with mirror 1 displaced by k delta = 0.3", c});
  }
  {
    auto c = base("airy-check", ScanKind::airy_check);
    out.push_back({c.name, "closed-form shift kernels against principal-value quadrature", c});
  }
  return out;
}

inline std::optional<Preset> find_preset(const std::string& name) {
  for (auto& p : presets())
    if (p.name == name) return p;
  return std::nullopt;
}

inline std::string list_presets() {
  std::ostringstream s;
  for (const auto& p : presets()) s << "  " << p.name << std::string(p.name.size() < 20 ? 20 - p.name.size() : 1, ' ') << p.description << "\n";
  return s.str();
}

// ---------------------------------------------------------------------------
// Invariant checks

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct Check {
  std::string name;
  std::string description;
  std::function<CheckResult()> run;
};

inline std::vector<Check> validation_checks() {
  using detail::fmt;
  std::vector<Check> checks;

  checks.push_back({"bessel-sum-rule", "sum (pi/2)(2l+1) j_l^2 = 1 for kr <= 100", [] {
                      double worst = 0.0;
                      for (double kr : {0.3, 1.0, 7.5, 25.0, 60.0, 100.0}) {
                        const int lm = static_cast<int>(kr) + 50;
                        const auto t = radial_bessel_table(lm, kr);
                        double s = 0.0;
                        for (int l = 0; l <= lm; ++l) s += 0.5 * pi * (2 * l + 1) * t[l] * t[l];
                        worst = std::max(worst, std::abs(s - 1.0));
                      }
                      return CheckResult{"bessel-sum-rule", worst < 1e-8, "max |sum - 1| = " + fmt(worst, 3)};
                    }});

  checks.push_back({"parity-split", "even/odd partial sums = 1/2 +- sin(2kr)/(4kr)", [] {
                      double worst = 0.0;
                      for (double kr : {0.3, 1.0, 7.5, 25.0, 60.0, 100.0}) {
                        const int lm = static_cast<int>(kr) + 50;
                        const auto t = radial_bessel_table(lm, kr);
                        double even = 0.0, odd = 0.0;
                        for (int l = 0; l <= lm; ++l) (l % 2 ? odd : even) += 0.5 * pi * (2 * l + 1) * t[l] * t[l];
                        const double split = std::sin(2 * kr) / (4 * kr);
                        worst = std::max({worst, std::abs(even - 0.5 - split), std::abs(odd - 0.5 + split)});
                      }
                      return CheckResult{"parity-split", worst < 1e-8, "max deviation " + fmt(worst, 3)};
                    }});

  checks.push_back({"plane-wave-parseval", "sum |c_lm|^2 = 1 for kr = 50, l_max = 300", [] {
                      const auto pw = plane_wave_coeffs(FieldPoint{{30.0, 0.0, 40.0}}, HarmonicBasis(300));
                      const double dev = std::abs(pw.coeffs.squared_norm() - 1.0);
                      return CheckResult{"plane-wave-parseval", dev < 1e-8, "|norm - 1| = " + fmt(dev, 3)};
                    }});

  checks.push_back({"pv-oracle", "closed-form shift kernels match principal-value quadrature", [] {
                      double worst = 0.0;
                      for (double rho : {0.1, 0.5, 0.9, 0.98})
                        for (double phi : {-1.2, -0.3, 0.05, 0.7})
                          for (const auto& r : detail::airy_check_point(rho, phi, 1e-11))
                            worst = std::max(worst, std::abs(r.closed - r.pv) / std::abs(r.closed));
                      return CheckResult{"pv-oracle", worst < 1e-5, "max relative deviation " + fmt(worst, 3)};
                    }});

  checks.push_back({"orientation-sum", "(parallel + 2 perpendicular)/3 = isotropic", [] {
                      const auto g = CavityGeometry::reference();
                      double worst = 0.0;
                      for (const auto& [p, phi] : std::vector<std::pair<FieldPoint, double>>{
                               {FieldPoint::origin(), 0.01}, {FieldPoint::on_axis(13.0), -0.02}, {FieldPoint{{4.0, 1.0, 7.0}}, 0.004}}) {
                        const auto a = dipole_response(p, DipoleOrientation::parallel(), g, phi);
                        const auto b = dipole_response(p, DipoleOrientation::perpendicular(), g, phi);
                        const auto i = dipole_response(p, DipoleOrientation::isotropic(), g, phi);
                        worst = std::max({worst, std::abs((a.gamma_ratio + 2 * b.gamma_ratio) / 3 - i.gamma_ratio),
                                          std::abs((a.shift_ratio + 2 * b.shift_ratio) / 3 - i.shift_ratio)});
                      }
                      return CheckResult{"orientation-sum", worst < 1e-8, "max deviation " + fmt(worst, 3)};
                    }});

  checks.push_back({"center-closed-form", "ray integral at the center equals the closed forms", [] {
                      const auto g = CavityGeometry::reference();
                      RayOptions opt;
                      opt.corrections = {true, false};
                      double worst = 0.0;
                      for (double phi : {-0.05, 0.0, 0.013})
                        for (auto [cls, d] : {std::pair{DipoleClass::parallel, DipoleOrientation::parallel()},
                                              std::pair{DipoleClass::perpendicular, DipoleOrientation::perpendicular()},
                                              std::pair{DipoleClass::isotropic, DipoleOrientation::isotropic()}}) {
                          const auto ray = dipole_response(FieldPoint::origin(), d, g, phi, opt);
                          const auto cf = center_closed_forms(cls, g.theta_m1, g.rho1, phi);
                          worst = std::max({worst, std::abs(ray.gamma_ratio - cf.gamma_ratio) / cf.gamma_ratio,
                                            std::abs(ray.shift_ratio - cf.shift_ratio) / std::max(1.0, std::abs(cf.shift_ratio))});
                        }
                      return CheckResult{"center-closed-form", worst < 1e-10, "max relative deviation " + fmt(worst, 3)};
                    }});

  checks.push_back({"frequency-average-ray", "ray vacuum ratio averaged over one free spectral range = 1", [] {
                      const auto g = CavityGeometry::reference();
                      double worst = 0.0;
                      for (const FieldPoint& p : {FieldPoint::origin(), FieldPoint::on_axis(17.0), FieldPoint{{5.0, 0.0, 3.0}}}) {
                        const int n = 1024;
                        double s = 0.0;
                        for (int j = 0; j < n; ++j) s += enhancement_ray(g, p, pi * j / n).value;
                        worst = std::max(worst, std::abs(s / n - 1.0));
                      }
                      return CheckResult{"frequency-average-ray", worst < 1e-3, "max |average - 1| = " + fmt(worst, 3)};
                    }});

  checks.push_back({"frequency-average-closed", "closed-cavity mode sum averaged over phase = 1", [] {
                      double worst = 0.0;
                      for (double kr : {0.0, 3.0, 20.0}) {
                        const int n = 2048;
                        double s = 0.0;
                        for (int j = 0; j < n; ++j) s += closed_cavity_mode_sum(0.98, 1e5, pi * j / n, kr, static_cast<int>(kr) + 50);
                        worst = std::max(worst, std::abs(s / n - 1.0));
                      }
                      return CheckResult{"frequency-average-closed", worst < 1e-3, "max |average - 1| = " + fmt(worst, 3)};
                    }});

  checks.push_back({"frequency-average-full", "full calculation averaged over phase = 1 at the center", [] {
                      const auto g = CavityGeometry::reference();
                      const HarmonicBasis basis(100);
                      auto ops = std::make_shared<const CavityOperatorSet>(build_operators(g, basis, operator_grid(g, 100), 0));
                      const int n = 512;
                      double s = 0.0;
                      for (int j = 0; j < n; ++j) s += FullSolver(ops, pi * j / n).enhancement(FieldPoint::on_axis(4.0)).value;
                      const double dev = std::abs(s / n - 1.0);
                      return CheckResult{"frequency-average-full", dev < 1e-2, "|average - 1| = " + fmt(dev, 3)};
                    }});

  checks.push_back({"truncation-stability", "center value changes < 1% from l_max 100 to 300", [] {
                      const auto g = CavityGeometry::reference();
                      const double a = enhancement_full(g, HarmonicBasis(100), FieldPoint::origin(), 0.0).value;
                      const double b = enhancement_full(g, HarmonicBasis(300), FieldPoint::origin(), 0.0).value;
                      const double rel = std::abs(b - a) / b;
                      return CheckResult{"truncation-stability", rel < 0.01, "relative change " + fmt(rel, 3)};
                    }});

  checks.push_back({"symmetric-reduction", "three-term ray factor reduces to the two-term form for identical mirrors", [] {
                      double worst = 0.0;
                      for (double rho : {0.0, 0.3, 0.9, 0.98})
                        for (double phi = -1.5; phi < 1.5; phi += 0.0371)
                          for (double x : {0.0, 0.4, 2.2, 17.9})
                            worst = std::max(worst, std::abs(airy_factor_M(phi, x, rho, rho) - symmetric_airy_factor(phi, x, rho)));
                      return CheckResult{"symmetric-reduction", worst < 1e-12, "max deviation " + fmt(worst, 3)};
                    }});
  return checks;
}

}  // namespace cavityqed
