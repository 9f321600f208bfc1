#pragma once

// Angular quadrature over the unit sphere (dOmega/4pi measure, segmented at
// mirror edges) and a principal-value integrator for periodic kernels over 1/x.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <mutex>
#include <span>
#include <stdexcept>
#include <vector>

#include "cavityqed/core.hpp"

namespace cavityqed {

struct GaussRule {
  std::vector<double> nodes;    // on [-1, 1], ascending
  std::vector<double> weights;  // sum to 2
};

/// n-point Gauss-Legendre rule by Newton iteration on P_n.
inline GaussRule compute_gauss_legendre(int n) {
  if (n < 1) throw std::domain_error("gauss_legendre: need n >= 1");
  GaussRule rule;
  rule.nodes.resize(static_cast<std::size_t>(n));
  rule.weights.resize(static_cast<std::size_t>(n));
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double x = std::cos(pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) {
        p1 = x;
        p0 = 1.0;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // recompute derivative at the converged node
    double p0 = 1.0;
    double p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = (n == 1) ? 1.0 : n * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[static_cast<std::size_t>(n - 1 - i)] = x;
    rule.nodes[static_cast<std::size_t>(i)] = -x;
    rule.weights[static_cast<std::size_t>(i)] = w;
    rule.weights[static_cast<std::size_t>(n - 1 - i)] = w;
  }
  if (n % 2 == 1) rule.nodes[static_cast<std::size_t>(n / 2)] = 0.0;
  return rule;
}

/// Cached Gauss-Legendre rule; thread-safe.
inline const GaussRule& gauss_legendre(int n) {
  static std::mutex mutex;
  static std::map<int, GaussRule> cache;
  std::lock_guard lock(mutex);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, compute_gauss_legendre(n)).first;
  return it->second;
}

struct PolarNode {
  double cos_theta;
  double theta;
  double weight;  // includes the 1/2 of dOmega/4pi after azimuthal integration
  int segment;
};

struct AngularNode {
  double theta;
  double phi;
  double weight;
};

/// Product grid: Gauss-Legendre in cos(theta) on each polar segment times a
/// uniform azimuthal rule. Weights sum to 1 (dOmega/4pi).
class AngularGrid {
 public:
  AngularGrid(std::vector<double> theta_edges, std::vector<int> polar_orders, int azimuthal_order)
      : edges_(std::move(theta_edges)), orders_(std::move(polar_orders)), n_az_(azimuthal_order) {
    // segment s spans theta in [b_s, b_{s+1}] with b = {0, edges..., pi}
    std::vector<double> bounds;
    bounds.push_back(0.0);
    bounds.insert(bounds.end(), edges_.begin(), edges_.end());
    bounds.push_back(pi);
    for (std::size_t s = 0; s + 1 < bounds.size(); ++s) {
      const double c_hi = std::cos(bounds[s]);
      const double c_lo = std::cos(bounds[s + 1]);
      const auto& rule = gauss_legendre(orders_[s]);
      const double half = 0.5 * (c_hi - c_lo);
      const double mid = 0.5 * (c_hi + c_lo);
      for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        const double c = mid + half * rule.nodes[i];
        polar_.push_back({c, std::acos(std::clamp(c, -1.0, 1.0)), 0.5 * half * rule.weights[i], static_cast<int>(s)});
      }
    }
  }

  std::span<const PolarNode> polar() const { return polar_; }
  std::span<const double> edges() const { return edges_; }
  int azimuthal_order() const { return n_az_; }
  int segment_count() const { return static_cast<int>(orders_.size()); }
  int polar_order(int segment) const { return orders_.at(static_cast<std::size_t>(segment)); }
  int min_polar_order() const { return *std::min_element(orders_.begin(), orders_.end()); }

  std::vector<AngularNode> nodes() const {
    std::vector<AngularNode> out;
    out.reserve(polar_.size() * static_cast<std::size_t>(n_az_));
    for (const auto& p : polar_)
      for (int j = 0; j < n_az_; ++j)
        out.push_back({p.theta, 2.0 * pi * j / n_az_, p.weight / n_az_});
    return out;
  }

  /// int dOmega/4pi f(theta, phi)
  template <class F>
  double integrate(F&& f) const {
    double total = 0.0;
    for (const auto& p : polar_) {
      double ring = 0.0;
      for (int j = 0; j < n_az_; ++j) ring += f(p.theta, 2.0 * pi * j / n_az_);
      total += p.weight * ring / n_az_;
    }
    return total;
  }

  /// int dOmega/4pi f(cos theta) for azimuth-independent integrands.
  template <class F>
  double integrate_axial(F&& f) const {
    double total = 0.0;
    for (const auto& p : polar_) total += p.weight * f(p.cos_theta);
    return total;
  }

 private:
  std::vector<double> edges_;
  std::vector<int> orders_;
  int n_az_;
  std::vector<PolarNode> polar_;
};

inline void validate_edges(std::span<const double> edges) {
  double prev = 0.0;
  for (double e : edges) {
    if (!(e > prev) || !(e < pi)) throw std::invalid_argument("build_grid: theta edges must be strictly increasing inside (0, pi)");
    prev = e;
  }
}

/// Grid with the same polar order on every segment.
inline AngularGrid build_grid(std::span<const double> theta_edges, int order_polar, int order_azimuthal) {
  validate_edges(theta_edges);
  if (order_polar < 2 || order_azimuthal < 2) throw std::invalid_argument("build_grid: orders must be >= 2");
  std::vector<int> orders(theta_edges.size() + 1, order_polar);
  return AngularGrid({theta_edges.begin(), theta_edges.end()}, std::move(orders), order_azimuthal);
}

/// Grid with per-segment polar orders (one more entry than edges).
inline AngularGrid build_grid(std::span<const double> theta_edges, std::vector<int> orders_polar, int order_azimuthal) {
  validate_edges(theta_edges);
  if (orders_polar.size() != theta_edges.size() + 1) throw std::invalid_argument("build_grid: need one polar order per segment");
  for (int o : orders_polar)
    if (o < 2) throw std::invalid_argument("build_grid: orders must be >= 2");
  if (order_azimuthal < 2) throw std::invalid_argument("build_grid: orders must be >= 2");
  return AngularGrid({theta_edges.begin(), theta_edges.end()}, std::move(orders_polar), order_azimuthal);
}

/// Fraction of the full sphere covered by two symmetric caps of half-angle theta_m.
inline double solid_angle_fraction(double theta_m) {
  if (!(theta_m >= 0.0 && theta_m <= pi / 2)) throw std::domain_error("solid_angle_fraction: theta_m outside [0, pi/2]");
  return 1.0 - std::cos(theta_m);
}

// ---------------------------------------------------------------------------
// Principal values

struct PvOptions {
  double period = pi;       // the integrand must be periodic with this period
  int initial_periods = 16; // window for the first partial sum
  int refinements = 7;      // window doublings used by the extrapolation
  double tolerance = 1e-10; // absolute tolerance for the panel rule and extrapolation
  int max_depth = 40;
};

struct PvResult {
  double value = 0.0;
  double error_estimate = 0.0;
  int periods_used = 0;
};

namespace detail {

struct PanelNode {
  double u;
  double w;
};

// Composite 15-point Gauss rule on [a, b], bisected until the rule and its two
// halves agree on int g(u) K(u) du for both K = 1/u and K = 1.
template <class G>
void refine_panel(const G& g, double a, double b, double tol, int depth, int max_depth, std::vector<PanelNode>& out) {
  const auto& rule = gauss_legendre(15);
  auto apply = [&](double lo, double hi, double& s_inv, double& s_one) {
    const double h = 0.5 * (hi - lo);
    const double mid = 0.5 * (hi + lo);
    s_inv = s_one = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
      const double u = mid + h * rule.nodes[i];
      const double gu = g(u);
      s_one += h * rule.weights[i] * gu;
      s_inv += h * rule.weights[i] * gu / u;
    }
  };
  double whole_inv, whole_one, l_inv, l_one, r_inv, r_one;
  const double mid = 0.5 * (a + b);
  apply(a, b, whole_inv, whole_one);
  apply(a, mid, l_inv, l_one);
  apply(mid, b, r_inv, r_one);
  const double err = std::max(std::abs(whole_inv - l_inv - r_inv), std::abs(whole_one - l_one - r_one));
  if (err <= tol || depth >= max_depth) {
    for (double lo_hi : {0.0, 1.0}) {
      const double lo = lo_hi == 0.0 ? a : mid;
      const double hi = lo_hi == 0.0 ? mid : b;
      const double h = 0.5 * (hi - lo);
      const double m = 0.5 * (hi + lo);
      for (std::size_t i = 0; i < rule.nodes.size(); ++i) out.push_back({m + h * rule.nodes[i], h * rule.weights[i]});
    }
    return;
  }
  refine_panel(g, a, mid, 0.5 * tol, depth + 1, max_depth, out);
  refine_panel(g, mid, b, 0.5 * tol, depth + 1, max_depth, out);
}

}  // namespace detail

/// Principal value of int_{-inf}^{inf} f(d)/d dd for an integrand f periodic
/// with period P. The odd part g(d) = f(d) - f(-d) has zero mean over a
/// period, so pairing whole periods gives terms int_0^P g(u)/(u + nP) du that
/// decay like 1/n^2; partial sums over N periods are Richardson-extrapolated
/// in 1/N.
template <class F>
PvResult pv_integrate(F&& f, const PvOptions& opt = {}) {
  if (!(opt.period > 0.0) || opt.initial_periods < 1 || opt.refinements < 2)
    throw std::invalid_argument("pv_integrate: bad options");
  const double P = opt.period;
  auto g = [&](double u) { return f(u) - f(-u); };

  std::vector<detail::PanelNode> mesh;
  // split at a quarter period so peaks near 0 and P are resolved independently
  detail::refine_panel(g, 0.0, 0.5 * P, 0.5 * opt.tolerance, 0, opt.max_depth, mesh);
  detail::refine_panel(g, 0.5 * P, P, 0.5 * opt.tolerance, 0, opt.max_depth, mesh);
  std::vector<double> gv(mesh.size());
  for (std::size_t i = 0; i < mesh.size(); ++i) gv[i] = g(mesh[i].u);

  const int levels = opt.refinements + 1;
  std::vector<double> partial(static_cast<std::size_t>(levels));
  double running = 0.0;
  int n_done = 0;
  for (int lev = 0; lev < levels; ++lev) {
    const int n_target = opt.initial_periods << lev;
    for (int n = n_done; n < n_target; ++n) {
      double term = 0.0;
      for (std::size_t i = 0; i < mesh.size(); ++i) term += mesh[i].w * gv[i] / (mesh[i].u + n * P);
      running += term;
    }
    n_done = n_target;
    partial[static_cast<std::size_t>(lev)] = running;
  }

  // Richardson table for S(N) = S + a1/N + a2/N^2 + ... with N doubling.
  std::vector<std::vector<double>> table(static_cast<std::size_t>(levels));
  for (int i = 0; i < levels; ++i) {
    table[static_cast<std::size_t>(i)].push_back(partial[static_cast<std::size_t>(i)]);
    for (int k = 1; k <= i; ++k) {
      const double factor = std::ldexp(1.0, k);
      const double hi = table[static_cast<std::size_t>(i)][static_cast<std::size_t>(k - 1)];
      const double lo = table[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(k - 1)];
      table[static_cast<std::size_t>(i)].push_back((factor * hi - lo) / (factor - 1.0));
    }
  }
  const auto& last = table.back();
  const auto& prev = table[table.size() - 2];
  PvResult res;
  res.value = last.back();
  res.error_estimate = std::abs(last.back() - prev.back());
  res.periods_used = n_done;
  if (!(res.error_estimate <= std::max(opt.tolerance, 1e-9 * std::abs(res.value))) || !std::isfinite(res.value))
    throw ConvergenceError("pv_integrate: extrapolation did not converge", res.error_estimate);
  return res;
}

}  // namespace cavityqed
