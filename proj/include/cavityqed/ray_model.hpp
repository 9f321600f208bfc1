#pragma once

// Ray picture of the cavity: every direction Omega through the field point
// sees a Fabry-Perot made of the mirror patches at Omega and -Omega, with the
// standing-wave pattern cos^2 / sin^2 (k Omega.r) and a resonance phase that
// picks up the spherical-aberration term for rays missing the center.

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "cavityqed/core.hpp"
#include "cavityqed/geometry.hpp"
#include "cavityqed/quadrature.hpp"

namespace cavityqed {

/// One-way phase along a ray: detuning + aberration + mirror reflection phases.
struct RayPhase {
  double detuning = 0.0;
  double aberration = 0.0;  // (kr)^2 - (k Omega.r)^2 over 2kR, never negative
  double mirror = 0.0;

  static RayPhase along(double phi0, const FieldPoint& p, const Vec3& omega, double kR) {
    const double along_ray = dot(omega, p.kr);
    const double r2 = dot(p.kr, p.kr);
    return {phi0, std::max(0.0, r2 - along_ray * along_ray) / (2.0 * kR), 0.0};
  }
  double total() const { return detuning + aberration + mirror; }
};

struct StandingWaveWeights {
  double w_cos = 1.0;
  double w_sin = 0.0;
  double w_cross = 0.0;

  static StandingWaveWeights at(double k_omega_r) {
    const double c = std::cos(k_omega_r);
    const double s = std::sin(k_omega_r);
    return {c * c, s * s, 2.0 * s * c};
  }
};

namespace detail {

inline double round_trip_denominator(double phi, double p) {
  return std::norm(1.0 - p * std::polar(1.0, 4.0 * phi));
}

inline void check_resonance(double d, double p, const char* who) {
  if (1.0 - p < 1e-12 && d < 1e-24) throw NumericalError(std::string(who) + ": lossless cavity exactly on resonance");
}

}  // namespace detail

/// Vacuum ratio along one ray for mirrors rho1 (ahead, at Omega) and rho2 (behind, at -Omega).
inline double airy_factor_M(double phi, double k_omega_r, double rho1, double rho2) {
  if (!(rho1 >= 0.0 && rho1 <= 1.0 && rho2 >= 0.0 && rho2 <= 1.0)) throw std::domain_error("airy_factor_M: reflectivities out of [0,1]");
  const double p = rho1 * rho2;
  const double d = detail::round_trip_denominator(phi, p);
  detail::check_resonance(d, p, "airy_factor_M");
  const auto w = StandingWaveWeights::at(k_omega_r);
  const double c2 = std::cos(2.0 * phi);
  return ((1.0 - p) * (1.0 + p + (rho1 + rho2) * c2) * w.w_cos +
          (1.0 - p) * (1.0 + p - (rho1 + rho2) * c2) * w.w_sin +
          (1.0 + p) * (rho2 - rho1) * std::sin(2.0 * phi) * w.w_cross) /
         d;
}

/// Same factor written with the mirror transmissions, forward and backward waves separately.
inline double airy_factor_M_transmission_form(double phi, double k_omega_r, double rho1, double rho2) {
  const double p = rho1 * rho2;
  const double t1 = 1.0 - rho1 * rho1;
  const double t2 = 1.0 - rho2 * rho2;
  const double d = detail::round_trip_denominator(phi, p);
  return (t1 * (1.0 + rho2 * rho2 + 2.0 * rho2 * std::cos(2.0 * (phi - k_omega_r))) +
          t2 * (1.0 + rho1 * rho1 + 2.0 * rho1 * std::cos(2.0 * (phi + k_omega_r)))) /
         (2.0 * d);
}

/// Identical mirrors: T cos^2/|1 - rho e^{2i phi}|^2 + T sin^2/|1 + rho e^{2i phi}|^2.
inline double symmetric_airy_factor(double phi, double k_omega_r, double rho) {
  const cplx e = rho * std::polar(1.0, 2.0 * phi);
  const auto w = StandingWaveWeights::at(k_omega_r);
  const double t = 1.0 - rho * rho;
  return t * w.w_cos / std::norm(1.0 - e) + t * w.w_sin / std::norm(1.0 + e);
}

/// Level-shift counterpart of airy_factor_M.
inline double shift_factor(double phi, double k_omega_r, double rho1, double rho2) {
  const double p = rho1 * rho2;
  const double d = detail::round_trip_denominator(phi, p);
  detail::check_resonance(d, p, "shift_factor");
  const auto w = StandingWaveWeights::at(k_omega_r);
  const double s4 = p * std::sin(4.0 * phi);
  const double s2 = (rho1 + rho2) * (1.0 + p) * std::sin(2.0 * phi) / 2.0;
  return ((s4 + s2) * w.w_cos + (s4 - s2) * w.w_sin + (1.0 - p) * (rho1 - rho2) * std::cos(2.0 * phi) / 2.0 * w.w_cross) / d;
}

inline double symmetric_shift_factor(double phi, double k_omega_r, double rho) {
  const cplx e = rho * std::polar(1.0, 2.0 * phi);
  const auto w = StandingWaveWeights::at(k_omega_r);
  const double s = rho * std::sin(2.0 * phi);
  return s * w.w_cos / std::norm(1.0 - e) - s * w.w_sin / std::norm(1.0 + e);
}

/// Aperture reduced for rays lost by diffraction at the mirror edge.
inline double effective_aperture(double theta_m, double kR, double rho1, double rho2) {
  if (!(kR > 0.0)) throw std::domain_error("effective_aperture: kR must be > 0");
  const double loss = (rho1 == rho2) ? 1.0 - rho1 * rho1 : 1.0 - 0.25 * (rho1 + rho2) * (rho1 + rho2);
  if (!(loss > 0.0)) throw ApertureCollapseError("effective_aperture: lossless mirrors give no diffraction width");
  const double shrink = 1.0 / std::sqrt(kR * loss);
  if (!(shrink < theta_m)) {
    std::ostringstream msg;
    msg << "effective_aperture: diffraction width " << shrink << " rad exceeds the half-aperture " << theta_m << " rad";
    throw ApertureCollapseError(msg.str());
  }
  return theta_m - shrink;
}

/// Full width at half maximum, in phi, of T/|1 - rho e^{2i phi}|^2 with rho = sqrt(rho1 rho2).
inline double linewidth_phase(double rho1, double rho2) {
  const double r = std::sqrt(rho1 * rho2);
  const double s = (1.0 - r) / (2.0 * std::sqrt(r));
  if (!(r > 0.0 && r < 1.0) || !(s <= 1.0)) throw std::domain_error("linewidth_phase: resonance too broad to have a half maximum");
  return 2.0 * std::asin(s);
}

enum class RayMethod { symmetric, asymmetric };

struct RayCorrections {
  bool aberration = true;
  bool diffraction = true;
};

struct RayOptions {
  RayCorrections corrections;
  RayMethod method = RayMethod::asymmetric;
  int polar_order = 64;
  int azimuthal_order = 32;
  bool raise_orders = true;      // grow the orders with kr so the standing waves stay resolved
  double validity_kr = 100.0;
};

struct RayContribution {
  double gamma = 1.0;
  double shift = 0.0;
};

/// Resonance and shift factors for one direction at a fixed point and detuning.
class RaySampler {
 public:
  RaySampler(const CavityGeometry& geom, const FieldPoint& point, double phi0, const RayOptions& opt)
      : geom_(geom), point_(point), phi0_(phi0), opt_(opt) {
    geom_.validate();
    if (opt.method == RayMethod::symmetric && !(geom.rho1 == geom.rho2 && geom.theta_m1 == geom.theta_m2))
      throw std::invalid_argument("symmetric ray method needs identical mirrors");
    cap1_ = geom.theta_m1;
    cap2_ = geom.theta_m2;
    if (opt.corrections.diffraction) {
      if (cap1_ > 0.0 && geom.rho1 > 0.0) cap1_ = effective_aperture(cap1_, geom.kR, geom.rho1, geom.rho2);
      if (cap2_ > 0.0 && geom.rho2 > 0.0) cap2_ = effective_aperture(cap2_, geom.kR, geom.rho1, geom.rho2);
    }
  }

  double cap1() const { return cap1_; }
  double cap2() const { return cap2_; }

  RayContribution operator()(const Vec3& omega) const {
    const cplx ahead = geom_.reflectivity(omega.z, cap1_, cap2_);
    if (ahead == 0.0) return {};
    const cplx behind = geom_.reflectivity(-omega.z, cap1_, cap2_);
    const double a1 = std::arg(ahead);
    const double a2 = behind == 0.0 ? 0.0 : std::arg(behind);

    RayPhase phase = opt_.corrections.aberration ? RayPhase::along(phi0_, point_, omega, geom_.kR) : RayPhase{phi0_, 0.0, 0.0};
    phase.mirror = 0.25 * (a1 + a2);
    const double phi = phase.total();
    const double x = dot(omega, point_.kr) + 0.25 * (a1 - a2);
    const double r1 = std::abs(ahead);
    const double r2 = std::abs(behind);
    if (opt_.method == RayMethod::symmetric) return {symmetric_airy_factor(phi, x, r1), symmetric_shift_factor(phi, x, r1)};
    return {airy_factor_M(phi, x, r1, r2), shift_factor(phi, x, r1, r2)};
  }

 private:
  CavityGeometry geom_;
  FieldPoint point_;
  double phi0_;
  RayOptions opt_;
  double cap1_ = 0.0;
  double cap2_ = 0.0;
};

struct RayIntegral {
  double gamma = 0.0;
  double shift = 0.0;
  int polar_order = 0;
  int azimuthal_order = 0;  // 0 when the azimuth was integrated analytically
  std::vector<std::string> warnings;
};

/// int dOmega/4pi weight(Omega) {M, S}(Omega). `axial_weight` states that the
/// weight depends on Omega only through cos(theta), which with an on-axis
/// point makes the azimuthal integral trivial.
template <class Weight>
RayIntegral integrate_rays(const CavityGeometry& geom, const FieldPoint& point, double phi0, const RayOptions& opt,
                           Weight&& weight, bool axial_weight) {
  const RaySampler sampler(geom, point, phi0, opt);
  RayIntegral out;
  const double kr = point.radius();
  if (kr > opt.validity_kr) {
    std::ostringstream msg;
    msg << "ray model used at kr = " << kr << ", beyond its validity range kr <= " << opt.validity_kr;
    out.warnings.push_back(msg.str());
  }

  const auto edges = CavityGeometry::edges_for(sampler.cap1(), sampler.cap2());
  std::vector<double> bounds{1.0};
  for (double e : edges) bounds.push_back(std::cos(e));
  bounds.push_back(-1.0);
  std::vector<int> orders;
  for (std::size_t s = 0; s + 1 < bounds.size(); ++s) {
    int n = opt.polar_order;
    if (opt.raise_orders) n = std::max(n, static_cast<int>(std::ceil(kr * (bounds[s] - bounds[s + 1]))) + 24);
    orders.push_back(n);
  }
  out.polar_order = *std::max_element(orders.begin(), orders.end());

  const bool axial = axial_weight && point.is_on_axis();
  int n_az = 0;
  if (!axial) {
    n_az = opt.azimuthal_order;
    if (opt.raise_orders) n_az = std::max(n_az, static_cast<int>(std::ceil(2.0 * point.transverse())) + 24);
  }
  out.azimuthal_order = n_az;
  const auto grid = build_grid(edges, orders, std::max(n_az, 2));

  double g = 0.0;
  double s = 0.0;
  if (axial) {
    for (const auto& node : grid.polar()) {
      const Vec3 omega = direction(node.theta, 0.0);
      const double w = node.weight * weight(omega);
      const auto c = sampler(omega);
      g += w * c.gamma;
      s += w * c.shift;
    }
  } else {
    for (const auto& node : grid.polar()) {
      double gr = 0.0;
      double sr = 0.0;
      for (int j = 0; j < n_az; ++j) {
        const Vec3 omega = direction(node.theta, 2.0 * pi * j / n_az);
        const double w = weight(omega);
        const auto c = sampler(omega);
        gr += w * c.gamma;
        sr += w * c.shift;
      }
      g += node.weight * gr / n_az;
      s += node.weight * sr / n_az;
    }
  }
  out.gamma = g;
  out.shift = s;
  return out;
}

/// Scalar vacuum-fluctuation ratio in the ray picture.
inline EnhancementResult enhancement_ray(const CavityGeometry& geom, const FieldPoint& point, double phi0,
                                         const RayOptions& opt = {}) {
  auto integral = integrate_rays(geom, point, phi0, opt, [](const Vec3&) { return 1.0; }, true);
  EnhancementResult res;
  res.value = integral.gamma;
  res.method = std::string("ray") + (opt.corrections.aberration ? "+aberration" : "") + (opt.corrections.diffraction ? "+diffraction" : "");
  res.warnings = std::move(integral.warnings);
  return res;
}

inline EnhancementResult enhancement_ray(const CavityGeometry& geom, const FieldPoint& point, double phi0, RayCorrections corr) {
  RayOptions opt;
  opt.corrections = corr;
  return enhancement_ray(geom, point, phi0, opt);
}

}  // namespace cavityqed
