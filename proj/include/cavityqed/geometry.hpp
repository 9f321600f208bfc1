#pragma once

// Two spherical mirror caps sharing a center of curvature: cap 1 around +z
// (theta < theta_m1), cap 2 around -z (theta > pi - theta_m2).

#include <cmath>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "cavityqed/core.hpp"

namespace cavityqed {

/// rho0 * exp(2i k delta cos theta): an axially displaced mirror seen from the center.
inline cplx defocus_profile(double rho0, double k_delta, double theta) {
  if (!(std::abs(rho0) <= 1.0)) throw std::domain_error("defocus_profile: |rho0| must be <= 1");
  if (k_delta == 0.0) return {rho0, 0.0};
  return rho0 * std::polar(1.0, 2.0 * k_delta * std::cos(theta));
}

struct CavityGeometry {
  double kR = 1e5;
  double theta_m1 = std::acos(0.7);
  double theta_m2 = std::acos(0.7);
  double rho1 = 0.98;
  double rho2 = 0.98;
  double k_delta = 0.0;  // axial displacement of mirror 1, times k

  bool operator==(const CavityGeometry&) const = default;

  /// Every constraint violation, in field order.
  std::vector<std::string> violations() const {
    std::vector<std::string> out;
    auto bad = [&](const std::string& field, const std::string& what) { out.push_back(field + ": " + what); };
    if (!(kR > 0.0) || !std::isfinite(kR)) bad("kR", "must be finite and > 0");
    if (!(theta_m1 >= 0.0 && theta_m1 <= pi / 2)) bad("theta_m1", "half-aperture out of [0, pi/2]");
    if (!(theta_m2 >= 0.0 && theta_m2 <= pi / 2)) bad("theta_m2", "half-aperture out of [0, pi/2]");
    if (!(rho1 >= 0.0 && rho1 <= 1.0)) bad("rho1", "reflectivity out of [0,1]");
    if (!(rho2 >= 0.0 && rho2 <= 1.0)) bad("rho2", "reflectivity out of [0,1]");
    if (!std::isfinite(k_delta)) bad("k_delta", "must be finite");
    return out;
  }

  void validate() const {
    const auto v = violations();
    if (v.empty()) return;
    std::ostringstream msg;
    msg << "invalid cavity geometry:";
    for (const auto& s : v) msg << "\n  " << s;
    throw std::invalid_argument(msg.str());
  }

  bool symmetric() const { return theta_m1 == theta_m2 && rho1 == rho2 && k_delta == 0.0; }

  /// Solid-angle fraction covered by both caps (dOmega/4pi).
  double coverage() const { return 0.5 * ((1.0 - std::cos(theta_m1)) + (1.0 - std::cos(theta_m2))); }

  double transmission1() const { return 1.0 - rho1 * rho1; }
  double transmission2() const { return 1.0 - rho2 * rho2; }

  /// Reflectivity seen along polar angle theta, with the caps cut at the given half-angles.
  cplx reflectivity(double cos_theta, double cap1, double cap2) const {
    if (cap1 > 0.0 && cos_theta > std::cos(cap1))
      return k_delta == 0.0 ? cplx{rho1, 0.0} : rho1 * std::polar(1.0, 2.0 * k_delta * cos_theta);
    if (cap2 > 0.0 && cos_theta < -std::cos(cap2)) return {rho2, 0.0};
    return {0.0, 0.0};
  }
  cplx reflectivity(double cos_theta) const { return reflectivity(cos_theta, theta_m1, theta_m2); }

  /// Polar-angle discontinuities of the reflectivity profile for the given cap half-angles.
  static std::vector<double> edges_for(double cap1, double cap2) {
    std::vector<double> e;
    if (cap1 > 0.0) e.push_back(cap1);
    const double lower = pi - cap2;
    if (cap2 > 0.0 && (e.empty() || lower > e.back() + 1e-15)) e.push_back(lower);
    if (!e.empty() && e.back() >= pi) e.pop_back();
    return e;
  }
  std::vector<double> mirror_edges() const { return edges_for(theta_m1, theta_m2); }

  /// kR = 1e5, rho = 0.98 on both mirrors, cos(theta_m) = 0.7 (30% of the sphere).
  static CavityGeometry reference() { return {}; }
};

}  // namespace cavityqed
