#pragma once

// Airy resonance factor and its dispersive partners: principal-value
// integrals of the Airy function against 1/delta, in closed form.

#include <cmath>
#include <limits>
#include <stdexcept>

#include "cavityqed/core.hpp"

namespace cavityqed {

/// Coefficient of finesse F = 4p/(1-p)^2, where p is rho for one round trip
/// between identical mirrors or rho1*rho2 otherwise. beta solves sinh^2(beta) = 1/F.
struct FinesseParam {
  double F = 0.0;

  static FinesseParam from_reflectivity(double p) {
    if (!(p >= 0.0 && p < 1.0)) throw std::domain_error("FinesseParam: reflectivity product must lie in [0, 1)");
    return {4.0 * p / ((1.0 - p) * (1.0 - p))};
  }
  static FinesseParam from_pair(double rho1, double rho2) { return from_reflectivity(rho1 * rho2); }

  double beta() const {
    if (F == 0.0) return std::numeric_limits<double>::infinity();
    return std::asinh(1.0 / std::sqrt(F));
  }
};

/// (1 - rho^2)/|1 - rho e^{2i phi}|^2 = sqrt(1+F)/(1 + F sin^2 phi).
inline double airy_lorentzian(double phi, double rho) {
  if (!(rho >= 0.0 && rho < 1.0)) throw std::domain_error("airy_lorentzian: need 0 <= rho < 1");
  return (1.0 - rho * rho) / std::norm(1.0 - rho * std::polar(1.0, 2.0 * phi));
}

inline double airy_lorentzian(double phi, FinesseParam f) {
  const double s = std::sin(phi);
  return std::sqrt(1.0 + f.F) / (1.0 + f.F * s * s);
}

/// PV of L(phi - d)/d over the real line: 2 pi rho sin(2 phi)/|1 - rho e^{2i phi}|^2.
inline double pv_shift(double phi, double rho) {
  if (!(rho >= 0.0 && rho < 1.0)) throw std::domain_error("pv_shift: need 0 <= rho < 1");
  return 2.0 * pi * rho * std::sin(2.0 * phi) / std::norm(1.0 - rho * std::polar(1.0, 2.0 * phi));
}

inline double pv_shift(double phi, FinesseParam f) {
  const double s = std::sin(phi);
  return 0.5 * pi * f.F * std::sin(2.0 * phi) / (1.0 + f.F * s * s);
}

/// PV of L(phi - d) cos(phi - d)/d.
inline double pv_shift_cos(double phi, FinesseParam f) {
  if (!(f.F >= 0.0)) throw std::domain_error("pv_shift_cos: F must be >= 0");
  const double s = std::sin(phi);
  return pi * (1.0 + f.F) * s / (1.0 + f.F * s * s);
}

/// PV of L(phi - d) sin(phi - d)/d.
inline double pv_shift_sin(double phi, FinesseParam f) {
  if (!(f.F >= 0.0)) throw std::domain_error("pv_shift_sin: F must be >= 0");
  const double s = std::sin(phi);
  return -pi * std::cos(phi) / (1.0 + f.F * s * s);
}

/// Same kernels with F' built from the round-trip reflectivity product rho1*rho2.
inline double pv_shift_cos(double phi, double rho_product) { return pv_shift_cos(phi, FinesseParam::from_reflectivity(rho_product)); }
inline double pv_shift_sin(double phi, double rho_product) { return pv_shift_sin(phi, FinesseParam::from_reflectivity(rho_product)); }

}  // namespace cavityqed
