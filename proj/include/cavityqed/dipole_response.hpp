#pragma once

// Damping rate and level shift of a dipole, relative to free space, from the
// ray picture weighted by the transverse-field factor (3/2)(1 - (d.Omega)^2).

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "cavityqed/core.hpp"
#include "cavityqed/geometry.hpp"
#include "cavityqed/quadrature.hpp"
#include "cavityqed/ray_model.hpp"

namespace cavityqed {

/// (3/2)(1 - (d.Omega)^2) for unit vectors.
inline double polarization_factor(const Vec3& d, const Vec3& omega) {
  if (std::abs(dot(d, d) - 1.0) > 1e-12 || std::abs(dot(omega, omega) - 1.0) > 1e-12)
    throw std::domain_error("polarization_factor: arguments must be unit vectors");
  const double c = dot(d, omega);
  return 1.5 * (1.0 - c * c);
}

enum class DipoleClass { parallel, perpendicular, isotropic, vector };

/// A fixed dipole direction or one of the axial symmetry classes. The
/// perpendicular class is averaged over the azimuth of d in the transverse plane.
struct DipoleOrientation {
  DipoleClass kind = DipoleClass::isotropic;
  Vec3 d{0.0, 0.0, 1.0};

  bool operator==(const DipoleOrientation&) const = default;

  static DipoleOrientation parallel() { return {DipoleClass::parallel, {0.0, 0.0, 1.0}}; }
  static DipoleOrientation perpendicular() { return {DipoleClass::perpendicular, {1.0, 0.0, 0.0}}; }
  static DipoleOrientation isotropic() { return {DipoleClass::isotropic, {0.0, 0.0, 1.0}}; }
  static DipoleOrientation along(const Vec3& v) { return {DipoleClass::vector, normalized(v)}; }

  double factor(const Vec3& omega) const {
    switch (kind) {
      case DipoleClass::parallel: return 1.5 * (1.0 - omega.z * omega.z);
      case DipoleClass::perpendicular: return 1.5 * (1.0 - 0.5 * (1.0 - omega.z * omega.z));
      case DipoleClass::isotropic: return 1.0;
      case DipoleClass::vector: return polarization_factor(d, omega);
    }
    return 1.0;
  }

  /// True when the factor depends on Omega only through its polar angle.
  bool axial() const { return kind != DipoleClass::vector || (d.x == 0.0 && d.y == 0.0); }

  std::string name() const {
    switch (kind) {
      case DipoleClass::parallel: return "parallel";
      case DipoleClass::perpendicular: return "perpendicular";
      case DipoleClass::isotropic: return "isotropic";
      case DipoleClass::vector: return "vector";
    }
    return "?";
  }
};

struct ResponseResult {
  double gamma_ratio = 1.0;
  double shift_ratio = 0.0;
  std::string method;
  int polar_order = 0;
  int azimuthal_order = 0;
  std::vector<std::string> warnings;
};

inline std::string method_tag(const RayOptions& opt) {
  std::string s = opt.method == RayMethod::symmetric ? "ray-symmetric" : "ray-asymmetric";
  if (opt.corrections.aberration) s += "+aberration";
  if (opt.corrections.diffraction) s += "+diffraction";
  return s;
}

inline ResponseResult dipole_response(const FieldPoint& point, const DipoleOrientation& dip, const CavityGeometry& geom,
                                      double phi0, const RayOptions& opt = {}) {
  auto integral = integrate_rays(geom, point, phi0, opt, [&](const Vec3& omega) { return dip.factor(omega); }, dip.axial());
  ResponseResult r;
  r.gamma_ratio = integral.gamma;
  r.shift_ratio = integral.shift;
  r.method = method_tag(opt);
  r.polar_order = integral.polar_order;
  r.azimuthal_order = integral.azimuthal_order;
  r.warnings = std::move(integral.warnings);
  return r;
}

inline RayOptions options_for(RayMethod method) {
  RayOptions opt;
  opt.method = method;
  return opt;
}

inline double gamma_ratio(const FieldPoint& point, const DipoleOrientation& dip, const CavityGeometry& geom, double phi0,
                          RayMethod method = RayMethod::asymmetric) {
  return dipole_response(point, dip, geom, phi0, options_for(method)).gamma_ratio;
}

inline double shift_ratio(const FieldPoint& point, const DipoleOrientation& dip, const CavityGeometry& geom, double phi0,
                          RayMethod method = RayMethod::asymmetric) {
  return dipole_response(point, dip, geom, phi0, options_for(method)).shift_ratio;
}

/// Exact values at the center of a symmetric cavity without diffraction correction.
inline ResponseResult center_closed_forms(DipoleClass kind, double theta_m, double rho, double phi0) {
  if (kind == DipoleClass::vector) throw std::invalid_argument("center_closed_forms: needs a symmetry class, not a vector");
  if (!(theta_m >= 0.0 && theta_m <= pi / 2)) throw std::domain_error("center_closed_forms: theta_m out of [0, pi/2]");
  if (!(rho >= 0.0 && rho < 1.0)) throw std::domain_error("center_closed_forms: need 0 <= rho < 1");
  const double c = std::cos(theta_m);
  const double s2 = 1.0 - c * c;
  const double cav = 1.0 - c;  // two caps
  const double vac = c;
  const double denom = std::norm(1.0 - rho * std::polar(1.0, 2.0 * phi0));
  const double resonance = (1.0 - rho * rho) / denom;
  const double dispersive = rho * std::sin(2.0 * phi0) / denom;

  double w_vac = 1.0;
  double w_cav = 1.0;
  if (kind == DipoleClass::parallel) {
    w_vac = 1.0 + s2 / 2.0;
    w_cav = 1.0 - c * (1.0 + c) / 2.0;
  } else if (kind == DipoleClass::perpendicular) {
    w_vac = 1.0 - s2 / 4.0;
    w_cav = 1.0 + c * (1.0 + c) / 4.0;
  }
  ResponseResult r;
  r.gamma_ratio = vac * w_vac + cav * w_cav * resonance;
  r.shift_ratio = cav * w_cav * dispersive;
  r.method = "center-closed-form";
  return r;
}

/// Single mirror cap of half-angle theta_m around +z; no aberration term.
inline ResponseResult one_mirror_response(const FieldPoint& point, const DipoleOrientation& dip, double rho, double theta_m,
                                          double phi, int polar_order = 64, int azimuthal_order = 32) {
  if (!(rho >= 0.0 && rho <= 1.0)) throw std::domain_error("one_mirror_response: reflectivity out of [0,1]");
  if (!(theta_m > 0.0 && theta_m <= pi / 2)) throw std::domain_error("one_mirror_response: theta_m out of (0, pi/2]");
  const double kr = point.radius();
  const double c_m = std::cos(theta_m);
  const int n_cap = std::max(polar_order, static_cast<int>(std::ceil(kr * (1.0 - c_m))) + 24);
  const std::vector<double> edges{theta_m};
  const bool axial = dip.axial() && point.is_on_axis();
  const int n_az = axial ? 2 : std::max(azimuthal_order, static_cast<int>(std::ceil(2.0 * point.transverse())) + 24);
  const auto grid = build_grid(edges, std::vector<int>{n_cap, polar_order}, n_az);

  auto cap_terms = [&](const Vec3& omega, double& g, double& s) {
    const double w = dip.factor(omega);
    if (omega.z > c_m) {
      const double a = 2.0 * (dot(omega, point.kr) + phi);
      g = w * (1.0 + rho * std::cos(a));
      s = w * 0.5 * rho * std::sin(a);
    } else {
      g = w;
      s = 0.0;
    }
  };
  double gamma = 0.0;
  double shift = 0.0;
  for (const auto& node : grid.polar()) {
    const int count = axial ? 1 : n_az;
    double gr = 0.0;
    double sr = 0.0;
    for (int j = 0; j < count; ++j) {
      double g, s;
      cap_terms(direction(node.theta, 2.0 * pi * j / count), g, s);
      gr += g;
      sr += s;
    }
    gamma += node.weight * gr / count;
    shift += node.weight * sr / count;
  }
  ResponseResult r;
  r.gamma_ratio = gamma;
  r.shift_ratio = shift;
  r.method = "one-mirror";
  r.polar_order = n_cap;
  r.azimuthal_order = axial ? 0 : n_az;
  return r;
}

/// Leading order in the cap solid angle epsilon = Omega/4pi, dipole perpendicular to the axis, point on the axis.
inline ResponseResult small_angle_response(double epsilon, double rho, double kz, double phi) {
  ResponseResult r;
  const double a = 2.0 * (kz + phi);
  r.gamma_ratio = 1.0 + 1.5 * epsilon * rho * std::cos(a);
  r.shift_ratio = 0.75 * epsilon * rho * std::sin(a);
  r.method = "small-angle";
  return r;
}

/// Half-angle of a cap covering the fraction epsilon of the sphere.
inline double cap_angle_for(double epsilon) {
  if (!(epsilon > 0.0 && epsilon <= 0.5)) throw std::domain_error("cap_angle_for: epsilon out of (0, 1/2]");
  return std::acos(1.0 - 2.0 * epsilon);
}

}  // namespace cavityqed
