#pragma once

// Shared value types, constants and error classes.
//
// Every length in the library is stored pre-multiplied by the wavenumber k,
// so positions, mirror radii and defocus values are dimensionless phases.

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace cavityqed {

using cplx = std::complex<double>;

inline constexpr double pi = std::numbers::pi;
inline constexpr cplx I{0.0, 1.0};

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  constexpr Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  constexpr Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  constexpr Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  constexpr bool operator==(const Vec3&) const = default;
};

constexpr double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }

inline Vec3 normalized(const Vec3& a) {
  const double n = norm(a);
  if (!(n > 0.0) || !std::isfinite(n)) throw std::domain_error("cannot normalize a zero or non-finite vector");
  return a * (1.0 / n);
}

/// Unit vector for polar angle theta (from +z) and azimuth phi.
inline Vec3 direction(double theta, double phi) {
  const double s = std::sin(theta);
  return {s * std::cos(phi), s * std::sin(phi), std::cos(theta)};
}

/// Evaluation point near the cavity center, in units of 1/k.
struct FieldPoint {
  Vec3 kr;

  static constexpr FieldPoint origin() { return {}; }
  static constexpr FieldPoint on_axis(double kz) { return {{0.0, 0.0, kz}}; }

  double radius() const { return norm(kr); }
  double transverse() const { return std::hypot(kr.x, kr.y); }
  bool is_on_axis() const { return kr.x == 0.0 && kr.y == 0.0; }
  bool operator==(const FieldPoint&) const = default;
};

// Errors. Domain violations use std::domain_error / std::invalid_argument;
// the classes below carry extra diagnostics for numerical failures.

class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SolverError : public NumericalError {
 public:
  SolverError(const std::string& what, double condition)
      : NumericalError(what), condition_(condition) {}
  double condition() const { return condition_; }

 private:
  double condition_;
};

class QuadratureOrderError : public NumericalError {
 public:
  QuadratureOrderError(const std::string& what, int have, int need)
      : NumericalError(what), have_(have), need_(need) {}
  int have() const { return have_; }
  int need() const { return need_; }

 private:
  int have_;
  int need_;
};

class ConvergenceError : public NumericalError {
 public:
  ConvergenceError(const std::string& what, double estimate)
      : NumericalError(what), estimate_(estimate) {}
  double error_estimate() const { return estimate_; }

 private:
  double estimate_;
};

class ApertureCollapseError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Scalar vacuum-fluctuation ratio with the diagnostics gathered along the way.
struct EnhancementResult {
  double value = 0.0;
  std::string method;
  int l_max = 0;
  double max_condition = 1.0;   // worst resolvent condition estimate (full calculation)
  double truncation_tail = 0.0; // plane-wave tail energy (full calculation)
  std::vector<std::string> warnings;
};

}  // namespace cavityqed
