#pragma once

// Radial Bessel functions J_{l+1/2}(x)/sqrt(x), spherical harmonics normalized
// over dOmega/4pi, and the harmonic expansion of the plane-wave kernel
// exp(-i k Omega.r).

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <concepts>
#include <stdexcept>
#include <string>
#include <vector>

#include "cavityqed/core.hpp"

namespace cavityqed {

struct HarmonicIndex {
  int l = 0;
  int m = 0;

  constexpr bool valid() const { return l >= 0 && (m <= l) && (-m <= l); }
};

namespace detail {

template <std::floating_point T>
constexpr T sqrt_two_over_pi() {
  return static_cast<T>(0.79788456080286535587989211986876373695171726232986931533185165934L);
}

// Starting index for Miller's backward recurrence. Above the turning point
// l ~ x the minimal solution decays like exp(-(l-x)^{3/2}/sqrt(x)), so an
// offset of a few x^{1/3} makes the arbitrary seed negligible.
inline int miller_start(int l_max, double x) {
  const double top = std::max<double>(l_max, std::ceil(x));
  return static_cast<int>(top + 30.0 + 12.0 * std::cbrt(top));
}

}  // namespace detail

/// All values J_{l+1/2}(x)/sqrt(x) for 0 <= l <= l_max, by backward recurrence
/// normalized against the closed forms of l = 0 or l = 1.
template <std::floating_point T>
std::vector<T> radial_bessel_table(int l_max, T kr) {
  if (l_max < 0) throw std::domain_error("radial_bessel_table: l_max must be >= 0");
  if (!(kr >= T(0)) || !std::isfinite(kr)) throw std::domain_error("radial_bessel_table: kr must be finite and >= 0");

  std::vector<T> out(static_cast<std::size_t>(l_max) + 1, T(0));
  if (kr == T(0)) {
    out[0] = detail::sqrt_two_over_pi<T>();
    return out;
  }

  const T x = kr;
  const int start = detail::miller_start(l_max, static_cast<double>(x));
  constexpr T big = T(1e250);
  constexpr T rescale = T(1e-250);

  // f_{l-1} = (2l+1)/x f_l - f_{l+1}, seeded with f_{start+1} = 0, f_start = tiny.
  T f_next = T(0);
  T f = T(1e-300);
  for (int l = start; l >= 1; --l) {
    if (l <= l_max) out[static_cast<std::size_t>(l)] = f;
    const T f_prev = T(2 * l + 1) / x * f - f_next;
    f_next = f;
    f = f_prev;
    if (std::abs(f) > big) {
      f *= rescale;
      f_next *= rescale;
      for (int k = l; k <= std::min(l_max, start); ++k) out[static_cast<std::size_t>(k)] *= rescale;
    }
  }
  out[0] = f;

  // j_0 = sin x / x and j_1 = sin x / x^2 - cos x / x never vanish together.
  const T j0 = std::sin(x) / x;
  const T j1 = (std::sin(x) / x - std::cos(x)) / x;
  const T f1 = f_next;  // unnormalized f_1
  const T scale = (std::abs(j0) >= std::abs(j1)) ? j0 / f : j1 / f1;
  const T norm = scale * detail::sqrt_two_over_pi<T>();
  for (auto& v : out) v *= norm;
  return out;
}

/// J_{l+1/2}(kr)/sqrt(kr); the kr -> 0 limit is sqrt(2/pi) for l = 0, else 0.
template <std::floating_point T>
T radial_bessel(int l, T kr) {
  if (l < 0) throw std::domain_error("radial_bessel: l must be >= 0");
  return radial_bessel_table(l, kr)[static_cast<std::size_t>(l)];
}

/// Large-argument form sqrt(2/pi)/kr * sin(kr - pi l/2 + l(l+1)/(2kr)).
/// Only meaningful for kr >> l; the caller is responsible for that.
template <std::floating_point T>
T asymptotic_radial_bessel(int l, T kr) {
  if (l < 0) throw std::domain_error("asymptotic_radial_bessel: l must be >= 0");
  if (!(kr > T(0))) throw std::domain_error("asymptotic_radial_bessel: kr must be > 0");
  const T ll = static_cast<T>(l);
  // kr - pi l/2 reduced modulo 2pi through the quarter-period index.
  const int quarter = l % 4;
  const T phase_shift = -static_cast<T>(pi) / T(2) * static_cast<T>(quarter);
  return detail::sqrt_two_over_pi<T>() / kr * std::sin(kr + phase_shift + ll * (ll + T(1)) / (T(2) * kr));
}

/// Associated Legendre functions normalized so that (1/2) int_{-1}^{1} p^2 dx = 1,
/// including the Condon-Shortley phase, for l = m..l_max at x = cos(theta).
inline std::vector<double> normalized_legendre(int m, int l_max, double x) {
  if (m < 0 || l_max < m) throw std::domain_error("normalized_legendre: need 0 <= m <= l_max");
  if (!(x >= -1.0 && x <= 1.0)) throw std::domain_error("normalized_legendre: x outside [-1, 1]");
  std::vector<double> p(static_cast<std::size_t>(l_max - m) + 1, 0.0);
  const double s = std::sqrt((1.0 - x) * (1.0 + x));

  // p_mm = (-1)^m sqrt((2m+1) prod_{k<=m} (2k-1)/(2k)) s^m
  double pmm = 1.0;
  for (int k = 1; k <= m; ++k) pmm *= -s * std::sqrt((2.0 * k - 1.0) / (2.0 * k));
  pmm *= std::sqrt(2.0 * m + 1.0);
  p[0] = pmm;
  if (l_max == m) return p;
  p[1] = x * std::sqrt(2.0 * m + 3.0) * pmm;
  for (int l = m + 2; l <= l_max; ++l) {
    const double ld = l;
    const double a = std::sqrt((4.0 * ld * ld - 1.0) / (ld * ld - double(m) * m));
    const double b = std::sqrt(((ld - 1.0) * (ld - 1.0) - double(m) * m) / (4.0 * (ld - 1.0) * (ld - 1.0) - 1.0));
    p[static_cast<std::size_t>(l - m)] = a * (x * p[static_cast<std::size_t>(l - m - 1)] - b * p[static_cast<std::size_t>(l - m - 2)]);
  }
  return p;
}

/// Spherical harmonic with <Y|Y> = int dOmega/4pi |Y|^2 = 1.
inline cplx ylm(HarmonicIndex idx, double theta, double phi) {
  if (!idx.valid()) throw std::domain_error("ylm: require 0 <= |m| <= l");
  if (!(theta >= 0.0 && theta <= pi)) throw std::domain_error("ylm: theta outside [0, pi]");
  const int am = std::abs(idx.m);
  const double p = normalized_legendre(am, idx.l, std::cos(theta)).back();
  const cplx y = p * std::polar(1.0, am * phi);
  if (idx.m >= 0) return y;
  return (am % 2 == 0 ? 1.0 : -1.0) * std::conj(y);
}

/// Truncated harmonic basis: all (l, m) with l <= l_max, grouped in blocks of fixed m.
struct HarmonicBasis {
  int l_max = 0;

  explicit HarmonicBasis(int lmax) : l_max(lmax) {
    if (lmax < 0) throw std::domain_error("HarmonicBasis: l_max must be >= 0");
  }
  int block_size(int m) const { return l_max - std::abs(m) + 1; }
  int block_count() const { return 2 * l_max + 1; }
  bool operator==(const HarmonicBasis&) const = default;
};

/// Coefficient vector over normalized harmonics, stored as one block per m
/// (entries l = |m|..l_max).
class AngularFunction {
 public:
  explicit AngularFunction(HarmonicBasis basis) : basis_(basis) {
    blocks_.reserve(static_cast<std::size_t>(basis.block_count()));
    for (int m = -basis.l_max; m <= basis.l_max; ++m)
      blocks_.emplace_back(Eigen::VectorXcd::Zero(basis.block_size(m)));
  }

  const HarmonicBasis& basis() const { return basis_; }

  Eigen::VectorXcd& block(int m) { return blocks_.at(static_cast<std::size_t>(m + basis_.l_max)); }
  const Eigen::VectorXcd& block(int m) const { return blocks_.at(static_cast<std::size_t>(m + basis_.l_max)); }

  cplx& operator()(int l, int m) { return block(m)(l - std::abs(m)); }
  cplx operator()(int l, int m) const { return block(m)(l - std::abs(m)); }

  bool block_is_zero(int m) const { return block(m).isZero(0.0); }

  double squared_norm() const {
    double s = 0.0;
    for (const auto& b : blocks_) s += b.squaredNorm();
    return s;
  }

  /// Energy carried by degrees l > l_max - count.
  double tail_energy(int count) const {
    double s = 0.0;
    for (int m = -basis_.l_max; m <= basis_.l_max; ++m) {
      const auto& b = block(m);
      for (int l = std::max(std::abs(m), basis_.l_max - count + 1); l <= basis_.l_max; ++l)
        s += std::norm(b(l - std::abs(m)));
    }
    return s;
  }

 private:
  HarmonicBasis basis_;
  std::vector<Eigen::VectorXcd> blocks_;
};

struct PlaneWaveExpansion {
  AngularFunction coeffs;
  double tail_energy = 0.0;
  bool truncated = false;
};

inline constexpr double default_tail_tolerance = 1e-8;
inline constexpr int tail_window = 5;

/// Harmonic coefficients of Omega -> exp(-i k Omega.r):
/// c_lm = (-i)^l sqrt(pi/2) J_{l+1/2}(kr)/sqrt(kr) conj(Y_lm(r/|r|)).
/// Flags truncation when the last five degrees carry more than tail_tol.
inline PlaneWaveExpansion plane_wave_coeffs(const FieldPoint& point, const HarmonicBasis& basis,
                                            double tail_tol = default_tail_tolerance) {
  const double kr = point.radius();
  if (!std::isfinite(kr)) throw std::domain_error("plane_wave_coeffs: non-finite point");

  PlaneWaveExpansion out{AngularFunction(basis)};
  const auto bessel = radial_bessel_table(basis.l_max, kr);
  const double theta = kr > 0.0 ? std::acos(std::clamp(point.kr.z / kr, -1.0, 1.0)) : 0.0;
  const double phi = std::atan2(point.kr.y, point.kr.x);
  const double x = std::cos(theta);
  const double root_half_pi = std::sqrt(pi / 2.0);

  static constexpr cplx minus_i_pow[4] = {{1, 0}, {0, -1}, {-1, 0}, {0, 1}};
  const int m_top = (kr == 0.0 || point.is_on_axis()) ? 0 : basis.l_max;
  for (int am = 0; am <= m_top; ++am) {
    const auto p = normalized_legendre(am, basis.l_max, x);
    const cplx phase_pos = std::polar(1.0, -am * phi);  // conj(e^{i m phi})
    for (int l = am; l <= basis.l_max; ++l) {
      const double radial = root_half_pi * bessel[static_cast<std::size_t>(l)] * p[static_cast<std::size_t>(l - am)];
      const cplx c = minus_i_pow[l % 4] * radial;
      out.coeffs(l, am) = c * phase_pos;
      if (am > 0) {
        // conj(Y_{l,-m}) = (-1)^m Y_{l,m}
        out.coeffs(l, -am) = (am % 2 == 0 ? 1.0 : -1.0) * c * std::conj(phase_pos);
      }
    }
  }
  out.tail_energy = out.coeffs.tail_energy(tail_window);
  out.truncated = out.tail_energy > tail_tol;
  return out;
}

}  // namespace cavityqed
