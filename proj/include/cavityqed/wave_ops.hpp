#pragma once

// Full calculation: the cavity operators restricted to a truncated harmonic
// basis, one dense block per azimuthal index m, and the vacuum-fluctuation
// ratio obtained by solving the round-trip resolvent.
//
// The ratio at point r and one-way phase phi0 is || tau x ||^2 with
//   (U^2 - e^{2i phi0} P rho) x = U f,    f = harmonics of exp(-i k Omega.r),
// where U = exp(-i l(l+1)/2kR) is the far-field propagator and P the parity.
// The norm is the function norm, i.e. x^H (I - Gram(|rho|^2)) x, so the part
// of tau*x above l_max is kept.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "cavityqed/core.hpp"
#include "cavityqed/geometry.hpp"
#include "cavityqed/quadrature.hpp"
#include "cavityqed/specfun.hpp"

namespace cavityqed {

struct OperatorBlock {
  int m = 0;
  Eigen::MatrixXcd rho;    // Gram(rho(theta))
  Eigen::MatrixXd tau;     // Gram(sqrt(1 - |rho|^2))
  Eigen::MatrixXd weight;  // Gram(1 - |rho|^2)
};

/// Per-|m| operator blocks (the -m block equals the +m block for axially
/// symmetric mirrors) together with the diagonal propagator and parity.
class CavityOperatorSet {
 public:
  CavityOperatorSet(CavityGeometry geom, HarmonicBasis basis, std::vector<OperatorBlock> blocks)
      : geom_(geom), basis_(basis), blocks_(std::move(blocks)) {
    propagator_.resize(basis_.l_max + 1);
    parity_.resize(basis_.l_max + 1);
    for (int l = 0; l <= basis_.l_max; ++l) {
      propagator_(l) = std::polar(1.0, -double(l) * (l + 1) / (2.0 * geom_.kR));
      parity_(l) = (l % 2 == 0) ? 1.0 : -1.0;
    }
  }

  const CavityGeometry& geometry() const { return geom_; }
  const HarmonicBasis& basis() const { return basis_; }
  int m_limit() const { return static_cast<int>(blocks_.size()) - 1; }
  bool has_block(int m) const { return std::abs(m) <= m_limit(); }

  const OperatorBlock& block(int m) const {
    if (!has_block(m)) {
      throw std::out_of_range("CavityOperatorSet: no block for m = " + std::to_string(m) +
                              " (operators built up to |m| = " + std::to_string(m_limit()) + ")");
    }
    return blocks_[static_cast<std::size_t>(std::abs(m))];
  }

  /// Diagonal entries for l = |m|..l_max.
  Eigen::VectorXcd propagator(int m) const { return propagator_.tail(basis_.l_max - std::abs(m) + 1); }
  Eigen::VectorXd parity(int m) const { return parity_.tail(basis_.l_max - std::abs(m) + 1); }

 private:
  CavityGeometry geom_;
  HarmonicBasis basis_;
  std::vector<OperatorBlock> blocks_;
  Eigen::VectorXcd propagator_;
  Eigen::VectorXd parity_;
};

/// Gauss order per polar segment needed for exact products of two harmonics
/// of degree l_max against the (smooth within a segment) mirror profile.
inline int required_polar_order(int l_max, double k_delta = 0.0) {
  return l_max + 9 + static_cast<int>(std::ceil(2.0 * std::abs(k_delta)));
}

/// Polar grid split at the mirror edges with the required order. The
/// azimuthal order is irrelevant for the operator blocks.
inline AngularGrid operator_grid(const CavityGeometry& geom, int l_max, int min_order = 0) {
  const auto edges = geom.mirror_edges();
  return build_grid(edges, std::max(min_order, required_polar_order(l_max, geom.k_delta)), 2);
}

/// Build the blocks for |m| <= m_limit by quadrature over the grid's polar nodes.
inline CavityOperatorSet build_operators(const CavityGeometry& geom, const HarmonicBasis& basis,
                                         const AngularGrid& grid, int m_limit) {
  geom.validate();
  if (m_limit < 0 || m_limit > basis.l_max) throw std::invalid_argument("build_operators: m_limit outside [0, l_max]");

  const int need = required_polar_order(basis.l_max, geom.k_delta);
  if (grid.min_polar_order() < need) {
    throw QuadratureOrderError("build_operators: polar order " + std::to_string(grid.min_polar_order()) +
                                   " too low for l_max = " + std::to_string(basis.l_max),
                               grid.min_polar_order(), need);
  }
  for (double e : geom.mirror_edges()) {
    const auto edges = grid.edges();
    const bool found = std::any_of(edges.begin(), edges.end(), [&](double g) { return std::abs(g - e) < 1e-12; });
    if (!found) throw std::invalid_argument("build_operators: grid is not segmented at mirror edge theta = " + std::to_string(e));
  }

  const auto polar = grid.polar();
  const auto n_nodes = static_cast<Eigen::Index>(polar.size());
  Eigen::VectorXcd prof(n_nodes);
  Eigen::VectorXd tau_w(n_nodes), loss_w(n_nodes);
  for (Eigen::Index i = 0; i < n_nodes; ++i) {
    const auto& node = polar[static_cast<std::size_t>(i)];
    const cplx r = geom.reflectivity(node.cos_theta);
    prof(i) = r * node.weight;
    const double t2 = 1.0 - std::norm(r);
    loss_w(i) = t2 * node.weight;
    tau_w(i) = std::sqrt(std::max(t2, 0.0)) * node.weight;
  }

  std::vector<OperatorBlock> blocks;
  blocks.reserve(static_cast<std::size_t>(m_limit) + 1);
  for (int m = 0; m <= m_limit; ++m) {
    const int n = basis.l_max - m + 1;
    Eigen::MatrixXd table(n, n_nodes);
    for (Eigen::Index i = 0; i < n_nodes; ++i) {
      const auto p = normalized_legendre(m, basis.l_max, polar[static_cast<std::size_t>(i)].cos_theta);
      for (int k = 0; k < n; ++k) table(k, i) = p[static_cast<std::size_t>(k)];
    }
    OperatorBlock b;
    b.m = m;
    b.rho = table.cast<cplx>() * prof.asDiagonal() * table.transpose().cast<cplx>();
    b.tau = table * tau_w.asDiagonal() * table.transpose();
    b.weight = table * loss_w.asDiagonal() * table.transpose();
    blocks.push_back(std::move(b));
  }
  return CavityOperatorSet(geom, basis, std::move(blocks));
}

/// max |(rho^H rho + tau^2 - I)_{ij}| over the leading sub-block of size `leading`.
/// Vanishes up to quadrature error for an infinite basis; in a truncated one
/// the coupling to degrees above l_max shows up near the end of the block.
inline double flux_defect(const CavityOperatorSet& ops, int m, int leading) {
  const auto& b = ops.block(m);
  const int n = std::min<int>(leading, static_cast<int>(b.rho.rows()));
  const Eigen::MatrixXcd s = b.rho.adjoint() * b.rho + (b.tau * b.tau).cast<cplx>();
  const Eigen::MatrixXcd d = s.topLeftCorner(n, n) - Eigen::MatrixXcd::Identity(n, n);
  return d.cwiseAbs().maxCoeff();
}

inline constexpr double min_reciprocal_condition = 1e-13;

/// Factorized resolvent U^2 - e^{2i phi0} P rho for every available |m| at a fixed phase.
class FullSolver {
 public:
  FullSolver(std::shared_ptr<const CavityOperatorSet> ops, double phi0) : ops_(std::move(ops)), phi0_(phi0) {
    const cplx e = std::polar(1.0, 2.0 * phi0);
    for (int m = 0; m <= ops_->m_limit(); ++m) {
      const auto& b = ops_->block(m);
      const Eigen::VectorXcd u = ops_->propagator(m);
      const Eigen::VectorXd par = ops_->parity(m);
      Eigen::MatrixXcd a = -e * (par.cast<cplx>().asDiagonal() * b.rho);
      a.diagonal() += u.cwiseProduct(u);
      lu_.emplace_back(a);
      const double rc = lu_.back().rcond();
      if (!(rc >= min_reciprocal_condition)) {
        std::ostringstream msg;
        msg << "resolvent singular to working precision in block m = " << m << " at phi0 = " << phi0
            << " (condition estimate " << 1.0 / rc << ")";
        throw SolverError(msg.str(), 1.0 / rc);
      }
      condition_ = std::max(condition_, 1.0 / rc);
    }
  }

  double phase() const { return phi0_; }
  double max_condition() const { return condition_; }
  const CavityOperatorSet& operators() const { return *ops_; }

  EnhancementResult enhancement(const FieldPoint& point, double tail_tol = default_tail_tolerance) const {
    const auto& basis = ops_->basis();
    const auto pw = plane_wave_coeffs(point, basis, tail_tol);
    EnhancementResult res;
    res.method = "full";
    res.l_max = basis.l_max;
    res.max_condition = condition_;
    res.truncation_tail = pw.tail_energy;
    if (pw.truncated) {
      std::ostringstream msg;
      msg << "plane-wave expansion truncated at l_max = " << basis.l_max << " for kr = " << point.radius()
          << " (tail energy " << pw.tail_energy << ")";
      res.warnings.push_back(msg.str());
    }
    double total = 0.0;
    for (int m = -basis.l_max; m <= basis.l_max; ++m) {
      if (pw.coeffs.block_is_zero(m)) continue;
      const auto& b = ops_->block(m);
      const Eigen::VectorXcd rhs = ops_->propagator(m).cwiseProduct(pw.coeffs.block(m));
      const Eigen::VectorXcd x = lu_[static_cast<std::size_t>(std::abs(m))].solve(rhs);
      total += x.dot(b.weight.cast<cplx>() * x).real();
    }
    res.value = total;
    return res;
  }

 private:
  std::shared_ptr<const CavityOperatorSet> ops_;
  double phi0_;
  std::vector<Eigen::PartialPivLU<Eigen::MatrixXcd>> lu_;
  double condition_ = 1.0;
};

/// m range a point needs: on-axis points only excite m = 0.
inline int m_limit_for(const FieldPoint& point, const HarmonicBasis& basis) {
  return (point.is_on_axis()) ? 0 : basis.l_max;
}

inline EnhancementResult enhancement_full(const CavityGeometry& geom, const HarmonicBasis& basis, const AngularGrid& grid,
                                          const FieldPoint& point, double phi0,
                                          double tail_tol = default_tail_tolerance) {
  auto ops = std::make_shared<const CavityOperatorSet>(build_operators(geom, basis, grid, m_limit_for(point, basis)));
  return FullSolver(ops, phi0).enhancement(point, tail_tol);
}

inline EnhancementResult enhancement_full(const CavityGeometry& geom, const HarmonicBasis& basis, const FieldPoint& point,
                                          double phi0, double tail_tol = default_tail_tolerance) {
  return enhancement_full(geom, basis, operator_grid(geom, basis.l_max), point, phi0, tail_tol);
}

/// Intracavity field g = U x with (U^2 - e^{2i phi} rho P) x = tau U f_in, per block.
inline AngularFunction intracavity_field_coeffs(const CavityOperatorSet& ops, double phase, const AngularFunction& f_in) {
  if (!(f_in.basis() == ops.basis())) throw std::invalid_argument("intracavity_field_coeffs: basis mismatch");
  const auto& basis = ops.basis();
  const cplx e = std::polar(1.0, 2.0 * phase);
  AngularFunction g(basis);
  for (int m = -basis.l_max; m <= basis.l_max; ++m) {
    if (f_in.block_is_zero(m)) continue;
    const auto& b = ops.block(m);
    const Eigen::VectorXcd u = ops.propagator(m);
    Eigen::MatrixXcd a = -e * (b.rho * ops.parity(m).cast<cplx>().asDiagonal());
    a.diagonal() += u.cwiseProduct(u);
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(a);
    const double rc = lu.rcond();
    if (!(rc >= min_reciprocal_condition)) throw SolverError("intracavity_field_coeffs: singular resolvent", 1.0 / rc);
    const Eigen::VectorXcd rhs = b.tau.cast<cplx>() * u.cwiseProduct(f_in.block(m));
    g.block(m) = u.cwiseProduct(lu.solve(rhs));
  }
  return g;
}

/// Perfect-sphere eigenfrequency in units of c/2R for n radial nodes and degree l.
inline double perfect_sphere_frequency(int l, int n, double kR) {
  if (l < 0 || n < 1) throw std::domain_error("perfect_sphere_frequency: need l >= 0, n >= 1");
  if (!(kR > 0.0)) throw std::domain_error("perfect_sphere_frequency: kR must be > 0");
  return n + 0.5 * l - double(l) * (l + 1) / (2.0 * pi * kR);
}

/// Vacuum fluctuations inside a closed sphere of uniform reflectivity rho, summed over degrees l <= l_max.
inline double closed_cavity_mode_sum(double rho, double kR, double phi0, double kr, int l_max) {
  if (!(rho >= 0.0 && rho < 1.0)) throw std::domain_error("closed_cavity_mode_sum: need 0 <= rho < 1");
  const double T = 1.0 - rho * rho;
  const auto rb = radial_bessel_table(l_max, kr);
  const cplx e = rho * std::polar(1.0, 2.0 * phi0);
  double s = 0.0;
  for (int l = 0; l <= l_max; ++l) {
    const cplx denom = std::polar(1.0, -double(l) * (l + 1) / kR) - ((l % 2 == 0) ? e : -e);
    const double r = rb[static_cast<std::size_t>(l)];
    s += T / std::norm(denom) * 0.5 * pi * (2.0 * l + 1.0) * r * r;
  }
  return s;
}

/// Degenerate-mode limit of the closed-cavity sum: two resonance series weighted 1/2 +- sin(2kr)/(4kr).
inline double two_line_vacuum(double rho, double phi0, double kr) {
  if (!(rho >= 0.0 && rho < 1.0)) throw std::domain_error("two_line_vacuum: need 0 <= rho < 1");
  const double T = 1.0 - rho * rho;
  const cplx e = rho * std::polar(1.0, 2.0 * phi0);
  const double split = kr == 0.0 ? 0.5 : std::sin(2.0 * kr) / (4.0 * kr);
  return T / std::norm(1.0 - e) * (0.5 + split) + T / std::norm(1.0 + e) * (0.5 - split);
}

}  // namespace cavityqed
