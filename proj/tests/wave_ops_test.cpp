#include <gtest/gtest.h>

#include <cmath>

#include "cavityqed/wave_ops.hpp"

using namespace cavityqed;

namespace {

CavityGeometry closed_sphere(double rho) {
  CavityGeometry g;
  g.theta_m1 = g.theta_m2 = pi / 2;
  g.rho1 = g.rho2 = rho;
  return g;
}

CavityGeometry caps45() {
  CavityGeometry g;
  g.theta_m1 = g.theta_m2 = pi / 4;
  return g;
}

std::shared_ptr<const CavityOperatorSet> ops_for(const CavityGeometry& g, int l_max, int m_limit) {
  return std::make_shared<const CavityOperatorSet>(build_operators(g, HarmonicBasis(l_max), operator_grid(g, l_max), m_limit));
}

}  // namespace

TEST(Operators, UniformSphereIsScalar) {
  const auto ops = ops_for(closed_sphere(0.7), 30, 30);
  for (int m : {0, 5, -12, 30}) {
    const auto& b = ops->block(m);
    const auto n = b.rho.rows();
    EXPECT_LT((b.rho - 0.7 * Eigen::MatrixXcd::Identity(n, n)).cwiseAbs().maxCoeff(), 1e-13) << m;
    EXPECT_LT((b.weight - 0.51 * Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff(), 1e-13) << m;
  }
}

TEST(Operators, MonopoleElementIsCoveredFraction) {
  const auto ops = ops_for(caps45(), 40, 0);
  EXPECT_NEAR(ops->block(0).rho(0, 0).real(), 0.98 * (1.0 - std::cos(pi / 4)), 1e-13);
  EXPECT_NEAR(ops->block(0).rho(0, 0).imag(), 0.0, 1e-15);
}

TEST(Operators, SymmetricCapsAreHermitianAndParityBlocked) {
  const auto ops = ops_for(CavityGeometry::reference(), 40, 3);
  for (int m = 0; m <= 3; ++m) {
    const auto& r = ops->block(m).rho;
    EXPECT_LT((r - r.adjoint()).cwiseAbs().maxCoeff(), 1e-14);
    // identical caps at theta and pi - theta: odd l +- 1 couplings cancel
    for (int i = 0; i < r.rows(); ++i)
      for (int j = i + 1; j < r.rows(); j += 2) EXPECT_LT(std::abs(r(i, j)), 1e-14);
  }
}

TEST(Operators, DefocusBreaksHermiticityButNotTheNormBound) {
  auto g = CavityGeometry::reference();
  g.k_delta = 0.3;
  const auto ops = ops_for(g, 40, 2);
  for (int m = 0; m <= 2; ++m) {
    const auto& r = ops->block(m).rho;
    EXPECT_GT((r - r.adjoint()).cwiseAbs().maxCoeff(), 1e-3);
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(r);
    EXPECT_LE(svd.singularValues()(0), 0.98 + 1e-12);
  }
}

TEST(Operators, FluxDefectShrinksWithTruncation) {
  // the hard mirror edge leaks out of the truncated space; the leak falls off like 1/l_max
  const auto a = ops_for(CavityGeometry::reference(), 80, 4);
  const auto b = ops_for(CavityGeometry::reference(), 160, 4);
  for (int m = 0; m <= 4; ++m) {
    const double da = flux_defect(*a, m, 20), db = flux_defect(*b, m, 20);
    EXPECT_LT(da, 2e-2) << m;
    EXPECT_NEAR(da / db, 2.0, 0.2) << m;
  }
}

TEST(Operators, ChecksGridAndBlockRange) {
  const auto g = CavityGeometry::reference();
  const std::vector<double> edges = g.mirror_edges();
  EXPECT_THROW(build_operators(g, HarmonicBasis(50), build_grid(edges, 20, 2), 0), QuadratureOrderError);
  const std::vector<double> wrong{1.0};
  EXPECT_THROW(build_operators(g, HarmonicBasis(10), build_grid(wrong, 40, 2), 0), std::invalid_argument);
  const auto ops = ops_for(g, 10, 2);
  EXPECT_THROW(ops->block(3), std::out_of_range);
  EXPECT_NO_THROW(ops->block(-2));
}

TEST(Operators, InvalidGeometryRejected) {
  auto g = CavityGeometry::reference();
  g.rho1 = 1.2;
  EXPECT_THROW(build_operators(g, HarmonicBasis(10), operator_grid(g, 10), 0), std::invalid_argument);
}

TEST(FullSolver, NoMirrorsGivesFreeSpace) {
  auto g = CavityGeometry::reference();
  g.rho1 = g.rho2 = 0.0;
  EXPECT_NEAR(enhancement_full(g, HarmonicBasis(60), FieldPoint::origin(), 0.0).value, 1.0, 1e-12);
  EXPECT_NEAR(enhancement_full(g, HarmonicBasis(60), FieldPoint{{3.0, 1.0, -4.0}}, 0.3).value, 1.0, 1e-12);
}

TEST(FullSolver, UniformSphereMatchesModeSum) {
  for (double kr : {0.0, 2.5, 11.0}) {
    for (double phi : {0.0, 0.01, 0.8}) {
      const double full = enhancement_full(closed_sphere(0.9), HarmonicBasis(60), FieldPoint::on_axis(kr), phi).value;
      EXPECT_NEAR(full / closed_cavity_mode_sum(0.9, 1e5, phi, kr, 60), 1.0, 1e-10) << kr << " " << phi;
    }
  }
}

TEST(FullSolver, LosslessClosedSphereOnResonanceIsSingular) {
  const auto ops = ops_for(closed_sphere(1.0), 20, 0);
  EXPECT_THROW(FullSolver(ops, 0.0), SolverError);
}

TEST(FullSolver, CenterOnResonance) {
  const auto r = enhancement_full(CavityGeometry::reference(), HarmonicBasis(150), FieldPoint::origin(), 0.0);
  EXPECT_NEAR(r.value, 29.2, 0.02 * 29.2);
  EXPECT_TRUE(r.warnings.empty());
  EXPECT_GT(r.max_condition, 1.0);
  EXPECT_EQ(r.l_max, 150);
}

TEST(FullSolver, MirrorAndRotationSymmetry) {
  const auto g = CavityGeometry::reference();
  const auto ops = ops_for(g, 50, 50);
  const FullSolver s(ops, 0.004);
  const double a = s.enhancement(FieldPoint{{3.0, 0.0, 2.0}}).value;
  EXPECT_NEAR(s.enhancement(FieldPoint{{0.0, 3.0, 2.0}}).value, a, 1e-10 * a);
  EXPECT_NEAR(s.enhancement(FieldPoint{{3.0, 0.0, -2.0}}).value, a, 1e-10 * a);
  EXPECT_NEAR(s.enhancement(FieldPoint::on_axis(6.0)).value, s.enhancement(FieldPoint::on_axis(-6.0)).value, 1e-10);
}

TEST(FullSolver, WarnsWhenExpansionTruncated) {
  const auto ops = ops_for(CavityGeometry::reference(), 60, 0);
  const auto r = FullSolver(ops, 0.0).enhancement(FieldPoint::on_axis(80.0));
  EXPECT_FALSE(r.warnings.empty());
  EXPECT_GT(r.truncation_tail, default_tail_tolerance);
}

TEST(FullSolver, FrequencyAverageIsFreeSpace) {
  const auto ops = ops_for(CavityGeometry::reference(), 100, 0);
  const int n = 512;
  double s = 0.0;
  for (int j = 0; j < n; ++j) s += FullSolver(ops, pi * j / n).enhancement(FieldPoint::on_axis(4.0)).value;
  EXPECT_NEAR(s / n, 1.0, 1e-2);
}

TEST(IntracavityField, NoMirrorsPreservesNorm) {
  auto g = CavityGeometry::reference();
  g.rho1 = g.rho2 = 0.0;
  const auto ops = ops_for(g, 30, 30);
  const auto f = plane_wave_coeffs(FieldPoint{{2.0, 1.0, 3.0}}, HarmonicBasis(30)).coeffs;
  const auto out = intracavity_field_coeffs(*ops, 0.2, f);
  EXPECT_NEAR(out.squared_norm(), f.squared_norm(), 1e-12);
}

TEST(IntracavityField, UniformSpherePerDegreeResult) {
  const double rho = 0.6, kR = 1e5, phi = 0.05;
  const auto ops = ops_for(closed_sphere(rho), 12, 12);
  AngularFunction f(HarmonicBasis(12));
  f(5, 2) = 1.0;
  const auto g = intracavity_field_coeffs(*ops, phi, f);
  const cplx u = std::polar(1.0, -30.0 / (2 * kR));
  const cplx expect = u * std::sqrt(1 - rho * rho) * u / (u * u - (-1.0) * rho * std::polar(1.0, 2 * phi));
  EXPECT_NEAR(std::abs(g(5, 2) - expect), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(g(6, 2)), 0.0, 1e-13);
}

TEST(IntracavityField, BasisMismatchRejected) {
  const auto ops = ops_for(CavityGeometry::reference(), 10, 10);
  EXPECT_THROW(intracavity_field_coeffs(*ops, 0.0, AngularFunction(HarmonicBasis(11))), std::invalid_argument);
}

TEST(ClosedCavity, SphereFrequencies) {
  EXPECT_DOUBLE_EQ(perfect_sphere_frequency(0, 7, 1e5), 7.0);
  const double l = 100, kR = 1e5;
  const double shift = 50.0 + 7.0 - perfect_sphere_frequency(100, 7, kR);
  EXPECT_NEAR(shift / (0.5 * l), l / (pi * kR), 1e-5);
  // l and l + 2 with one node fewer are degenerate up to the curvature term
  EXPECT_NEAR(perfect_sphere_frequency(100, 8, kR) - perfect_sphere_frequency(102, 7, kR), (4 * l + 6) / (2 * pi * kR), 1e-12);
}

TEST(ClosedCavity, FrequencyAverageAndNoMirrorLimit) {
  for (double kr : {0.0, 1.3, 25.0}) {
    const int n = 2048;
    double s = 0.0;
    for (int j = 0; j < n; ++j) s += closed_cavity_mode_sum(0.98, 1e5, pi * j / n, kr, static_cast<int>(kr) + 50);
    EXPECT_NEAR(s / n, 1.0, 1e-3) << kr;
    EXPECT_NEAR(closed_cavity_mode_sum(0.0, 1e5, 0.3, kr, static_cast<int>(kr) + 50), 1.0, 1e-10);
  }
}

TEST(ClosedCavity, DegenerateLimitIsTwoLineSeries) {
  for (double kr : {0.0, 0.7, 2.0, 5.0})
    for (double phi : {0.0, 0.02, 1.0})
      EXPECT_NEAR(closed_cavity_mode_sum(0.9, 1e9, phi, kr, 60) / two_line_vacuum(0.9, phi, kr), 1.0, 1e-5) << kr << " " << phi;
}
