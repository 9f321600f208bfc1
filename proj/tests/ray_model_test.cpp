#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "cavityqed/airy_shift.hpp"
#include "cavityqed/ray_model.hpp"

using namespace cavityqed;

TEST(AiryFactor, NoMirrorsIsFreeSpace) {
  for (double phi : {-1.0, 0.0, 0.3})
    for (double x : {0.0, 1.1, 40.0}) {
      EXPECT_NEAR(airy_factor_M(phi, x, 0.0, 0.0), 1.0, 1e-15);
      EXPECT_NEAR(airy_factor_M_transmission_form(phi, x, 0.0, 0.0), 1.0, 1e-15);
      EXPECT_NEAR(shift_factor(phi, x, 0.0, 0.0), 0.0, 1e-15);
    }
}

TEST(AiryFactor, ResonanceAtCenter) {
  EXPECT_NEAR(symmetric_airy_factor(0.0, 0.0, 0.98), 0.0396 / 0.0004, 1e-9);
  EXPECT_NEAR(airy_factor_M(0.0, 0.0, 0.98, 0.98), 99.0, 1e-9);
}

TEST(AiryFactor, OneMirrorLimit) {
  for (double phi : {-0.7, 0.0, 0.2})
    for (double x : {0.0, 0.4, 3.3})
      EXPECT_NEAR(airy_factor_M(phi, x, 0.6, 0.0), 1.0 + 0.6 * std::cos(2.0 * (phi + x)), 1e-14);
}

TEST(AiryFactor, PropertyFormsAgree) {
  std::mt19937 gen(2024);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 2000; ++k) {
    const double phi = pi * (u(gen) - 0.5), x = 50.0 * u(gen);
    const double r1 = 0.99 * u(gen), r2 = 0.99 * u(gen);
    const double m = airy_factor_M(phi, x, r1, r2);
    EXPECT_NEAR(m, airy_factor_M_transmission_form(phi, x, r1, r2), 1e-9 * std::max(1.0, m));
    EXPECT_GE(m, 0.0);
    // swapping the mirrors is the same as looking back along the ray
    EXPECT_NEAR(m, airy_factor_M(phi, -x, r2, r1), 1e-9 * std::max(1.0, m));
    EXPECT_NEAR(airy_factor_M(phi, x, r1, r1), symmetric_airy_factor(phi, x, r1), 1e-9 * std::max(1.0, m));
    EXPECT_NEAR(shift_factor(phi, x, r1, r1), symmetric_shift_factor(phi, x, r1), 1e-9 * std::max(1.0, m));
  }
}

TEST(AiryFactor, ShiftPieceMatchesPrincipalValueKernels) {
  // With phi' = 2 phi the three denominators of the shift factor are the closed-form kernels.
  for (double p : {0.01, 0.25, 0.81, 0.9604})
    for (double phi : {-0.6, -0.1, 0.03, 0.4}) {
      const double d = std::norm(1.0 - p * std::polar(1.0, 4.0 * phi));
      const auto f = FinesseParam::from_reflectivity(p);
      EXPECT_NEAR(p * std::sin(4 * phi) / d, pv_shift(2 * phi, p) / (2 * pi), 1e-10 / (1 - p) / (1 - p));
      EXPECT_NEAR(std::sin(2 * phi) / d, pv_shift_cos(2 * phi, f) / (pi * (1 + p) * (1 + p)), 1e-10 / (1 - p) / (1 - p));
      EXPECT_NEAR(std::cos(2 * phi) / d, -pv_shift_sin(2 * phi, f) / (pi * (1 - p) * (1 - p)), 1e-10 / (1 - p) / (1 - p));
    }
}

TEST(AiryFactor, LosslessResonanceRejected) {
  EXPECT_THROW(airy_factor_M(0.0, 0.0, 1.0, 1.0), NumericalError);
  EXPECT_THROW(airy_factor_M(0.0, 0.0, 1.2, 0.5), std::domain_error);
}

TEST(Aperture, DiffractionWidth) {
  const double a = effective_aperture(pi / 4, 1e5, 0.98, 0.98);
  EXPECT_NEAR(pi / 4 - a, 1.0 / std::sqrt(3960.0), 1e-12);
  EXPECT_NEAR(1.0 / std::sqrt(3960.0), 0.0159, 5e-5);
  const double correction = (pi / 4 - a) * std::sin(pi / 4) * (0.0396 / 0.0004 - 1.0);
  EXPECT_NEAR(correction, 1.2, 0.12);
  EXPECT_LT(pi / 4 - effective_aperture(pi / 4, 1e5, 0.0, 0.0), 0.004);
  EXPECT_THROW(effective_aperture(pi / 4, 1e5, 1.0, 1.0), ApertureCollapseError);
  EXPECT_THROW(effective_aperture(0.01, 1e5, 0.98, 0.98), ApertureCollapseError);
}

TEST(Aperture, LinewidthIsFullWidthAtHalfMaximum) {
  for (double rho : {0.5, 0.9, 0.98}) {
    const double w = linewidth_phase(rho, rho);
    EXPECT_NEAR(symmetric_airy_factor(w / 2, 0.0, rho), 0.5 * symmetric_airy_factor(0.0, 0.0, rho), 1e-9);
  }
  EXPECT_THROW(linewidth_phase(0.1, 0.1), std::domain_error);
}

TEST(RayModel, NaiveCenterValue) {
  const auto g = CavityGeometry::reference();
  const double v = enhancement_ray(g, FieldPoint::origin(), 0.0, RayCorrections{false, false}).value;
  EXPECT_NEAR(v, 0.7 + 0.3 * 99.0, 1e-10);
  EXPECT_NEAR(v, 30.4, 1e-9);
}

TEST(RayModel, CorrectedCenterValue) {
  const auto g = CavityGeometry::reference();
  const auto r = enhancement_ray(g, FieldPoint::origin(), 0.0);
  EXPECT_NEAR(r.value, 29.2, 0.02 * 29.2);
  EXPECT_EQ(r.method, "ray+aberration+diffraction");
}

TEST(RayModel, NoMirrorsAnywhere) {
  auto g = CavityGeometry::reference();
  g.rho1 = g.rho2 = 0.0;
  for (const FieldPoint& p : {FieldPoint::origin(), FieldPoint::on_axis(30.0), FieldPoint{{5.0, 2.0, -3.0}}})
    EXPECT_NEAR(enhancement_ray(g, p, 0.2).value, 1.0, 1e-12);
}

TEST(RayModel, SymmetricAndAsymmetricMethodsAgree) {
  const auto g = CavityGeometry::reference();
  RayOptions sym;
  sym.method = RayMethod::symmetric;
  for (const FieldPoint& p : {FieldPoint::on_axis(7.0), FieldPoint{{4.0, 0.0, 9.0}}})
    EXPECT_NEAR(enhancement_ray(g, p, 0.01, sym).value, enhancement_ray(g, p, 0.01).value, 1e-10);
  auto asym = g;
  asym.rho2 = 0.9;
  EXPECT_THROW(enhancement_ray(asym, FieldPoint::origin(), 0.0, sym), std::invalid_argument);
}

TEST(RayModel, MirrorSymmetryAlongAxis) {
  const auto g = CavityGeometry::reference();
  for (double z : {3.0, 12.5, 47.0})
    EXPECT_NEAR(enhancement_ray(g, FieldPoint::on_axis(z), 0.0).value, enhancement_ray(g, FieldPoint::on_axis(-z), 0.0).value, 1e-9);
}

TEST(RayModel, FrequencyAverageIsFreeSpace) {
  auto g = CavityGeometry::reference();
  g.rho2 = 0.9;
  for (const FieldPoint& p : {FieldPoint::origin(), FieldPoint::on_axis(21.0), FieldPoint{{2.0, 3.0, 1.0}}}) {
    const int n = 1024;
    double s = 0.0;
    for (int j = 0; j < n; ++j) s += enhancement_ray(g, p, pi * j / n).value;
    EXPECT_NEAR(s / n, 1.0, 1e-3);
  }
}

TEST(RayModel, WarnsOutsideValidityRange) {
  const auto g = CavityGeometry::reference();
  EXPECT_TRUE(enhancement_ray(g, FieldPoint::on_axis(60.0), 0.0).warnings.empty());
  EXPECT_FALSE(enhancement_ray(g, FieldPoint::on_axis(150.0), 0.0).warnings.empty());
}

TEST(RayModel, DefocusShiftsAndHalvesTheResonance) {
  auto g = CavityGeometry::reference();
  const double peak0 = enhancement_ray(g, FieldPoint::origin(), 0.0).value;
  g.k_delta = 0.3;
  double best = 0.0, at = 0.0;
  for (int i = -200; i <= 200; ++i) {
    const double phi = 0.002 * i;
    const double v = enhancement_ray(g, FieldPoint::origin(), phi).value;
    if (v > best) best = v, at = phi;
  }
  EXPECT_GT(std::abs(at), 0.05);
  EXPECT_NEAR(best / peak0, 0.5, 0.15);
  EXPECT_LT(enhancement_ray(g, FieldPoint::origin(), 0.0).value, best);
}

TEST(RayModel, ReflectivityPhaseOnlyFromDisplacedMirror) {
  auto g = CavityGeometry::reference();
  EXPECT_EQ(g.reflectivity(0.9), cplx(0.98, 0.0));
  g.k_delta = 0.3;
  EXPECT_NEAR(std::arg(g.reflectivity(0.9)), 0.54, 1e-12);
  EXPECT_EQ(g.reflectivity(-0.9), cplx(0.98, 0.0));
  EXPECT_EQ(g.reflectivity(0.1), cplx(0.0, 0.0));
  EXPECT_NEAR(std::abs(defocus_profile(0.98, 0.3, 0.2) - 0.98 * std::polar(1.0, 0.6 * std::cos(0.2))), 0.0, 1e-15);
}
