#include <gtest/gtest.h>

#include <cmath>

#include "deltacurve/curve.hpp"
#include "oracles.hpp"

using namespace deltacurve;

namespace {

Curve ellipse() { return make_ellipse(2.0, 1.0, 2.0 * pi); }

// x = sin t, y = sin(2t)/2 crosses itself at the origin.
Curve figure_eight() {
  return Curve::fourier(Vec3::Zero(), {Vec3::Zero(), Vec3::Zero()}, {Vec3(1, 0, 0), Vec3(0, 0.5, 0)}, 2.0 * pi);
}

}  // namespace

TEST(Curve, CircleLength) {
  const Curve c = make_circle(1.0);
  EXPECT_DOUBLE_EQ(c.length(), 2.0 * pi);
  EXPECT_TRUE(c.is_circle());
}

TEST(Curve, CircleChordAcrossDiameter) { EXPECT_NEAR(chord(make_circle(1.0), 0.0, pi), 2.0, 1e-14); }

TEST(Curve, CircleRadiusTwoChord) { EXPECT_NEAR(chord(make_circle(2.0), 0.0, pi), 2.0 * std::sqrt(2.0), 1e-14); }

TEST(Curve, ChordOfEqualPointsIsZero) {
  const Curve e = ellipse();
  EXPECT_EQ(chord(e, 1.3, 1.3), 0.0);
}

TEST(Curve, NonPositiveRadiusRejected) {
  EXPECT_THROW(make_circle(0.0), ConfigError);
  EXPECT_THROW(make_circle(-1.0), ConfigError);
}

TEST(Curve, ReparametrizingCircleIsIdentity) {
  const Curve c = make_circle(1.5);
  const Curve r = reparametrize_arclength(c);
  for (double s : {0.0, 0.7, 3.0, 8.0}) EXPECT_LT((c.point(s) - r.point(s)).norm(), 1e-14);
}

TEST(Curve, EllipseIsUnitSpeedAfterReparametrization) {
  const Curve e = ellipse();
  EXPECT_NEAR(e.length(), 2.0 * pi, 1e-12);
  const std::size_t n = 4 * 256;
  const double h = 1e-4 * e.length();
  double worst = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const double s = e.length() * j / n;
    const Vec3 d = (-e.point(s + 2 * h) + 8.0 * e.point(s + h) - 8.0 * e.point(s - h) + e.point(s - 2 * h)) / (12.0 * h);
    worst = std::max(worst, std::abs(d.norm() - 1.0));
  }
  EXPECT_LT(worst, 1e-10);
}

TEST(Curve, ArcLengthTableMatchesAdaptiveQuadrature) {
  const Curve e = ellipse();
  for (double t : {0.1, 1.0, 2.5, 4.0, 6.0}) {
    EXPECT_NEAR(e.arclength_at(t), oracle::arclength(e, t), 1e-12);
    EXPECT_NEAR(e.parameter_at(oracle::arclength(e, t)), t, 1e-12);
  }
}

TEST(Curve, SelfIntersectionRejected) { EXPECT_THROW(reparametrize_arclength(figure_eight()), ConfigError); }

TEST(Curve, SingularParametrizationRejected) {
  const Curve flat = Curve::fourier(Vec3::Zero(), {Vec3::Zero()}, {Vec3::Zero()}, 1.0);
  EXPECT_THROW(reparametrize_arclength(flat), ConfigError);
}

TEST(Curve, ChordIsSymmetric) {
  const Curve e = ellipse();
  for (double s : {0.0, 0.4, 2.2})
    for (double t : {0.1, 3.3, 5.9}) EXPECT_EQ(chord(e, s, t), chord(e, t, s));
}

TEST(Curve, CircleChordLaw) {
  const Curve c = make_circle(1.3);
  const ArcGrid g = make_grid(c, 64);
  double worst = 0.0;
  for (std::size_t i = 0; i < g.n; ++i)
    for (std::size_t j = 0; j < g.n; ++j)
      worst = std::max(worst, std::abs(chord(c, g.nodes[i], g.nodes[j]) - oracle::circle_chord(1.3, g.nodes[i], g.nodes[j])));
  EXPECT_LT(worst, 1e-12);
}

TEST(Curve, GridInvariants) {
  const ArcGrid g = make_grid(ellipse(), 32);
  EXPECT_DOUBLE_EQ(g.weight * g.n, g.length);
  for (std::size_t j = 1; j < g.n; ++j) EXPECT_GT(g.nodes[j], g.nodes[j - 1]);
  EXPECT_THROW(make_grid(ellipse(), 31), ConfigError);
  EXPECT_THROW(make_grid(ellipse(), 14), ConfigError);
}

TEST(Curve, CurvatureOfCircle) {
  const Curve c = make_circle(2.0);
  EXPECT_DOUBLE_EQ(c.curvature(1.0), 0.5);
  EXPECT_DOUBLE_EQ(c.curvature_bound(), 0.5);
}

TEST(Curve, EllipseCurvatureExtremes) {
  // Semi-axes (a, b) = (2k, k): curvature a/b^2 at s = 0, b/a^2 at s = L/4.
  const Curve e = ellipse();
  const double k = e.cos_coeffs()[0](0) / 2.0;
  const double a = 2.0 * k, b = k;
  EXPECT_NEAR(e.curvature(0.0), a / (b * b), 1e-9);
  EXPECT_NEAR(e.curvature(e.length() / 4.0), b / (a * a), 1e-9);
}

TEST(DSigma, CircleVanishes) {
  const Curve c = make_circle(1.0);
  EXPECT_LT(d_sigma(c, make_grid(c, 256)), 1e-12);
}

TEST(DSigma, EllipsePositiveAndStable) {
  const Curve e = ellipse();
  const double d256 = d_sigma(e, make_grid(e, 256));
  const double d512 = d_sigma(e, make_grid(e, 512));
  EXPECT_GT(d256, 0.0);
  EXPECT_LT(std::abs(d256 - d512) / d512, 5e-4);
}

TEST(DSigma, InvariantUnderRigidMotion) {
  const Curve e = ellipse();
  const Eigen::Matrix3d rot = (Eigen::AngleAxisd(0.7, Vec3(1, 2, 3).normalized())).toRotationMatrix();
  const Curve moved = rigid_motion(e, rot, Vec3(3.0, -1.0, 0.5));
  EXPECT_NEAR(d_sigma(e, make_grid(e, 128)), d_sigma(moved, make_grid(moved, 128)), 1e-10);
}

TEST(DSigma, IntegrandVanishesOnDiagonal) {
  // The difference of the two Coulomb kernels decays as the points merge.
  const Curve e = ellipse();
  const double R = e.length() / (2.0 * pi);
  std::vector<double> vals;
  for (double u : {1e-2, 1e-3, 1e-4}) {
    const double rs = chord(e, 0.3, 0.3 + u);
    const double rt = 2.0 * R * std::sin(u / (2.0 * R));
    vals.push_back(std::abs(1.0 / (four_pi * rs) - 1.0 / (four_pi * rt)));
  }
  EXPECT_LT(vals[1], 0.2 * vals[0]);
  EXPECT_LT(vals[2], 0.2 * vals[1]);
}

TEST(ChordAverage, CircleEquality) {
  const Curve c = make_circle(1.0);
  const ArcGrid g = make_grid(c, 128);
  for (double u : {0.3, pi / 2.0, pi, 5.0}) {
    const ChordAverage r = chord_average_inequality(c, g, u);
    EXPECT_NEAR(r.lhs, r.rhs, 1e-10);
  }
}

TEST(ChordAverage, EllipseStrictWithMargin) {
  const Curve e = ellipse();
  const ArcGrid g = make_grid(e, 256);
  const ChordAverage r = chord_average_inequality(e, g, g.length / 2.0);
  EXPECT_LT(r.lhs, r.rhs);
  EXPECT_GT(r.rhs - r.lhs, 10.0 * r.error_estimate);
}

TEST(ChordAverage, SmallShiftLimit) {
  const Curve e = ellipse();
  const ArcGrid g = make_grid(e, 64);
  const ChordAverage r = chord_average_inequality(e, g, 1e-9);
  EXPECT_LT(r.lhs, 1e-8);
  EXPECT_LT(r.rhs, 1e-8);
}

TEST(ChordAverage, ShiftOutsideRangeRejected) {
  const Curve e = ellipse();
  const ArcGrid g = make_grid(e, 64);
  EXPECT_THROW(chord_average_inequality(e, g, 0.0), ConfigError);
  EXPECT_THROW(chord_average_inequality(e, g, g.length), ConfigError);
}
