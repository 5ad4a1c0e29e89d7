#pragma once

// Closed space curves given by truncated Fourier series, their unit-speed
// reparametrization, and purely geometric functionals of the curve.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <boost/math/quadrature/gauss.hpp>

#include "deltacurve/common.hpp"

namespace deltacurve {

/**
 * A closed curve x(t) = a0 + sum_m [cos_m cos(m w t) + sin_m sin(m w t)],
 * w = 2 pi / period, together with a cached arc-length table.
 *
 * Circles built by make_circle() keep a closed-form evaluation path so that
 * the chord law holds to rounding and the comparison operator D vanishes
 * identically.
 */
class Curve {
 public:
  enum class Kind { circle, fourier };

  Curve() = default;

  static Curve fourier(Vec3 a0, std::vector<Vec3> cos_coeffs, std::vector<Vec3> sin_coeffs,
                       double period) {
    if (!(period > 0.0) || !std::isfinite(period))
      throw ConfigError("curve period must be positive");
    if (cos_coeffs.size() != sin_coeffs.size())
      throw ConfigError("cos and sin coefficient lists must have equal length");
    if (cos_coeffs.empty()) throw ConfigError("a closed curve needs at least one harmonic");
    Curve c;
    c.kind_ = Kind::fourier;
    c.a0_ = std::move(a0);
    c.cos_ = std::move(cos_coeffs);
    c.sin_ = std::move(sin_coeffs);
    c.period_ = period;
    return c;
  }

  Kind kind() const noexcept { return kind_; }
  bool is_circle() const noexcept { return kind_ == Kind::circle; }
  double radius() const noexcept { return radius_; }
  double period() const noexcept { return period_; }
  const Vec3& a0() const noexcept { return a0_; }
  const std::vector<Vec3>& cos_coeffs() const noexcept { return cos_; }
  const std::vector<Vec3>& sin_coeffs() const noexcept { return sin_; }
  std::size_t harmonics() const noexcept { return cos_.size(); }

  std::string id = "curve";

  // --- parameter-space evaluation -------------------------------------

  Vec3 position(double t) const { return derivative(t, 0); }
  Vec3 velocity(double t) const { return derivative(t, 1); }
  Vec3 acceleration(double t) const { return derivative(t, 2); }
  double speed(double t) const { return velocity(t).norm(); }

  /// order-th derivative of the Fourier sum with respect to t.
  Vec3 derivative(double t, int order) const {
    const double w = 2.0 * pi / period_;
    Vec3 x = order == 0 ? a0_ : Vec3::Zero();
    for (std::size_t i = 0; i < cos_.size(); ++i) {
      const double m = static_cast<double>(i + 1);
      const double f = m * w;
      const double c = std::cos(f * t), s = std::sin(f * t);
      const double scale = std::pow(f, order);
      // d^k/dt^k cos = f^k cos(. + k pi/2), likewise for sin.
      double dc = 0, ds = 0;
      switch (order % 4) {
        case 0: dc = c; ds = s; break;
        case 1: dc = -s; ds = c; break;
        case 2: dc = -c; ds = -s; break;
        default: dc = s; ds = -c; break;
      }
      x += scale * (dc * cos_[i] + ds * sin_[i]);
    }
    return x;
  }

  // --- arc-length evaluation (valid after reparametrize_arclength) -----

  bool has_arclength() const noexcept { return !panel_s_.empty(); }
  double length() const noexcept { return length_; }
  /// C_sigma: Euclidean norm of the per-component sup norms of the second
  /// arc-length derivative.
  double curvature_bound() const noexcept { return curvature_bound_; }

  double wrap(double s) const {
    double r = std::fmod(s, length_);
    if (r < 0) r += length_;
    return r;
  }

  /// Parameter t in [0, period) with arc length s (s taken mod L).
  double parameter_at(double s) const {
    if (is_circle()) return wrap(s);
    const double target = wrap(s);
    auto it = std::upper_bound(panel_s_.begin(), panel_s_.end(), target);
    std::size_t p = static_cast<std::size_t>(std::max<std::ptrdiff_t>(0, (it - panel_s_.begin()) - 1));
    p = std::min(p, panel_s_.size() - 2);
    double lo = panel_t_[p], hi = panel_t_[p + 1];
    const double s_lo = panel_s_[p], s_hi = panel_s_[p + 1];
    double t = lo + (hi - lo) * (target - s_lo) / (s_hi - s_lo);
    // Safeguarded Newton: ds/dt = |x'(t)| > 0.
    for (int iter = 0; iter < 60; ++iter) {
      const double f = arclength_within_panel(p, t) - target;
      if (f > 0) hi = t; else lo = t;
      const double step = f / speed(t);
      double next = t - step;
      if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
      if (std::abs(next - t) <= 4.0 * std::numeric_limits<double>::epsilon() * period_) {
        t = next;
        break;
      }
      t = next;
    }
    return t;
  }

  /// Arc length from t = 0 to parameter t in [0, period].
  double arclength_at(double t) const {
    if (is_circle()) return t;
    const double dt = period_ / static_cast<double>(panel_t_.size() - 1);
    std::size_t p = static_cast<std::size_t>(std::floor(t / dt));
    p = std::min(p, panel_t_.size() - 2);
    return arclength_within_panel(p, t);
  }

  Vec3 point(double s) const {
    if (is_circle()) {
      const double a = wrap(s) / radius_;
      return a0_ + Vec3(radius_ * std::cos(a), radius_ * std::sin(a), 0.0);
    }
    return position(parameter_at(s));
  }

  /// Unit tangent at arc length s.
  Vec3 tangent(double s) const {
    const Vec3 v = velocity(parameter_at(s));
    return v / v.norm();
  }

  double curvature(double s) const {
    if (is_circle()) return 1.0 / radius_;
    const double t = parameter_at(s);
    const Vec3 v = velocity(t), a = acceleration(t);
    const double sp = v.norm();
    return v.cross(a).norm() / (sp * sp * sp);
  }

  /// Second derivative with respect to arc length.
  Vec3 arc_acceleration(double s) const {
    const double t = parameter_at(s);
    const Vec3 v = velocity(t), a = acceleration(t);
    const double v2 = v.squaredNorm();
    return (a * v2 - v * v.dot(a)) / (v2 * v2);
  }

  friend Curve make_circle(double radius);
  friend Curve reparametrize_arclength(const Curve& curve, double tol);

 private:
  double arclength_within_panel(std::size_t p, double t) const {
    const double t0 = panel_t_[p];
    if (t <= t0) return panel_s_[p];
    auto f = [this](double u) { return speed(u); };
    return panel_s_[p] + boost::math::quadrature::gauss<double, 20>::integrate(f, t0, t);
  }

  Kind kind_ = Kind::fourier;
  double radius_ = 0.0;
  Vec3 a0_ = Vec3::Zero();
  std::vector<Vec3> cos_;
  std::vector<Vec3> sin_;
  double period_ = 1.0;

  std::vector<double> panel_t_;
  std::vector<double> panel_s_;
  double length_ = 0.0;
  double curvature_bound_ = 0.0;
};

/// Planar circle of radius R centred at the origin, already unit speed.
inline Curve make_circle(double radius) {
  if (!(radius > 0.0) || !std::isfinite(radius)) throw ConfigError("circle radius must be positive");
  Curve c = Curve::fourier(Vec3::Zero(), {Vec3(radius, 0, 0)}, {Vec3(0, radius, 0)}, 2.0 * pi * radius);
  c.kind_ = Curve::Kind::circle;
  c.radius_ = radius;
  c.id = "circle";
  c.length_ = 2.0 * pi * radius;
  c.panel_t_ = {0.0, c.length_};
  c.panel_s_ = {0.0, c.length_};
  c.curvature_bound_ = 1.0 / radius;
  return c;
}

namespace detail {

// Smallest distance between two arcs of the curve whose arc-length
// separation exceeds L/64, refined by Gauss-Newton from grid candidates.
inline double min_offband_distance(const Curve& c, std::size_t samples) {
  const double L = c.length();
  const double h = L / static_cast<double>(samples);
  std::vector<Vec3> p(samples);
  for (std::size_t i = 0; i < samples; ++i) p[i] = c.point(h * static_cast<double>(i));
  const std::size_t band = samples / 64 + 1;
  double best = std::numeric_limits<double>::infinity();
  auto dist = [&](std::size_t i, std::size_t j) { return (p[i % samples] - p[j % samples]).norm(); };
  for (std::size_t i = 0; i < samples; ++i) {
    for (std::size_t j = i + band; j + band <= i + samples; ++j) {
      const double d = dist(i, j);
      best = std::min(best, d);
      if (d > 2.0 * h) continue;
      // Local minimum of the sampled distance: refine.
      if (d > dist(i + 1, j) || d > dist(i + samples - 1, j) || d > dist(i, j + 1) || d > dist(i, j + samples - 1))
        continue;
      double s1 = h * static_cast<double>(i), s2 = h * static_cast<double>(j % samples);
      for (int it = 0; it < 40; ++it) {
        const Vec3 r = c.point(s1) - c.point(s2);
        Eigen::Matrix<double, 3, 2> J;
        J.col(0) = c.tangent(s1);
        J.col(1) = -c.tangent(s2);
        const Eigen::Matrix2d JtJ = J.transpose() * J + 1e-14 * Eigen::Matrix2d::Identity();
        const Eigen::Vector2d step = JtJ.ldlt().solve(J.transpose() * r);
        s1 -= std::clamp(step(0), -h, h);
        s2 -= std::clamp(step(1), -h, h);
        if (step.norm() < 1e-15 * L) break;
      }
      double sep = std::abs(c.wrap(s1) - c.wrap(s2));
      sep = std::min(sep, L - sep);
      if (sep > L / 64.0) best = std::min(best, (c.point(s1) - c.point(s2)).norm());
    }
  }
  return best;
}

}  // namespace detail

/**
 * Build the arc-length table of `curve` and validate it.
 *
 * The map t -> s(t) is tabulated at panel boundaries with 20-point
 * Gauss-Legendre quadrature of |x'(t)|; inside a panel s(t) is integrated on
 * demand and inverted by safeguarded Newton iteration. Throws ConfigError for
 * singular or self-intersecting curves and NumericalError when the resulting
 * parametrization is not unit speed to within `tol`.
 */
inline Curve reparametrize_arclength(const Curve& curve, double tol = 1e-10) {
  Curve c = curve;
  const double T = c.period();

  // Regularity on a fine parameter grid.
  constexpr std::size_t fine = 4096;
  double min_speed = std::numeric_limits<double>::infinity(), mean_speed = 0.0;
  for (std::size_t i = 0; i < fine; ++i) {
    const double sp = c.speed(T * static_cast<double>(i) / fine);
    min_speed = std::min(min_speed, sp);
    mean_speed += sp / fine;
  }
  if (!(min_speed > 1e-8 * mean_speed)) throw ConfigError("curve is not regular: |x'(t)| vanishes");

  if (!c.is_circle()) {
    const std::size_t panels = std::max<std::size_t>(256, 64 * (c.harmonics() + 1));
    c.panel_t_.assign(panels + 1, 0.0);
    c.panel_s_.assign(panels + 1, 0.0);
    auto f = [&c](double u) { return c.speed(u); };
    for (std::size_t p = 0; p < panels; ++p) {
      const double a = T * static_cast<double>(p) / panels, b = T * static_cast<double>(p + 1) / panels;
      c.panel_t_[p + 1] = b;
      c.panel_s_[p + 1] = c.panel_s_[p] + boost::math::quadrature::gauss<double, 20>::integrate(f, a, b);
    }
    c.panel_t_[panels] = T;
    c.length_ = c.panel_s_[panels];
  }

  const double L = c.length();
  constexpr std::size_t checks = 2048;
  const double fd = 1e-4 * L;
  double cb[3] = {0, 0, 0};
  for (std::size_t i = 0; i < checks; ++i) {
    const double s = L * static_cast<double>(i) / checks;
    const Vec3 d = (-c.point(s + 2 * fd) + 8.0 * c.point(s + fd) - 8.0 * c.point(s - fd) + c.point(s - 2 * fd)) / (12.0 * fd);
    if (std::abs(d.norm() - 1.0) > std::max(tol, 1e-11))
      throw NumericalError("arc-length reparametrization is not unit speed (defect " +
                           std::to_string(std::abs(d.norm() - 1.0)) + ")");
    if (!c.is_circle()) {
      const Vec3 acc = c.arc_acceleration(s);
      for (int k = 0; k < 3; ++k) cb[k] = std::max(cb[k], std::abs(acc(k)));
    }
  }
  if (!c.is_circle()) c.curvature_bound_ = std::sqrt(cb[0] * cb[0] + cb[1] * cb[1] + cb[2] * cb[2]);

  if (detail::min_offband_distance(c, 512) <= 1e-9 * L) throw ConfigError("curve self-intersects");
  return c;
}

/// Axis-aligned ellipse with semi-axes (a, b); rescaled about its centre to
/// total length `target_length` when that is positive.
inline Curve make_ellipse(double a, double b, double target_length = 0.0) {
  if (!(a > 0 && b > 0)) throw ConfigError("ellipse semi-axes must be positive");
  Curve c = reparametrize_arclength(Curve::fourier(Vec3::Zero(), {Vec3(a, 0, 0)}, {Vec3(0, b, 0)}, 2.0 * pi));
  if (target_length > 0) {
    const double k = target_length / c.length();
    c = reparametrize_arclength(Curve::fourier(Vec3::Zero(), {Vec3(k * a, 0, 0)}, {Vec3(0, k * b, 0)}, 2.0 * pi));
  }
  c.id = "ellipse";
  return c;
}

/// Rigidly moved copy x -> rotation * x + shift (always a Fourier curve).
inline Curve rigid_motion(const Curve& c, const Eigen::Matrix3d& rotation, const Vec3& shift) {
  std::vector<Vec3> cs, ss;
  for (const auto& v : c.cos_coeffs()) cs.push_back(rotation * v);
  for (const auto& v : c.sin_coeffs()) ss.push_back(rotation * v);
  Curve moved = Curve::fourier(rotation * c.a0() + shift, cs, ss, c.period());
  moved.id = c.id;
  return reparametrize_arclength(moved);
}

/// N equispaced arc-length nodes s_j = j L / N with trapezoid weight L / N.
struct ArcGrid {
  std::size_t n = 0;
  double length = 0.0;
  double weight = 0.0;
  std::vector<double> nodes;
  std::vector<Vec3> points;
  std::vector<double> curvature;

  double comparison_radius() const { return length / (2.0 * pi); }

  /// Chord of the comparison circle between nodes i and j.
  double circle_chord(std::size_t i, std::size_t j) const {
    const std::size_t d = i > j ? i - j : j - i;
    return 2.0 * comparison_radius() * std::sin(pi * static_cast<double>(d) / static_cast<double>(n));
  }
};

inline ArcGrid make_grid(const Curve& curve, std::size_t n) {
  if (n < 16 || n % 2 != 0) throw ConfigError("grid size must be even and at least 16 (got " + std::to_string(n) + ")");
  if (!curve.has_arclength()) throw ConfigError("curve has no arc-length table; call reparametrize_arclength first");
  ArcGrid g;
  g.n = n;
  g.length = curve.length();
  g.weight = g.length / static_cast<double>(n);
  g.nodes.resize(n);
  g.points.resize(n);
  g.curvature.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    g.nodes[j] = g.length * static_cast<double>(j) / static_cast<double>(n);
    g.points[j] = curve.point(g.nodes[j]);
    g.curvature[j] = curve.curvature(g.nodes[j]);
  }
  return g;
}

/// Euclidean distance |x(s) - x(t)|.
inline double chord(const Curve& curve, double s, double t) {
  return (curve.point(s) - curve.point(t)).norm();
}

/**
 * d_Sigma: double integral over [0,L]^2 of the squared difference between
 * 1/(4 pi |x(t)-x(s)|) and the same kernel on the circle of equal length.
 * Tensor trapezoid rule on the grid; the integrand is 0 on the diagonal.
 */
inline double d_sigma(const Curve& curve, const ArcGrid& grid) {
  (void)curve;
  const std::size_t n = grid.n;
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      const double rs = (grid.points[i] - grid.points[j]).norm();
      const double rt = grid.circle_chord(i, j);
      const double diff = 1.0 / (four_pi * rs) - 1.0 / (four_pi * rt);
      row += diff * diff;
    }
    acc += row;
  }
  return grid.weight * grid.weight * acc;
}

struct ChordAverage {
  double lhs = 0.0;             // integral of |x(s+u) - x(s)| ds
  double rhs = 0.0;             // (L^2 / pi) sin(pi u / L)
  double error_estimate = 0.0;  // |full grid - every other node|
};

/// Both sides of the chord-average inequality at shift u in (0, L).
inline ChordAverage chord_average_inequality(const Curve& curve, const ArcGrid& grid, double u) {
  const double L = grid.length;
  if (!(u > 0.0 && u < L)) throw ConfigError("shift u must lie in (0, L)");
  double full = 0.0, half = 0.0;
  for (std::size_t j = 0; j < grid.n; ++j) {
    const double d = (curve.point(grid.nodes[j] + u) - grid.points[j]).norm();
    full += d;
    if (j % 2 == 0) half += d;
  }
  ChordAverage out;
  out.lhs = grid.weight * full;
  out.error_estimate = std::abs(out.lhs - 2.0 * grid.weight * half);
  out.rhs = L * L / pi * std::sin(pi * u / L);
  return out;
}

}  // namespace deltacurve
