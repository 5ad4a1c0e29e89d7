#pragma once

// gamma_lambda off the curve, the Krein-formula Green's function, and the
// singular values of the resolvent correction sampled on a box.

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include <Eigen/Dense>

#include "deltacurve/assembly.hpp"
#include "deltacurve/common.hpp"
#include "deltacurve/curve.hpp"
#include "deltacurve/kernels.hpp"

namespace deltacurve {

/// Cell-centred n^3 samples of [lo, hi]^3, minus the points within the
/// exclusion radius of the curve (default 2 * spacing).
struct BoxGrid {
  double lo = -3.0;
  double hi = 3.0;
  std::size_t n = 24;
  double spacing = 0.0;
  double cell_volume = 0.0;
  double exclusion_radius = 0.0;
  std::size_t excluded = 0;
  double min_distance = 0.0;  // smallest curve distance among kept points
  std::vector<Vec3> points;
};

/// Distance from x to the curve sampled at the grid nodes and midpoints.
inline double distance_to_curve(const Curve& curve, const ArcGrid& grid, const Vec3& x) {
  double d = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < grid.n; ++j) {
    d = std::min(d, (x - grid.points[j]).norm());
    d = std::min(d, (x - curve.point(grid.nodes[j] + 0.5 * grid.weight)).norm());
  }
  return d;
}

inline BoxGrid make_box(const Curve& curve, const ArcGrid& grid, double lo, double hi, std::size_t n,
                        double exclusion_radius = 0.0) {
  if (!(hi > lo) || n < 2) throw ConfigError("box needs hi > lo and at least 2 points per axis");
  BoxGrid b;
  b.lo = lo;
  b.hi = hi;
  b.n = n;
  b.spacing = (hi - lo) / static_cast<double>(n);
  b.cell_volume = b.spacing * b.spacing * b.spacing;
  if (exclusion_radius < 0.0) throw ConfigError("exclusion radius must be nonnegative");
  b.exclusion_radius = exclusion_radius > 0.0 ? exclusion_radius : 2.0 * b.spacing;
  b.min_distance = std::numeric_limits<double>::infinity();
  std::vector<Vec3> dense;
  dense.reserve(4 * grid.n);
  for (std::size_t j = 0; j < 4 * grid.n; ++j) dense.push_back(curve.point(grid.length * static_cast<double>(j) / (4.0 * grid.n)));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k) {
        const Vec3 x(lo + (i + 0.5) * b.spacing, lo + (j + 0.5) * b.spacing, lo + (k + 0.5) * b.spacing);
        double d = std::numeric_limits<double>::infinity();
        for (const auto& p : dense) d = std::min(d, (x - p).norm());
        if (d <= b.exclusion_radius) {
          ++b.excluded;
          continue;
        }
        b.min_distance = std::min(b.min_distance, d);
        b.points.push_back(x);
      }
  return b;
}

/// (gamma_lambda h)(x) = sum_j w G_lambda(|x - x_j|) h_j.
inline double gamma_apply(const Curve& curve, const ArcGrid& grid, double lambda, const Eigen::VectorXd& h,
                          const Vec3& x, double exclusion_radius) {
  if (!(lambda < 0.0)) throw ConfigError("gamma_apply needs lambda < 0");
  if (h.size() != static_cast<Eigen::Index>(grid.n)) throw ConfigError("coefficient vector has wrong length");
  if (distance_to_curve(curve, grid, x) <= exclusion_radius) throw ConfigError("evaluation point too close to the curve");
  const double a = std::sqrt(-lambda);
  double s = 0.0;
  for (std::size_t j = 0; j < grid.n; ++j) s += green_real(a, (x - grid.points[j]).norm()) * h(static_cast<Eigen::Index>(j));
  return grid.weight * s;
}

/// Factorized (alpha - B_lambda) shared by Green's function evaluations.
class KreinSolver {
 public:
  KreinSolver(const Curve& curve, const ArcGrid& grid, double lambda, double alpha, const Tolerances& tol = {})
      : grid_(grid), lambda_(lambda), a_(std::sqrt(-lambda)) {
    if (!(lambda < 0.0)) throw ConfigError("Krein formula needs lambda < 0");
    Eigen::MatrixXd m = -b_lambda_matrix(curve, lambda, grid).a;
    m.diagonal().array() += alpha;
    lu_.compute(m);
    const double rc = lu_.rcond();
    if (!(rc > 0.0) || 1.0 / rc > tol.max_condition)
      throw NumericalError("alpha - B_lambda is numerically singular; lambda is at or near a bound state");
  }

  Eigen::VectorXd trace(const Vec3& x) const {
    Eigen::VectorXd g(grid_.n);
    for (std::size_t j = 0; j < grid_.n; ++j) g(static_cast<Eigen::Index>(j)) = green_real(a_, (x - grid_.points[j]).norm());
    return g;
  }

  /// w g_x^T (alpha - B)^{-1} g_y
  double correction(const Vec3& x, const Vec3& y) const { return grid_.weight * trace(x).dot(lu_.solve(trace(y))); }

  double green(const Vec3& x, const Vec3& y) const {
    return green_real(a_, (x - y).norm()) + correction(x, y);
  }

  Eigen::MatrixXd inverse() const { return lu_.inverse(); }

 private:
  ArcGrid grid_;
  double lambda_;
  double a_;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu_;
};

/// G_alpha(x, y; lambda) = G_lambda(|x - y|) + gamma (alpha - B_lambda)^{-1} gamma^*.
inline double perturbed_green(const Curve& curve, const ArcGrid& grid, double lambda, double alpha, const Vec3& x,
                              const Vec3& y, const Tolerances& tol = {}) {
  if ((x - y).norm() == 0.0) throw ConfigError("x and y must differ");
  const double dx = distance_to_curve(curve, grid, x), dy = distance_to_curve(curve, grid, y);
  if (dx < 2.0 * grid.weight || dy < 2.0 * grid.weight) throw ConfigError("evaluation point too close to the curve");
  return KreinSolver(curve, grid, lambda, alpha, tol).green(x, y);
}

struct SingularValueProbe {
  std::vector<double> correction;  // s_k of the resolvent correction K
  std::vector<double> trace_map;   // s_k of gamma alone
  std::size_t box_points = 0;
};

/**
 * Singular values of K = Ghat X Ghat^T and of Ghat, Ghat_pj = sqrt(dV w) G(|y_p - x_j|),
 * X = (alpha - B_lambda)^{-1}. Uses Ghat = QR, so only N x N SVDs are needed.
 */
inline SingularValueProbe correction_singular_values(const Curve& curve, const ArcGrid& grid, const BoxGrid& box,
                                                     double lambda, double alpha, const Tolerances& tol = {}) {
  const std::size_t p = box.points.size(), n = grid.n;
  if (static_cast<double>(p) * static_cast<double>(n) > 2e7) throw ConfigError("box x curve matrix exceeds 2e7 entries");
  if (p < n) throw ConfigError("box has fewer sample points than curve nodes");
  const KreinSolver solver(curve, grid, lambda, alpha, tol);
  const double a = std::sqrt(-lambda);
  const double scale = std::sqrt(box.cell_volume * grid.weight);
  Eigen::MatrixXd g(p, n);
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = 0; j < n; ++j)
      g(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = scale * green_real(a, (box.points[i] - grid.points[j]).norm());

  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  const Eigen::MatrixXd r = qr.matrixQR().topRows(n).triangularView<Eigen::Upper>();
  const Eigen::MatrixXd x = solver.inverse();
  const Eigen::MatrixXd k = r * (0.5 * (x + x.transpose())) * r.transpose();

  SingularValueProbe out;
  out.box_points = p;
  const Eigen::VectorXd sk = Eigen::JacobiSVD<Eigen::MatrixXd>(k).singularValues();
  const Eigen::VectorXd sg = Eigen::JacobiSVD<Eigen::MatrixXd>(r).singularValues();
  out.correction.assign(sk.data(), sk.data() + sk.size());
  out.trace_map.assign(sg.data(), sg.data() + sg.size());
  return out;
}

/// Least-squares slope of log s_k against log k for 1-based k in [k_min, k_max].
inline double loglog_slope(const std::vector<double>& s, std::size_t k_min, std::size_t k_max) {
  if (k_min < 1 || k_max > s.size() || k_min >= k_max) throw ConfigError("invalid fit window");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  double m = 0;
  for (std::size_t k = k_min; k <= k_max; ++k) {
    if (!(s[k - 1] > 0.0)) throw NumericalError("nonpositive singular value inside the fit window");
    const double x = std::log(static_cast<double>(k)), y = std::log(s[k - 1]);
    sx += x; sy += y; sxx += x * x; sxy += x * y; m += 1;
  }
  return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

}  // namespace deltacurve
