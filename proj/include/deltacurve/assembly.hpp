#pragma once

// Dense Nystrom matrices of the boundary operators on an ArcGrid.
//
// B_lambda = D_lambda + B_0(circle) - M_lambda(circle). The circle part B_0
// is built from its exact Fourier eigenvalues; every other kernel is bounded
// and integrated with the periodic trapezoid rule. Kernels that behave like
// f(0) + f'(0+)|s - t| near the diagonal get the Euler-Maclaurin correction
// (w^2 / 6) f'(0+) on the diagonal, which restores O(w^3) accuracy.

#include <cmath>
#include <cstddef>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "deltacurve/common.hpp"
#include "deltacurve/curve.hpp"
#include "deltacurve/kernels.hpp"

namespace deltacurve {

template <class Scalar>
struct OperatorMatrix {
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  Matrix a;
  cplx lambda{0.0, 0.0};
  std::string curve_id;
  std::string grid_id;

  Eigen::Index dim() const { return a.rows(); }
  /// max |A_ij - A_ji|
  double asymmetry() const { return (a - a.transpose()).cwiseAbs().maxCoeff(); }
};

using SymMatrix = OperatorMatrix<double>;
using ComplexMatrix = OperatorMatrix<cplx>;

inline std::string grid_label(const ArcGrid& g) {
  std::ostringstream os;
  os << "N=" << g.n << ";L=" << std::setprecision(15) << g.length;
  return os.str();
}

/// sum_{j=1}^{k} 1/(2j-1), in extended precision.
inline long double odd_harmonic(std::size_t k) {
  long double s = 0.0L;
  for (std::size_t j = k; j >= 1; --j) s += 1.0L / static_cast<long double>(2 * j - 1);
  return s;
}

/// Eigenvalue of B_0 on the circle of radius R for Fourier mode k >= 0
/// (mode k pairs cos(k s / R) and sin(k s / R)).
inline double circle_mode_eigenvalue(double R, std::size_t k) {
  return std::log(4.0 * R) / (2.0 * pi) - static_cast<double>(odd_harmonic(k)) / pi;
}

/// nu_1 >= nu_2 >= ... for the circle: the constant mode, then each k twice.
inline std::vector<double> circle_closed_form(double R, std::size_t count) {
  std::vector<double> out;
  out.reserve(count);
  long double h = 0.0L;
  const long double c0 = std::log(4.0L * R) / (2.0L * std::numbers::pi_v<long double>);
  out.push_back(static_cast<double>(c0));
  for (std::size_t k = 1; out.size() < count; ++k) {
    h += 1.0L / static_cast<long double>(2 * k - 1);
    const double v = static_cast<double>(c0 - h / std::numbers::pi_v<long double>);
    out.push_back(v);
    if (out.size() < count) out.push_back(v);
  }
  out.resize(count);
  return out;
}

namespace detail {

// cos(2 pi j / N) for j = 0..N-1, with exact mirror symmetry.
inline std::vector<double> cos_table(std::size_t n) {
  std::vector<double> c(n);
  for (std::size_t j = 0; j <= n / 2; ++j) {
    c[j] = std::cos(2.0 * pi * static_cast<double>(j) / static_cast<double>(n));
    if (j > 0) c[n - j] = c[j];
  }
  return c;
}

// Symmetric circulant from its first row entries c(0..N/2).
inline Eigen::MatrixXd circulant(const std::vector<double>& half, std::size_t n) {
  Eigen::MatrixXd a(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const std::size_t d = i > j ? i - j : j - i;
      a(i, j) = half[std::min(d, n - d)];
    }
  return a;
}

inline void require_even(const ArcGrid& g) {
  if (g.n % 2 != 0 || g.n < 16) throw ConfigError("grid size must be even and at least 16");
}

}  // namespace detail

/// First row c(0..N/2) of the circle B_0 matrix F^T diag(nu) F.
inline std::vector<double> circle_b0_row(double R, std::size_t n) {
  const auto ct = detail::cos_table(n);
  const std::size_t half = n / 2;
  std::vector<double> nu(half + 1);
  long double h = 0.0L;
  const double c0 = std::log(4.0 * R) / (2.0 * pi);
  nu[0] = c0;
  for (std::size_t k = 1; k <= half; ++k) {
    h += 1.0L / static_cast<long double>(2 * k - 1);
    nu[k] = c0 - static_cast<double>(h) / pi;
  }
  std::vector<double> row(half + 1);
  for (std::size_t d = 0; d <= half; ++d) {
    double s = nu[0];
    for (std::size_t k = 1; k < half; ++k) s += 2.0 * nu[k] * ct[(k * d) % n];
    s += nu[half] * ((d % 2 == 0) ? 1.0 : -1.0);
    row[d] = s / static_cast<double>(n);
  }
  return row;
}

inline SymMatrix circle_b0_matrix(double R, const ArcGrid& grid) {
  if (!(R > 0.0)) throw ConfigError("radius must be positive");
  detail::require_even(grid);
  SymMatrix m;
  m.a = detail::circulant(circle_b0_row(R, grid.n), grid.n);
  m.lambda = 0.0;
  m.curve_id = "circle";
  m.grid_id = grid_label(grid);
  return m;
}

/// First row c(0..N/2) of the circle M_lambda matrix (radius R).
inline std::vector<double> m_lambda_row(double R, double lambda, std::size_t n, double w) {
  if (lambda > 0.0) throw ConfigError("M_lambda needs lambda <= 0");
  std::vector<double> row(n / 2 + 1);
  for (std::size_t d = 1; d <= n / 2; ++d)
    row[d] = w * m_kernel(lambda, 2.0 * R * std::sin(pi * static_cast<double>(d) / static_cast<double>(n)));
  // m(r) = sqrt(-lambda)/(4 pi) + (lambda / (8 pi)) r + O(r^2)
  row[0] = w * m_kernel(lambda, 0.0) + w * w / 6.0 * (lambda / (8.0 * pi));
  return row;
}

inline SymMatrix m_lambda_matrix(double R, double lambda, const ArcGrid& grid) {
  detail::require_even(grid);
  SymMatrix m;
  m.a = detail::circulant(m_lambda_row(R, lambda, grid.n, grid.weight), grid.n);
  m.lambda = lambda;
  m.curve_id = "circle";
  m.grid_id = grid_label(grid);
  return m;
}

inline SymMatrix d_lambda_matrix(const Curve& curve, double lambda, const ArcGrid& grid) {
  if (lambda > 0.0) throw ConfigError("D_lambda needs lambda <= 0");
  const std::size_t n = grid.n;
  SymMatrix m;
  m.a = Eigen::MatrixXd::Zero(n, n);
  m.lambda = lambda;
  m.curve_id = curve.id;
  m.grid_id = grid_label(grid);
  if (curve.is_circle()) return m;
  const double w = grid.weight;
  const double R = grid.comparison_radius();
  const double a = std::sqrt(-lambda);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double rs = (grid.points[i] - grid.points[j]).norm();
      const double v = w * (green_real(a, rs) - green_real(a, grid.circle_chord(i, j)));
      m.a(i, j) = v;
      m.a(j, i) = v;
    }
    // Chords agree to second order; the kink coefficient is (kappa^2 - 1/R^2)/(96 pi).
    const double k2 = grid.curvature[i] * grid.curvature[i];
    m.a(i, i) = w * w / 6.0 * (k2 - 1.0 / (R * R)) / (96.0 * pi);
  }
  return m;
}

inline SymMatrix b_lambda_matrix(const Curve& curve, double lambda, const ArcGrid& grid) {
  if (lambda > 0.0) throw ConfigError("B_lambda needs lambda <= 0");
  detail::require_even(grid);
  const double R = grid.comparison_radius();
  auto row = circle_b0_row(R, grid.n);
  const auto mrow = m_lambda_row(R, lambda, grid.n, grid.weight);
  for (std::size_t d = 0; d < row.size(); ++d) row[d] -= mrow[d];
  SymMatrix m;
  m.a = detail::circulant(row, grid.n);
  if (!curve.is_circle()) {
    m.a += d_lambda_matrix(curve, lambda, grid).a;
    m.a = (0.5 * (m.a + m.a.transpose())).eval();
  }
  m.lambda = lambda;
  m.curve_id = curve.id;
  m.grid_id = grid_label(grid);
  return m;
}

/// Nystrom matrix of the kernel of N(lambda), complex symmetric.
inline ComplexMatrix n_matrix(const Curve& curve, const ArcGrid& grid, const SpectralParameter& lambda, double eta) {
  if (!(eta < 0.0)) throw ConfigError("eta must be negative");
  const std::size_t n = grid.n;
  const double w = grid.weight;
  ComplexMatrix m;
  m.a.resize(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const cplx v = w * n_kernel(lambda, eta, (grid.points[i] - grid.points[j]).norm());
      m.a(i, j) = v;
      m.a(j, i) = v;
    }
    m.a(i, i) = w * n_kernel(lambda, eta, 0.0) + w * w / 6.0 * (eta - lambda.value) / (8.0 * pi);
  }
  m.lambda = lambda.value;
  m.curve_id = curve.id;
  m.grid_id = grid_label(grid);
  return m;
}

/// Debug dump: a header line, then one row per matrix row.
inline void write_matrix_csv(const SymMatrix& m, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw ConfigError("cannot write " + path);
  os << "# N=" << m.dim() << ",lambda=" << std::setprecision(15) << m.lambda.real() << ",curve=" << m.curve_id
     << "\n";
  os << std::setprecision(15);
  for (Eigen::Index i = 0; i < m.dim(); ++i) {
    for (Eigen::Index j = 0; j < m.dim(); ++j) os << (j ? "," : "") << m.a(i, j);
    os << "\n";
  }
}

}  // namespace deltacurve
