#pragma once

// Eigenvalue curves nu_k(lambda), bound states, and eigenvalue counting.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <boost/math/special_functions/digamma.hpp>

#include "deltacurve/assembly.hpp"
#include "deltacurve/common.hpp"
#include "deltacurve/curve.hpp"
#include "deltacurve/kernels.hpp"

namespace deltacurve {

/// Eigenpairs sorted nonincreasingly. Only the first `trusted` pairs
/// (N/4) resolve the continuous operator.
struct EigenSystem {
  Eigen::VectorXd values;
  Eigen::MatrixXd vectors;  // empty when only values were requested
  std::size_t trusted = 0;

  /// Sizes of consecutive groups of eigenvalues closer than `tol`.
  std::vector<std::size_t> multiplicities(double tol) const {
    std::vector<std::size_t> out;
    for (Eigen::Index i = 0; i < values.size();) {
      Eigen::Index j = i + 1;
      while (j < values.size() && values(j - 1) - values(j) <= tol) ++j;
      out.push_back(static_cast<std::size_t>(j - i));
      i = j;
    }
    return out;
  }
};

inline EigenSystem eigen(const Eigen::MatrixXd& a, bool with_vectors = true) {
  if (!a.allFinite()) throw NumericalError("matrix has non-finite entries");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a, with_vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw NumericalError("symmetric eigensolver did not converge");
  EigenSystem out;
  const Eigen::Index n = a.rows();
  out.values = es.eigenvalues().reverse();
  if (with_vectors) out.vectors = es.eigenvectors().rowwise().reverse();
  out.trusted = static_cast<std::size_t>(n / 4);
  return out;
}

inline EigenSystem eigen(const SymMatrix& b, bool with_vectors = true) { return eigen(b.a, with_vectors); }

/**
 * Spectrum of the discrete B_lambda for one curve and grid, cached per lambda.
 *
 * For circles the matrix is a symmetric circulant, so its eigenvalues are the
 * cosine transforms of the first row; that path is exact (degenerate pairs are
 * bit-identical) and O(N^2). Other curves use a dense eigensolve.
 * Every new lambda is checked for monotonicity against its cached neighbours.
 */
class SpectrumEvaluator {
 public:
  SpectrumEvaluator(Curve curve, std::size_t n, Tolerances tol = {}, bool modal_for_circle = true)
      : curve_(std::move(curve)), grid_(make_grid(curve_, n)), tol_(tol),
        modal_(modal_for_circle && curve_.is_circle()) {
    if (modal_) cos_ = detail::cos_table(n);
  }

  const Curve& curve() const { return curve_; }
  const ArcGrid& grid() const { return grid_; }
  const Tolerances& tolerances() const { return tol_; }
  std::size_t trusted() const { return grid_.n / 4; }
  std::size_t evaluations() const { return evaluations_; }
  bool modal() const { return modal_; }

  /// All N eigenvalues of B_lambda, nonincreasing.
  const Eigen::VectorXd& values(double lambda) {
    if (lambda > 0.0) throw ConfigError("nu_k(lambda) needs lambda <= 0");
    auto it = cache_.find(lambda);
    if (it != cache_.end()) return it->second;
    Eigen::VectorXd v = modal_ ? modal_values(lambda) : eigen(b_lambda_matrix(curve_, lambda, grid_), false).values;
    ++evaluations_;
    auto [pos, ok] = cache_.emplace(lambda, std::move(v));
    check_monotone(pos);
    return pos->second;
  }

  double nu(std::size_t k, double lambda) { return values(lambda)(static_cast<Eigen::Index>(k)); }

  EigenSystem system(double lambda, bool with_vectors = true) const {
    return eigen(b_lambda_matrix(curve_, lambda, grid_), with_vectors);
  }

  const std::map<double, Eigen::VectorXd>& cache() const { return cache_; }

 private:
  Eigen::VectorXd modal_values(double lambda) const {
    const std::size_t n = grid_.n, half = n / 2;
    const double R = grid_.comparison_radius();
    const auto b0 = circle_b0_row(R, n);
    const auto m = m_lambda_row(R, lambda, n, grid_.weight);
    std::vector<double> row(half + 1);
    for (std::size_t d = 0; d <= half; ++d) row[d] = b0[d] - m[d];
    Eigen::VectorXd v(static_cast<Eigen::Index>(n));
    Eigen::Index pos = 0;
    for (std::size_t k = 0; k <= half; ++k) {
      double s = row[0] + row[half] * ((k % 2 == 0) ? 1.0 : -1.0);
      for (std::size_t d = 1; d < half; ++d) s += 2.0 * row[d] * cos_[(k * d) % n];
      v(pos++) = s;
      if (k != 0 && k != half) v(pos++) = s;
    }
    std::sort(v.data(), v.data() + v.size(), std::greater<>());
    return v;
  }

  void check_monotone(std::map<double, Eigen::VectorXd>::iterator pos) const {
    const auto k_max = static_cast<Eigen::Index>(trusted());
    auto compare = [&](const Eigen::VectorXd& lower, const Eigen::VectorXd& upper, double l0, double l1) {
      for (Eigen::Index k = 0; k < k_max; ++k)
        if (lower(k) > upper(k) + tol_.monotonicity)
          throw NumericalError("nu_" + std::to_string(k + 1) + " decreases between lambda=" + std::to_string(l0) +
                               " and lambda=" + std::to_string(l1) + "; grid under-resolves this lambda");
    };
    if (pos != cache_.begin()) {
      auto prev = std::prev(pos);
      compare(prev->second, pos->second, prev->first, pos->first);
    }
    auto next = std::next(pos);
    if (next != cache_.end()) compare(pos->second, next->second, pos->first, next->first);
  }

  Curve curve_;
  ArcGrid grid_;
  Tolerances tol_;
  bool modal_;
  std::vector<double> cos_;
  std::map<double, Eigen::VectorXd> cache_;
  std::size_t evaluations_ = 0;
};

/// (lambda, nu_k(lambda)) for a 1-based mode index k, asserting strict growth.
inline std::vector<std::pair<double, double>> nu_curve(SpectrumEvaluator& ev, std::size_t k,
                                                       std::vector<double> lambdas) {
  if (k < 1 || k > ev.trusted()) throw ConfigError("mode index outside the trusted range");
  std::sort(lambdas.begin(), lambdas.end());
  std::vector<std::pair<double, double>> out;
  for (double l : lambdas) {
    const double v = ev.nu(k - 1, l);
    if (!out.empty() && l > out.back().first && !(v > out.back().second))
      throw NumericalError("nu_" + std::to_string(k) + " is not strictly increasing");
    out.emplace_back(l, v);
  }
  return out;
}

struct BoundState {
  std::size_t k = 0;        // 1-based mode index
  double lambda = 0.0;      // energy, < 0
  double alpha = 0.0;
  double residual = 0.0;    // |nu_k(lambda) - alpha|
  std::size_t multiplicity = 1;
  Eigen::VectorXd h;        // discrete Birman-Schwinger eigenfunction (optional)
};

namespace detail {

inline double find_floor(SpectrumEvaluator& ev, double alpha) {
  double lambda = -1.0;
  for (int i = 0; i <= 60; ++i, lambda *= 2.0)
    if (ev.nu(0, lambda) < alpha) return lambda;
  throw NumericalError("no lambda with nu_1(lambda) < alpha after 60 doublings");
}

// Root of nu_k(lambda) = alpha inside the tightest bracket known to the cache,
// refined by regula falsi with the Illinois modification.
inline BoundState solve_mode(SpectrumEvaluator& ev, std::size_t k, double alpha) {
  const double tol = ev.tolerances().root;
  const auto idx = static_cast<Eigen::Index>(k);
  double lo = -std::numeric_limits<double>::infinity(), hi = std::numeric_limits<double>::infinity();
  double flo = 0, fhi = 0;
  for (const auto& [l, v] : ev.cache()) {
    const double f = v(idx) - alpha;
    if (std::abs(f) < tol) return {k + 1, l, alpha, std::abs(f), 1, {}};
    if (f < 0 && l > lo) { lo = l; flo = f; }
    if (f > 0 && l < hi) { hi = l; fhi = f; }
  }
  if (!std::isfinite(lo) || !std::isfinite(hi) || !(lo < hi))
    throw NumericalError("could not bracket the root of nu_" + std::to_string(k + 1));
  int side = 0;
  for (int it = 0; it < 200; ++it) {
    double x = (lo * fhi - hi * flo) / (fhi - flo);
    if (!(x > lo && x < hi)) x = 0.5 * (lo + hi);
    const double f = ev.nu(k, x) - alpha;
    if (std::abs(f) < tol) return {k + 1, x, alpha, std::abs(f), 1, {}};
    if (f < 0) {
      lo = x; flo = f;
      if (side == -1) fhi *= 0.5;
      side = -1;
    } else {
      hi = x; fhi = f;
      if (side == 1) flo *= 0.5;
      side = 1;
    }
    if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * std::abs(hi)) break;
  }
  throw NumericalError("root of nu_" + std::to_string(k + 1) + "(lambda) = alpha did not reach root_tol");
}

inline void assign_multiplicities(std::vector<BoundState>& states) {
  for (std::size_t i = 0; i < states.size();) {
    std::size_t j = i + 1;
    while (j < states.size() &&
           std::abs(states[j].lambda - states[i].lambda) <= 1e-8 * std::max(1.0, std::abs(states[i].lambda)))
      ++j;
    for (std::size_t m = i; m < j; ++m) states[m].multiplicity = j - i;
    i = j;
  }
}

}  // namespace detail

/// Number of k <= trusted with nu_k(0) > alpha; refuses when the count reaches the trusted range.
inline std::size_t count_above(SpectrumEvaluator& ev, double alpha) {
  const Eigen::VectorXd& v = ev.values(0.0);
  std::size_t n = 0;
  while (n < static_cast<std::size_t>(v.size()) && v(static_cast<Eigen::Index>(n)) > alpha) ++n;
  if (n >= ev.trusted())
    throw NumericalError("count " + std::to_string(n) + " reaches the trusted range N/4 = " +
                         std::to_string(ev.trusted()) + "; refine the grid");
  return n;
}

/**
 * All negative eigenvalues lambda_k of the delta operator with coupling alpha:
 * one root of nu_k(lambda) = alpha per mode with nu_k(0) > alpha. Sorted by
 * energy ascending.
 */
inline std::vector<BoundState> find_bound_states(SpectrumEvaluator& ev, double alpha) {
  if (alpha == 0.0) throw ConfigError("alpha must be nonzero");
  const std::size_t n = count_above(ev, alpha);
  std::vector<BoundState> states;
  if (n == 0) return states;
  detail::find_floor(ev, alpha);
  for (std::size_t k = 0; k < n; ++k) states.push_back(detail::solve_mode(ev, k, alpha));
  std::stable_sort(states.begin(), states.end(), [](const auto& a, const auto& b) { return a.lambda < b.lambda; });
  detail::assign_multiplicities(states);
  return states;
}

/// Lowest bound state (mode 1). Throws ConfigError when none exists.
inline BoundState principal_bound_state(SpectrumEvaluator& ev, double alpha) {
  if (alpha == 0.0) throw ConfigError("alpha must be nonzero");
  if (!(ev.nu(0, 0.0) > alpha)) throw ConfigError("no bound state: alpha >= nu_1(0)");
  detail::find_floor(ev, alpha);
  return detail::solve_mode(ev, 0, alpha);
}

/// Fill state.h with the eigenvector of B_{lambda_k} whose eigenvalue is closest to alpha.
inline void attach_eigenfunction(const SpectrumEvaluator& ev, BoundState& state) {
  const EigenSystem es = ev.system(state.lambda, true);
  Eigen::Index best = 0;
  (es.values.array() - state.alpha).abs().minCoeff(&best);
  state.h = es.vectors.col(best);
}

/// dist(alpha, spectrum of B_lambda) from a dense eigensolve.
inline double birman_schwinger_residual(const Curve& curve, const ArcGrid& grid, double lambda, double alpha) {
  const EigenSystem es = eigen(b_lambda_matrix(curve, lambda, grid), false);
  return (es.values.array() - alpha).abs().minCoeff();
}

// --- interval bookkeeping --------------------------------------------------

/// The r >= -1 with x in I_r, where I_{-1} = [c0, inf) and
/// I_r = [c0 - H(r+1)/pi, c0 - H(r)/pi), H(k) = sum_{j<=k} 1/(2j-1), c0 = ln(4R)/(2 pi).
inline std::int64_t interval_index(double x, double R) {
  if (!(R > 0.0)) throw ConfigError("radius must be positive");
  const double c0 = std::log(4.0 * R) / (2.0 * pi);
  if (x >= c0) return -1;
  if (std::isinf(x)) return std::numeric_limits<std::int64_t>::max();
  auto left = [&](std::int64_t r) {  // left endpoint of I_r
    const auto k = static_cast<std::uint64_t>(r + 1);
    long double h;
    if (k <= 1000000) {
      h = odd_harmonic(static_cast<std::size_t>(k));
    } else {
      // H(k) = H_{2k} - H_k / 2 with H_m = digamma(m + 1) + gamma
      const long double g = 0.5772156649015328606065120900824024L;
      const long double kk = static_cast<long double>(k);
      h = boost::math::digamma(2.0L * kk + 1.0L) + g - 0.5L * (boost::math::digamma(kk + 1.0L) + g);
    }
    return c0 - static_cast<double>(h) / pi;
  };
  // H(k) ~ ln(k)/2 + ln 2 + gamma/2: start near the asymptotic guess, then walk.
  const long double y = (static_cast<long double>(c0) - x) * std::numbers::pi_v<long double>;
  long double guess = std::exp(2.0L * (y - std::log(2.0L)) - 0.5772156649015328606L) - 2.0L;
  std::int64_t r = guess < 0 ? 0 : guess > 9e18L ? std::numeric_limits<std::int64_t>::max() / 4
                                                  : static_cast<std::int64_t>(guess);
  while (r > 0 && !(x < left(r - 1))) --r;
  while (!(x >= left(r))) ++r;
  return r;
}

/// Lower and upper bounds on N_alpha from the Euler-Mascheroni asymptotics.
struct CountBounds {
  double lower = 0.0;
  double upper = 0.0;
};

inline CountBounds asymptotic_count_bounds(double R, double alpha, double d_sigma) {
  if (!(R > 0.0)) throw ConfigError("radius must be positive");
  const double c0 = std::log(4.0 * R) / (2.0 * pi);
  if (!(alpha + d_sigma < c0 - 1.0 / pi))
    throw ConfigError("count bounds need alpha + d_sigma < ln(4R)/(2 pi) - 1/pi");
  const double c = std::exp(2.0 * pi * d_sigma);
  const double e = std::exp(-2.0 * pi * alpha - euler_gamma_published);
  return {2.0 * R / c * e - 1.0 - 4.0 * (std::exp(1.0 / 92.0) - 1.0), 2.0 * R * c * e + 1.0};
}

struct CountReport {
  double alpha = 0.0;
  double d_sigma = 0.0;
  std::size_t count = 0;
  std::int64_t r = -1;        // alpha + d_sigma in I_r
  std::int64_t l = -1;        // alpha - d_sigma in I_l
  std::int64_t lower = 0;     // 2r + 1 (0 when r = -1)
  std::int64_t upper = 0;     // 2l + 1 (0 when l = -1)
  bool endpoint_flag = false; // alpha +- d_sigma within endpoint tolerance of an interval end
  bool sandwich_holds = false; // lower <= count <= upper
  std::int64_t lower_hs = 0;   // sandwich with radius sqrt(d_sigma), always asserted
  std::int64_t upper_hs = 0;
  std::optional<CountBounds> asymptotic;
};

/**
 * N_alpha = #{k <= N/4 : nu_k(0) > alpha}. The interval sandwich
 * 2r + 1 <= N_alpha <= 2l + 1 with radius d_sigma is reported; the one with
 * radius sqrt(d_sigma) >= ||D_0|| (Hilbert-Schmidt) is asserted. Circles are
 * cross-checked against the closed form 2r + 1.
 */
inline CountReport count_negative(SpectrumEvaluator& ev, double alpha, double d_sigma) {
  if (alpha == 0.0) throw ConfigError("alpha must be nonzero");
  const double R = ev.grid().comparison_radius();
  CountReport rep;
  rep.alpha = alpha;
  rep.d_sigma = d_sigma;
  rep.count = count_above(ev, alpha);
  rep.r = interval_index(alpha + d_sigma, R);
  rep.l = interval_index(alpha - d_sigma, R);
  rep.lower = rep.r < 0 ? 0 : 2 * rep.r + 1;
  rep.upper = rep.l < 0 ? 0 : 2 * rep.l + 1;

  const double c0 = std::log(4.0 * R) / (2.0 * pi);
  const double etol = ev.tolerances().endpoint;
  for (double x : {alpha + d_sigma, alpha - d_sigma}) {
    const std::int64_t q = interval_index(x, R);
    if (q < 0) {
      rep.endpoint_flag |= std::abs(x - c0) < etol;
    } else {
      const double right = c0 - static_cast<double>(odd_harmonic(static_cast<std::size_t>(q))) / pi;
      const double left = c0 - static_cast<double>(odd_harmonic(static_cast<std::size_t>(q + 1))) / pi;
      rep.endpoint_flag |= std::abs(x - right) < etol || std::abs(x - left) < etol;
    }
  }
  if (alpha + d_sigma < c0 - 1.0 / pi) rep.asymptotic = asymptotic_count_bounds(R, alpha, d_sigma);

  const auto n = static_cast<std::int64_t>(rep.count);
  rep.sandwich_holds = rep.lower <= n && n <= rep.upper;
  const double hs = std::sqrt(d_sigma);
  const std::int64_t rh = interval_index(alpha + hs, R), lh = interval_index(alpha - hs, R);
  rep.lower_hs = rh < 0 ? 0 : 2 * rh + 1;
  rep.upper_hs = lh < 0 ? 0 : 2 * lh + 1;
  if (alpha + hs < c0 && !(rep.lower_hs <= n && n <= rep.upper_hs))
    throw InvariantViolation("count " + std::to_string(n) + " outside interval sandwich [" +
                             std::to_string(rep.lower_hs) + ", " + std::to_string(rep.upper_hs) + "]");
  if (alpha - hs >= c0 && n != 0) throw InvariantViolation("nonzero count above the emptiness threshold");
  if (ev.curve().is_circle()) {
    const std::int64_t r0 = interval_index(alpha, R);
    const std::int64_t closed = r0 < 0 ? 0 : 2 * r0 + 1;
    if (closed != n)
      throw InvariantViolation("circle count " + std::to_string(n) + " differs from closed form " +
                               std::to_string(closed));
  }
  return rep;
}

struct IsoperimetricResult {
  double lambda_curve = 0.0;
  double lambda_circle = 0.0;
  double gap = 0.0;  // lambda_circle - lambda_curve
};

/// Principal energies of the curve and of the circle of equal length.
inline IsoperimetricResult isoperimetric_compare(const Curve& curve, double alpha, std::size_t n,
                                                 const Tolerances& tol = {}) {
  const double R = curve.length() / (2.0 * pi);
  if (!(alpha < std::log(4.0 * R) / (2.0 * pi))) throw ConfigError("no bound state: alpha >= ln(4R)/(2 pi)");
  SpectrumEvaluator ec(curve, n, tol);
  SpectrumEvaluator et(make_circle(R), n, tol);
  IsoperimetricResult out;
  out.lambda_curve = principal_bound_state(ec, alpha).lambda;
  out.lambda_circle = principal_bound_state(et, alpha).lambda;
  out.gap = out.lambda_circle - out.lambda_curve;
  return out;
}

}  // namespace deltacurve
