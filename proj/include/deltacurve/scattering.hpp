#pragma once

// The nontrivial block S'(lambda) of the scattering matrix on ran(Im N).

#include <algorithm>
#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "deltacurve/assembly.hpp"
#include "deltacurve/common.hpp"
#include "deltacurve/spectral.hpp"

namespace deltacurve {

struct ScatteringBlock {
  double lambda = 0.0;
  double eta = 0.0;
  double alpha = 0.0;
  std::size_t retained = 0;          // g = numerical rank of Im N
  Eigen::MatrixXcd s_prime;          // g x g
  Eigen::VectorXd imn_eigenvalues;   // all eigenvalues of Im N, nonincreasing
  double hermiticity_defect = 0.0;   // max |Im N - (Im N)^*|
  double min_eigenvalue_ratio = 0.0; // min eigenvalue / top eigenvalue
  double tail_ratio = 0.0;           // sum_{k > N/4} |mu_k| / sum |mu_k|
  double condition = 0.0;            // estimate for N + B_eta - alpha
  double unitarity_defect = 0.0;     // || S'^* S' - I ||_2
};

/// First candidate eta with min_k |nu_k(eta) - alpha| > eta_margin.
inline double choose_eta(const Curve& curve, const ArcGrid& grid, double alpha, const std::vector<double>& candidates,
                         const Tolerances& tol = {}) {
  if (candidates.empty()) throw ConfigError("no eta candidates given");
  for (double eta : candidates) {
    if (!(eta < 0.0)) throw ConfigError("eta candidates must be negative");
    const Eigen::VectorXd v = eigen(b_lambda_matrix(curve, eta, grid), false).values;
    if ((v.array() - alpha).abs().minCoeff() > tol.eta_margin) return eta;
  }
  throw NumericalError("no eta candidate keeps alpha out of the spectrum of B_eta");
}

/**
 * S' = I - 2i Lambda^{1/2} U^* (N + B_eta - alpha)^{-1} U Lambda^{1/2}, where
 * Im N = U Lambda U^* restricted to eigenvalues above rank_tol * top.
 */
inline ScatteringBlock s_prime(const Curve& curve, const ArcGrid& grid, double lambda, double alpha, double eta,
                               const Tolerances& tol = {}) {
  if (lambda < 0.0) throw ConfigError("scattering needs lambda >= 0");
  if (!(eta < 0.0)) throw ConfigError("eta must be negative");
  const std::size_t n = grid.n;
  const cplx I(0.0, 1.0);

  ScatteringBlock out;
  out.lambda = lambda;
  out.eta = eta;
  out.alpha = alpha;

  const Eigen::MatrixXcd nm = n_matrix(curve, grid, SpectralParameter(lambda), eta).a;
  const Eigen::MatrixXcd imn = (nm - nm.adjoint()) / (2.0 * I);
  out.hermiticity_defect = (imn - imn.adjoint()).cwiseAbs().maxCoeff();

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(imn);
  if (es.info() != Eigen::Success) throw NumericalError("eigensolver failed on Im N");
  const Eigen::VectorXd mu = es.eigenvalues().reverse();
  const Eigen::MatrixXcd vecs = es.eigenvectors().rowwise().reverse();
  out.imn_eigenvalues = mu;
  const double top = mu(0);
  const double total = mu.cwiseAbs().sum();
  out.min_eigenvalue_ratio = top > 0 ? mu.minCoeff() / top : 0.0;
  out.tail_ratio = total > 0 ? mu.tail(static_cast<Eigen::Index>(n - n / 4)).cwiseAbs().sum() / total : 0.0;

  std::size_t g = 0;
  if (top > 0.0)
    while (g < n && mu(static_cast<Eigen::Index>(g)) > tol.rank * top) ++g;
  out.retained = g;
  if (g == 0) return out;

  const auto gi = static_cast<Eigen::Index>(g);
  const Eigen::MatrixXcd root = vecs.leftCols(gi) * mu.head(gi).cwiseSqrt().asDiagonal();

  Eigen::MatrixXcd a = nm + b_lambda_matrix(curve, eta, grid).a.cast<cplx>();
  a.diagonal().array() -= alpha;
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(a);
  const double rc = lu.rcond();
  out.condition = rc > 0 ? 1.0 / rc : std::numeric_limits<double>::infinity();
  if (!(out.condition <= tol.max_condition))
    throw NumericalError("N + B_eta - alpha is numerically singular (condition estimate " +
                         std::to_string(out.condition) + ")");

  out.s_prime = Eigen::MatrixXcd::Identity(gi, gi) - 2.0 * I * (root.adjoint() * lu.solve(root));
  const Eigen::MatrixXcd defect = out.s_prime.adjoint() * out.s_prime - Eigen::MatrixXcd::Identity(gi, gi);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> ds(defect, Eigen::EigenvaluesOnly);
  out.unitarity_defect = ds.eigenvalues().cwiseAbs().maxCoeff();
  return out;
}

}  // namespace deltacurve
