#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace deltacurve {

using Vec3 = Eigen::Vector3d;
using cplx = std::complex<double>;

inline constexpr double pi = std::numbers::pi;
inline constexpr double four_pi = 4.0 * std::numbers::pi;

// Value used by the counting bounds (six digits, as published).
inline constexpr double euler_gamma_published = 0.577216;

/// Invalid input or configuration (CLI exit code 2).
struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// A computation failed to converge or hit a numerically singular system
/// (CLI exit code 3).
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A mathematical invariant that must hold on the discrete model was
/// violated (CLI exit code 4).
struct InvariantViolation : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Tunable tolerances. Every field can be overridden from the CLI with
/// `--tol-override key=value`.
struct Tolerances {
  double reparam = 1e-10;        // unit-speed check after reparametrization
  double root = 1e-10;           // |nu_k(lambda) - alpha| at an accepted root
  double pairing = 1e-9;         // eigenvalues closer than this form a multiplet
  double monotonicity = 1e-10;   // allowed decrease of nu_k along increasing lambda
  double endpoint = 1e-12;       // alpha this close to an interval endpoint is flagged
  double rank = 1e-10;           // relative cutoff for ran(Im N)
  double eta_margin = 1e-6;      // min_k |nu_k(eta) - alpha| for an admissible eta
  double max_condition = 1e12;   // refuse linear solves above this condition estimate

  /// Set a field by name; throws ConfigError for unknown keys.
  void set(const std::string& key, double value) {
    if (key == "reparam" || key == "reparam_tol") reparam = value;
    else if (key == "root" || key == "root_tol") root = value;
    else if (key == "pairing" || key == "pairing_tol") pairing = value;
    else if (key == "monotonicity") monotonicity = value;
    else if (key == "endpoint") endpoint = value;
    else if (key == "rank" || key == "rank_tol") rank = value;
    else if (key == "eta_margin") eta_margin = value;
    else if (key == "max_condition") max_condition = value;
    else throw ConfigError("unknown tolerance key '" + key + "'");
  }
};

}  // namespace deltacurve
