#pragma once

// Pointwise integral kernels. All functions are pure.

#include <cmath>
#include <complex>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "deltacurve/common.hpp"
#include "deltacurve/curve.hpp"

namespace deltacurve {

/// Square root with Im sqrt >= 0. Real negative lambda gives i sqrt(-lambda);
/// real nonnegative lambda is read as lambda + i0 and gives +sqrt(lambda).
inline cplx sqrt_branch(cplx lambda) {
  if (lambda.imag() == 0.0) {
    if (lambda.real() < 0.0) return {0.0, std::sqrt(-lambda.real())};
    return {std::sqrt(lambda.real()), 0.0};
  }
  cplx z = std::sqrt(lambda);
  if (z.imag() < 0.0) z = -z;
  return z;
}

/// A spectral parameter together with its square root on the fixed branch.
struct SpectralParameter {
  cplx value;
  cplx root;

  SpectralParameter(cplx lambda) : value(lambda), root(sqrt_branch(lambda)) {}  // NOLINT
  SpectralParameter(double lambda) : SpectralParameter(cplx(lambda, 0.0)) {}   // NOLINT

  bool is_real() const { return value.imag() == 0.0; }
};

/// exp(z) - 1 without cancellation for small |z|.
inline cplx cexpm1(cplx z) {
  const double x = z.real(), y = z.imag();
  const double sh = std::sin(0.5 * y);
  return {std::expm1(x) * std::cos(y) - 2.0 * sh * sh, std::exp(x) * std::sin(y)};
}

/// Free resolvent kernel exp(i sqrt(lambda) r) / (4 pi r).
inline cplx green_kernel(const SpectralParameter& lambda, double r) {
  if (!(r > 0.0)) throw ConfigError("green_kernel needs r > 0");
  if (lambda.is_real() && lambda.value.real() <= 0.0)
    return {std::exp(-lambda.root.imag() * r) / (four_pi * r), 0.0};
  return std::exp(cplx(0.0, 1.0) * lambda.root * r) / (four_pi * r);
}

/// Real Green kernel for lambda <= 0, a = sqrt(-lambda).
inline double green_real(double a, double r) { return std::exp(-a * r) / (four_pi * r); }

/// Diagonal constant of the circle of radius R, equal to its top
/// Birman-Schwinger eigenvalue at lambda <= 0.
inline double k_lambda(double lambda, double R) {
  if (lambda > 0.0) throw ConfigError("k_lambda needs lambda <= 0");
  if (!(R > 0.0)) throw ConfigError("k_lambda needs R > 0");
  const double base = std::log(4.0 * R) / (2.0 * pi);
  if (lambda == 0.0) return base;
  const double a = std::sqrt(-lambda);
  auto f = [a, R](double s) {
    const double sn = std::sin(s);
    if (sn < 1e-300) return -a * R / pi;
    return std::expm1(-a * 2.0 * R * sn) / (2.0 * pi * sn);
  };
  double err = 0.0;
  const double integral =
      boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, 0.0, pi / 2.0, 20, 1e-14, &err);
  return integral + base;
}

/// (1 - exp(-sqrt(-lambda) r)) / (4 pi r), with limit sqrt(-lambda)/(4 pi) at 0.
inline double m_kernel(double lambda, double r) {
  if (lambda > 0.0) throw ConfigError("m_kernel needs lambda <= 0");
  const double a = std::sqrt(-lambda);
  const double x = a * r;
  if (x < 1e-6) return a * (1.0 - x / 2.0 + x * x / 6.0) / four_pi;
  return -std::expm1(-x) / (four_pi * r);
}

/// G(|sigma(t)-sigma(s)|) - G(|tau(t)-tau(s)|) at lambda <= 0 from the two
/// chords; 0 when both chords vanish.
inline double d_kernel_chords(double lambda, double r_sigma, double r_tau) {
  if (r_sigma == 0.0 && r_tau == 0.0) return 0.0;
  const double a = std::sqrt(-lambda);
  return green_real(a, r_sigma) - green_real(a, r_tau);
}

/// Kernel of the comparison operator D_lambda between arc lengths s and t.
inline double d_kernel(const Curve& curve, double lambda, double s, double t) {
  if (lambda > 0.0) throw ConfigError("d_kernel needs lambda <= 0");
  const double L = curve.length();
  const double u = std::abs(curve.wrap(s) - curve.wrap(t));
  if (u == 0.0 || curve.is_circle()) return 0.0;
  const double R = L / (2.0 * pi);
  const double r_tau = 2.0 * R * std::sin(pi * u / L);
  return d_kernel_chords(lambda, chord(curve, s, t), r_tau);
}

/// (exp(i sqrt(lambda) r) - exp(i sqrt(eta) r)) / (4 pi r) for eta < 0,
/// with limit (i sqrt(lambda) + sqrt(-eta)) / (4 pi) at r = 0.
inline cplx n_kernel(const SpectralParameter& lambda, double eta, double r) {
  if (!(eta < 0.0)) throw ConfigError("n_kernel needs eta < 0");
  const cplx ik = cplx(0.0, 1.0) * lambda.root;
  const double b = std::sqrt(-eta);
  const double scale = std::max(std::abs(ik), b);
  if (r * scale < 1e-6) {
    return ((ik + b) + r * (ik * ik - b * b) / 2.0 + r * r * (ik * ik * ik + b * b * b) / 6.0) / four_pi;
  }
  return (cexpm1(ik * r) - std::expm1(-b * r)) / (four_pi * r);
}

}  // namespace deltacurve
