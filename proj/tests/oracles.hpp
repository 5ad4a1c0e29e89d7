#pragma once

// Reference values computed independently of the library code paths.

#include <cmath>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "deltacurve/curve.hpp"

namespace oracle {

inline constexpr double pi = 3.14159265358979323846;

/// Top circle eigenvalue at lambda <= 0 by tanh-sinh quadrature.
inline double k_lambda(double lambda, double R) {
  const double a = std::sqrt(-lambda);
  boost::math::quadrature::tanh_sinh<double> ts;
  auto f = [&](double s) {
    if (s == 0.0) return -a * R / pi;
    return (std::exp(-a * 2.0 * R * std::sin(s)) - 1.0) / (2.0 * pi * std::sin(s));
  };
  return ts.integrate(f, 0.0, pi / 2.0) + std::log(4.0 * R) / (2.0 * pi);
}

/// nu_1 >= nu_2 >= ... of B_0 on the circle, plain double summation.
inline std::vector<double> circle_eigenvalues(double R, int count) {
  std::vector<double> v;
  const double c0 = std::log(4.0 * R) / (2.0 * pi);
  v.push_back(c0);
  double h = 0.0;
  for (int k = 1; static_cast<int>(v.size()) < count; ++k) {
    h += 1.0 / (2.0 * k - 1.0);
    v.push_back(c0 - h / pi);
    v.push_back(c0 - h / pi);
  }
  v.resize(count);
  return v;
}

/// Arc length of a Fourier curve from 0 to t by adaptive Gauss-Kronrod.
inline double arclength(const deltacurve::Curve& c, double t) {
  auto f = [&](double u) { return c.velocity(u).norm(); };
  return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, 0.0, t, 15, 1e-14);
}

/// 2R sin(|s - t| pi / L) with L = 2 pi R.
inline double circle_chord(double R, double s, double t) {
  return 2.0 * R * std::sin(std::abs(s - t) / (2.0 * R));
}

}  // namespace oracle
