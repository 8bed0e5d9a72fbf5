#pragma once

#include <cmath>
#include <functional>

namespace oracle {

// Composite Simpson on [a, b] with n (even) panels.
inline double simpson(const std::function<double(double)>& f, double a, double b, int n) {
  if (n % 2) ++n;
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
  return s * h / 3.0;
}

inline double d1(const std::function<double(double)>& f, double x, double h) {
  return (f(x + h) - f(x - h)) / (2 * h);
}

inline double d2(const std::function<double(double)>& f, double x, double h) {
  return (f(x + h) - 2 * f(x) + f(x - h)) / (h * h);
}

inline double rel(double a, double b) { return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300}); }

inline double lj(double eps, double sigma, double r) {
  const double s6 = std::pow(sigma / r, 6);
  return 4 * eps * (s6 * s6 - s6);
}

inline double morse(double e0, double kappa, double r0, double r) {
  return e0 * (std::exp(-2 * kappa * (r - r0)) - 2 * std::exp(-kappa * (r - r0)));
}

}  // namespace oracle
