#include "twistab/ergodic.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "twistab/errors.hpp"
#include "twistab/parallel.hpp"
#include "twistab/quadrature.hpp"

namespace twistab {

double TestFunction::operator()(const Vec2& xr, const Vec2& yr) const {
  switch (family) {
    case TestFamily::constant:
      return amplitude;
    case TestFamily::character: {
      const double ph = 2 * kPi * (k_moire[0] * xr(0) + k_moire[1] * xr(1) + k_layer[0] * yr(0) +
                                   k_layer[1] * yr(1)) + phase;
      return amplitude * std::cos(ph);
    }
    case TestFamily::von_mises:
      return amplitude *
             std::exp(kappa * (std::cos(2 * kPi * (xr(0) + yr(1))) + std::cos(2 * kPi * xr(1))));
  }
  return 0.0;
}

std::string family_name(TestFamily f) {
  switch (f) {
    case TestFamily::constant: return "constant";
    case TestFamily::character: return "character";
    case TestFamily::von_mises: return "von_mises";
  }
  return "unknown";
}

namespace {

void check(const ErgodicExperiment& e) {
  if (e.layer != 1 && e.layer != 2) throw InvalidParameter("layer must be 1 or 2");
}

}  // namespace

double truncated_average(const ErgodicExperiment& e, int n) {
  check(e);
  if (n < 1) throw InvalidParameter("truncation n must be at least 1");
  const Mat2& aj = e.geom.layer(e.layer);
  const Mat2 inv_m = e.geom.a_moire.inverse();
  const Mat2 inv_o = e.geom.other_layer(e.layer).inverse();
  const std::size_t width = static_cast<std::size_t>(2 * n + 1);
  std::vector<double> rows(width);
  parallel_for(width, [&](std::size_t i) {
    const int n1 = static_cast<int>(i) - n;
    std::vector<double> vals(width);
    for (std::size_t k = 0; k < width; ++k) {
      const Vec2 r = aj * Vec2(n1, static_cast<int>(k) - n);
      vals[k] = e.f(inv_m * (r + e.omega_moire), inv_o * (r + e.omega));
    }
    rows[i] = pairwise_sum(vals.data(), width);
  });
  return pairwise_sum(rows.data(), width) / double(width * width);
}

LimitValue ergodic_limit(const ErgodicExperiment& e, double tol) {
  check(e);
  const Mat2 inv_m = e.geom.a_moire.inverse();
  const Mat2 inv_o = e.geom.other_layer(e.layer).inverse();
  const Mat2 dm = e.geom.disregistry(e.layer) * e.geom.a_moire;
  auto integrand = [&](double t1, double t2) {
    const Vec2 t(t1, t2);
    const Vec2 x = e.geom.a_moire * t + e.omega_moire;
    const Vec2 y = dm * t + e.omega;
    return quad::Values<1>{e.f(inv_m * x, inv_o * y)};
  };
  const auto r = quad::integrate_2d<1>(integrand, 0.0, 1.0, 0.0, 1.0, tol, 0.0, 4000, 4, 4);
  if (!r.converged) {
    std::ostringstream os;
    os << "ergodic limit quadrature did not converge (error " << r.error << ")";
    throw QuadratureNotConverged(os.str());
  }
  return {r.value[0], r.error};
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw InvalidParameter("slope fit needs at least two points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = double(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

ConvergenceCurve convergence_curve(const ErgodicExperiment& e, const std::vector<int>& n_list) {
  if (n_list.empty()) throw InvalidParameter("n_list must be nonempty");
  ConvergenceCurve c;
  const LimitValue lim = ergodic_limit(e);
  c.limit = lim.value;
  c.limit_error = lim.error;
  const double floor = 1e-13 * std::max(1.0, std::abs(lim.value)) + lim.error;
  std::vector<double> xs, ys, xp, yp;
  for (int n : n_list) {
    const double v = truncated_average(e, n);
    const double err = std::abs(v - lim.value);
    c.rows.push_back({n, v, err});
    double env = err;
    for (int m = n + 1; m < 2 * n; ++m) env = std::max(env, std::abs(truncated_average(e, m) - lim.value));
    c.envelope.push_back(env);
    if (env > floor) {
      xs.push_back(n);
      ys.push_back(env);
    }
    if (err > floor) {
      xp.push_back(n);
      yp.push_back(err);
    }
  }
  const double nan = std::numeric_limits<double>::quiet_NaN();
  c.exact = xs.empty();
  c.slope = xs.size() >= 2 ? loglog_slope(xs, ys) : nan;
  c.pointwise_slope = xp.size() >= 2 ? loglog_slope(xp, yp) : nan;
  c.degraded = !c.exact && !(c.slope <= -0.5);
  return c;
}

}  // namespace twistab
