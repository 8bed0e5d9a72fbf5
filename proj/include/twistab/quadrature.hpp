#pragma once

// Globally adaptive Gauss-Kronrod (G7/K15) quadrature for vector-valued
// integrands, plus a nested rule for rectangles.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <queue>
#include <vector>

namespace twistab::quad {

template <std::size_t N>
using Values = std::array<double, N>;

template <std::size_t N>
struct Result {
  Values<N> value{};
  double error = 0.0;  // max-norm over components
  int evaluations = 0;
  bool converged = false;
};

namespace detail {

inline constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <std::size_t N>
struct Panel {
  double a, b;
  Values<N> value;
  double error;
  bool operator<(const Panel& o) const { return error < o.error; }
};

template <std::size_t N, class F>
Panel<N> kronrod15(F& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  Values<N> kron{}, gauss{};
  const Values<N> fc = f(c);
  for (std::size_t k = 0; k < N; ++k) {
    kron[k] = fc[k] * kWgk[7];
    gauss[k] = fc[k] * kWg[3];
  }
  for (int j = 0; j < 7; ++j) {
    const double dx = h * kXgk[j];
    const Values<N> f1 = f(c - dx);
    const Values<N> f2 = f(c + dx);
    for (std::size_t k = 0; k < N; ++k) {
      const double s = f1[k] + f2[k];
      kron[k] += kWgk[j] * s;
      if (j % 2 == 1) gauss[k] += kWg[j / 2] * s;
    }
  }
  Panel<N> p{a, b, {}, 0.0};
  for (std::size_t k = 0; k < N; ++k) {
    p.value[k] = kron[k] * h;
    p.error = std::max(p.error, std::abs((kron[k] - gauss[k]) * h));
  }
  return p;
}

}  // namespace detail

/// Integrates `f : double -> Values<N>` over [a, b], bisecting the panel with
/// the largest local error until the summed error estimate is at most
/// max(abs_tol, rel_tol * |I|_inf) or `max_panels` is reached.
template <std::size_t N, class F>
Result<N> integrate(F&& f, double a, double b, double abs_tol, double rel_tol,
                    int max_panels = 4000, int initial_panels = 1) {
  std::priority_queue<detail::Panel<N>> heap;
  const int n0 = std::max(1, initial_panels);
  for (int i = 0; i < n0; ++i) {
    const double lo = a + (b - a) * i / n0;
    const double hi = (i + 1 == n0) ? b : a + (b - a) * (i + 1) / n0;
    heap.push(detail::kronrod15<N>(f, lo, hi));
  }
  int panels = n0;
  Result<N> out;
  out.evaluations = 15 * n0;
  auto finish = [&](bool converged) {
    // Totals are recomputed in interval order so rounding does not depend on
    // the refinement history.
    std::vector<detail::Panel<N>> all;
    all.reserve(heap.size());
    while (!heap.empty()) {
      all.push_back(heap.top());
      heap.pop();
    }
    std::sort(all.begin(), all.end(), [](const auto& l, const auto& r) { return l.a < r.a; });
    out.value = {};
    out.error = 0.0;
    for (const auto& p : all) {
      for (std::size_t k = 0; k < N; ++k) out.value[k] += p.value[k];
      out.error += p.error;
    }
    out.converged = converged;
    return out;
  };
  Values<N> total{};
  double err = 0.0;
  {
    auto copy = heap;
    while (!copy.empty()) {
      for (std::size_t k = 0; k < N; ++k) total[k] += copy.top().value[k];
      err += copy.top().error;
      copy.pop();
    }
  }
  for (;;) {
    double mag = 0.0;
    for (double v : total) mag = std::max(mag, std::abs(v));
    if (err <= std::max(abs_tol, rel_tol * mag)) return finish(true);
    if (panels >= max_panels) return finish(false);
    const auto worst = heap.top();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) return finish(false);
    heap.pop();
    const auto left = detail::kronrod15<N>(f, worst.a, mid);
    const auto right = detail::kronrod15<N>(f, mid, worst.b);
    for (std::size_t k = 0; k < N; ++k) total[k] += left.value[k] + right.value[k] - worst.value[k];
    err += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
    out.evaluations += 30;
    ++panels;
  }
}

/// Scalar convenience wrapper.
template <class F>
Result<1> integrate_scalar(F&& f, double a, double b, double abs_tol, double rel_tol,
                           int max_panels = 4000, int initial_panels = 1) {
  auto g = [&f](double x) { return Values<1>{f(x)}; };
  return integrate<1>(g, a, b, abs_tol, rel_tol, max_panels, initial_panels);
}

/// Nested rule over [x0,x1] x [y0,y1]. The inner integral is solved to a
/// tenth of the outer tolerance; its error estimate is carried as an extra
/// component and integrated along with the values, so `error` bounds both
/// levels.
template <std::size_t N, class F>
Result<N> integrate_2d(F&& f, double x0, double x1, double y0, double y1, double abs_tol,
                       double rel_tol, int max_panels = 2000, int initial_x = 1,
                       int initial_y = 1) {
  bool inner_ok = true;
  int evals = 0;
  const double inner_abs = 0.1 * abs_tol / std::max(1e-300, std::abs(x1 - x0));
  auto outer = [&](double x) {
    auto inner_fn = [&](double y) { return f(x, y); };
    const Result<N> r =
        integrate<N>(inner_fn, y0, y1, inner_abs, 0.1 * rel_tol, max_panels, initial_y);
    inner_ok = inner_ok && r.converged;
    evals += r.evaluations;
    Values<N + 1> v{};
    for (std::size_t k = 0; k < N; ++k) v[k] = r.value[k];
    v[N] = r.error;
    return v;
  };
  const Result<N + 1> o = integrate<N + 1>(outer, x0, x1, abs_tol, rel_tol, max_panels, initial_x);
  Result<N> out;
  for (std::size_t k = 0; k < N; ++k) out.value[k] = o.value[k];
  out.error = o.error + std::abs(o.value[N]);
  out.evaluations = evals;
  double mag = 0.0;
  for (double v : out.value) mag = std::max(mag, std::abs(v));
  out.converged = o.converged && inner_ok && out.error <= 2.0 * std::max(abs_tol, rel_tol * mag);
  return out;
}

}  // namespace twistab::quad
