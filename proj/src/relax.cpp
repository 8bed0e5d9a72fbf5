#include "twistab/relax.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>
#include <limits>
#include <mutex>
#include <random>
#include <sstream>

#include "twistab/errors.hpp"
#include "twistab/parallel.hpp"

namespace twistab {

namespace {

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

int signed_freq(int k, int n) { return k <= n / 2 ? k : k - n; }

// FFT workspace for one grid size. Spectral derivative multipliers zero the
// Nyquist row/column so the discrete derivative is exactly skew-adjoint.
class Spectral {
 public:
  explicit Spectral(int n) : n_(n), nc_(n / 2 + 1) {
    real_ = fftw_alloc_real(static_cast<std::size_t>(n) * n);
    spec_ = fftw_alloc_complex(static_cast<std::size_t>(n) * nc_);
    std::lock_guard<std::mutex> lock(planner_mutex());
    fwd_ = fftw_plan_dft_r2c_2d(n, n, real_, spec_, FFTW_ESTIMATE);
    inv_ = fftw_plan_dft_c2r_2d(n, n, spec_, real_, FFTW_ESTIMATE);
  }
  ~Spectral() {
    {
      std::lock_guard<std::mutex> lock(planner_mutex());
      fftw_destroy_plan(fwd_);
      fftw_destroy_plan(inv_);
    }
    fftw_free(real_);
    fftw_free(spec_);
  }
  Spectral(const Spectral&) = delete;
  Spectral& operator=(const Spectral&) = delete;

  using Spectrum = std::vector<std::complex<double>>;

  Spectrum forward(const std::vector<double>& f) {
    std::copy(f.begin(), f.end(), real_);
    fftw_execute(fwd_);
    Spectrum out(static_cast<std::size_t>(n_) * nc_);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = {spec_[i][0], spec_[i][1]};
    return out;
  }

  // Inverse of sum_b c_b * (i k_b) * F_b, normalized.
  std::vector<double> derivative(const Spectrum& f1, double c1, const Spectrum* f2, double c2) {
    const double two_pi = 2 * kPi;
    for (int i = 0; i < n_; ++i) {
      const bool nyq_i = (n_ % 2 == 0) && i == n_ / 2;
      const double k1 = nyq_i ? 0.0 : two_pi * signed_freq(i, n_);
      for (int j = 0; j < nc_; ++j) {
        const bool nyq_j = (n_ % 2 == 0) && j == n_ / 2;
        const double k2 = nyq_j ? 0.0 : two_pi * j;
        const std::size_t idx = static_cast<std::size_t>(i) * nc_ + j;
        std::complex<double> v = f2 ? c1 * k1 * f1[idx] + c2 * k2 * (*f2)[idx]
                                    : (c1 * k1 + c2 * k2) * f1[idx];
        v *= std::complex<double>(0.0, 1.0);
        spec_[idx][0] = v.real();
        spec_[idx][1] = v.imag();
      }
    }
    fftw_execute(inv_);
    const double scale = 1.0 / (double(n_) * n_);
    std::vector<double> out(static_cast<std::size_t>(n_) * n_);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = real_[i] * scale;
    return out;
  }

 private:
  int n_, nc_;
  double* real_;
  fftw_complex* spec_;
  fftw_plan fwd_, inv_;
};

struct Evaluation {
  double energy = 0;
  std::vector<double> g1, g2;
};

class Evaluator {
 public:
  explicit Evaluator(const RelaxProblem& p) : prob_(p), fft_(p.grid_res) {
    const auto& e = p.elasticity.transformed;
    for (int a = 0; a < 16; ++a) {
      const int i = a / 4, j = a % 4;
      esym_[a] = 0.5 * (e[i * 4 + j] + e[j * 4 + i]);
    }
  }

  Evaluation run(const DisplacementField& u, bool want_grad) {
    const int n = prob_.grid_res;
    const std::size_t m = static_cast<std::size_t>(n) * n;
    const double eps = prob_.epsilon;
    const Spectral::Spectrum f1 = fft_.forward(u.u1);
    const Spectral::Spectrum f2 = fft_.forward(u.u2);
    // G_ab = d_b u_a; flattened as G11, G12, G21, G22
    const std::array<std::vector<double>, 4> grad_u = {
        fft_.derivative(f1, 1.0, nullptr, 0.0), fft_.derivative(f1, 0.0, nullptr, 1.0),
        fft_.derivative(f2, 1.0, nullptr, 0.0), fft_.derivative(f2, 0.0, nullptr, 1.0)};

    std::vector<double> density(m);
    std::array<std::vector<double>, 4> stress;
    for (auto& s : stress) s.assign(m, 0.0);
    std::vector<double> mis1(m), mis2(m);
    const MisfitSurface& surf = prob_.surface;
    const double offset = prob_.energy_offset;
    parallel_for(static_cast<std::size_t>(n), [&](std::size_t i) {
      for (int j = 0; j < n; ++j) {
        const std::size_t idx = i * n + j;
        double g[4];
        for (int c = 0; c < 4; ++c) g[c] = grad_u[c][idx];
        double el = 0.0;
        for (int p = 0; p < 4; ++p) {
          double s = 0.0;
          for (int q = 0; q < 4; ++q) s += esym_[p * 4 + q] * g[q];
          stress[p][idx] = s;
          el += g[p] * s;
        }
        const Vec2 y(double(i) / n, double(j) / n);
        const Vec2 st = y + 2.0 * Vec2(u.u1[idx], u.u2[idx]);
        double phi;
        if (want_grad) {
          const GradHessian gh = misfit_grad_hessian(surf, st);
          mis1[idx] = gh.grad(0);
          mis2[idx] = gh.grad(1);
        }
        phi = misfit_value(surf, st);
        density[idx] = eps * el + (phi - offset) / eps;
      }
    });
    Evaluation out;
    out.energy = pairwise_sum(density.data(), m) / double(m);
    if (!want_grad) return out;

    // -2 eps sum_b d_b S_ab + (2/eps) grad Phi
    const Spectral::Spectrum s11 = fft_.forward(stress[0]), s12 = fft_.forward(stress[1]);
    const Spectral::Spectrum s21 = fft_.forward(stress[2]), s22 = fft_.forward(stress[3]);
    const std::vector<double> div1 = fft_.derivative(s11, 1.0, &s12, 1.0);
    const std::vector<double> div2 = fft_.derivative(s21, 1.0, &s22, 1.0);
    out.g1.resize(m);
    out.g2.resize(m);
    for (std::size_t k = 0; k < m; ++k) {
      out.g1[k] = -2.0 * eps * div1[k] + 2.0 / eps * mis1[k];
      out.g2[k] = -2.0 * eps * div2[k] + 2.0 / eps * mis2[k];
    }
    return out;
  }

 private:
  const RelaxProblem& prob_;
  Spectral fft_;
  std::array<double, 16> esym_{};
};

void check_field(const RelaxProblem& prob, const DisplacementField& u) {
  if (u.grid_res != prob.grid_res)
    throw InvalidParameter("displacement grid " + std::to_string(u.grid_res) +
                           " does not match problem grid " + std::to_string(prob.grid_res));
  const std::size_t m = static_cast<std::size_t>(u.grid_res) * u.grid_res;
  if (u.u1.size() != m || u.u2.size() != m) throw InvalidParameter("displacement storage size mismatch");
}

double mean_of(const std::vector<double>& v) { return pairwise_sum(v.data(), v.size()) / double(v.size()); }

double inf_norm(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (double x : a) m = std::max(m, std::abs(x));
  for (double x : b) m = std::max(m, std::abs(x));
  return m;
}

// Flattened vector ops for the optimizer; inner product is the grid mean.
using Vec = std::vector<double>;

Vec flatten(const std::vector<double>& a, const std::vector<double>& b) {
  Vec v(a);
  v.insert(v.end(), b.begin(), b.end());
  return v;
}

double dot(const Vec& a, const Vec& b) {
  Vec prod(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) prod[i] = a[i] * b[i];
  return pairwise_sum(prod.data(), prod.size()) / double(a.size() / 2);
}

void project(Vec& g, std::size_t m, bool mean_zero) {
  if (!mean_zero) return;
  for (int c = 0; c < 2; ++c) {
    const double mu = pairwise_sum(g.data() + c * m, m) / double(m);
    for (std::size_t k = 0; k < m; ++k) g[c * m + k] -= mu;
  }
}

}  // namespace

ElasticityTensor ElasticityTensor::make(double lam, double mu, const Mat2& a) {
  if (!std::isfinite(lam) || !std::isfinite(mu)) throw InvalidParameter("Lame parameters must be finite");
  if (mu <= 0 || lam + mu <= 0) throw InvalidParameter("elasticity must satisfy mu > 0 and lam + mu > 0");
  if (std::abs(a.determinant()) == 0.0) throw InvalidParameter("lattice basis is singular");
  ElasticityTensor t;
  t.lam = lam;
  t.mu = mu;
  auto delta = [](int i, int j) { return i == j ? 1.0 : 0.0; };
  for (int k = 0; k < 2; ++k)
    for (int l = 0; l < 2; ++l)
      for (int m = 0; m < 2; ++m)
        for (int n = 0; n < 2; ++n)
          t.components[index(k, l, m, n)] =
              lam * delta(k, l) * delta(m, n) + mu * (delta(k, n) * delta(l, m) + delta(k, m) * delta(l, n));
  Mat2 r;
  r << 0.0, 1.0, -1.0, 0.0;  // rotation by -pi/2
  const Mat2 b = a.inverse() * r;
  for (int p = 0; p < 2; ++p)
    for (int q = 0; q < 2; ++q)
      for (int rr = 0; rr < 2; ++rr)
        for (int s = 0; s < 2; ++s) {
          double acc = 0.0;
          for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
              for (int k = 0; k < 2; ++k)
                for (int l = 0; l < 2; ++l)
                  acc += a(i, p) * b(q, j) * a(k, rr) * b(s, l) * t.components[index(i, j, k, l)];
          t.transformed[index(p, q, rr, s)] = acc;
        }
  return t;
}

double ElasticityTensor::contract(const Mat2& m) const {
  double s = 0.0;
  for (int k = 0; k < 2; ++k)
    for (int l = 0; l < 2; ++l)
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) s += m(k, l) * components[index(k, l, a, b)] * m(a, b);
  return s;
}

double ElasticityTensor::contract_transformed(const Mat2& g) const {
  double s = 0.0;
  for (int k = 0; k < 2; ++k)
    for (int l = 0; l < 2; ++l)
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) s += g(k, l) * transformed[index(k, l, a, b)] * g(a, b);
  return s;
}

DisplacementField DisplacementField::zero(int res) {
  if (res < 2) throw InvalidParameter("grid_res must be at least 2");
  DisplacementField u;
  u.grid_res = res;
  u.u1.assign(static_cast<std::size_t>(res) * res, 0.0);
  u.u2 = u.u1;
  return u;
}

DisplacementField DisplacementField::constant(int res, const Vec2& c) {
  DisplacementField u = zero(res);
  std::fill(u.u1.begin(), u.u1.end(), c(0));
  std::fill(u.u2.begin(), u.u2.end(), c(1));
  u.mean_zero = false;
  return u;
}

DisplacementField DisplacementField::smooth_random(int res, double amplitude, std::uint64_t seed) {
  DisplacementField u = zero(res);
  if (amplitude == 0.0) return u;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  struct Term {
    int k1, k2;
    double a1, b1, a2, b2;
  };
  std::vector<Term> terms;
  for (int k1 = -3; k1 <= 3; ++k1)
    for (int k2 = -3; k2 <= 3; ++k2) {
      if (k1 == 0 && k2 == 0) continue;
      const double a1 = normal(rng), b1 = normal(rng), a2 = normal(rng), b2 = normal(rng);
      terms.push_back({k1, k2, a1, b1, a2, b2});
    }
  double peak = 0.0;
  for (int i = 0; i < res; ++i)
    for (int j = 0; j < res; ++j) {
      double v1 = 0.0, v2 = 0.0;
      for (const Term& t : terms) {
        const double ph = 2 * kPi * (t.k1 * double(i) / res + t.k2 * double(j) / res);
        const double c = std::cos(ph), s = std::sin(ph);
        v1 += t.a1 * c + t.b1 * s;
        v2 += t.a2 * c + t.b2 * s;
      }
      u.u1[i * res + j] = v1;
      u.u2[i * res + j] = v2;
    }
  const double m1 = mean_of(u.u1), m2 = mean_of(u.u2);
  for (std::size_t k = 0; k < u.size(); ++k) {
    u.u1[k] -= m1;
    u.u2[k] -= m2;
    peak = std::max(peak, std::hypot(u.u1[k], u.u2[k]));
  }
  for (std::size_t k = 0; k < u.size(); ++k) {
    u.u1[k] *= amplitude / peak;
    u.u2[k] *= amplitude / peak;
  }
  return u;
}

Vec2 DisplacementField::mean() const { return Vec2(mean_of(u1), mean_of(u2)); }

double epsilon_from_twist(double theta) { return 2.0 * std::sin(0.5 * theta); }

RelaxProblem RelaxProblem::make(const MisfitSurface& s, const ElasticityTensor& e, double epsilon,
                                int grid_res) {
  if (!(epsilon > 0) || !std::isfinite(epsilon)) throw InvalidParameter("epsilon must be positive");
  if (grid_res < 4) throw InvalidParameter("grid_res must be at least 4");
  RelaxProblem p;
  p.surface = s;
  p.elasticity = e;
  p.epsilon = epsilon;
  p.grid_res = grid_res;
  if (!s.is_gsfe()) {
    const Vec2 well = locate_well(s, s.wells[0]);
    p.energy_offset = misfit_value(s, well);
  }
  return p;
}

double energy(const RelaxProblem& prob, const DisplacementField& u) {
  check_field(prob, u);
  Evaluator ev(prob);
  return ev.run(u, false).energy;
}

DisplacementField gradient(const RelaxProblem& prob, const DisplacementField& u) {
  check_field(prob, u);
  Evaluator ev(prob);
  Evaluation e = ev.run(u, true);
  DisplacementField g;
  g.grid_res = u.grid_res;
  g.u1 = std::move(e.g1);
  g.u2 = std::move(e.g2);
  g.mean_zero = false;
  return g;
}

DisplacementField project_mean_zero(const DisplacementField& g) {
  DisplacementField out = g;
  const double m1 = mean_of(g.u1), m2 = mean_of(g.u2);
  for (std::size_t k = 0; k < g.size(); ++k) {
    out.u1[k] -= m1;
    out.u2[k] -= m2;
  }
  out.mean_zero = true;
  return out;
}

MinimizeResult minimize(const RelaxProblem& prob, const DisplacementField& u0, double tol,
                        const MinimizeOptions& opt) {
  check_field(prob, u0);
  if (!(tol > 0)) throw InvalidParameter("tolerance must be positive");
  if (opt.memory < 1 || opt.max_iter < 0) throw InvalidParameter("invalid optimizer options");
  const std::size_t m = u0.size();
  Evaluator ev(prob);

  DisplacementField work = u0;
  auto evaluate = [&](const Vec& x, Vec& g) {
    std::copy(x.begin(), x.begin() + m, work.u1.begin());
    std::copy(x.begin() + m, x.end(), work.u2.begin());
    Evaluation e = ev.run(work, true);
    g = flatten(e.g1, e.g2);
    project(g, m, u0.mean_zero);
    return e.energy;
  };

  Vec x = flatten(u0.u1, u0.u2);
  Vec g;
  double f = evaluate(x, g);
  MinimizeResult res;
  MinimizeDiagnostics& diag = res.diagnostics;
  diag.trace.push_back({0, f, inf_norm(g, {})});

  std::deque<Vec> s_hist, y_hist;
  std::deque<double> rho_hist;
  int it = 0;
  double gnorm = diag.trace.back().grad_inf;
  bool fresh_restart = false;
  while (gnorm >= tol && it < opt.max_iter) {
    // two-loop recursion
    Vec d = g;
    std::vector<double> alpha(s_hist.size());
    for (int k = int(s_hist.size()) - 1; k >= 0; --k) {
      alpha[k] = rho_hist[k] * dot(s_hist[k], d);
      for (std::size_t i = 0; i < d.size(); ++i) d[i] -= alpha[k] * y_hist[k][i];
    }
    double step0 = 1.0;
    if (!s_hist.empty()) {
      const double gamma = dot(s_hist.back(), y_hist.back()) / dot(y_hist.back(), y_hist.back());
      for (double& v : d) v *= gamma;
    } else {
      const double dn = inf_norm(d, {});
      step0 = dn > 0 ? opt.first_step / dn : 1.0;
    }
    for (std::size_t k = 0; k < s_hist.size(); ++k) {
      const double beta = rho_hist[k] * dot(y_hist[k], d);
      for (std::size_t i = 0; i < d.size(); ++i) d[i] += s_hist[k][i] * (alpha[k] - beta);
    }
    for (double& v : d) v = -v;
    project(d, m, u0.mean_zero);
    double slope = dot(g, d);
    if (!(slope < 0)) {
      d = g;
      for (double& v : d) v = -v;
      slope = dot(g, d);
      s_hist.clear();
      y_hist.clear();
      rho_hist.clear();
      const double dn = inf_norm(d, {});
      step0 = dn > 0 ? opt.first_step / dn : 1.0;
    }

    double step = step0;
    Vec x_new(x.size()), g_new;
    double f_new = f;
    bool accepted = false;
    for (int bt = 0; bt < 60; ++bt) {
      for (std::size_t i = 0; i < x.size(); ++i) x_new[i] = x[i] + step * d[i];
      f_new = evaluate(x_new, g_new);
      if (std::isfinite(f_new) && f_new <= f + opt.armijo * step * slope) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      if (!s_hist.empty() && !fresh_restart) {
        s_hist.clear();
        y_hist.clear();
        rho_hist.clear();
        fresh_restart = true;
        continue;
      }
      diag.message = "line search failed to decrease the energy";
      break;
    }
    fresh_restart = false;
    Vec s(x.size()), y(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
      s[i] = x_new[i] - x[i];
      y[i] = g_new[i] - g[i];
    }
    const double sy = dot(s, y);
    if (sy > 1e-12 * std::sqrt(dot(s, s) * dot(y, y))) {
      s_hist.push_back(std::move(s));
      y_hist.push_back(std::move(y));
      rho_hist.push_back(1.0 / sy);
      if (int(s_hist.size()) > opt.memory) {
        s_hist.pop_front();
        y_hist.pop_front();
        rho_hist.pop_front();
      }
    }
    x.swap(x_new);
    g.swap(g_new);
    f = f_new;
    ++it;
    gnorm = inf_norm(g, {});
    diag.trace.push_back({it, f, gnorm});
  }

  diag.iterations = it;
  diag.final_energy = f;
  diag.final_grad_inf = gnorm;
  diag.converged = gnorm < tol;
  if (diag.converged) diag.message = "converged";
  else if (diag.message.empty()) diag.message = "iteration limit reached";
  res.u = u0;
  std::copy(x.begin(), x.begin() + m, res.u.u1.begin());
  std::copy(x.begin() + m, x.end(), res.u.u2.begin());
  return res;
}

std::vector<Vec2> stacking_field(const DisplacementField& u) {
  const int n = u.grid_res;
  std::vector<Vec2> s(u.size());
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      Vec2 v = Vec2(double(i) / n, double(j) / n) + 2.0 * u.at(i, j);
      v(0) -= std::floor(v(0));
      v(1) -= std::floor(v(1));
      if (v(0) >= 1.0) v(0) = 0.0;
      if (v(1) >= 1.0) v(1) = 0.0;
      s[static_cast<std::size_t>(i) * n + j] = v;
    }
  return s;
}

double torus_distance(const Vec2& a, const Vec2& b) {
  Vec2 d = a - b;
  d(0) -= std::round(d(0));
  d(1) -= std::round(d(1));
  return d.norm();
}

double well_occupancy(const std::vector<Vec2>& s, double delta, const std::array<Vec2, 2>& wells) {
  if (!(delta > 0) || delta >= 1.0 / 6.0) throw InvalidParameter("delta must lie in (0, 1/6)");
  if (s.empty()) throw InvalidParameter("empty stacking field");
  std::size_t count = 0;
  for (const Vec2& p : s)
    if (torus_distance(p, wells[0]) < delta || torus_distance(p, wells[1]) < delta) ++count;
  return double(count) / double(s.size());
}

TrigInterpolant::TrigInterpolant(const DisplacementField& u, double drop_tol) {
  const int n = u.grid_res;
  const std::size_t m = u.size();
  fftw_complex* in = fftw_alloc_complex(m);
  fftw_complex* out1 = fftw_alloc_complex(m);
  fftw_complex* out2 = fftw_alloc_complex(m);
  {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_plan p1 = fftw_plan_dft_2d(n, n, in, out1, FFTW_FORWARD, FFTW_ESTIMATE);
    for (std::size_t k = 0; k < m; ++k) {
      in[k][0] = u.u1[k];
      in[k][1] = 0.0;
    }
    fftw_execute(p1);
    for (std::size_t k = 0; k < m; ++k) in[k][0] = u.u2[k];
    fftw_execute_dft(p1, in, out2);
    fftw_destroy_plan(p1);
  }
  double peak = 0.0;
  for (std::size_t k = 0; k < m; ++k)
    peak = std::max({peak, std::hypot(out1[k][0], out1[k][1]), std::hypot(out2[k][0], out2[k][1])});
  const double inv = 1.0 / double(m);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const std::size_t k = static_cast<std::size_t>(i) * n + j;
      const std::complex<double> c1(out1[k][0], out1[k][1]), c2(out2[k][0], out2[k][1]);
      if (std::max(std::abs(c1), std::abs(c2)) <= drop_tol * peak) continue;
      modes_.push_back({signed_freq(i, n), signed_freq(j, n), c1 * inv, c2 * inv});
    }
  fftw_free(in);
  fftw_free(out1);
  fftw_free(out2);
}

Vec2 TrigInterpolant::operator()(const Vec2& y) const {
  double v1 = 0.0, v2 = 0.0;
  for (const Mode& md : modes_) {
    const double ph = 2 * kPi * (md.k1 * y(0) + md.k2 * y(1));
    const std::complex<double> e(std::cos(ph), std::sin(ph));
    v1 += (md.c1 * e).real();
    v2 += (md.c2 * e).real();
  }
  return Vec2(v1, v2);
}

std::string write_checkpoint(const DisplacementField& u) {
  std::string out = "u " + std::to_string(u.grid_res) + "\n";
  char buf[96];
  for (int i = 0; i < u.grid_res; ++i)
    for (int j = 0; j < u.grid_res; ++j) {
      const Vec2 v = u.at(i, j);
      std::snprintf(buf, sizeof buf, "%d,%d,%.17g,%.17g\n", i, j, v(0), v(1));
      out += buf;
    }
  return out;
}

DisplacementField read_checkpoint(const std::string& text) {
  std::istringstream in(text);
  std::string tag;
  int res = 0;
  if (!(in >> tag >> res) || tag != "u" || res < 2) throw InvalidParameter("malformed checkpoint header");
  DisplacementField u = DisplacementField::zero(res);
  std::string line;
  std::getline(in, line);
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    int i = 0, j = 0;
    double a = 0, b = 0;
    if (std::sscanf(line.c_str(), "%d,%d,%lf,%lf", &i, &j, &a, &b) != 4 || i < 0 || j < 0 || i >= res ||
        j >= res)
      throw InvalidParameter("malformed checkpoint row: " + line);
    u.u1[static_cast<std::size_t>(i) * res + j] = a;
    u.u2[static_cast<std::size_t>(i) * res + j] = b;
    ++rows;
  }
  if (rows != u.size()) throw InvalidParameter("checkpoint row count mismatch");
  return u;
}

}  // namespace twistab
