#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "twistdisc/discrimination.hpp"
#include "twistdisc/kernels.hpp"
#include "twistdisc/rng.hpp"

namespace twistdisc {

namespace {

void check_constraints(const std::vector<ComplexMatrix>& ms, std::size_t dim) {
  if (ms.empty()) throw std::invalid_argument("minimize: empty constraint list");
  if (dim < 2) throw std::invalid_argument("minimize: dimension must be at least 2");
  for (const auto& m : ms) {
    if (m.rows != dim || m.cols != dim)
      throw std::invalid_argument("minimize: constraint dimension mismatch");
  }
}

// Scratch space for f(α) = Σ_k |<α|M_k α>|² and its derivatives.
struct Workspace {
  const std::vector<ComplexMatrix>* ms = nullptr;
  std::size_t d = 0;
  std::vector<std::vector<cd>> u;  //  M_k α
  std::vector<std::vector<cd>> v;  //  M_k† α
  std::vector<cd> g;               //  <α|M_k α>

  Workspace(const std::vector<ComplexMatrix>& cs, std::size_t dim)
      : ms(&cs), d(dim), u(cs.size(), std::vector<cd>(dim)),
        v(cs.size(), std::vector<cd>(dim)), g(cs.size()) {}

  double eval(const std::vector<cd>& a, bool with_adjoint) {
    double f = 0.0;
    for (std::size_t k = 0; k < ms->size(); ++k) {
      const ComplexMatrix& m = (*ms)[k];
      kernels::matvec(d, d, m.data(), a.data(), u[k].data());
      if (with_adjoint) kernels::matvec_adj(d, d, m.data(), a.data(), v[k].data());
      g[k] = kernels::dotc(d, a.data(), u[k].data());
      f += std::norm(g[k]);
    }
    return f;
  }

  // ∂f/∂conj(α)_i = Σ_k conj(g_k) u_k[i] + g_k v_k[i]; requires eval(, true).
  void wirtinger(std::vector<cd>& out) const {
    out.assign(d, cd{0.0, 0.0});
    for (std::size_t k = 0; k < ms->size(); ++k) {
      const cd gc = std::conj(g[k]);
      for (std::size_t i = 0; i < d; ++i) out[i] += gc * u[k][i] + g[k] * v[k][i];
    }
  }
};

void normalize_inplace(std::vector<cd>& a) {
  double n2 = 0.0;
  for (const cd& x : a) n2 += std::norm(x);
  const double inv = 1.0 / std::sqrt(n2);
  for (cd& x : a) x *= inv;
}

double objective_only(Workspace& w, const std::vector<cd>& a) { return w.eval(a, false); }

// Projected gradient descent on the unit sphere with backtracking line search.
double gradient_phase(Workspace& w, std::vector<cd>& a, int max_iters) {
  double f = w.eval(a, true);
  double step = 0.25;
  std::vector<cd> grad, trial;
  for (int iter = 0; iter < max_iters; ++iter) {
    w.wirtinger(grad);
    // project out the radial component (f is scale-sensitive off the sphere)
    cd radial{0.0, 0.0};
    for (std::size_t i = 0; i < w.d; ++i) radial += std::conj(a[i]) * grad[i];
    const double rr = radial.real();
    double gn2 = 0.0;
    for (std::size_t i = 0; i < w.d; ++i) {
      grad[i] -= rr * a[i];
      gn2 += std::norm(grad[i]);
    }
    if (f < 1e-22 || gn2 < 1e-26) break;
    bool improved = false;
    for (int attempt = 0; attempt < 48; ++attempt) {
      trial = a;
      for (std::size_t i = 0; i < w.d; ++i) trial[i] -= step * grad[i];
      normalize_inplace(trial);
      const double ft = objective_only(w, trial);
      if (ft <= f - 1e-4 * step * gn2) {
        a = trial;
        f = w.eval(a, true);
        step = std::min(step * 1.5, 64.0);
        improved = true;
        break;
      }
      step *= 0.5;
      if (step < 1e-20) break;
    }
    if (!improved) break;
  }
  return f;
}

// Solve (A + λI) x = b for symmetric positive semidefinite A (row-major n×n),
// in-place Cholesky; returns false when a pivot collapses.
bool ridge_cholesky_solve(std::vector<double> a, std::vector<double> b, std::size_t n,
                          double lambda, std::vector<double>& x) {
  for (std::size_t i = 0; i < n; ++i) a[i * n + i] += lambda;
  for (std::size_t c = 0; c < n; ++c) {
    double diag = a[c * n + c];
    for (std::size_t k = 0; k < c; ++k) diag -= a[c * n + k] * a[c * n + k];
    if (diag <= 0.0) return false;
    const double root = std::sqrt(diag);
    a[c * n + c] = root;
    for (std::size_t r = c + 1; r < n; ++r) {
      double s = a[r * n + c];
      for (std::size_t k = 0; k < c; ++k) s -= a[r * n + k] * a[c * n + k];
      a[r * n + c] = s / root;
    }
  }
  // forward then backward substitution
  for (std::size_t r = 0; r < n; ++r) {
    double s = b[r];
    for (std::size_t k = 0; k < r; ++k) s -= a[r * n + k] * b[k];
    b[r] = s / a[r * n + r];
  }
  x.assign(n, 0.0);
  for (std::size_t r = n; r-- > 0;) {
    double s = b[r];
    for (std::size_t k = r + 1; k < n; ++k) s -= a[k * n + r] * x[k];
    x[r] = s / a[r * n + r];
  }
  return true;
}

// Levenberg-Marquardt on the residual vector (Re g_1, Im g_1, ..., Re g_K, Im g_K)
// over the 2d real coordinates of α, renormalizing after every step.
double polish_phase(Workspace& w, std::vector<cd>& a, int max_iters) {
  const std::size_t d = w.d;
  const std::size_t n = 2 * d;
  const std::size_t kcount = w.ms->size();
  std::vector<double> jac(2 * kcount * n);
  std::vector<double> normal(n * n);
  std::vector<double> rhs(n);
  std::vector<double> delta;
  std::vector<cd> trial(d);
  double lambda = 1e-10;
  double f = w.eval(a, true);
  for (int iter = 0; iter < max_iters; ++iter) {
    if (f < 1e-30) break;
    for (std::size_t k = 0; k < kcount; ++k) {
      for (std::size_t j = 0; j < d; ++j) {
        const cd uj = w.u[k][j];
        const cd vj = w.v[k][j];
        // ∂g/∂x_j = u_j + conj(v_j),  ∂g/∂y_j = i (conj(v_j) - u_j)
        jac[(2 * k) * n + j] = uj.real() + vj.real();
        jac[(2 * k) * n + d + j] = uj.imag() + vj.imag();
        jac[(2 * k + 1) * n + j] = uj.imag() - vj.imag();
        jac[(2 * k + 1) * n + d + j] = vj.real() - uj.real();
      }
    }
    std::fill(normal.begin(), normal.end(), 0.0);
    std::fill(rhs.begin(), rhs.end(), 0.0);
    for (std::size_t row = 0; row < 2 * kcount; ++row) {
      const double res =
          (row % 2 == 0) ? w.g[row / 2].real() : w.g[row / 2].imag();
      const double* jr = jac.data() + row * n;
      for (std::size_t i = 0; i < n; ++i) {
        rhs[i] -= jr[i] * res;
        for (std::size_t j = i; j < n; ++j) normal[i * n + j] += jr[i] * jr[j];
      }
    }
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < i; ++j) normal[i * n + j] = normal[j * n + i];
    bool stepped = false;
    for (int attempt = 0; attempt < 12 && !stepped; ++attempt) {
      if (ridge_cholesky_solve(normal, rhs, n, lambda, delta)) {
        for (std::size_t j = 0; j < d; ++j) trial[j] = a[j] + cd{delta[j], delta[d + j]};
        normalize_inplace(trial);
        const double ft = objective_only(w, trial);
        if (ft < f) {
          a = trial;
          f = w.eval(a, true);
          lambda = std::max(lambda / 3.0, 1e-14);
          stepped = true;
          break;
        }
      }
      lambda *= 10.0;
      if (lambda > 1e10) break;
    }
    if (!stepped) break;
  }
  return f;
}

}  // namespace

double objective_value(const std::vector<ComplexMatrix>& constraints, const PureState& alpha) {
  check_constraints(constraints, alpha.dim());
  Workspace w(constraints, alpha.dim());
  return w.eval(alpha.amplitudes, false);
}

std::vector<double> objective_gradient(const std::vector<ComplexMatrix>& constraints,
                                       const PureState& alpha) {
  check_constraints(constraints, alpha.dim());
  Workspace w(constraints, alpha.dim());
  w.eval(alpha.amplitudes, true);
  std::vector<cd> grad;
  w.wirtinger(grad);
  std::vector<double> out(2 * alpha.dim());
  for (std::size_t i = 0; i < alpha.dim(); ++i) {
    out[i] = 2.0 * grad[i].real();
    out[alpha.dim() + i] = 2.0 * grad[i].imag();
  }
  return out;
}

NumericResult numeric_minimize(const std::vector<ComplexMatrix>& constraints, std::size_t dim,
                               std::uint64_t seed, const NumericOptions& options) {
  check_constraints(constraints, dim);
  if (options.restarts < 1) throw std::invalid_argument("minimize: need at least one restart");
  if (!(options.accept > 0.0)) throw std::invalid_argument("minimize: accept threshold must be positive");
  Workspace w(constraints, dim);
  NumericResult result;
  result.best_objective = std::numeric_limits<double>::infinity();
  std::vector<cd> best;
  for (int restart = 0; restart < options.restarts; ++restart) {
    std::mt19937_64 rng(derive_seed(seed, static_cast<std::uint64_t>(restart)));
    std::vector<cd> a = random_unit_state(dim, rng).amplitudes;
    double f = gradient_phase(w, a, options.max_gradient_iters);
    if (f < 1e-6) f = polish_phase(w, a, options.max_polish_iters);
    if (f < result.best_objective) {
      result.best_objective = f;
      best = a;
    }
    if (f < options.accept) {
      result.success = true;
      result.restarts_used = restart + 1;
      result.objective = f;
      result.alpha = make_pure_state(std::move(best), 1e-9);
      return result;
    }
  }
  result.success = false;
  result.restarts_used = options.restarts;
  result.objective = result.best_objective;
  if (!best.empty()) result.alpha = make_pure_state(std::move(best), 1e-9);
  return result;
}

}  // namespace twistdisc
