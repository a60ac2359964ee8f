#include "ldg/relax.hpp"

#include <cmath>
#include <deque>

#include "stencil.hpp"

namespace ldg {

const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Converged: return "converged";
    case SolveStatus::IterationCap: return "iteration-cap";
    case SolveStatus::RoundoffLimited: return "roundoff-limited";
  }
  return "?";
}

double initial_step(const Field& f) {
  const MaterialParams& p = f.params;
  const double rho2 = 4.0 * p.r_star * p.r_star;  // |Q| <= 2 r*
  const double hess = p.a2 + 3.0 * p.a4 * rho2 + 5.0 * p.a6 * rho2 * rho2 + 4.0 * p.a6p * rho2 * rho2;
  const double lambda_bulk = hess / (f.eps * f.eps);
  const double h = f.domain.h;
  return 1.0 / (4.0 * f.domain.dim / (h * h) + lambda_bulk);
}

namespace {

struct Work {
  const detail::Stencil& st;
  const Field& f;
  Reduction mode;
  double vol;

  double eval(const std::vector<double>& x, std::vector<double>& g) const {
    return detail::energy_and_gradient(st, x.data(), f.eps, f.params, g.data(), mode);
  }
  double residual(const std::vector<double>& g) const {
    const double scale = f.eps * f.eps / vol;
    double worst = 0;
    for (std::size_t c = 0; c < st.size(); ++c) {
      if (!st.interior[c]) continue;
      double s = 0;
      for (int k = 0; k < 5; ++k) s += g[5 * c + k] * g[5 * c + k];
      worst = std::max(worst, s);
    }
    return std::sqrt(worst) * scale;
  }
  double dot(const std::vector<double>& a, const std::vector<double>& b) const {
    return parallel_dot(a, b, mode);
  }
};

RelaxResult finish(const Field& in, const detail::Stencil& st, const std::vector<double>& x) {
  RelaxResult r;
  r.field = in;
  for (std::size_t c = 0; c < st.size(); ++c) {
    if (!st.interior[c]) continue;
    QTensor& q = r.field.values[st.grid_index[c]];
    for (int k = 0; k < 5; ++k) q.c[k] = x[5 * c + k];
  }
  return r;
}

}  // namespace

RelaxResult relax(const Field& f, const SolveConfig& cfg) {
  if (!(cfg.grad_tol > 0)) throw Error(ErrorKind::InvalidParameter, "gradient tolerance must be positive");
  const detail::Stencil st = detail::build_stencil(f.domain);
  const Work w{st, f, cfg.reduction, f.domain.cell_volume()};
  const std::size_t n = 5 * st.size();

  std::vector<double> x(n), g(n), xn(n), gn(n), d(n);
  for (std::size_t c = 0; c < st.size(); ++c)
    for (int k = 0; k < 5; ++k) x[5 * c + k] = f.values[st.grid_index[c]].c[k];

  const double tau = initial_step(f) / w.vol;  // raw-gradient units
  const bool use_lbfgs = cfg.method == Method::Lbfgs;
  std::deque<std::vector<double>> S, Y;
  std::deque<double> RHO;
  std::vector<double> alpha_buf(cfg.lbfgs_memory);

  double fx = w.eval(x, g);
  double res = w.residual(g);
  std::vector<double> history;
  if (cfg.record_history) history.push_back(fx);

  auto make_result = [&](SolveStatus status, std::size_t it) {
    RelaxResult r = finish(f, st, x);
    r.status = status;
    r.iterations = it;
    r.energy = fx;
    r.residual = res;
    r.history = history;
    return r;
  };

  for (std::size_t it = 0; it < cfg.max_iters; ++it) {
    if (res <= cfg.grad_tol) return make_result(SolveStatus::Converged, it);

    // Search direction.
    for (std::size_t i = 0; i < n; ++i) d[i] = -g[i];
    if (use_lbfgs && !S.empty()) {
      const std::size_t m = S.size();
      for (std::size_t j = m; j-- > 0;) {
        alpha_buf[j] = RHO[j] * w.dot(S[j], d);
        for (std::size_t i = 0; i < n; ++i) d[i] -= alpha_buf[j] * Y[j][i];
      }
      const double gamma = w.dot(S.back(), Y.back()) / w.dot(Y.back(), Y.back());
      for (double& v : d) v *= gamma;
      for (std::size_t j = 0; j < m; ++j) {
        const double beta = RHO[j] * w.dot(Y[j], d);
        for (std::size_t i = 0; i < n; ++i) d[i] += (alpha_buf[j] - beta) * S[j][i];
      }
    } else {
      for (double& v : d) v *= tau;
    }
    double gd = w.dot(g, d);
    if (!(gd < 0)) {
      S.clear();
      Y.clear();
      RHO.clear();
      for (std::size_t i = 0; i < n; ++i) d[i] = -tau * g[i];
      gd = w.dot(g, d);
    }

    // Armijo backtracking (or a single fixed step).
    double alpha = 1.0, fn = 0;
    for (;;) {
      for (std::size_t i = 0; i < n; ++i) xn[i] = x[i] + alpha * d[i];
      fn = w.eval(xn, gn);
      if (cfg.step == StepPolicy::Fixed && !use_lbfgs) {
        if (fn <= fx) break;
        throw StagnationError("fixed step increased the energy", make_result(SolveStatus::IterationCap, it));
      }
      if (fn <= fx + 1e-4 * alpha * gd) break;
      alpha *= 0.5;
      if (alpha < 1e-14) {
        if (std::abs(gd) <= 1e-12 * (1.0 + std::abs(fx))) return make_result(SolveStatus::RoundoffLimited, it);
        throw StagnationError("line search collapsed", make_result(SolveStatus::IterationCap, it));
      }
    }

    if (use_lbfgs) {
      std::vector<double> s(n), y(n);
      for (std::size_t i = 0; i < n; ++i) {
        s[i] = xn[i] - x[i];
        y[i] = gn[i] - g[i];
      }
      const double sy = w.dot(s, y);
      if (sy > 1e-300) {
        if (static_cast<int>(S.size()) == cfg.lbfgs_memory) {
          S.pop_front();
          Y.pop_front();
          RHO.pop_front();
        }
        S.push_back(std::move(s));
        Y.push_back(std::move(y));
        RHO.push_back(1.0 / sy);
      }
    }
    std::swap(x, xn);
    std::swap(g, gn);
    fx = fn;
    res = w.residual(g);
    if (cfg.record_history) history.push_back(fx);
  }
  return make_result(res <= cfg.grad_tol ? SolveStatus::Converged : SolveStatus::IterationCap,
                     cfg.max_iters);
}

}  // namespace ldg
