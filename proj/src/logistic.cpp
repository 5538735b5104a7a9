#include "coexist/logistic.hpp"

#include <algorithm>
#include <cmath>

#include "tridiag.hpp"

namespace coexist {

namespace {

std::vector<double> logistic_residual(double eps, const std::vector<double>& m,
                                      const std::vector<double>& u, double h) {
  const int n = static_cast<int>(u.size());
  const double c = eps / (h * h);
  std::vector<double> r(n);
  r[0] = c * 2.0 * (u[1] - u[0]) + u[0] * (m[0] - u[0]);
  for (int i = 1; i < n - 1; ++i)
    r[i] = c * (u[i - 1] - 2.0 * u[i] + u[i + 1]) + u[i] * (m[i] - u[i]);
  r[n - 1] = c * 2.0 * (u[n - 2] - u[n - 1]) + u[n - 1] * (m[n - 1] - u[n - 1]);
  return r;
}

double sup_norm(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s = std::max(s, std::abs(x));
  return s;
}

// Implicit pseudo-time marching: (I/dt - eps*Lap - diag(m - u)) u_new = u/dt.
// The lagged logistic coefficient keeps the matrix an M-matrix for small dt,
// so positivity is preserved.
void pseudo_time_march(double eps, const std::vector<double>& m,
                       std::vector<double>& u, double h, int steps) {
  const int n = static_cast<int>(u.size());
  double dt = 0.1;
  for (int s = 0; s < steps; ++s) {
    auto L = detail::neumann_laplacian_rows(eps, h, n);
    std::vector<double> diag(n), rhs(n);
    for (int i = 0; i < n; ++i) {
      diag[i] = 1.0 / dt - L.diag[i] - (m[i] - u[i]);
      rhs[i] = u[i] / dt;
    }
    std::vector<double> sub(n), sup(n);
    for (int i = 0; i < n; ++i) {
      sub[i] = -L.sub[i];
      sup[i] = -L.sup[i];
    }
    auto next = detail::solve_tridiag(sub, diag, sup, rhs);
    bool ok = true;
    for (double x : next)
      if (!(x > 0.0) || !std::isfinite(x)) ok = false;
    if (!ok) {
      dt *= 0.5;
      continue;
    }
    u = next;
    dt = std::min(dt * 1.2, 10.0);
  }
}

LogisticSolution solve_on_grid(double eps, const std::vector<double>& m,
                               const GridPtr& g) {
  const int n = g->n;
  const double h = g->h;
  const double m_scale = 1.0 + sup_norm(m);
  const double tol = 1e-12 * m_scale;

  double mean_m = 0.0;
  {
    double tot = 0.0;
    for (int i = 0; i < n; ++i) {
      const double w = g->weight(i);
      mean_m += w * m[i];
      tot += w;
    }
    mean_m /= tot;
  }
  std::vector<double> u(n, std::max(mean_m, 0.1));

  auto res = logistic_residual(eps, m, u, h);
  double rn = sup_norm(res);
  int stalls = 0;
  for (int it = 0; it < 200 && rn > tol; ++it) {
    // Jacobian: eps*Lap + diag(m - 2u)
    auto L = detail::neumann_laplacian_rows(eps, h, n);
    std::vector<double> diag(n);
    for (int i = 0; i < n; ++i) diag[i] = L.diag[i] + (m[i] - 2.0 * u[i]);
    std::vector<double> rhs(n);
    for (int i = 0; i < n; ++i) rhs[i] = -res[i];
    std::vector<double> step;
    try {
      step = detail::solve_tridiag(L.sub, diag, L.sup, rhs);
    } catch (const SolveFailure&) {
      step.assign(n, 0.0);
    }

    double lambda = 1.0;
    bool accepted = false;
    for (int half = 0; half < 30; ++half) {
      std::vector<double> trial(n);
      bool positive = true;
      for (int i = 0; i < n; ++i) {
        trial[i] = u[i] + lambda * step[i];
        if (!(trial[i] > 0.0)) positive = false;
      }
      if (positive) {
        auto tr = logistic_residual(eps, m, trial, h);
        const double trn = sup_norm(tr);
        if (trn < rn) {
          u = std::move(trial);
          res = std::move(tr);
          rn = trn;
          accepted = true;
          break;
        }
      }
      lambda *= 0.5;
    }
    if (!accepted) {
      if (++stalls > 3)
        throw SolveFailure("solve_logistic: Newton stalled after marching fallback");
      pseudo_time_march(eps, m, u, h, 200);
      res = logistic_residual(eps, m, u, h);
      rn = sup_norm(res);
    }
  }
  if (rn > 1e-10 * m_scale)
    throw SolveFailure("solve_logistic: residual did not converge");
  for (double x : u)
    if (!(x > 0.0)) throw SolveFailure("solve_logistic: nonpositive solution");

  LogisticSolution out;
  out.utilde = ScalarField(g, u);
  out.u_min = out.utilde.min();
  out.u_max = out.utilde.max();
  out.residual = rn;
  return out;
}

}  // namespace

LogisticSolution solve_logistic(double eps, const ScalarField& m, const GridPtr& g) {
  if (!(eps > 0.0)) throw InvalidInput("solve_logistic: eps must be positive");
  return solve_on_grid(eps, m.values, g);
}

LogisticSolution solve_logistic_on(double eps, const ScalarField& m, double y,
                                   Side side) {
  const GridPtr& g = m.grid;
  if (side == Side::Left) {
    GridPtr sub = restrict_grid(g, y);
    std::vector<double> mv(m.values.begin(), m.values.begin() + sub->n);
    return solve_on_grid(eps, mv, sub);
  }
  // Right: nodes from the snapped y to L, re-rooted at 0.
  int j = nearest_node(*g, y);
  if (j > g->n - 3) j = g->n - 3;
  if (j < 0 || !(y < g->length))
    throw InvalidGrid("solve_logistic_on: y outside (0, L)");
  auto sub = std::make_shared<Grid>();
  sub->n = g->n - j;
  sub->h = g->h;
  sub->length = (sub->n - 1) * g->h;
  sub->nodes.resize(sub->n);
  for (int i = 0; i < sub->n; ++i) sub->nodes[i] = i * g->h;
  std::vector<double> mv(m.values.begin() + j, m.values.end());
  return solve_on_grid(eps, mv, sub);
}

double endpoint_trace(double eps, const ScalarField& m, double y, Side side) {
  LogisticSolution s = solve_logistic_on(eps, m, y, side);
  return side == Side::Left ? s.utilde.values.back() : s.utilde.values.front();
}

}  // namespace coexist
