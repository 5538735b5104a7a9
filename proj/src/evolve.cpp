#include "coexist/evolve.hpp"

#include <algorithm>
#include <cmath>

#include "tridiag.hpp"

namespace coexist {

namespace {

// Ghost-reflected second difference of the product d(u)v, divided by h^2.
// Its kernel under the transform w = d(u)v is exactly the discrete
// transformed equation, which makes the time-marcher and the steady Newton
// solver mutual oracles at the fixed point.
double product_lap(const std::vector<double>& d, const std::vector<double>& v,
                   int i, int n, double inv_h2) {
  auto prod = [&](int j) { return d[j] * v[j]; };
  if (i == 0) return 2.0 * (prod(1) - prod(0)) * inv_h2;
  if (i == n - 1) return 2.0 * (prod(n - 2) - prod(n - 1)) * inv_h2;
  return (prod(i - 1) - 2.0 * prod(i) + prod(i + 1)) * inv_h2;
}

// Largest slope of the explicit reaction terms; bounds the stable dt.
double reaction_rate_bound(const ModelParams& p, const ScalarField& m,
                           const ScalarField& u, const ScalarField& v) {
  double s = 1e-12;
  for (int i = 0; i < u.size(); ++i) {
    const double F = eval_response(p.response, u[i]);
    const double Fp = eval_response_prime(p.response, u[i]);
    s = std::max(s, std::abs(p.alpha * F - p.theta));
    s = std::max(s, std::abs(m[i]) + 2.0 * u[i] + v[i] * Fp);
  }
  return s;
}

}  // namespace

double steady_residual(const ModelParams& p, const ScalarField& u,
                       const ScalarField& v) {
  const Grid& g = *u.grid;
  const int n = g.n;
  const double inv_h2 = 1.0 / (g.h * g.h);
  const ScalarField m = resource_field(p.resource, u.grid);
  std::vector<double> d(n);
  for (int i = 0; i < n; ++i) d[i] = eval_dispersal(p.dispersal, p.k, u[i]);
  double gap = 0.0;
  for (int i = 0; i < n; ++i) {
    double lap_u;
    if (i == 0)
      lap_u = 2.0 * (u[1] - u[0]) * inv_h2;
    else if (i == n - 1)
      lap_u = 2.0 * (u[n - 2] - u[n - 1]) * inv_h2;
    else
      lap_u = (u[i - 1] - 2.0 * u[i] + u[i + 1]) * inv_h2;
    const double F = eval_response(p.response, u[i]);
    const double ru = p.eps * lap_u + u[i] * (m[i] - u[i]) - v[i] * F;
    const double rv = p.mu * product_lap(d, v.values, i, n, inv_h2) +
                      p.alpha * v[i] * F - p.theta * v[i];
    gap = std::max({gap, std::abs(ru), std::abs(rv)});
  }
  return gap;
}

std::pair<ScalarField, ScalarField> step_original(const ScalarField& u,
                                                  const ScalarField& v,
                                                  const ModelParams& p, double dt,
                                                  long* clipped) {
  if (!(dt > 0.0)) throw InvalidInput("step_original: dt must be positive");
  const Grid& g = *u.grid;
  const int n = g.n;
  const ScalarField m = resource_field(p.resource, u.grid);

  const double rate = reaction_rate_bound(p, m, u, v);
  const double dt_max = 0.9 / rate;
  if (dt > dt_max)
    throw StepRejected("step_original: dt violates the explicit-part estimate",
                       0.5 * dt_max);

  std::vector<double> d(n);
  for (int i = 0; i < n; ++i) d[i] = eval_dispersal(p.dispersal, p.k, u[i]);

  // Prey: (I - dt eps Lap) u+ = u + dt [u(m-u) - v F(u)].
  auto Lu = detail::neumann_laplacian_rows(p.eps, g.h, n);
  std::vector<double> sub(n), diag(n), sup(n), rhs(n);
  for (int i = 0; i < n; ++i) {
    sub[i] = -dt * Lu.sub[i];
    sup[i] = -dt * Lu.sup[i];
    diag[i] = 1.0 - dt * Lu.diag[i];
    const double F = eval_response(p.response, u[i]);
    rhs[i] = u[i] + dt * (u[i] * (m[i] - u[i]) - v[i] * F);
  }
  std::vector<double> un = detail::solve_tridiag(sub, diag, sup, rhs);

  // Predator: (I - dt mu Lap diag(d)) v+ = v + dt (alpha F - theta) v,
  // d frozen at the current u.
  auto Lw = detail::neumann_laplacian_rows(p.mu, g.h, n);
  for (int i = 0; i < n; ++i) {
    const int prev = std::max(i - 1, 0), next = std::min(i + 1, n - 1);
    sub[i] = -dt * Lw.sub[i] * d[prev];
    sup[i] = -dt * Lw.sup[i] * d[next];
    diag[i] = 1.0 - dt * Lw.diag[i] * d[i];
    const double F = eval_response(p.response, u[i]);
    rhs[i] = v[i] + dt * (p.alpha * F - p.theta) * v[i];
  }
  std::vector<double> vn = detail::solve_tridiag(sub, diag, sup, rhs);

  long nclip = 0;
  for (int i = 0; i < n; ++i) {
    if (un[i] < 0.0) {
      un[i] = 0.0;
      ++nclip;
    }
    if (vn[i] < 0.0) {
      vn[i] = 0.0;
      ++nclip;
    }
  }
  if (clipped) *clipped += nclip;
  return {ScalarField(u.grid, std::move(un)), ScalarField(u.grid, std::move(vn))};
}

Trajectory run_to_steady(const ModelParams& p, const GridPtr& g,
                         const ScalarField& u0, const ScalarField& v0, double dt,
                         double tol, double t_max) {
  if (!(tol > 0.0)) throw InvalidInput("run_to_steady: tol must be positive");
  if (u0.grid.get() != g.get() || v0.grid.get() != g.get())
    throw InvalidInput("run_to_steady: fields must live on the given grid");
  Trajectory tr;
  ScalarField u = u0, v = v0;
  double t = 0.0;
  int accepted_streak = 0;
  const double snapshot_every = t_max / 25.0;
  double next_snapshot = 0.0;

  tr.steady_gap = steady_residual(p, u, v);
  while (t < t_max) {
    if (t >= next_snapshot) {
      tr.times.push_back(t);
      tr.snapshots.emplace_back(u, v);
      next_snapshot += snapshot_every;
    }
    try {
      auto [un, vn] = step_original(u, v, p, dt, &tr.clipped_nodes);
      u = std::move(un);
      v = std::move(vn);
      t += dt;
      ++tr.steps;
      if (++accepted_streak >= 20) {
        dt *= 1.1;
        accepted_streak = 0;
      }
    } catch (const StepRejected& e) {
      dt = std::min(0.5 * dt, e.suggested_dt);
      accepted_streak = 0;
      if (dt < 1e-14)
        throw SolveFailure("run_to_steady: time step collapsed");
      continue;
    }
    if (tr.steps % 10 == 0 || t >= t_max) {
      tr.steady_gap = steady_residual(p, u, v);
      if (tr.steady_gap <= tol) {
        tr.converged = true;
        break;
      }
    }
  }
  tr.steady_gap = steady_residual(p, u, v);
  tr.converged = tr.steady_gap <= tol;
  tr.times.push_back(t);
  tr.snapshots.emplace_back(u, v);
  tr.final_u = std::move(u);
  tr.final_v = std::move(v);
  return tr;
}

std::pair<ScalarField, ScalarField> pseudo_time_transformed(
    const ModelParams& p, const GridPtr& g, const ScalarField& u0,
    const ScalarField& w0, double dt, int steps) {
  if (!(dt > 0.0)) throw InvalidInput("pseudo_time_transformed: dt must be positive");
  const int n = g->n;
  const ScalarField m = resource_field(p.resource, g);
  const double bound = 10.0 * (1.0 + m.max()) *
                       std::max(1.0, p.alpha * eval_dispersal(p.dispersal, p.k, 0.0) *
                                         m.max() * m.max() /
                                         (4.0 * std::max(p.theta, 1e-8)));
  std::vector<double> u = u0.values, w = w0.values;

  for (int s = 0; s < steps; ++s) {
    auto Lu = detail::neumann_laplacian_rows(p.eps, g->h, n);
    auto Lw = detail::neumann_laplacian_rows(p.mu, g->h, n);
    std::vector<double> sub_u(n), diag_u(n), sup_u(n), rhs_u(n);
    std::vector<double> sub_w(n), diag_w(n), sup_w(n), rhs_w(n);
    for (int i = 0; i < n; ++i) {
      const double F = eval_response(p.response, u[i]);
      const double d = eval_dispersal(p.dispersal, p.k, u[i]);
      sub_u[i] = -dt * Lu.sub[i];
      sup_u[i] = -dt * Lu.sup[i];
      diag_u[i] = 1.0 - dt * Lu.diag[i];
      rhs_u[i] = u[i] + dt * (u[i] * (m[i] - u[i]) - F / d * w[i]);
      sub_w[i] = -dt * Lw.sub[i];
      sup_w[i] = -dt * Lw.sup[i];
      diag_w[i] = 1.0 - dt * Lw.diag[i];
      rhs_w[i] = w[i] + dt * (p.alpha * F - p.theta) / d * w[i];
    }
    u = detail::solve_tridiag(sub_u, diag_u, sup_u, rhs_u);
    w = detail::solve_tridiag(sub_w, diag_w, sup_w, rhs_w);
    double worst = 0.0;
    for (int i = 0; i < n; ++i) {
      u[i] = std::max(u[i], 0.0);
      w[i] = std::max(w[i], 0.0);
      worst = std::max({worst, u[i], w[i]});
    }
    if (worst > bound)
      throw SolveFailure("pseudo_time_transformed: iterate exceeded the a priori bound");
  }
  return {ScalarField(g, std::move(u)), ScalarField(g, std::move(w))};
}

}  // namespace coexist
