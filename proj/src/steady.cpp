#include "coexist/steady.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include "coexist/eigen.hpp"
#include "coexist/logistic.hpp"
#include "tridiag.hpp"

namespace coexist {

namespace {

struct Residuals {
  std::vector<double> ru, rw;
  double norm_u = 0.0, norm_w = 0.0;
};

Residuals eval_residuals(const ModelParams& p, const Grid& g,
                         const std::vector<double>& m, const std::vector<double>& u,
                         const std::vector<double>& w) {
  const int n = g.n;
  const double cu = p.eps / (g.h * g.h);
  const double cw = p.mu / (g.h * g.h);
  Residuals r;
  r.ru.resize(n);
  r.rw.resize(n);
  for (int i = 0; i < n; ++i) {
    double lap_u, lap_w;
    if (i == 0) {
      lap_u = 2.0 * (u[1] - u[0]);
      lap_w = 2.0 * (w[1] - w[0]);
    } else if (i == n - 1) {
      lap_u = 2.0 * (u[n - 2] - u[n - 1]);
      lap_w = 2.0 * (w[n - 2] - w[n - 1]);
    } else {
      lap_u = u[i - 1] - 2.0 * u[i] + u[i + 1];
      lap_w = w[i - 1] - 2.0 * w[i] + w[i + 1];
    }
    const double F = eval_response(p.response, u[i]);
    const double d = eval_dispersal(p.dispersal, p.k, u[i]);
    r.ru[i] = cu * lap_u + u[i] * (m[i] - u[i]) - F / d * w[i];
    r.rw[i] = cw * lap_w + (p.alpha * F - p.theta) / d * w[i];
    r.norm_u = std::max(r.norm_u, std::abs(r.ru[i]));
    r.norm_w = std::max(r.norm_w, std::abs(r.rw[i]));
  }
  return r;
}

// Newton correction via sparse LU on the interleaved (u_i, w_i) ordering
// (bandwidth 2, so the factorization stays banded).
void newton_step(const ModelParams& p, const Grid& g, const std::vector<double>& m,
                 const std::vector<double>& u, const std::vector<double>& w,
                 const Residuals& r, std::vector<double>& du,
                 std::vector<double>& dw) {
  const int n = g.n;
  const auto Lu = detail::neumann_laplacian_rows(p.eps, g.h, n);
  const auto Lw = detail::neumann_laplacian_rows(p.mu, g.h, n);

  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(8 * n);
  for (int i = 0; i < n; ++i) {
    const double F = eval_response(p.response, u[i]);
    const double Fp = eval_response_prime(p.response, u[i]);
    const double d = eval_dispersal(p.dispersal, p.k, u[i]);
    const double dp = eval_dispersal_prime(p.dispersal, p.k, u[i]);
    const double FdP = (Fp * d - F * dp) / (d * d);
    const int iu = 2 * i, iw = 2 * i + 1;

    trip.emplace_back(iu, iu, Lu.diag[i] + m[i] - 2.0 * u[i] - FdP * w[i]);
    trip.emplace_back(iu, iw, -F / d);
    trip.emplace_back(iw, iu,
                      (p.alpha * Fp / d - (p.alpha * F - p.theta) * dp / (d * d)) * w[i]);
    trip.emplace_back(iw, iw, Lw.diag[i] + (p.alpha * F - p.theta) / d);
    if (i > 0) {
      trip.emplace_back(iu, iu - 2, Lu.sub[i]);
      trip.emplace_back(iw, iw - 2, Lw.sub[i]);
    }
    if (i + 1 < n) {
      trip.emplace_back(iu, iu + 2, Lu.sup[i]);
      trip.emplace_back(iw, iw + 2, Lw.sup[i]);
    }
  }
  Eigen::SparseMatrix<double> J(2 * n, 2 * n);
  J.setFromTriplets(trip.begin(), trip.end());
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu(J);
  if (lu.info() != Eigen::Success)
    throw SolveFailure("solve_coexistence: singular Newton matrix");
  Eigen::VectorXd rhs(2 * n);
  for (int i = 0; i < n; ++i) {
    rhs[2 * i] = -r.ru[i];
    rhs[2 * i + 1] = -r.rw[i];
  }
  Eigen::VectorXd s = lu.solve(rhs);
  du.resize(n);
  dw.resize(n);
  for (int i = 0; i < n; ++i) {
    du[i] = s[2 * i];
    dw[i] = s[2 * i + 1];
  }
}

// Damped Newton from a positive initial pair. Returns false when the
// iteration stalls, diverges, or collapses onto the semi-trivial state.
bool newton_solve(const ModelParams& p, const Grid& g, const std::vector<double>& m,
                  std::vector<double>& u, std::vector<double>& w, double tol_scale) {
  const double tol = 1e-11 * tol_scale;
  Residuals r = eval_residuals(p, g, m, u, w);
  double rn = std::max(r.norm_u, r.norm_w);
  double w_floor = 1e-14 * tol_scale;
  for (int it = 0; it < 80; ++it) {
    if (rn <= tol) break;
    std::vector<double> du, dw;
    try {
      newton_step(p, g, m, u, w, r, du, dw);
    } catch (const SolveFailure&) {
      return false;
    }
    double lambda = 1.0;
    bool accepted = false;
    for (int half = 0; half < 30; ++half) {
      std::vector<double> ut(g.n), wt(g.n);
      bool positive = true;
      for (int i = 0; i < g.n; ++i) {
        ut[i] = u[i] + lambda * du[i];
        wt[i] = w[i] + lambda * dw[i];
        if (!(ut[i] > 0.0) || !(wt[i] > 0.0)) positive = false;
      }
      if (positive) {
        Residuals rt = eval_residuals(p, g, m, ut, wt);
        const double rtn = std::max(rt.norm_u, rt.norm_w);
        if (rtn < rn) {
          u = std::move(ut);
          w = std::move(wt);
          r = std::move(rt);
          rn = rtn;
          accepted = true;
          break;
        }
      }
      lambda *= 0.5;
    }
    if (!accepted) return false;
    if (*std::max_element(w.begin(), w.end()) < w_floor)
      return false;  // collapsed to the semi-trivial state
  }
  if (rn > tol) return false;
  // Converged; reject near-zero predator component (not a coexistence state).
  return *std::max_element(w.begin(), w.end()) > 1e-10 * tol_scale;
}

ScalarField to_field(const GridPtr& g, const std::vector<double>& v) {
  return ScalarField(g, v);
}

SteadyState assemble_state(const ModelParams& p, const GridPtr& g,
                           const std::vector<double>& m, std::vector<double> u,
                           std::vector<double> w) {
  Residuals r = eval_residuals(p, *g, m, u, w);
  SteadyState s;
  s.params = p;
  std::vector<double> v(g->n);
  for (int i = 0; i < g->n; ++i)
    v[i] = w[i] / eval_dispersal(p.dispersal, p.k, u[i]);
  s.u = to_field(g, u);
  s.w = to_field(g, w);
  s.v = to_field(g, v);
  s.residual_u = r.norm_u;
  s.residual_w = r.norm_w;
  return s;
}

// Bifurcation-direction initial guess: w = delta * phi_1 of the semi-trivial
// linearization, u = utilde + the linear response of the u-equation to that
// forcing (which is negative, keeping u below utilde).
void bifurcation_init(const ModelParams& p, const GridPtr& g,
                      const std::vector<double>& m, const ScalarField& utilde,
                      std::vector<double>& u0, std::vector<double>& w0) {
  const int n = g->n;
  ScalarField r = make_field(g, 0.0);
  for (int i = 0; i < n; ++i) {
    const double F = eval_response(p.response, utilde[i]);
    const double d = eval_dispersal(p.dispersal, p.k, utilde[i]);
    r[i] = (p.alpha * F - p.theta) / d;
  }
  const EigenPair ep = principal_eig(p.mu, r);
  const double delta = 0.05 * utilde.max();

  // Solve (eps Lap + diag(m - 2 utilde)) h = (F/d) phi; the operator is
  // negative definite because lambda_1(eps, m - 2 utilde) < 0.
  auto L = detail::neumann_laplacian_rows(p.eps, g->h, n);
  std::vector<double> diag(n), rhs(n);
  for (int i = 0; i < n; ++i) {
    diag[i] = L.diag[i] + m[i] - 2.0 * utilde[i];
    const double F = eval_response(p.response, utilde[i]);
    const double d = eval_dispersal(p.dispersal, p.k, utilde[i]);
    rhs[i] = F / d * ep.phi[i];
  }
  std::vector<double> hdir = detail::solve_tridiag(L.sub, diag, L.sup, rhs);

  u0.resize(n);
  w0.resize(n);
  for (int i = 0; i < n; ++i) {
    u0[i] = std::max(utilde[i] + delta * hdir[i], 1e-6 * utilde.max());
    w0[i] = delta * ep.phi[i];
  }
}

// Semi-implicit relaxation warm start used when plain Newton fails.
void relax(const ModelParams& p, const Grid& g, const std::vector<double>& m,
           std::vector<double>& u, std::vector<double>& w, int steps) {
  const int n = g.n;
  double dt = 0.05;
  for (int s = 0; s < steps; ++s) {
    auto Lu = detail::neumann_laplacian_rows(p.eps, g.h, n);
    auto Lw = detail::neumann_laplacian_rows(p.mu, g.h, n);
    std::vector<double> du(n), dw(n), rhs_u(n), rhs_w(n), sub_u(n), sup_u(n),
        sub_w(n), sup_w(n);
    for (int i = 0; i < n; ++i) {
      const double F = eval_response(p.response, u[i]);
      const double d = eval_dispersal(p.dispersal, p.k, u[i]);
      du[i] = 1.0 / dt - Lu.diag[i] - (m[i] - u[i]);
      rhs_u[i] = u[i] / dt - F / d * w[i];
      dw[i] = 1.0 / dt - Lw.diag[i] - std::min(0.0, (p.alpha * F - p.theta) / d);
      rhs_w[i] = w[i] / dt + std::max(0.0, (p.alpha * F - p.theta) / d) * w[i];
      sub_u[i] = -Lu.sub[i];
      sup_u[i] = -Lu.sup[i];
      sub_w[i] = -Lw.sub[i];
      sup_w[i] = -Lw.sup[i];
    }
    auto un = detail::solve_tridiag(sub_u, du, sup_u, rhs_u);
    auto wn = detail::solve_tridiag(sub_w, dw, sup_w, rhs_w);
    bool ok = true;
    for (int i = 0; i < n; ++i)
      if (!(un[i] > 0.0) || !(wn[i] >= 0.0) || !std::isfinite(un[i]) ||
          !std::isfinite(wn[i]))
        ok = false;
    if (!ok) {
      dt *= 0.5;
      continue;
    }
    u = std::move(un);
    w = std::move(wn);
  }
}

std::optional<SteadyState> solve_from(const ModelParams& p, const GridPtr& g,
                                      const std::vector<double>& m,
                                      std::vector<double> u, std::vector<double> w,
                                      bool allow_relax_fallback) {
  const double tol_scale = 1.0 + *std::max_element(m.begin(), m.end());
  std::vector<double> u0 = u, w0 = w;
  if (newton_solve(p, *g, m, u, w, tol_scale))
    return assemble_state(p, g, m, std::move(u), std::move(w));
  if (!allow_relax_fallback) return std::nullopt;
  u = u0;
  w = w0;
  relax(p, *g, m, u, w, 2000);
  if (newton_solve(p, *g, m, u, w, tol_scale))
    return assemble_state(p, g, m, std::move(u), std::move(w));
  return std::nullopt;
}

}  // namespace

std::optional<SteadyState> solve_coexistence(const ModelParams& p, const GridPtr& g,
                                             const InitBifurcation&) {
  p.validate();
  const ScalarField m = resource_field(p.resource, g);
  const LogisticSolution ls = solve_logistic(p.eps, m, g);
  std::vector<double> u0, w0;
  bifurcation_init(p, g, m.values, ls.utilde, u0, w0);
  return solve_from(p, g, m.values, std::move(u0), std::move(w0), true);
}

std::optional<SteadyState> solve_coexistence(const ModelParams& p, const GridPtr& g,
                                             const InitGiven& init) {
  p.validate();
  const ScalarField m = resource_field(p.resource, g);
  for (int i = 0; i < g->n; ++i)
    if (!(init.u[i] > 0.0) || !(init.w[i] > 0.0))
      throw InvalidInput("solve_coexistence: given initial pair must be positive");
  return solve_from(p, g, m.values, init.u.values, init.w.values, true);
}

std::pair<ScalarField, ScalarField> back_transform(const SteadyState& s) {
  return {s.u, s.v};
}

double mass_identity(const SteadyState& s) {
  if (s.w.max() <= 0.0)
    throw NotCoexistence("mass_identity: predator component is identically zero");
  const GridPtr& g = s.u.grid;
  const ScalarField m = resource_field(s.params.resource, g);
  double lhs = 0.0, rhs = 0.0;
  for (int i = 0; i < g->n; ++i) {
    const double w = g->weight(i);
    const double d = eval_dispersal(s.params.dispersal, s.params.k, s.u[i]);
    lhs += w * s.params.theta / d * s.w[i];
    rhs += w * s.params.alpha * s.u[i] * (m[i] - s.u[i]);
  }
  return std::abs(lhs - rhs);
}

std::vector<SteadyState> multistart_probe(const ModelParams& p, const GridPtr& g,
                                          int count, std::uint64_t seed) {
  if (count < 2) throw InvalidInput("multistart_probe: count must be >= 2");
  p.validate();
  const ScalarField m = resource_field(p.resource, g);
  const LogisticSolution ls = solve_logistic(p.eps, m, g);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.1, 1.0);

  std::vector<SteadyState> clusters;
  for (int t = 0; t < count; ++t) {
    std::vector<double> u0(g->n), w0(g->n);
    const double au = unif(rng), aw = unif(rng);
    for (int i = 0; i < g->n; ++i) {
      u0[i] = std::max(au * ls.utilde[i] * (0.5 + unif(rng)), 1e-4);
      w0[i] = std::max(aw * 0.5 * ls.u_max * (0.5 + unif(rng)), 1e-4);
    }
    auto s = solve_from(p, g, m.values, std::move(u0), std::move(w0), false);
    if (!s) continue;
    bool fresh = true;
    for (const auto& c : clusters) {
      double dist = 0.0;
      for (int i = 0; i < g->n; ++i)
        dist = std::max({dist, std::abs(c.u[i] - s->u[i]),
                         std::abs(c.w[i] - s->w[i])});
      if (dist <= 1e-6) {
        fresh = false;
        break;
      }
    }
    if (fresh) clusters.push_back(std::move(*s));
  }
  return clusters;
}

}  // namespace coexist
