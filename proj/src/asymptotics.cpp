#include "coexist/asymptotics.hpp"

#include <algorithm>
#include <cmath>

#include "coexist/logistic.hpp"
#include "tridiag.hpp"

namespace coexist {

namespace {

double mean_resource(const ScalarField& m) { return integrate(m) / m.grid->length; }

// F(z)/z with the z -> 0 limit F'(0).
double response_over_u(ResponseKind kind, double z) {
  if (z > 1e-10) return eval_response(kind, z) / z;
  return eval_response_prime(kind, 0.0);
}

std::vector<double> aux_residual(const ModelParams& p, const std::vector<double>& m,
                                 const std::vector<double>& z, double c, double h,
                                 double eps) {
  const int n = static_cast<int>(z.size());
  const double cc = eps / (h * h);
  std::vector<double> r(n);
  for (int i = 0; i < n; ++i) {
    double lap;
    if (i == 0)
      lap = 2.0 * (z[1] - z[0]);
    else if (i == n - 1)
      lap = 2.0 * (z[n - 2] - z[n - 1]);
    else
      lap = z[i - 1] - 2.0 * z[i] + z[i + 1];
    const double d = eval_dispersal(p.dispersal, p.k, z[i]);
    r[i] = cc * lap + z[i] * (m[i] - z[i]) -
           c * response_over_u(p.response, z[i]) * z[i] / d;
  }
  return r;
}

double sup_norm(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s = std::max(s, std::abs(x));
  return s;
}

}  // namespace

ScalarField solve_auxiliary(const ModelParams& p, const ScalarField& m, double c,
                            const ScalarField* warm_start) {
  const GridPtr& g = m.grid;
  const int n = g->n;
  const double h = g->h;
  const double tol = 1e-12 * (1.0 + m.sup_norm() + c);

  std::vector<double> z =
      warm_start ? warm_start->values
                 : std::vector<double>(n, std::max(0.1, mean_resource(m)));
  auto res = aux_residual(p, m.values, z, c, h, p.eps);
  double rn = sup_norm(res);
  for (int it = 0; it < 200 && rn > tol; ++it) {
    auto L = detail::neumann_laplacian_rows(p.eps, h, n);
    std::vector<double> diag(n), rhs(n);
    for (int i = 0; i < n; ++i) {
      const double F = eval_response(p.response, z[i]);
      const double Fp = eval_response_prime(p.response, z[i]);
      const double d = eval_dispersal(p.dispersal, p.k, z[i]);
      const double dp = eval_dispersal_prime(p.dispersal, p.k, z[i]);
      diag[i] = L.diag[i] + m.values[i] - 2.0 * z[i] -
                c * (Fp * d - F * dp) / (d * d);
      rhs[i] = -res[i];
    }
    std::vector<double> step = detail::solve_tridiag(L.sub, diag, L.sup, rhs);
    double lambda = 1.0;
    bool accepted = false;
    for (int half = 0; half < 30; ++half) {
      std::vector<double> trial(n);
      bool positive = true;
      for (int i = 0; i < n; ++i) {
        trial[i] = z[i] + lambda * step[i];
        if (!(trial[i] > 0.0)) positive = false;
      }
      if (positive) {
        auto tr = aux_residual(p, m.values, trial, c, h, p.eps);
        const double trn = sup_norm(tr);
        if (trn < rn) {
          z = std::move(trial);
          res = std::move(tr);
          rn = trn;
          accepted = true;
          break;
        }
      }
      lambda *= 0.5;
    }
    if (!accepted) break;
  }
  if (rn > 1e-10 * (1.0 + m.sup_norm() + c))
    throw SolveFailure("solve_auxiliary: Newton did not converge");
  return ScalarField(g, std::move(z));
}

LimitProfile large_eps_profile(const ModelParams& p, const GridPtr& g) {
  p.validate();
  const ScalarField m = resource_field(p.resource, g);
  const double mbar = mean_resource(m);
  const double sup = response_sup(p.response);
  if (!(p.theta > 0.0) ||
      !(mbar > 0.0 && p.theta < p.alpha * std::min(sup, eval_response(p.response, mbar))))
    throw NoLimitProfile("large_eps_profile: needs 0 < theta < alpha F(mean m)");

  const double c = eval_response_inverse(p.response, p.theta / p.alpha);
  const double dc = eval_dispersal(p.dispersal, p.k, c);
  ScalarField m_minus_c = make_field(g, 0.0);
  for (int i = 0; i < g->n; ++i) m_minus_c[i] = m[i] - c;
  const double w_c =
      c * p.alpha * dc / (p.theta * g->length) * integrate(m_minus_c);

  LimitProfile out;
  out.regime = LimitRegime::LargeEps;
  out.u_limit = make_field(g, c);
  out.w_limit = make_field(g, w_c);
  out.scalars["c"] = c;
  out.scalars["w_c"] = w_c;
  return out;
}

double g_of(const ScalarField& u, const ModelParams& p) {
  const double umax = u.max();
  double num = 0.0, den = 0.0;
  for (int i = 0; i < u.size(); ++i) {
    const double w = u.grid->weight(i);
    double q;
    switch (p.dispersal) {
      case DispersalKind::Exponential: q = std::exp(p.k * (u[i] - umax)); break;
      case DispersalKind::Algebraic:
        q = std::pow((1.0 + u[i]) / (1.0 + umax), p.k);
        break;
      default: q = 1.0;
    }
    num += w * eval_response(p.response, u[i]) * q;
    den += w * q;
  }
  return num / den;
}

LimitProfile large_mu_profile(const ModelParams& p, const GridPtr& g) {
  p.validate();
  const AssumptionReport rep = check_assumptions(p, g);
  if (!rep.core_pass() || !rep.h4 || !rep.h5)
    throw Unsupported("large_mu_profile: (H1)-(H5) must hold: " + rep.notes);
  const ScalarField m = resource_field(p.resource, g);
  const ScalarField ut = solve_logistic(p.eps, m, g).utilde;
  if (!(p.theta > 0.0) || !(p.theta < p.alpha * g_of(ut, p)))
    throw NoLimitProfile("large_mu_profile: needs 0 < theta < alpha g(utilde)");

  // G(c) = alpha g(z_c) - theta decreases in c; bracket then bisect.
  auto G = [&](double c, const ScalarField* warm, ScalarField* out) {
    try {
      ScalarField z = solve_auxiliary(p, m, c, warm);
      if (z.max() < 1e-8) return -p.theta;  // effectively extinct profile
      if (out) *out = z;
      return p.alpha * g_of(z, p) - p.theta;
    } catch (const SolveFailure&) {
      return -p.theta;  // no positive profile at this c
    }
  };

  ScalarField z_warm = ut;
  double c_lo = 0.0, c_hi = 1.0;
  int guard = 0;
  while (G(c_hi, &z_warm, &z_warm) > 0.0) {
    c_lo = c_hi;
    c_hi *= 2.0;
    if (++guard > 60) throw SolveFailure("large_mu_profile: bracket expansion failed");
  }
  ScalarField z_best = z_warm;
  while (c_hi - c_lo > 1e-13 * std::max(1.0, c_hi)) {
    const double mid = 0.5 * (c_lo + c_hi);
    if (G(mid, &z_warm, &z_warm) > 0.0) {
      c_lo = mid;
      z_best = z_warm;
    } else {
      c_hi = mid;
    }
  }
  const double c_star = 0.5 * (c_lo + c_hi);
  ScalarField u_star = solve_auxiliary(p, m, c_star, &z_best);

  LimitProfile out;
  out.regime = LimitRegime::LargeMu;
  out.u_limit = u_star;
  out.w_limit = make_field(g, c_star);
  out.scalars["c_star"] = c_star;
  out.scalars["alpha_g_u_star"] = p.alpha * g_of(u_star, p);
  return out;
}

LimitProfile small_mu_profile(const ModelParams& p, const GridPtr& g) {
  p.validate();
  const ScalarField m = resource_field(p.resource, g);
  const ScalarField ut = solve_logistic(p.eps, m, g).utilde;
  const double aFmax = p.alpha * eval_response(p.response, ut.max());
  if (!(p.theta > 0.0) || !(p.theta < aFmax))
    throw NoLimitProfile("small_mu_profile: needs 0 < theta < alpha F(ut_max)");
  const double c = eval_response_inverse(p.response, p.theta / p.alpha);
  const double dc = eval_dispersal(p.dispersal, p.k, c);
  const double w_scale = p.alpha / p.theta * dc * c;

  LimitProfile out;
  out.regime = LimitRegime::SmallMu;
  out.scalars["c"] = c;

  const double m_min = m.min();
  if (m_min >= c - 1e-12) {
    // Case (a): prey pinned at c everywhere, predator carries the surplus.
    out.u_limit = make_field(g, c);
    out.w_limit = make_field(g, 0.0);
    for (int i = 0; i < g->n; ++i)
      out.w_limit[i] = std::max(0.0, w_scale * (m[i] - c));
    return out;
  }

  // Case (b): monotone m with a free boundary.
  bool increasing = true, decreasing = true;
  for (int i = 1; i < g->n; ++i) {
    if (m[i] < m[i - 1] - 1e-12) increasing = false;
    if (m[i] > m[i - 1] + 1e-12) decreasing = false;
  }
  if (!increasing && !decreasing)
    throw Unsupported(
        "small_mu_profile: m_min < F^{-1}(theta/alpha) needs monotone m");

  const Side side = increasing ? Side::Left : Side::Right;
  auto trace = [&](int j) {
    return endpoint_trace(p.eps, m, g->nodes[j], side) - c;
  };
  // For increasing m the trace rises with y; mirrored for decreasing m.
  const double sgn = increasing ? 1.0 : -1.0;
  int lo = 2, hi = g->n - 3;
  if (sgn * trace(lo) >= 0.0) {
    hi = lo;
  } else if (sgn * trace(hi) <= 0.0) {
    lo = hi;
  } else {
    while (hi - lo > 1) {
      const int mid = (lo + hi) / 2;
      if (sgn * trace(mid) < 0.0)
        lo = mid;
      else
        hi = mid;
    }
  }
  const int j_star = std::abs(trace(lo)) <= std::abs(trace(hi)) ? lo : hi;
  const double y_star = g->nodes[j_star];
  out.scalars["y_star"] = y_star;
  out.scalars["y_star_uncertainty"] = 0.5 * g->h;
  out.scalars["trace_gap"] = trace(j_star);

  const LogisticSolution piece = solve_logistic_on(p.eps, m, y_star, side);
  out.u_limit = make_field(g, c);
  out.w_limit = make_field(g, 0.0);
  if (increasing) {
    for (int i = 0; i < j_star; ++i) out.u_limit[i] = piece.utilde[i];
    for (int i = j_star; i < g->n; ++i)
      out.w_limit[i] = std::max(0.0, w_scale * (m[i] - c));
  } else {
    // Right-side solution is re-rooted at y*, shift indices back.
    for (int i = j_star + 1; i < g->n; ++i)
      out.u_limit[i] = piece.utilde[i - j_star];
    for (int i = 0; i <= j_star; ++i)
      out.w_limit[i] = std::max(0.0, w_scale * (m[i] - c));
  }
  return out;
}

}  // namespace coexist
