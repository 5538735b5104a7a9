#include "coexist/thresholds.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <thread>

namespace coexist {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNeutralBand = 1e-8;

bool near(double x, double y) {
  return std::abs(x - y) <= 1e-10 * std::max({1.0, std::abs(x), std::abs(y)});
}

// 1/d(u;k) scaled by d(u_ref;k): safe for large k, cancels in ratios and
// leaves signs intact.
double inv_dispersal_shifted(DispersalKind kind, double k, double u, double u_ref) {
  switch (kind) {
    case DispersalKind::Exponential: return std::exp(k * (u - u_ref));
    case DispersalKind::Algebraic: return std::pow((1.0 + u) / (1.0 + u_ref), k);
    case DispersalKind::Constant: return 1.0;
  }
  throw InvalidInput("inv_dispersal_shifted: unknown dispersal kind");
}

// int (alpha F(ut) - theta) / d(ut;k) dx, scaled by d(ut_max;k).
double calF_shifted(double k, double theta, const ModelParams& p,
                    const ScalarField& ut) {
  const double umax = ut.max();
  double s = 0.0;
  for (int i = 0; i < ut.size(); ++i) {
    const double q = inv_dispersal_shifted(p.dispersal, k, ut[i], umax);
    s += ut.grid->weight(i) * (p.alpha * eval_response(p.response, ut[i]) - theta) * q;
  }
  return s;
}

// d(calF)/dk scaled by the same shift factor as calF_shifted, so that the
// Newton step calF_shifted / this equals the unshifted calF / calF'.
double calF_shifted_prime(double k, double theta, const ModelParams& p,
                          const ScalarField& ut) {
  const double umax = ut.max();
  double s = 0.0;
  for (int i = 0; i < ut.size(); ++i) {
    const double q = inv_dispersal_shifted(p.dispersal, k, ut[i], umax);
    const double growth = p.dispersal == DispersalKind::Algebraic
                              ? std::log1p(ut[i])
                              : ut[i];
    s += ut.grid->weight(i) * (p.alpha * eval_response(p.response, ut[i]) - theta) *
         q * growth;
  }
  return s;
}

ScalarField semitrivial_weight(const ModelParams& p, const ScalarField& ut,
                               double theta, double k) {
  ScalarField r = make_field(ut.grid, 0.0);
  for (int i = 0; i < ut.size(); ++i) {
    const double F = eval_response(p.response, ut[i]);
    const double d = eval_dispersal(p.dispersal, k, ut[i]);
    r[i] = (p.alpha * F - theta) / d;
  }
  return r;
}

double lambda1_of(const ModelParams& p, const ScalarField& ut, double mu,
                  double theta, double k) {
  return principal_eig(mu, semitrivial_weight(p, ut, theta, k)).lambda;
}

int effective_workers() {
  const unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 2 : static_cast<int>(hc);
}

}  // namespace

bool MuStarResult::finite() const { return std::isfinite(value); }

double theta_k(double k, const ModelParams& p, const ScalarField& ut) {
  const double umax = ut.max();
  double num = 0.0, den = 0.0;
  for (int i = 0; i < ut.size(); ++i) {
    const double w = ut.grid->weight(i);
    const double q = inv_dispersal_shifted(p.dispersal, k, ut[i], umax);
    num += w * eval_response(p.response, ut[i]) * q;
    den += w * q;
  }
  return p.alpha * num / den;
}

double calF(double k, double theta, const ModelParams& p, const ScalarField& ut) {
  double s = 0.0;
  for (int i = 0; i < ut.size(); ++i) {
    const double d = eval_dispersal(p.dispersal, k, ut[i]);
    s += ut.grid->weight(i) *
         (p.alpha * eval_response(p.response, ut[i]) - theta) / d;
  }
  return s;
}

KStarResult k_star(double theta, const ModelParams& p, const ScalarField& ut) {
  if (p.dispersal == DispersalKind::Constant)
    throw InvalidInput("k_star: needs a parametric dispersal family");
  const double th0 = theta_k(0.0, p, ut);
  const double thmax = p.alpha * eval_response(p.response, ut.max());
  if (!(theta > th0) || !(theta < thmax))
    throw OutOfRange("k_star: theta outside (theta_0, alpha F(ut_max))");

  double lo = 0.0, hi = 1.0;
  double f_hi = calF_shifted(hi, theta, p, ut);
  int expansions = 0;
  while (f_hi <= 0.0) {
    lo = hi;
    hi *= 2.0;
    if (++expansions > 60 || hi > 1e4) return {kInf, true};
    f_hi = calF_shifted(hi, theta, p, ut);
  }
  // calF(0) < 0 since theta > theta_0.
  while (hi - lo > 1e-10) {
    const double mid = 0.5 * (lo + hi);
    if (calF_shifted(mid, theta, p, ut) > 0.0)
      hi = mid;
    else
      lo = mid;
  }
  double k = 0.5 * (lo + hi);
  for (int i = 0; i < 5; ++i) {
    const double f = calF_shifted(k, theta, p, ut);
    const double fp = calF_shifted_prime(k, theta, p, ut);
    if (fp == 0.0) break;
    const double next = k - f / fp;
    if (!(next > lo) || !(next < hi)) break;
    k = next;
  }
  return {k, false};
}

MuStarResult mu_star(double k, double theta, const ModelParams& p,
                     const ScalarField& ut) {
  const double thmax = p.alpha * eval_response(p.response, ut.max());
  if (!(theta < thmax))
    throw NoInstabilityWindow(
        "mu_star: alpha F(utilde) - theta has no positive part");
  if (calF_shifted(k, theta, p, ut) >= 0.0) return {kInf, false};

  double lo = 1e-6, hi = 1e6;
  double f_lo = lambda1_of(p, ut, lo, theta, k);
  while (f_lo <= 0.0 && lo > 1e-12) {
    lo *= 0.1;
    f_lo = lambda1_of(p, ut, lo, theta, k);
  }
  if (f_lo <= 0.0)
    throw NoInstabilityWindow("mu_star: no unstable mu found down to 1e-12");
  double f_hi = lambda1_of(p, ut, hi, theta, k);
  while (f_hi >= 0.0) {
    hi *= 10.0;
    if (hi > 1e12) return {kInf, true};
    f_hi = lambda1_of(p, ut, hi, theta, k);
  }

  // Bisection in log mu, then a few secant steps.
  double llo = std::log(lo), lhi = std::log(hi);
  while (lhi - llo > 1e-10 * std::max(1.0, std::abs(lhi))) {
    const double lmid = 0.5 * (llo + lhi);
    if (lambda1_of(p, ut, std::exp(lmid), theta, k) > 0.0)
      llo = lmid;
    else
      lhi = lmid;
  }
  double mu = std::exp(0.5 * (llo + lhi));
  double f_prev = lambda1_of(p, ut, std::exp(llo), theta, k);
  double mu_prev = std::exp(llo);
  for (int i = 0; i < 5; ++i) {
    const double f = lambda1_of(p, ut, mu, theta, k);
    const double denom = f - f_prev;
    if (denom == 0.0) break;
    const double next = mu - f * (mu - mu_prev) / denom;
    if (!(next > 0.0) || !std::isfinite(next)) break;
    mu_prev = mu;
    f_prev = f;
    mu = next;
  }
  return {mu, false};
}

double theta_tilde(double mu, const ModelParams& p, const ScalarField& ut) {
  double lo = p.alpha * eval_response(p.response, ut.min());
  double hi = p.alpha * eval_response(p.response, ut.max());
  const double scale = std::max(1.0, std::abs(hi));
  while (hi - lo > 1e-10 * scale) {
    const double mid = 0.5 * (lo + hi);
    if (lambda1_of(p, ut, mu, mid, p.k) > 0.0)
      lo = mid;  // lambda decreasing in theta
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

double semitrivial_lambda1(const ModelParams& p, const ScalarField& ut) {
  return lambda1_of(p, ut, p.mu, p.theta, p.k);
}

Stability classify_semitrivial(const ModelParams& p, const ScalarField& ut) {
  const double l1 = semitrivial_lambda1(p, ut);
  if (std::abs(l1) <= kNeutralBand) return Stability::Neutral;
  return l1 > 0.0 ? Stability::Unstable : Stability::Stable;
}

double k_tilde(const ModelParams& p, const ScalarField& ut) {
  const double umax = ut.max();
  if (p.theta <= 0.0) return kInf;
  switch (p.response) {
    case ResponseKind::Linear:
      return p.alpha / p.theta;
    case ResponseKind::HollingII:
      return p.alpha / (p.theta * (1.0 + umax) * (1.0 + umax));
    case ResponseKind::HollingIII:
      break;  // no closed form; bisect below
  }
  // Largest k with min_x [alpha F'(x) - (alpha F(x) - theta) (d'/d)(x)] > 0.
  auto monotone_margin = [&](double k) {
    double worst = kInf;
    const int ns = 2000;
    for (int i = 0; i <= ns; ++i) {
      const double x = umax * i / ns;
      const double ratio =  // -d'/d
          p.dispersal == DispersalKind::Algebraic ? k / (1.0 + x) : k;
      const double v = p.alpha * eval_response_prime(p.response, x) +
                       (p.alpha * eval_response(p.response, x) - p.theta) * ratio;
      worst = std::min(worst, v);
    }
    return worst;
  };
  double lo = 0.0, hi = 1.0;
  while (monotone_margin(hi) > 0.0) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e6) return kInf;
  }
  while (hi - lo > 1e-10 * std::max(1.0, hi)) {
    const double mid = 0.5 * (lo + hi);
    if (monotone_margin(mid) > 0.0)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

RegimeVerdict classify_regime_with(const ModelParams& p, const ScalarField& ut) {
  RegimeVerdict v;
  v.alpha_F_min = p.alpha * eval_response(p.response, ut.min());
  v.alpha_F_max = p.alpha * eval_response(p.response, ut.max());
  v.theta0 = theta_k(0.0, p, ut);
  const double k_eff = p.dispersal == DispersalKind::Constant ? 0.0 : p.k;
  v.theta_k_value = theta_k(k_eff, p, ut);
  v.k_tilde_value = k_tilde(p, ut);
  v.lambda1 = std::numeric_limits<double>::quiet_NaN();

  if (p.theta < v.alpha_F_min || near(p.theta, v.alpha_F_min)) {
    v.tag = RegimeTag::CoexistenceExists;
    v.clause = "theta <= alpha F(ut_min): positive solution exists";
    return v;
  }
  if (p.theta > v.alpha_F_max || near(p.theta, v.alpha_F_max)) {
    v.tag = RegimeTag::NoPositiveSolution;
    v.clause = "theta >= alpha F(ut_max): no positive solution";
    return v;
  }

  v.lambda1 = semitrivial_lambda1(p, ut);
  if (std::abs(v.lambda1) <= kNeutralBand) {
    v.tag = RegimeTag::Neutral;
    v.clause = "lambda_1 inside the neutral band";
    return v;
  }
  if (v.lambda1 > 0.0) {
    v.tag = RegimeTag::CoexistenceExists;
    v.clause = p.theta <= v.theta_k_value
                   ? "theta <= theta_k: semi-trivial state unstable for every mu"
                   : "semi-trivial state unstable: positive solution exists";
    return v;
  }
  if (k_eff <= v.k_tilde_value || near(k_eff, v.k_tilde_value)) {
    v.tag = RegimeTag::NoPositiveSolution;
    v.clause = "stable semi-trivial state and k <= k_tilde: no positive solution";
    return v;
  }
  v.tag = RegimeTag::SemiTrivialStableNoProof;
  v.clause = "stable semi-trivial state, k > k_tilde: existence unresolved";
  return v;
}

RegimeVerdict classify_regime(const ModelParams& p, const GridPtr& g) {
  p.validate();
  const AssumptionReport rep = check_assumptions(p, g);
  if (!rep.core_pass()) {
    RegimeVerdict v;
    v.tag = RegimeTag::AssumptionViolated;
    v.clause = "standing assumptions (H1)-(H3) fail: " + rep.notes;
    return v;
  }
  const ScalarField m = resource_field(p.resource, g);
  const LogisticSolution ls = solve_logistic(p.eps, m, g);
  return classify_regime_with(p, ls.utilde);
}

SweepResult sweep_regime(const SweepAxes& axes, const ModelParams& p,
                         const GridPtr& g) {
  SweepResult out;
  out.axes = axes;
  const int n1 = static_cast<int>(axes.axis1.size());
  const int n2 = static_cast<int>(axes.axis2.size());
  out.cells.resize(static_cast<std::size_t>(n1) * n2);

  const AssumptionReport rep = check_assumptions(p, g);
  if (!rep.core_pass()) {
    for (auto& c : out.cells) {
      c.tag = RegimeTag::AssumptionViolated;
      c.clause = "standing assumptions (H1)-(H3) fail: " + rep.notes;
    }
    return out;
  }
  const ScalarField m = resource_field(p.resource, g);
  const ScalarField ut = solve_logistic(p.eps, m, g).utilde;

  auto run_rows = [&](int row_begin, int row_end) {
    for (int i = row_begin; i < row_end; ++i) {
      for (int j = 0; j < n2; ++j) {
        ModelParams cell = p;
        if (axes.kind == SweepAxes::Kind::ThetaMu)
          cell.theta = axes.axis1[i];
        else
          cell.k = axes.axis1[i];
        cell.mu = axes.axis2[j];
        out.cells[static_cast<std::size_t>(i) * n2 + j] =
            classify_regime_with(cell, ut);
      }
    }
  };
  const int workers = std::min(effective_workers(), std::max(1, n1));
  std::vector<std::future<void>> tasks;
  const int chunk = (n1 + workers - 1) / workers;
  for (int w = 0; w < workers; ++w) {
    const int b = w * chunk, e = std::min(n1, b + chunk);
    if (b >= e) break;
    tasks.push_back(std::async(std::launch::async, run_rows, b, e));
  }
  for (auto& t : tasks) t.get();

  for (double a : axes.axis1) {
    ModelParams q = p;
    double kval = axes.kind == SweepAxes::Kind::KMu ? a : p.k;
    if (axes.kind == SweepAxes::Kind::ThetaMu) q.theta = a;
    try {
      const MuStarResult ms = mu_star(kval, q.theta, q, ut);
      out.level_set.push_back({a, ms.value});
    } catch (const NoInstabilityWindow&) {
      // level curve has no point at this axis value
    }
  }
  return out;
}

bool chebyshev_sum_check(std::span<const double> a, std::span<const double> b,
                         std::span<const double> c) {
  const std::size_t n = a.size();
  if (b.size() != n || c.size() != n || n == 0)
    throw InvalidInput("chebyshev_sum_check: arrays must be equal-length, nonempty");
  auto check_sorted = [](std::span<const double> v, const char* name) {
    if (v[0] < 0.0)
      throw InvalidInput(std::string("chebyshev_sum_check: negative entry in ") + name);
    for (std::size_t i = 1; i < v.size(); ++i)
      if (v[i] < v[i - 1])
        throw InvalidInput(std::string("chebyshev_sum_check: unsorted ") + name);
  };
  check_sorted(a, "a");
  check_sorted(b, "b");
  check_sorted(c, "c");
  double abc = 0.0, ac = 0.0, bc = 0.0, cs = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    abc += a[i] * b[i] * c[i];
    ac += a[i] * c[i];
    bc += b[i] * c[i];
    cs += c[i];
  }
  const double lhs = abc * cs, rhs = ac * bc;
  return lhs >= rhs - 1e-12 * std::max(1.0, std::abs(rhs));
}

bool convexity_check(double theta1, double theta2, double rho,
                     const ModelParams& p, const ScalarField& ut) {
  if (rho < 0.0 || rho > 1.0) throw OutOfRange("convexity_check: rho outside [0,1]");
  if (rho == 0.0 || rho == 1.0) return true;  // boundary convention
  const double k_eff = p.dispersal == DispersalKind::Constant ? 0.0 : p.k;
  const double thk = theta_k(k_eff, p, ut);
  const double thmax = p.alpha * eval_response(p.response, ut.max());
  for (double th : {theta1, theta2})
    if (!(th > thk) || !(th < thmax))
      throw OutOfRange("convexity_check: theta outside (theta_k, alpha F(ut_max))");
  const MuStarResult m1 = mu_star(k_eff, theta1, p, ut);
  const MuStarResult m2 = mu_star(k_eff, theta2, p, ut);
  const double thm = rho * theta1 + (1.0 - rho) * theta2;
  const MuStarResult mm = mu_star(k_eff, thm, p, ut);
  if (!m1.finite() || !m2.finite() || !mm.finite())
    throw OutOfRange("convexity_check: mu_star not finite at the probe points");
  return rho * m1.value + (1.0 - rho) * m2.value > mm.value - 1e-8;
}

std::string to_string(RegimeTag tag) {
  switch (tag) {
    case RegimeTag::CoexistenceExists: return "CoexistenceExists";
    case RegimeTag::NoPositiveSolution: return "NoPositiveSolution";
    case RegimeTag::SemiTrivialStableNoProof: return "SemiTrivialStableNoProof";
    case RegimeTag::Neutral: return "Neutral";
    case RegimeTag::AssumptionViolated: return "AssumptionViolated";
  }
  return "?";
}

std::string to_string(Stability s) {
  switch (s) {
    case Stability::Stable: return "Stable";
    case Stability::Unstable: return "Unstable";
    case Stability::Neutral: return "Neutral";
  }
  return "?";
}

}  // namespace coexist
