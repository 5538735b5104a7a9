#include "coexist/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "coexist/logistic.hpp"

namespace coexist {

void ModelParams::validate() const {
  if (!(eps > 0.0)) throw InvalidInput("ModelParams: eps must be positive");
  if (!(mu > 0.0)) throw InvalidInput("ModelParams: mu must be positive");
  if (!(alpha > 0.0)) throw InvalidInput("ModelParams: alpha must be positive");
  if (theta < 0.0) throw InvalidInput("ModelParams: theta must be nonnegative");
  if (k < 0.0) throw InvalidInput("ModelParams: k must be nonnegative");
}

double eval_resource(const ResourceSpec& spec, double x, double length) {
  switch (spec.kind) {
    case ResourceKind::SineOffset: return spec.a + spec.b * std::sin(x);
    case ResourceKind::Ramp: return spec.a + spec.b * x / length;
    case ResourceKind::Step: return x < spec.x0 ? spec.a : spec.b;
    case ResourceKind::Constant: return spec.a;
  }
  throw InvalidInput("eval_resource: unknown resource kind");
}

ScalarField resource_field(const ResourceSpec& spec, const GridPtr& g) {
  return make_field(g, [&](double x) { return eval_resource(spec, x, g->length); });
}

double eval_response(ResponseKind kind, double u) {
  switch (kind) {
    case ResponseKind::Linear: return u;
    case ResponseKind::HollingII: return u / (1.0 + u);
    case ResponseKind::HollingIII: return u * u / (1.0 + u * u);
  }
  throw InvalidInput("eval_response: unknown response kind");
}

double eval_response_prime(ResponseKind kind, double u) {
  switch (kind) {
    case ResponseKind::Linear: return 1.0;
    case ResponseKind::HollingII: return 1.0 / ((1.0 + u) * (1.0 + u));
    case ResponseKind::HollingIII: {
      const double q = 1.0 + u * u;
      return 2.0 * u / (q * q);
    }
  }
  throw InvalidInput("eval_response_prime: unknown response kind");
}

double response_sup(ResponseKind kind) {
  switch (kind) {
    case ResponseKind::Linear: return std::numeric_limits<double>::infinity();
    case ResponseKind::HollingII: return 1.0;
    case ResponseKind::HollingIII: return 1.0;
  }
  throw InvalidInput("response_sup: unknown response kind");
}

double eval_response_inverse(ResponseKind kind, double s) {
  if (s < 0.0) throw OutOfRange("eval_response_inverse: s must be nonnegative");
  if (s >= response_sup(kind))
    throw OutOfRange("eval_response_inverse: s at or above sup F");
  switch (kind) {
    case ResponseKind::Linear: return s;
    case ResponseKind::HollingII: return s / (1.0 - s);
    case ResponseKind::HollingIII: return std::sqrt(s / (1.0 - s));
  }
  throw InvalidInput("eval_response_inverse: unknown response kind");
}

double eval_dispersal(DispersalKind kind, double k, double u) {
  switch (kind) {
    case DispersalKind::Exponential: return std::exp(-k * u);
    case DispersalKind::Algebraic: return std::pow(1.0 + u, -k);
    case DispersalKind::Constant: return 1.0;
  }
  throw InvalidInput("eval_dispersal: unknown dispersal kind");
}

double eval_dispersal_prime(DispersalKind kind, double k, double u) {
  switch (kind) {
    case DispersalKind::Exponential: return -k * std::exp(-k * u);
    case DispersalKind::Algebraic: return -k * std::pow(1.0 + u, -k - 1.0);
    case DispersalKind::Constant: return 0.0;
  }
  throw InvalidInput("eval_dispersal_prime: unknown dispersal kind");
}

double eval_dispersal_dk(DispersalKind kind, double k, double u) {
  switch (kind) {
    case DispersalKind::Exponential: return -u * std::exp(-k * u);
    case DispersalKind::Algebraic: return -std::log1p(u) * std::pow(1.0 + u, -k);
    case DispersalKind::Constant: return 0.0;
  }
  throw InvalidInput("eval_dispersal_dk: unknown dispersal kind");
}

namespace {

constexpr int kSampleCount = 10000;

// Weighted average of F(utilde) under the 1/d(.;k) measure, shifted by the
// field maximum so large k cannot overflow.
double weighted_response_avg(ResponseKind resp, DispersalKind disp, double k,
                             const ScalarField& ut) {
  const double umax = ut.max();
  double num = 0.0, den = 0.0;
  for (int i = 0; i < ut.size(); ++i) {
    const double w = ut.grid->weight(i);
    double q;
    if (disp == DispersalKind::Exponential)
      q = std::exp(k * (ut[i] - umax));
    else if (disp == DispersalKind::Algebraic)
      q = std::pow((1.0 + ut[i]) / (1.0 + umax), k);
    else
      q = 1.0;
    num += w * eval_response(resp, ut[i]) * q;
    den += w * q;
  }
  return num / den;
}

}  // namespace

AssumptionReport check_assumptions(const ModelParams& p, const GridPtr& g) {
  AssumptionReport rep;
  std::ostringstream notes;

  const ScalarField m = resource_field(p.resource, g);
  const double m_int = integrate(m);
  const bool m_const = (m.max() - m.min()) <= 1e-14 * (1.0 + m.sup_norm());
  rep.h1 = (m_int > 0.0) && !m_const;
  if (!rep.h1)
    notes << (m_const ? "H1: m is constant on the grid. "
                      : "H1: integral of m is not positive. ");

  const double u_hi = std::max(m.max(), 1.0);
  rep.h2 = std::abs(eval_response(p.response, 0.0)) == 0.0;
  rep.h3 = true;
  for (int i = 0; i <= kSampleCount; ++i) {
    const double u = u_hi * i / kSampleCount;
    if (eval_response_prime(p.response, u) <= 0.0) rep.h2 = false;
    if (eval_dispersal(p.dispersal, p.k, u) <= 0.0 ||
        eval_dispersal_prime(p.dispersal, p.k, u) > 0.0)
      rep.h3 = false;
  }
  if (!rep.h2) notes << "H2: response fails F(0)=0 or F'>0. ";
  if (!rep.h3) notes << "H3: dispersal fails d>0 or d'<=0. ";

  // H4: the weighted response average must be strictly increasing in k.
  // Needs the semi-trivial prey profile; skip when H1 fails.
  rep.h4 = false;
  if (rep.h1 && rep.h2) {
    try {
      const LogisticSolution ls = solve_logistic(p.eps, m, g);
      rep.h4 = true;
      double prev = weighted_response_avg(p.response, p.dispersal, 0.0, ls.utilde);
      if (p.dispersal == DispersalKind::Constant) {
        // d independent of k: the average is constant, H4 reduces to H2.
      } else {
        for (int j = 1; j <= 20; ++j) {
          const double cur =
              weighted_response_avg(p.response, p.dispersal, 0.5 * j, ls.utilde);
          if (!(cur > prev)) {
            rep.h4 = false;
            break;
          }
          prev = cur;
        }
      }
    } catch (const SolveFailure&) {
      notes << "H4: prey profile solve failed. ";
    }
  }
  if (!rep.h4 && rep.h1 && rep.h2)
    notes << "H4: weighted response average not strictly increasing in k. ";

  // H5: (F/(u d))' >= 0, sampled on (0, u_hi].
  rep.h5 = true;
  for (int i = 1; i <= kSampleCount; ++i) {
    const double u = u_hi * i / kSampleCount;
    const double F = eval_response(p.response, u);
    const double Fp = eval_response_prime(p.response, u);
    const double d = eval_dispersal(p.dispersal, p.k, u);
    const double dp = eval_dispersal_prime(p.dispersal, p.k, u);
    // sign of (F/(u d))' = (F' u d - F d - F u d') / (u d)^2
    const double numer = Fp * u * d - F * d - F * u * dp;
    if (numer < -1e-12 * (1.0 + std::abs(F))) {
      rep.h5 = false;
      break;
    }
  }
  if (!rep.h5) notes << "H5: (F/(u d))' takes negative values. ";

  rep.notes = notes.str();
  return rep;
}

std::string to_string(ResponseKind k) {
  switch (k) {
    case ResponseKind::Linear: return "linear";
    case ResponseKind::HollingII: return "holling2";
    case ResponseKind::HollingIII: return "holling3";
  }
  return "?";
}

std::string to_string(DispersalKind k) {
  switch (k) {
    case DispersalKind::Exponential: return "exponential";
    case DispersalKind::Algebraic: return "algebraic";
    case DispersalKind::Constant: return "constant";
  }
  return "?";
}

std::string to_string(ResourceKind k) {
  switch (k) {
    case ResourceKind::SineOffset: return "sine_offset";
    case ResourceKind::Ramp: return "ramp";
    case ResourceKind::Step: return "step";
    case ResourceKind::Constant: return "constant";
  }
  return "?";
}

}  // namespace coexist
