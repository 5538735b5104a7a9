#pragma once

#include <string>

#include "coexist/grid.hpp"

namespace coexist {

enum class ResponseKind { Linear, HollingII, HollingIII };

enum class DispersalKind { Exponential, Algebraic, Constant };

enum class ResourceKind { SineOffset, Ramp, Step, Constant };

// Spatial resource m(x). SineOffset: a + b*sin(x); Ramp: a + b*x/L;
// Step: a for x < x0, b otherwise; Constant: a.
struct ResourceSpec {
  ResourceKind kind = ResourceKind::SineOffset;
  double a = 0.5;
  double b = 0.5;
  double x0 = 0.0;
};

// All model ingredients of the predator-prey system.
struct ModelParams {
  double eps = 0.1;    // prey diffusion
  double mu = 10.0;    // predator diffusion
  double alpha = 1.0;  // conversion rate
  double theta = 0.8;  // predator mortality
  double k = 0.0;      // dispersal sensitivity
  ResponseKind response = ResponseKind::Linear;
  DispersalKind dispersal = DispersalKind::Exponential;
  ResourceSpec resource;

  void validate() const;  // throws InvalidInput on bad ranges
};

double eval_resource(const ResourceSpec& spec, double x, double length);
ScalarField resource_field(const ResourceSpec& spec, const GridPtr& g);

// Functional response F(u), its derivative, and the inverse F^{-1}(s).
double eval_response(ResponseKind kind, double u);
double eval_response_prime(ResponseKind kind, double u);
double eval_response_inverse(ResponseKind kind, double s);  // OutOfRange if s >= sup F
double response_sup(ResponseKind kind);                     // +inf for Linear

// Dispersal rate d(u;k) > 0 with d' <= 0, and its u- and k-derivatives.
double eval_dispersal(DispersalKind kind, double k, double u);
double eval_dispersal_prime(DispersalKind kind, double k, double u);
double eval_dispersal_dk(DispersalKind kind, double k, double u);

// Pass/fail record for the standing assumptions on m, F and d.
struct AssumptionReport {
  bool h1 = false;  // integral of m positive and m nonconstant
  bool h2 = false;  // F(0) = 0 and F' > 0
  bool h3 = false;  // d > 0 and d' <= 0
  bool h4 = false;  // weighted response average increasing in k
  bool h5 = false;  // (F/(u d))' >= 0
  std::string notes;

  bool core_pass() const { return h1 && h2 && h3; }
  bool all_pass() const { return h1 && h2 && h3 && h4 && h5; }
};

// Sampled validation of (H1)-(H5). Failures are reported, never thrown.
AssumptionReport check_assumptions(const ModelParams& p, const GridPtr& g);

std::string to_string(ResponseKind k);
std::string to_string(DispersalKind k);
std::string to_string(ResourceKind k);

}  // namespace coexist
