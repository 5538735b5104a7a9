#pragma once

#include <map>
#include <string>

#include "coexist/grid.hpp"
#include "coexist/model.hpp"

namespace coexist {

enum class LimitRegime { LargeEps, LargeMu, SmallMu };

// Limiting steady-state profile for one of the extreme-diffusion regimes.
// scalars holds the regime's defining constants ("c", "w_c", "c_star",
// "y_star", ...); w_limit may be piecewise with a free boundary at y_star.
struct LimitProfile {
  LimitRegime regime = LimitRegime::LargeEps;
  ScalarField u_limit;
  ScalarField w_limit;
  std::map<std::string, double> scalars;
};

// Fast prey diffusion: constant pair (c, w_c) with c = F^{-1}(theta/alpha)
// and w_c = c alpha d(c) integral(m - c) / (theta |Omega|).
// Requires 0 < theta < alpha F(mean m); NoLimitProfile otherwise.
LimitProfile large_eps_profile(const ModelParams& p, const GridPtr& g);

// Dispersal-weighted response average int F(u)/d(u) / int 1/d(u).
double g_of(const ScalarField& u, const ModelParams& p);

// Fast predator diffusion: (u*, c*) with alpha g(u*) = theta, found by an
// outer bisection on c over the auxiliary profiles z_c.
// Requires 0 < theta < alpha g(utilde).
LimitProfile large_mu_profile(const ModelParams& p, const GridPtr& g);

// Slow predator diffusion: the pinned profile of case (a) when
// m_min >= F^{-1}(theta/alpha), or the free-boundary profile of case (b)
// for monotone m, with y* located by shooting on the subinterval traces.
// Unsupported for nonmonotone m with m_min < F^{-1}(theta/alpha).
LimitProfile small_mu_profile(const ModelParams& p, const GridPtr& g);

// Positive solution of the auxiliary problem
//   eps z'' + z (m - z - c F(z)/(z d(z))) = 0, Neumann ends.
ScalarField solve_auxiliary(const ModelParams& p, const ScalarField& m, double c,
                            const ScalarField* warm_start = nullptr);

}  // namespace coexist
