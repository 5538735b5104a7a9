#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "coexist/grid.hpp"
#include "coexist/model.hpp"

namespace coexist {

// Coexistence steady state of the transformed system
//   eps u'' + u (m - u) - F(u)/d(u) w = 0
//   mu  w'' + (alpha F(u) - theta)/d(u) w = 0
// with the back-transformed predator density v = w / d(u).
struct SteadyState {
  ScalarField u;
  ScalarField w;
  ScalarField v;
  double residual_u = 0.0;
  double residual_w = 0.0;
  ModelParams params;
};

// Initial guess strategies for the coupled Newton solve.
struct InitBifurcation {};  // perturb off (utilde, 0) along the critical mode
struct InitGiven {
  ScalarField u;
  ScalarField w;
};

// Damped Newton on the coupled discrete system. A failed solve returns
// nullopt ("not found"); that is never a certificate of non-existence.
std::optional<SteadyState> solve_coexistence(const ModelParams& p, const GridPtr& g,
                                             const InitBifurcation& init = {});
std::optional<SteadyState> solve_coexistence(const ModelParams& p, const GridPtr& g,
                                             const InitGiven& init);

// v = w / d(u) nodewise.
std::pair<ScalarField, ScalarField> back_transform(const SteadyState& s);

// |int theta w/d(u) dx - alpha int u(m-u) dx|: zero at a converged state.
// Rejects semi-trivial input (w identically zero) with NotCoexistence.
double mass_identity(const SteadyState& s);

// Newton from `count` randomized positive initializations; returns one
// representative per cluster of converged states (1e-6 sup-norm clustering).
std::vector<SteadyState> multistart_probe(const ModelParams& p, const GridPtr& g,
                                          int count, std::uint64_t seed = 42);

}  // namespace coexist
