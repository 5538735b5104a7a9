#pragma once

#include <utility>
#include <vector>

#include "coexist/grid.hpp"
#include "coexist/model.hpp"

namespace coexist {

// Time-marched trajectory of the original cross-diffusion system
//   u_t = eps u'' + u(m - u) - v F(u)
//   v_t = mu (d(u) v)'' + alpha v F(u) - theta v.
struct Trajectory {
  std::vector<double> times;                              // snapshot times
  std::vector<std::pair<ScalarField, ScalarField>> snapshots;  // (u, v)
  ScalarField final_u;
  ScalarField final_v;
  bool converged = false;
  double steady_gap = 0.0;   // PDE residual sup norm at the final time
  long clipped_nodes = 0;    // negative undershoots clipped to zero
  long steps = 0;
};

// One IMEX step: diffusion implicit (d frozen at the current u, the cross
// term treated as the Laplacian of the product d(u)v), reaction explicit.
// Throws StepRejected with a suggested dt when dt violates the explicit-part
// stability estimate. Negative undershoots are clipped to zero; the count of
// clipped nodes is added to *clipped when given.
std::pair<ScalarField, ScalarField> step_original(const ScalarField& u,
                                                  const ScalarField& v,
                                                  const ModelParams& p, double dt,
                                                  long* clipped = nullptr);

// Repeated stepping with dt adaptation (halve on rejection, +10% after 20
// accepted steps) until the PDE residual drops below tol or t exceeds t_max.
Trajectory run_to_steady(const ModelParams& p, const GridPtr& g,
                         const ScalarField& u0, const ScalarField& v0, double dt,
                         double tol, double t_max);

// Semi-implicit relaxation of the transformed system, used only as a Newton
// warm start. Aborts with SolveFailure when the iterate blows past the
// a priori bound.
std::pair<ScalarField, ScalarField> pseudo_time_transformed(
    const ModelParams& p, const GridPtr& g, const ScalarField& u0,
    const ScalarField& w0, double dt, int steps);

// Sup norm of the PDE residual of the original system at (u, v).
double steady_residual(const ModelParams& p, const ScalarField& u,
                       const ScalarField& v);

}  // namespace coexist
