#pragma once

#include "coexist/grid.hpp"

namespace coexist {

enum class Side { Left, Right };

// Positive solution of the diffusive logistic equation
//   eps * u'' + u (m(x) - u) = 0,  u' = 0 at both ends.
struct LogisticSolution {
  ScalarField utilde;
  double u_min = 0.0;
  double u_max = 0.0;
  double residual = 0.0;  // sup norm of the discrete residual
};

// Newton solve with line-search damping; falls back to implicit pseudo-time
// marching when Newton stalls (small-eps boundary layers).
LogisticSolution solve_logistic(double eps, const ScalarField& m, const GridPtr& g);

// Same equation on the subinterval (0, y) [Left] or (y, L) [Right], with y
// snapped to the nearest node. For Right the returned field lives on a grid
// whose origin is the snapped y.
LogisticSolution solve_logistic_on(double eps, const ScalarField& m, double y, Side side);

// Value of the subinterval solution at its interior-facing endpoint.
double endpoint_trace(double eps, const ScalarField& m, double y, Side side);

}  // namespace coexist
