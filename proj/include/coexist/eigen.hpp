#pragma once

#include "coexist/grid.hpp"
#include "coexist/model.hpp"

namespace coexist {

// Principal eigenpair of ell*Lap + r with Neumann conditions: largest
// eigenvalue and its positive eigenfunction, sup-normalized to 1.
struct EigenPair {
  double lambda = 0.0;
  ScalarField phi;
  bool clamped = false;  // true if near-zero components were floored at 1e-300
};

// Largest eigenvalue of the symmetric discrete operator ell*Lap_h + diag(r),
// by Sturm-sequence bisection on the similarity-symmetrized tridiagonal form
// plus inverse iteration for the eigenvector.
EigenPair principal_eig(double ell, const ScalarField& r);

// Smallest kappa of (-mu*Lap_h + M) phi = kappa (M + r) phi. Requires
// M + r > 0 at every node (InvalidWeight otherwise).
double weighted_min_eig(double mu, const ScalarField& r, double M);

// d(lambda_1)/dk for the semi-trivial linearization weight
// (alpha F(utilde) - theta) / d(utilde; k), evaluated via the eigenfunction
// identity. Only the parametric dispersal families admit a k-derivative.
double dlambda_dk(const ModelParams& p, const ScalarField& utilde, double mu);

// Spectral abscissa (max real part) of the discretized two-component
// linearization of the transformed steady system at (u, w). Dense eigensolve
// for n <= 400 nodes, shift-invert Arnoldi above.
double linearized_abscissa(const ScalarField& u, const ScalarField& w,
                           const ModelParams& p);

}  // namespace coexist
