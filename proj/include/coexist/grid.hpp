#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "coexist/errors.hpp"

namespace coexist {

// Uniform node-centered mesh on [0, L] with homogeneous Neumann boundaries
// handled by ghost reflection. Immutable after construction.
struct Grid {
  double length = 0.0;              // L
  int n = 0;                        // node count, >= 3
  double h = 0.0;                   // spacing L/(n-1)
  std::vector<double> nodes;        // x_i = i*h, x_0 = 0, x_{n-1} = L

  // Trapezoidal quadrature weight of node i: h/2 at the ends, h inside.
  double weight(int i) const { return (i == 0 || i == n - 1) ? 0.5 * h : h; }
};

using GridPtr = std::shared_ptr<const Grid>;

// Node-indexed values of a function on a Grid.
struct ScalarField {
  GridPtr grid;
  std::vector<double> values;

  ScalarField() = default;
  ScalarField(GridPtr g, std::vector<double> v);

  int size() const { return static_cast<int>(values.size()); }
  double operator[](int i) const { return values[i]; }
  double& operator[](int i) { return values[i]; }

  double min() const;
  double max() const;
  double sup_norm() const;  // max |value|
};

GridPtr build_grid(double length, int n);

// Field helpers.
ScalarField make_field(const GridPtr& g, double constant);
ScalarField make_field(const GridPtr& g, const std::function<double(double)>& f);

// Trapezoidal quadrature of f over (0, L). Exact for affine f.
double integrate(const ScalarField& f);

// ell * second-difference stencil with reflective ghost nodes
// (f_{-1} = f_1, f_n = f_{n-2}), i.e. the discrete Neumann Laplacian.
ScalarField apply_neumann_laplacian(double ell, const ScalarField& f);

// Grid on (0, y') where y' is y snapped to the nearest node; the spacing h
// is preserved so traces stay comparable across y during shooting.
GridPtr restrict_grid(const GridPtr& g, double y);

// Index of the node nearest to y (the snap target of restrict_grid).
int nearest_node(const Grid& g, double y);

}  // namespace coexist
