#include "coexist/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace coexist {

ScalarField::ScalarField(GridPtr g, std::vector<double> v)
    : grid(std::move(g)), values(std::move(v)) {
  if (!grid) throw InvalidInput("ScalarField: null grid");
  if (static_cast<int>(values.size()) != grid->n)
    throw InvalidInput("ScalarField: value count does not match grid");
  for (double x : values)
    if (!std::isfinite(x)) throw InvalidInput("ScalarField: non-finite value");
}

double ScalarField::min() const {
  return *std::min_element(values.begin(), values.end());
}

double ScalarField::max() const {
  return *std::max_element(values.begin(), values.end());
}

double ScalarField::sup_norm() const {
  double m = 0.0;
  for (double x : values) m = std::max(m, std::abs(x));
  return m;
}

GridPtr build_grid(double length, int n) {
  if (!(length > 0.0) || !std::isfinite(length))
    throw InvalidGrid("build_grid: length must be positive");
  if (n < 3) throw InvalidGrid("build_grid: need at least 3 nodes");
  auto g = std::make_shared<Grid>();
  g->length = length;
  g->n = n;
  g->h = length / (n - 1);
  g->nodes.resize(n);
  for (int i = 0; i < n; ++i) g->nodes[i] = i * g->h;
  g->nodes.back() = length;  // kill the last rounding ulp
  return g;
}

ScalarField make_field(const GridPtr& g, double constant) {
  return ScalarField(g, std::vector<double>(g->n, constant));
}

ScalarField make_field(const GridPtr& g, const std::function<double(double)>& f) {
  std::vector<double> v(g->n);
  for (int i = 0; i < g->n; ++i) v[i] = f(g->nodes[i]);
  return ScalarField(g, std::move(v));
}

double integrate(const ScalarField& f) {
  const Grid& g = *f.grid;
  double s = 0.5 * (f.values.front() + f.values.back());
  for (int i = 1; i < g.n - 1; ++i) s += f.values[i];
  return s * g.h;
}

ScalarField apply_neumann_laplacian(double ell, const ScalarField& f) {
  if (!(ell > 0.0)) throw InvalidInput("apply_neumann_laplacian: ell must be positive");
  const Grid& g = *f.grid;
  const double c = ell / (g.h * g.h);
  std::vector<double> out(g.n);
  out[0] = c * 2.0 * (f.values[1] - f.values[0]);
  for (int i = 1; i < g.n - 1; ++i)
    out[i] = c * (f.values[i - 1] - 2.0 * f.values[i] + f.values[i + 1]);
  out[g.n - 1] = c * 2.0 * (f.values[g.n - 2] - f.values[g.n - 1]);
  return ScalarField(f.grid, std::move(out));
}

int nearest_node(const Grid& g, double y) {
  int j = static_cast<int>(std::lround(y / g.h));
  return std::clamp(j, 0, g.n - 1);
}

GridPtr restrict_grid(const GridPtr& g, double y) {
  if (!(y > 0.0) || y > g->length * (1.0 + 1e-12))
    throw InvalidGrid("restrict_grid: y outside (0, L]");
  int j = nearest_node(*g, y);
  if (j < 2) j = 2;  // keep at least 3 nodes
  if (j == g->n - 1) return g;
  auto sub = std::make_shared<Grid>();
  sub->length = j * g->h;
  sub->n = j + 1;
  sub->h = g->h;
  sub->nodes.assign(g->nodes.begin(), g->nodes.begin() + j + 1);
  return sub;
}

}  // namespace coexist
