#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "coexist/errors.hpp"

namespace coexist::detail {

// Solves a general tridiagonal system in place using Gaussian elimination
// with partial pivoting (one extra superdiagonal of fill).
//   sub[i]*x[i-1] + diag[i]*x[i] + sup[i]*x[i+1] = rhs[i]
// sub[0] and sup[n-1] are ignored.
inline std::vector<double> solve_tridiag(std::vector<double> sub,
                                         std::vector<double> diag,
                                         std::vector<double> sup,
                                         std::vector<double> rhs) {
  const std::size_t n = diag.size();
  std::vector<double> fill(n, 0.0);
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (std::abs(sub[k + 1]) > std::abs(diag[k])) {
      std::swap(diag[k], sub[k + 1]);
      std::swap(sup[k], diag[k + 1]);
      if (k + 2 < n) std::swap(fill[k], sup[k + 1]);
      std::swap(rhs[k], rhs[k + 1]);
    }
    if (diag[k] == 0.0) throw SolveFailure("solve_tridiag: singular pivot");
    const double m = sub[k + 1] / diag[k];
    diag[k + 1] -= m * sup[k];
    if (k + 2 < n) sup[k + 1] -= m * fill[k];
    rhs[k + 1] -= m * rhs[k];
  }
  if (diag[n - 1] == 0.0) throw SolveFailure("solve_tridiag: singular pivot");
  std::vector<double> x(n);
  x[n - 1] = rhs[n - 1] / diag[n - 1];
  if (n >= 2) x[n - 2] = (rhs[n - 2] - sup[n - 2] * x[n - 1]) / diag[n - 2];
  for (std::size_t ir = 3; ir <= n; ++ir) {
    const std::size_t i = n - ir;
    x[i] = (rhs[i] - sup[i] * x[i + 1] - fill[i] * x[i + 2]) / diag[i];
  }
  return x;
}

// Rows of the discrete Neumann Laplacian scaled by ell/h^2: the boundary
// rows carry the factor-2 ghost reflection.
struct LaplacianRows {
  std::vector<double> sub, diag, sup;
};

inline LaplacianRows neumann_laplacian_rows(double ell, double h, int n) {
  const double c = ell / (h * h);
  LaplacianRows L;
  L.sub.assign(n, c);
  L.diag.assign(n, -2.0 * c);
  L.sup.assign(n, c);
  L.sup[0] = 2.0 * c;
  L.sub[n - 1] = 2.0 * c;
  return L;
}

}  // namespace coexist::detail
