#include "coexist/eigen.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <random>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "tridiag.hpp"

namespace coexist {

namespace {

// Symmetric tridiagonal matrix (diag d, off-diagonal e between i and i+1).
struct SymTridiag {
  std::vector<double> d;
  std::vector<double> e;
  int n() const { return static_cast<int>(d.size()); }
};

// Similarity transform D A D^{-1} with D = diag(sqrt(w_i)) turns the
// ghost-reflected Laplacian-plus-potential into a symmetric tridiagonal
// matrix; w are the trapezoid weights, which make W*A symmetric.
SymTridiag symmetrize(double ell, const std::vector<double>& r, const Grid& g) {
  const int n = g.n;
  const double c = ell / (g.h * g.h);
  SymTridiag T;
  T.d.resize(n);
  T.e.resize(n - 1);
  for (int i = 0; i < n; ++i) T.d[i] = -2.0 * c + r[i];
  for (int i = 0; i + 1 < n; ++i) {
    const double a_up = (i == 0) ? 2.0 * c : c;  // A_{i,i+1}
    T.e[i] = a_up * std::sqrt(g.weight(i) / g.weight(i + 1));
  }
  return T;
}

// Number of eigenvalues of T strictly less than x (Sturm/LDL^T count).
int count_below(const SymTridiag& T, double x) {
  const double tiny = std::numeric_limits<double>::min();
  int count = 0;
  double q = T.d[0] - x;
  if (q < 0.0) ++count;
  for (int i = 1; i < T.n(); ++i) {
    if (q == 0.0) q = tiny;
    q = T.d[i] - x - T.e[i - 1] * T.e[i - 1] / q;
    if (q < 0.0) ++count;
  }
  return count;
}

double gershgorin_lo(const SymTridiag& T) {
  double lo = std::numeric_limits<double>::infinity();
  for (int i = 0; i < T.n(); ++i) {
    double radius = 0.0;
    if (i > 0) radius += std::abs(T.e[i - 1]);
    if (i + 1 < T.n()) radius += std::abs(T.e[i]);
    lo = std::min(lo, T.d[i] - radius);
  }
  return lo;
}

double gershgorin_hi(const SymTridiag& T) {
  double hi = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < T.n(); ++i) {
    double radius = 0.0;
    if (i > 0) radius += std::abs(T.e[i - 1]);
    if (i + 1 < T.n()) radius += std::abs(T.e[i]);
    hi = std::max(hi, T.d[i] + radius);
  }
  return hi;
}

// Bisection for the m-th smallest eigenvalue (m in [1, n]): the unique x with
// count_below(x) < m <= count_below(x+).
double bisect_eigenvalue(const SymTridiag& T, int m) {
  double lo = gershgorin_lo(T);
  double hi = gershgorin_hi(T);
  const double scale = std::max({1.0, std::abs(lo), std::abs(hi)});
  for (int it = 0; it < 200 && (hi - lo) > 1e-15 * scale; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (count_below(T, mid) >= m)
      hi = mid;
    else
      lo = mid;
  }
  return 0.5 * (lo + hi);
}

// One inverse-iteration pass (T - sigma I) x = b.
std::vector<double> shifted_solve(const SymTridiag& T, double sigma,
                                  const std::vector<double>& b) {
  const int n = T.n();
  std::vector<double> sub(n, 0.0), diag(n), sup(n, 0.0);
  for (int i = 0; i < n; ++i) diag[i] = T.d[i] - sigma;
  for (int i = 0; i + 1 < n; ++i) {
    sup[i] = T.e[i];
    sub[i + 1] = T.e[i];
  }
  return detail::solve_tridiag(sub, diag, sup, b);
}

void normalize_inf(std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  if (m == 0.0) throw EigFailure("inverse iteration produced a zero vector");
  for (double& x : v) x /= m;
}

std::vector<double> eigenvector_at(const SymTridiag& T, double lambda) {
  const int n = T.n();
  double norm_t = std::abs(lambda);
  for (int i = 0; i < n; ++i) norm_t = std::max(norm_t, std::abs(T.d[i]));
  for (int i = 0; i + 1 < n; ++i) norm_t = std::max(norm_t, std::abs(T.e[i]));
  const double sigma = lambda + 1e-14 * std::max(1.0, norm_t);

  std::vector<double> v(n, 1.0);
  normalize_inf(v);
  for (int it = 0; it < 8; ++it) {
    std::vector<double> next;
    try {
      next = shifted_solve(T, sigma, v);
    } catch (const SolveFailure&) {
      break;  // shift collided with the eigenvalue: v is already converged
    }
    bool finite = true;
    for (double x : next)
      if (!std::isfinite(x)) finite = false;
    if (!finite) break;
    normalize_inf(next);
    // residual ||T next - lambda next||_inf
    double res = 0.0;
    for (int i = 0; i < n; ++i) {
      double y = T.d[i] * next[i] - lambda * next[i];
      if (i > 0) y += T.e[i - 1] * next[i - 1];
      if (i + 1 < n) y += T.e[i] * next[i + 1];
      res = std::max(res, std::abs(y));
    }
    v = std::move(next);
    if (res <= 1e-13 * std::max(1.0, norm_t)) return v;
  }
  return v;
}

struct LinearizationBlocks {
  std::vector<double> a11, a12, a21, a22;  // diagonal coupling coefficients
};

// Pointwise coefficients of the linearization of the transformed system.
LinearizationBlocks linearization_coeffs(const ScalarField& u, const ScalarField& w,
                                         const ModelParams& p, const ScalarField& m) {
  const int n = u.size();
  LinearizationBlocks B;
  B.a11.resize(n);
  B.a12.resize(n);
  B.a21.resize(n);
  B.a22.resize(n);
  for (int i = 0; i < n; ++i) {
    const double F = eval_response(p.response, u[i]);
    const double Fp = eval_response_prime(p.response, u[i]);
    const double d = eval_dispersal(p.dispersal, p.k, u[i]);
    const double dp = eval_dispersal_prime(p.dispersal, p.k, u[i]);
    const double FdP = (Fp * d - F * dp) / (d * d);  // (F/d)'
    B.a11[i] = (m[i] - 2.0 * u[i]) - FdP * w[i];
    B.a12[i] = -F / d;
    B.a21[i] = (p.alpha * Fp / d - (p.alpha * F - p.theta) * dp / (d * d)) * w[i];
    B.a22[i] = (p.alpha * F - p.theta) / d;
  }
  return B;
}

Eigen::MatrixXd dense_linearization(const ScalarField& u, const ScalarField& w,
                                    const ModelParams& p) {
  const Grid& g = *u.grid;
  const int n = g.n;
  const ScalarField m = resource_field(p.resource, u.grid);
  const LinearizationBlocks B = linearization_coeffs(u, w, p, m);
  const auto Lu = detail::neumann_laplacian_rows(p.eps, g.h, n);
  const auto Lw = detail::neumann_laplacian_rows(p.mu, g.h, n);

  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  for (int i = 0; i < n; ++i) {
    J(i, i) = Lu.diag[i] + B.a11[i];
    if (i > 0) J(i, i - 1) = Lu.sub[i];
    if (i + 1 < n) J(i, i + 1) = Lu.sup[i];
    J(i, n + i) = B.a12[i];

    J(n + i, n + i) = Lw.diag[i] + B.a22[i];
    if (i > 0) J(n + i, n + i - 1) = Lw.sub[i];
    if (i + 1 < n) J(n + i, n + i + 1) = Lw.sup[i];
    J(n + i, i) = B.a21[i];
  }
  return J;
}

// Shift-invert Arnoldi on M = (I - dt*J)^{-1}: the dominant Ritz values of M
// map to the rightmost eigenvalues of J via tau = (1 - 1/g)/dt.
double arnoldi_abscissa(const ScalarField& u, const ScalarField& w,
                        const ModelParams& p) {
  const Grid& g = *u.grid;
  const int n = g.n;
  const int N = 2 * n;
  const ScalarField m = resource_field(p.resource, u.grid);
  const LinearizationBlocks B = linearization_coeffs(u, w, p, m);

  double coeff_scale = 1.0;
  for (int i = 0; i < n; ++i)
    coeff_scale = std::max({coeff_scale, std::abs(B.a11[i]), std::abs(B.a12[i]),
                            std::abs(B.a21[i]), std::abs(B.a22[i])});
  const double dt = 0.05 / coeff_scale;

  // Banded LU of (I - dt*J) in the interleaved ordering (u_i, w_i): bandwidth 2.
  Eigen::MatrixXd band = Eigen::MatrixXd::Zero(N, N);
  const auto Lu = detail::neumann_laplacian_rows(p.eps, g.h, n);
  const auto Lw = detail::neumann_laplacian_rows(p.mu, g.h, n);
  for (int i = 0; i < n; ++i) {
    const int iu = 2 * i, iw = 2 * i + 1;
    band(iu, iu) = 1.0 - dt * (Lu.diag[i] + B.a11[i]);
    band(iw, iw) = 1.0 - dt * (Lw.diag[i] + B.a22[i]);
    band(iu, iw) = -dt * B.a12[i];
    band(iw, iu) = -dt * B.a21[i];
    if (i > 0) {
      band(iu, iu - 2) = -dt * Lu.sub[i];
      band(iw, iw - 2) = -dt * Lw.sub[i];
    }
    if (i + 1 < n) {
      band(iu, iu + 2) = -dt * Lu.sup[i];
      band(iw, iw + 2) = -dt * Lw.sup[i];
    }
  }
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(band);

  const int krylov = std::min(60, N);
  Eigen::MatrixXd V(N, krylov + 1);
  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(krylov + 1, krylov);
  std::mt19937_64 rng(12345);
  std::uniform_real_distribution<double> unif(0.1, 1.0);
  Eigen::VectorXd v0(N);
  for (int i = 0; i < N; ++i) v0[i] = unif(rng);
  V.col(0) = v0 / v0.norm();
  int built = 0;
  for (int j = 0; j < krylov; ++j) {
    Eigen::VectorXd t = lu.solve(V.col(j));
    for (int i = 0; i <= j; ++i) {
      H(i, j) = V.col(i).dot(t);
      t -= H(i, j) * V.col(i);
    }
    H(j + 1, j) = t.norm();
    built = j + 1;
    if (H(j + 1, j) < 1e-12) break;
    V.col(j + 1) = t / H(j + 1, j);
  }
  Eigen::MatrixXd Hs = H.topLeftCorner(built, built);
  Eigen::EigenSolver<Eigen::MatrixXd> es(Hs);
  double abscissa = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < built; ++i) {
    const std::complex<double> gval = es.eigenvalues()[i];
    if (std::abs(gval) < 1e-12) continue;
    const std::complex<double> tau = (1.0 - 1.0 / gval) / dt;
    abscissa = std::max(abscissa, tau.real());
  }
  if (!std::isfinite(abscissa))
    throw EigFailure("linearized_abscissa: Arnoldi produced no Ritz values");
  return abscissa;
}

}  // namespace

namespace {

// Rayleigh quotient of the original (ghost-reflected) operator under the
// trapezoid inner product. The stencil is applied to phi minus its mean so
// the constant mode contributes exactly zero, which keeps the quotient at
// machine accuracy even when ell/h^2 is huge.
double rayleigh_polish(double ell, const std::vector<double>& r,
                       const std::vector<double>& phi, const Grid& g) {
  const int n = g.n;
  const double c = ell / (g.h * g.h);
  double mean = 0.0, wtot = 0.0;
  for (int i = 0; i < n; ++i) {
    mean += g.weight(i) * phi[i];
    wtot += g.weight(i);
  }
  mean /= wtot;
  std::vector<double> psi(n);
  for (int i = 0; i < n; ++i) psi[i] = phi[i] - mean;
  double num = 0.0, den = 0.0;
  for (int i = 0; i < n; ++i) {
    double lap;
    if (i == 0)
      lap = 2.0 * (psi[1] - psi[0]);
    else if (i == n - 1)
      lap = 2.0 * (psi[n - 2] - psi[n - 1]);
    else
      lap = psi[i - 1] - 2.0 * psi[i] + psi[i + 1];
    const double w = g.weight(i);
    num += w * phi[i] * (c * lap + r[i] * phi[i]);
    den += w * phi[i] * phi[i];
  }
  return num / den;
}

}  // namespace

EigenPair principal_eig(double ell, const ScalarField& r) {
  if (!(ell > 0.0)) throw InvalidInput("principal_eig: ell must be positive");
  const Grid& g = *r.grid;
  const SymTridiag T = symmetrize(ell, r.values, g);
  const double lambda = bisect_eigenvalue(T, g.n);  // largest
  std::vector<double> v = eigenvector_at(T, lambda);

  // Undo the similarity transform and fix the sign to positive.
  std::vector<double> phi(g.n);
  for (int i = 0; i < g.n; ++i) phi[i] = v[i] / std::sqrt(g.weight(i));
  double biggest = 0.0;
  int arg = 0;
  for (int i = 0; i < g.n; ++i)
    if (std::abs(phi[i]) > biggest) {
      biggest = std::abs(phi[i]);
      arg = i;
    }
  if (phi[arg] < 0.0)
    for (double& x : phi) x = -x;

  EigenPair out;
  out.lambda = rayleigh_polish(ell, r.values, phi, g);
  // Fall back to the bisection value if the polish ever disagrees beyond the
  // bisection width (it should not for a converged eigenvector).
  const double scale = std::max({1.0, std::abs(lambda), r.sup_norm()});
  if (!(std::abs(out.lambda - lambda) <= 1e-8 * scale)) out.lambda = lambda;
  for (double& x : phi) {
    if (!(x > 0.0)) {
      x = 1e-300;  // Perron vector: flooring tiny negatives from roundoff
      out.clamped = true;
    }
  }
  const double mx = *std::max_element(phi.begin(), phi.end());
  for (double& x : phi) x /= mx;
  out.phi = ScalarField(r.grid, std::move(phi));
  return out;
}

double weighted_min_eig(double mu, const ScalarField& r, double M) {
  if (!(mu > 0.0)) throw InvalidInput("weighted_min_eig: mu must be positive");
  const Grid& g = *r.grid;
  for (int i = 0; i < g.n; ++i)
    if (!(M + r.values[i] > 0.0))
      throw InvalidWeight("weighted_min_eig: M + r must be positive everywhere");

  // (-mu*Lap + M) phi = kappa diag(M+r) phi reduces to a symmetric tridiagonal
  // problem via G = diag(sqrt(w_i (M + r_i))): both sides share the trapezoid
  // Dirichlet form.
  const int n = g.n;
  const double c = mu / (g.h * g.h);
  SymTridiag T;
  T.d.resize(n);
  T.e.resize(n - 1);
  for (int i = 0; i < n; ++i) T.d[i] = (2.0 * c + M) / (M + r.values[i]);
  for (int i = 0; i + 1 < n; ++i) {
    const double offd = -mu / g.h;  // (W(-mu*Lap))_{i,i+1}, same for all faces
    T.e[i] = offd / std::sqrt(g.weight(i) * (M + r.values[i]) * g.weight(i + 1) *
                              (M + r.values[i + 1]));
  }
  return bisect_eigenvalue(T, 1);  // smallest
}

double dlambda_dk(const ModelParams& p, const ScalarField& utilde, double mu) {
  if (p.dispersal == DispersalKind::Constant)
    throw InvalidInput("dlambda_dk: needs a parametric dispersal family");
  const GridPtr& g = utilde.grid;
  ScalarField r = make_field(g, 0.0);
  for (int i = 0; i < utilde.size(); ++i) {
    const double F = eval_response(p.response, utilde[i]);
    const double d = eval_dispersal(p.dispersal, p.k, utilde[i]);
    r[i] = (p.alpha * F - p.theta) / d;
  }
  const EigenPair ep = principal_eig(mu, r);

  // -int (alpha F - theta)/d^2 * dd/dk * phi^2 / int phi^2
  double num = 0.0, den = 0.0;
  for (int i = 0; i < utilde.size(); ++i) {
    const double w = g->weight(i);
    const double d = eval_dispersal(p.dispersal, p.k, utilde[i]);
    const double ddk = eval_dispersal_dk(p.dispersal, p.k, utilde[i]);
    const double phi2 = ep.phi[i] * ep.phi[i];
    num += -w * r[i] / d * ddk * phi2;
    den += w * phi2;
  }
  return num / den;
}

double linearized_abscissa(const ScalarField& u, const ScalarField& w,
                           const ModelParams& p) {
  for (int i = 0; i < u.size(); ++i) {
    if (!(u[i] > 0.0)) throw InvalidInput("linearized_abscissa: u must be positive");
    if (w[i] < 0.0) throw InvalidInput("linearized_abscissa: w must be nonnegative");
  }
  if (u.grid->n <= 400) {
    Eigen::MatrixXd J = dense_linearization(u, w, p);
    Eigen::EigenSolver<Eigen::MatrixXd> es(J, /*computeEigenvectors=*/false);
    if (es.info() != Eigen::Success)
      throw EigFailure("linearized_abscissa: dense eigensolve failed");
    double abscissa = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < es.eigenvalues().size(); ++i)
      abscissa = std::max(abscissa, es.eigenvalues()[i].real());
    return abscissa;
  }
  return arnoldi_abscissa(u, w, p);
}

}  // namespace coexist
