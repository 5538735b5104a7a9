#pragma once

#include <span>
#include <string>
#include <vector>

#include "coexist/eigen.hpp"
#include "coexist/grid.hpp"
#include "coexist/model.hpp"

namespace coexist {

enum class Stability { Stable, Unstable, Neutral };

enum class RegimeTag {
  CoexistenceExists,
  NoPositiveSolution,
  SemiTrivialStableNoProof,
  Neutral,
  AssumptionViolated,
};

// Classification outcome with the computed evidence and the single theorem
// clause that produced it.
struct RegimeVerdict {
  RegimeTag tag = RegimeTag::AssumptionViolated;
  std::string clause;
  double lambda1 = 0.0;      // semi-trivial linearization eigenvalue
  double alpha_F_min = 0.0;  // alpha F(utilde_min)
  double alpha_F_max = 0.0;  // alpha F(utilde_max)
  double theta0 = 0.0;
  double theta_k_value = 0.0;
  double k_tilde_value = 0.0;
};

struct KStarResult {
  double value = 0.0;
  bool unbounded = false;  // bracket expansion failed: k* beyond any bound
};

struct MuStarResult {
  double value = 0.0;       // +inf when instability persists for every mu
  bool near_critical = false;  // bracket ran past 1e12: k is close to k*
  bool finite() const;
};

struct LevelSetPoint {
  double k = 0.0;  // sweep axis value (k, or theta for theta sweeps)
  double mu_star = 0.0;
};

struct SweepAxes {
  enum class Kind { ThetaMu, KMu } kind = Kind::ThetaMu;
  std::vector<double> axis1;  // theta or k values
  std::vector<double> axis2;  // mu values
};

struct SweepResult {
  SweepAxes axes;
  std::vector<RegimeVerdict> cells;  // row-major: axis1 outer, axis2 inner
  std::vector<LevelSetPoint> level_set;
};

// Weighted mortality threshold theta_k = alpha * int F(ut)/d / int 1/d.
// Evaluated with max-shifted weights so large k cannot overflow.
double theta_k(double k, const ModelParams& p, const ScalarField& utilde);

// Signed functional int (alpha F(ut) - theta) / d(ut;k) dx whose sign equals
// sgn(k - k*) inside the threshold window.
double calF(double k, double theta, const ModelParams& p, const ScalarField& utilde);

// Unique root of calF(k) = 0 for theta in (theta_0, alpha F(ut_max)).
KStarResult k_star(double theta, const ModelParams& p, const ScalarField& utilde);

// Critical predator diffusion: root of lambda_1(mu, (alpha F - theta)/d) = 0,
// or +inf when the instability persists for every mu.
MuStarResult mu_star(double k, double theta, const ModelParams& p,
                     const ScalarField& utilde);

// Critical mortality: root in theta of the same eigenvalue, bracketed on
// (alpha F(ut_min), alpha F(ut_max)).
double theta_tilde(double mu, const ModelParams& p, const ScalarField& utilde);

// lambda_1(mu, (alpha F(utilde) - theta)/d(utilde)) of the semi-trivial state.
double semitrivial_lambda1(const ModelParams& p, const ScalarField& utilde);

Stability classify_semitrivial(const ModelParams& p, const ScalarField& utilde);

// Largest k for which (alpha F(x) - theta)/d(x;k) is increasing on
// [0, ut_max]; the non-existence clause applies below it.
double k_tilde(const ModelParams& p, const ScalarField& utilde);

RegimeVerdict classify_regime(const ModelParams& p, const GridPtr& g);

// Same classification with a precomputed prey profile; the caller is
// responsible for having validated (H1)-(H3).
RegimeVerdict classify_regime_with(const ModelParams& p, const ScalarField& utilde);

SweepResult sweep_regime(const SweepAxes& axes, const ModelParams& p,
                         const GridPtr& g);

// (sum a_j b_j c_j)(sum c_j) >= (sum a_j c_j)(sum b_j c_j) for nonnegative
// ascending sequences; InvalidInput on unsorted or negative data.
bool chebyshev_sum_check(std::span<const double> a, std::span<const double> b,
                         std::span<const double> c);

// Three-point convexity probe of mu_star(theta) at fixed k.
bool convexity_check(double theta1, double theta2, double rho,
                     const ModelParams& p, const ScalarField& utilde);

std::string to_string(RegimeTag tag);
std::string to_string(Stability s);

}  // namespace coexist
