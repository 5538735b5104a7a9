#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "coexist/model.hpp"

using namespace coexist;
namespace {
constexpr double pi = std::numbers::pi;

ModelParams fig2_params(double k) {
  ModelParams p;
  p.eps = 0.1;
  p.mu = 10.0;
  p.alpha = 1.0;
  p.theta = 0.8;
  p.k = k;
  p.response = ResponseKind::Linear;
  p.dispersal = k == 0.0 ? DispersalKind::Constant : DispersalKind::Exponential;
  p.resource = {ResourceKind::SineOffset, 0.5, 0.5, 0.0};
  return p;
}
}  // namespace

TEST_CASE("resource evaluation") {
  ResourceSpec sine{ResourceKind::SineOffset, 0.5, 0.5, 0.0};
  CHECK(eval_resource(sine, pi / 2, 2 * pi) == doctest::Approx(1.0).epsilon(1e-15));

  ResourceSpec cst{ResourceKind::Constant, 0.7, 0.0, 0.0};
  CHECK(eval_resource(cst, 0.3, 1.0) == 0.7);
  CHECK(eval_resource(cst, 0.9, 1.0) == 0.7);

  ResourceSpec ramp{ResourceKind::Ramp, 0.0, 1.0, 0.0};
  CHECK(eval_resource(ramp, 3.0, 3.0) == doctest::Approx(1.0).epsilon(1e-15));

  ResourceSpec step{ResourceKind::Step, 1.0, 2.0, 0.5};
  CHECK(eval_resource(step, 0.25, 1.0) == 1.0);
  CHECK(eval_resource(step, 0.75, 1.0) == 2.0);
}

TEST_CASE("response functions and inverses") {
  CHECK(eval_response_inverse(ResponseKind::Linear, 0.8) == doctest::Approx(0.8));
  CHECK(eval_response_inverse(ResponseKind::HollingII, 0.5) == doctest::Approx(1.0));
  CHECK_THROWS_AS(eval_response_inverse(ResponseKind::HollingII, 1.2), OutOfRange);

  // F(0) = 0 and F' > 0 on [0, 100] for every built-in response
  for (auto kind :
       {ResponseKind::Linear, ResponseKind::HollingII, ResponseKind::HollingIII}) {
    CHECK(eval_response(kind, 0.0) == 0.0);
    for (int i = 0; i <= 1000; ++i) {
      const double u = 100.0 * i / 1000.0;
      CHECK(eval_response_prime(kind, u) > 0.0);
    }
    // inverse round-trips where defined
    for (double u : {0.1, 0.5, 2.0}) {
      const double s = eval_response(kind, u);
      CHECK(eval_response_inverse(kind, s) == doctest::Approx(u).epsilon(1e-12));
    }
  }
}

TEST_CASE("dispersal families") {
  CHECK(eval_dispersal(DispersalKind::Exponential, 0.0, 3.1) == 1.0);
  CHECK(eval_dispersal(DispersalKind::Exponential, 8.0, 0.5) ==
        doctest::Approx(std::exp(-4.0)).epsilon(1e-12));
  CHECK(eval_dispersal(DispersalKind::Algebraic, 2.0, 1.0) == doctest::Approx(0.25));

  for (auto kind : {DispersalKind::Exponential, DispersalKind::Algebraic}) {
    for (double u : {0.1, 1.0, 5.0}) {
      CHECK(eval_dispersal(kind, 2.0, u) > 0.0);
      CHECK(eval_dispersal_prime(kind, 2.0, u) < 0.0);
      CHECK(eval_dispersal(kind, 0.0, u) == 1.0);
    }
  }

  // dd/dk against a centered difference
  for (auto kind : {DispersalKind::Exponential, DispersalKind::Algebraic}) {
    const double k = 1.7, u = 0.8, dlt = 1e-6;
    const double fd =
        (eval_dispersal(kind, k + dlt, u) - eval_dispersal(kind, k - dlt, u)) /
        (2 * dlt);
    CHECK(eval_dispersal_dk(kind, k, u) == doctest::Approx(fd).epsilon(1e-8));
  }
}

TEST_CASE("assumption report on the simulated setup") {
  auto g = build_grid(2 * pi, 201);
  auto rep = check_assumptions(fig2_params(8.0), g);
  CHECK(rep.h1);
  CHECK(rep.h2);
  CHECK(rep.h3);
  CHECK(rep.h4);
  CHECK(rep.h5);
  CHECK(rep.all_pass());
}

TEST_CASE("assumption failures are reported, not thrown") {
  auto g = build_grid(2 * pi, 101);

  ModelParams constant_m = fig2_params(1.0);
  constant_m.resource = {ResourceKind::Constant, 0.5, 0.0, 0.0};
  CHECK_FALSE(check_assumptions(constant_m, g).h1);

  ModelParams negative_mass = fig2_params(1.0);
  negative_mass.resource = {ResourceKind::SineOffset, -1.0, 0.5, 0.0};
  auto rep = check_assumptions(negative_mass, g);
  CHECK_FALSE(rep.h1);
}

TEST_CASE("H5 holds for the cases named by the theory") {
  auto g = build_grid(2 * pi, 101);

  // Linear F with any admissible dispersal
  for (auto d : {DispersalKind::Exponential, DispersalKind::Algebraic}) {
    ModelParams p = fig2_params(3.0);
    p.dispersal = d;
    CHECK(check_assumptions(p, g).h5);
  }
  // Holling II with algebraic dispersal, k >= 1
  ModelParams p = fig2_params(1.5);
  p.response = ResponseKind::HollingII;
  p.dispersal = DispersalKind::Algebraic;
  CHECK(check_assumptions(p, g).h5);
}
