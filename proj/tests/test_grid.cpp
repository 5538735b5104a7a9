#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "coexist/grid.hpp"

using namespace coexist;
namespace {
constexpr double pi = std::numbers::pi;
}

TEST_CASE("build_grid basic layouts") {
  auto g = build_grid(pi, 5);
  CHECK(g->n == 5);
  CHECK(g->h == doctest::Approx(pi / 4).epsilon(1e-15));
  CHECK(g->nodes[0] == 0.0);
  CHECK(g->nodes[2] == doctest::Approx(pi / 2).epsilon(1e-15));
  CHECK(g->nodes[4] == pi);

  auto g2 = build_grid(2.0, 3);
  CHECK(g2->nodes[0] == 0.0);
  CHECK(g2->nodes[1] == 1.0);
  CHECK(g2->nodes[2] == 2.0);

  CHECK(g2->h * (g2->n - 1) == doctest::Approx(g2->length).epsilon(1e-15));
  CHECK_THROWS_AS(build_grid(0.0, 10), InvalidGrid);
  CHECK_THROWS_AS(build_grid(1.0, 2), InvalidGrid);
}

TEST_CASE("integrate: constants, affine, analytic oracle") {
  auto g = build_grid(2.0, 7);
  CHECK(integrate(make_field(g, 1.0)) == doctest::Approx(2.0).epsilon(1e-15));

  for (int n : {3, 11, 100}) {
    auto gu = build_grid(1.0, n);
    auto f = make_field(gu, [](double x) { return x; });
    CHECK(integrate(f) == doctest::Approx(0.5).epsilon(1e-14));
  }

  // integral of sin over (0, pi) = 2 (antiderivative oracle)
  auto gs = build_grid(pi, 2001);
  auto s = make_field(gs, [](double x) { return std::sin(x); });
  CHECK(std::abs(integrate(s) - 2.0) < 1e-6);
}

TEST_CASE("integrate is linear") {
  auto g = build_grid(3.0, 101);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  for (int rep = 0; rep < 10; ++rep) {
    auto f = make_field(g, 0.0);
    auto q = make_field(g, 0.0);
    for (int i = 0; i < g->n; ++i) {
      f[i] = unif(rng);
      q[i] = unif(rng);
    }
    const double a = unif(rng), b = unif(rng);
    auto combo = make_field(g, 0.0);
    for (int i = 0; i < g->n; ++i) combo[i] = a * f[i] + b * q[i];
    const double lhs = integrate(combo);
    const double rhs = a * integrate(f) + b * integrate(q);
    CHECK(std::abs(lhs - rhs) <= 1e-12 * (1.0 + std::abs(rhs)));
  }
}

TEST_CASE("neumann laplacian: kernel, quadratic, cosine oracle") {
  auto g = build_grid(1.0, 11);
  auto c = make_field(g, 4.2);
  auto lap = apply_neumann_laplacian(3.0, c);
  for (int i = 0; i < g->n; ++i) CHECK(lap[i] == 0.0);

  auto q = make_field(g, [](double x) { return x * x; });
  auto lq = apply_neumann_laplacian(2.5, q);
  for (int i = 1; i < g->n - 1; ++i)
    CHECK(lq[i] == doctest::Approx(2.0 * 2.5).epsilon(1e-10));

  auto gc = build_grid(pi, 801);
  auto f = make_field(gc, [](double x) { return std::cos(x); });
  auto lf = apply_neumann_laplacian(1.0, f);
  double err = 0.0;
  for (int i = 1; i < gc->n - 1; ++i)
    err = std::max(err, std::abs(lf[i] + std::cos(gc->nodes[i])));
  CHECK(err < 1e-4);
}

TEST_CASE("discrete integration by parts (weighted symmetry)") {
  auto g = build_grid(2.0, 64);
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  for (int rep = 0; rep < 10; ++rep) {
    auto f = make_field(g, 0.0);
    auto q = make_field(g, 0.0);
    for (int i = 0; i < g->n; ++i) {
      f[i] = unif(rng);
      q[i] = unif(rng);
    }
    auto lf = apply_neumann_laplacian(1.7, f);
    auto lq = apply_neumann_laplacian(1.7, q);
    auto prod1 = make_field(g, 0.0);
    auto prod2 = make_field(g, 0.0);
    for (int i = 0; i < g->n; ++i) {
      prod1[i] = q[i] * lf[i];
      prod2[i] = f[i] * lq[i];
    }
    const double a = integrate(prod1), b = integrate(prod2);
    CHECK(std::abs(a - b) <= 1e-10 * (1.0 + std::abs(a) + std::abs(b)));
  }
}

TEST_CASE("restrict_grid snapping") {
  auto g = build_grid(2.0, 5);
  auto sub = restrict_grid(g, 1.0);
  CHECK(sub->n == 3);
  CHECK(sub->length == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(sub->h == g->h);

  CHECK(restrict_grid(g, 2.0).get() == g.get());
  CHECK_THROWS_AS(restrict_grid(g, 2.5), InvalidGrid);
  CHECK_THROWS_AS(restrict_grid(g, -0.1), InvalidGrid);

  // snapping keeps at least 3 nodes
  auto tiny = restrict_grid(g, 0.1);
  CHECK(tiny->n >= 3);
}
