#include <doctest.h>

#include <cmath>

#include "minty/catalog.hpp"
#include "support.hpp"

using namespace minty;
using namespace minty::testing;

namespace {

// Real root of x^3 + x = y (Cardano; the discriminant is always positive).
double cubic_root(double y) {
  const double s = std::sqrt(y * y / 4.0 + 1.0 / 27.0);
  return std::cbrt(y / 2.0 + s) + std::cbrt(y / 2.0 - s);
}

}  // namespace

TEST_CASE("Map basics and provenance") {
  const Map id = Map::identity(2);
  CHECK(id(vec2(1.0, 2.0)) == vec2(1.0, 2.0));
  CHECK_THROWS_AS(id(Vector::Zero(3)), DimensionError);
  const Map r = reflect(complement(id));
  CHECK(r.describe() == "reflect(complement(identity))");
  CHECK(r(vec2(1.0, 2.0)) == vec2(-1.0, -2.0));
  CHECK_THROWS_AS(Map(0, [](const Vector& x) { return x; }, make_provenance("x")), InvalidArgument);
}

TEST_CASE("complement and reflect carry exact affine forms") {
  std::mt19937_64 rng(21);
  for (int k = 0; k < 30; ++k) {
    const Matrix m = random_monotone_matrix(rng, 3);
    const Vector b = random_vector(rng, 3);
    const auto a = make_operator(spec::affine(m, b));
    for (const Map& t : {complement(a.resolvent()), reflect(a.resolvent()), a.resolvent()}) {
      REQUIRE(t.affine_form());
      const Vector x = random_vector(rng, 3, 2.0);
      CHECK((t.affine_form()->apply(x) - t(x)).norm() <= 1e-10 * (1.0 + x.norm()));
    }
  }
}

TEST_CASE("Minty sample lands on the graph") {
  std::mt19937_64 rng(4);
  const Matrix m = random_monotone_matrix(rng, 3);
  const auto a = make_operator(spec::linear(m));
  std::vector<Vector> ps;
  for (int i = 0; i < 50; ++i) ps.push_back(random_vector(rng, 3));
  const auto g = minty_sample(a, ps);
  REQUIRE(g.size() == 50);
  for (std::size_t i = 0; i < g.size(); ++i) {
    CHECK((g.pairs[i].x + g.pairs[i].u - ps[i]).norm() <= 1e-12 * (1.0 + ps[i].norm()));
    CHECK((m * g.pairs[i].x - g.pairs[i].u).norm() <= 1e-10 * (1.0 + ps[i].norm()));
  }
  const auto s = swap(g);
  CHECK(s.pairs[3].x == g.pairs[3].u);
  CHECK(s.pairs[3].u == g.pairs[3].x);
}

TEST_CASE("property: resolvents of random monotone matrices are firm and their reflections nonexpansive") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = 1 + trial % 5;
    const auto a = make_operator(spec::linear(random_monotone_matrix(rng, n)));
    const Map& t = a.resolvent();
    const Map nmap = reflect(t);
    for (int k = 0; k < 20; ++k) {
      const Vector x = random_vector(rng, n, 3.0);
      const Vector y = random_vector(rng, n, 3.0);
      const Vector d = x - y;
      const Vector td = t(x) - t(y);
      const double dd = d.squaredNorm();
      CHECK(td.squaredNorm() + (d - td).squaredNorm() <= dd + 1e-9 * (1.0 + dd));
      CHECK((nmap(x) - nmap(y)).squaredNorm() <= dd + 1e-9 * (1.0 + dd));
    }
  }
}

TEST_CASE("from_firm recovers the operator") {
  // T = J_A for A = 2 Id is x/3; T^{-1} - Id = 2 Id.
  const Map t = Map::scaled_identity(2, 1.0 / 3.0);
  const auto a = from_firm(t, "two");
  CHECK(a.label() == "two");
  CHECK(a.flags().is_linear == Tri::yes);
  const Vector p = vec2(3.0, -6.0);
  CHECK((a.resolvent()(p) - p / 3.0).norm() == 0.0);
  const auto b = from_firm(Map(2, [](const Vector& x) { return Vector(x.cwiseMax(0.0)); },
                               make_provenance("relu")));
  CHECK(b.flags().is_affine == Tri::unknown);
  CHECK(b.label() == "from_firm(relu)");
}

TEST_CASE("operators given by a direct evaluator get a solver-backed resolvent") {
  const auto cube = MonotoneOperator::from_direct(
      2, [](const Vector& x) { return Vector(x.array().cube().matrix()); }, {}, "cube");
  std::mt19937_64 rng(8);
  for (int k = 0; k < 100; ++k) {
    const Vector y = random_vector(rng, 2, 5.0);
    const Vector x = cube.resolvent()(y);
    CHECK(std::abs(x[0] - cubic_root(y[0])) <= 1e-9 * (1.0 + std::abs(x[0])));
    CHECK(std::abs(x[1] - cubic_root(y[1])) <= 1e-9 * (1.0 + std::abs(x[1])));
  }
  CHECK(cube.has_direct());
  CHECK(cube.direct(vec2(2.0, -1.0)) == vec2(8.0, -1.0));
}

TEST_CASE("solve_resolvent_equation reports failure") {
  ResolventSolverOptions opts;
  opts.newton_steps = 0;
  opts.damped_steps = 3;
  opts.residual_tol = 1e-15;
  // x + 100 x = y converges slowly under the damped step, so three steps fail.
  try {
    solve_resolvent_equation([](const Vector& x) { return Vector(100.0 * x); }, vec2(1.0, 1.0), opts);
    FAIL("expected ConvergenceError");
  } catch (const ConvergenceError& e) {
    CHECK(e.last_residual() > 0.0);
  }
}

TEST_CASE("set-valued operators refuse direct evaluation") {
  const auto ball = make_operator(spec::normal_cone(fn::IndicatorBall{1.0}, 2));
  CHECK_FALSE(ball.has_direct());
  CHECK_THROWS_AS(ball.direct(vec2(0.0, 0.0)), InvalidArgument);
}
