#include <cmath>
#include <random>

#include <doctest.h>

#include "mirrorvi/errors.hpp"
#include "mirrorvi/geometry.hpp"
#include "oracles.hpp"

using namespace mirrorvi;

namespace {

Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<Index>(xs.size()));
  Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

std::vector<ProxSetup> all_setups() {
  return {
      ProxSetup::euclidean(FeasibleSet::box(3, -1.0, 2.0)),
      ProxSetup::euclidean(FeasibleSet::ball(vec({0.5, -0.5, 1.0}), 1.5)),
      ProxSetup::euclidean(FeasibleSet::simplex(4)),
      ProxSetup::entropy(5),
      ProxSetup::product({ProxSetup::entropy(3), ProxSetup::entropy(2)}),
      ProxSetup::product({ProxSetup::euclidean(FeasibleSet::box(2, 0.0, 1.0)), ProxSetup::entropy(3)}),
  };
}

}  // namespace

TEST_CASE("bregman: closed-form values") {
  const auto euc = ProxSetup::euclidean(FeasibleSet::box(2, -1.0, 1.0));
  CHECK(bregman(euc, vec({1, 0}), vec({0, 1})) == doctest::Approx(1.0).epsilon(1e-15));

  // sum x_i ln(x_i / y_i) with 0 ln 0 = 0: only the first term survives.
  const auto ent = ProxSetup::entropy(2, 0.0);
  const double expected = 1.0 * std::log(1.0 / 0.5);
  CHECK(bregman(ent, vec({1, 0}), vec({0.5, 0.5})) == doctest::Approx(expected).epsilon(1e-15));
  CHECK(expected == doctest::Approx(0.693147).epsilon(1e-6));
}

TEST_CASE("bregman: V(x, x) vanishes") {
  std::mt19937_64 rng(3);
  for (const auto& s : all_setups()) {
    for (int t = 0; t < 20; ++t) {
      const Vector x = sample_point(s.set(), rng);
      if (s.dgf() == DgfKind::SquaredEuclidean) {
        CHECK(bregman(s, x, x) == 0.0);
      } else {
        CHECK(bregman(s, x, x) <= 1e-12);
      }
    }
  }
}

TEST_CASE("bregman: errors") {
  const auto ent = ProxSetup::entropy(2);
  CHECK_THROWS_AS(bregman(ent, vec({0.5, 0.5}), vec({1.0, 0.0})), DomainError);
  CHECK_THROWS_AS(bregman(ent, vec({0.5, 0.5}), vec({1.0, 0.0, 0.0})), ShapeError);
}

TEST_CASE("bregman: 1-strong convexity w.r.t. the declared norm") {
  std::mt19937_64 rng(11);
  for (const auto& s : all_setups()) {
    for (int t = 0; t < 2000; ++t) {
      const Vector x = sample_point(s.set(), rng);
      const Vector y = sample_point(s.set(), rng);
      const double n = primal_norm(s, x - y);
      CHECK(bregman(s, x, y) >= 0.5 * n * n - 1e-9);
    }
  }
}

TEST_CASE("prox_map: closed-form examples") {
  SUBCASE("zero direction returns the anchor") {
    std::mt19937_64 rng(5);
    for (const auto& s : all_setups()) {
      const Vector a = sample_point(s.set(), rng);
      const Vector z = prox_map(s, Vector::Zero(s.dim()), a, 0.7);
      CHECK((z - a).norm() <= 1e-12);
    }
  }
  SUBCASE("entropy multiplicative weights") {
    const auto ent = ProxSetup::entropy(2, 0.0);
    const Vector z = prox_map(ent, vec({1, 0}), vec({0.5, 0.5}), 1.0);
    const double e1 = std::exp(-1.0);
    CHECK(z[0] == doctest::Approx(e1 / (1.0 + e1)).epsilon(1e-14));
    CHECK(z[1] == doctest::Approx(1.0 / (1.0 + e1)).epsilon(1e-14));
    CHECK(z[0] == doctest::Approx(0.268941).epsilon(1e-6));
  }
  SUBCASE("box clip") {
    const auto box = ProxSetup::euclidean(FeasibleSet::box(2, 0.0, 1.0));
    const Vector z = prox_map(box, vec({2, -2}), vec({0.5, 0.5}), 1.0);
    CHECK(z[0] == 0.0);
    CHECK(z[1] == 1.0);
  }
  SUBCASE("entropy floor keeps iterates interior") {
    const auto ent = ProxSetup::entropy(3, 1e-12);
    const Vector z = prox_map(ent, vec({1e4, 0, 0}), vec({1.0 / 3, 1.0 / 3, 1.0 / 3}), 1.0);
    CHECK(z.minCoeff() > 0.0);
    CHECK(z.sum() == doctest::Approx(1.0).epsilon(1e-15));
  }
}

TEST_CASE("prox_map: input errors") {
  const auto box = ProxSetup::euclidean(FeasibleSet::box(2, 0.0, 1.0));
  const Vector a = vec({0.5, 0.5});
  CHECK_THROWS_AS(prox_map(box, vec({NAN, 0}), a, 1.0), InputError);
  CHECK_THROWS_AS(prox_map(box, vec({INFINITY, 0}), a, 1.0), InputError);
  CHECK_THROWS_AS(prox_map(box, vec({1, 0}), a, 0.0), InputError);
  CHECK_THROWS_AS(prox_map(box, vec({1, 0}), a, -1.0), InputError);
}

TEST_CASE("prox_map: variational inequality of the subproblem") {
  // <g + L (grad d(z) - grad d(a)), x - z> >= 0 for all feasible x.
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> unif(-3.0, 3.0);
  std::uniform_real_distribution<double> Ldist(0.2, 5.0);
  for (const auto& s : all_setups()) {
    for (int t = 0; t < 200; ++t) {
      const Vector a = sample_point(s.set(), rng);
      Vector g(s.dim());
      for (Index i = 0; i < g.size(); ++i) g[i] = unif(rng);
      const double L = Ldist(rng);
      const Vector z = prox_map(s, g, a, L);
      REQUIRE(s.set().contains(z, 1e-12));
      const Vector dir = g + L * (dgf_gradient(s, z) - dgf_gradient(s, a));
      for (int p = 0; p < 20; ++p) {
        const Vector x = sample_point(s.set(), rng);
        CHECK(dir.dot(x - z) >= -1e-8);
      }
    }
  }
}

TEST_CASE("prox_map agrees with independent inner solvers") {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> unif(-2.0, 2.0);
  auto random_g = [&](Index n) {
    Vector g(n);
    for (Index i = 0; i < n; ++i) g[i] = unif(rng);
    return g;
  };

  SUBCASE("euclidean simplex: projected gradient with bisection projection") {
    const auto s = ProxSetup::euclidean(FeasibleSet::simplex(5));
    for (int t = 0; t < 100; ++t) {
      const Vector a = sample_point(s.set(), rng);
      const Vector g = random_g(5);
      const Vector ref = oracles::projected_gradient_prox(g, a, 1.3, oracles::simplex_projection_bisect);
      CHECK((prox_map(s, g, a, 1.3) - ref).norm() <= 1e-8);
    }
  }
  SUBCASE("box: projected gradient") {
    const Vector lo = vec({-1, 0, 2}), hi = vec({1, 0.5, 3});
    const auto s = ProxSetup::euclidean(FeasibleSet::box(lo, hi));
    auto clip = [&](const Vector& v) { return Vector(v.cwiseMax(lo).cwiseMin(hi)); };
    for (int t = 0; t < 100; ++t) {
      const Vector a = sample_point(s.set(), rng);
      const Vector g = random_g(3);
      CHECK((prox_map(s, g, a, 0.8) - oracles::projected_gradient_prox(g, a, 0.8, clip)).norm() <= 1e-8);
    }
  }
  SUBCASE("entropy simplex: KKT multiplier bisection") {
    const auto s = ProxSetup::entropy(6, 0.0);
    for (int t = 0; t < 100; ++t) {
      const Vector a = sample_point(s.set(), rng);
      const Vector g = random_g(6);
      CHECK((prox_map(s, g, a, 0.9) - oracles::entropy_prox_kkt(g, a, 0.9)).norm() <= 1e-8);
    }
  }
}

TEST_CASE("project_simplex matches bisection") {
  std::mt19937_64 rng(29);
  std::normal_distribution<double> normal(0.0, 2.0);
  for (int t = 0; t < 300; ++t) {
    Vector v(7);
    for (Index i = 0; i < 7; ++i) v[i] = normal(rng);
    CHECK((project_simplex(v) - oracles::simplex_projection_bisect(v)).norm() <= 1e-12);
  }
}

TEST_CASE("prox_center") {
  const Vector u = prox_center(ProxSetup::entropy(4));
  CHECK((u - Vector::Constant(4, 0.25)).norm() == 0.0);
  CHECK((prox_center(ProxSetup::euclidean(FeasibleSet::box(3, 1.0, 2.0))) - Vector::Ones(3)).norm() == 0.0);
  CHECK(prox_center(ProxSetup::euclidean(FeasibleSet::ball(Vector::Zero(3), 1.0))).norm() == 0.0);
  // Ball away from the origin: closest point on the sphere.
  const Vector c = prox_center(ProxSetup::euclidean(FeasibleSet::ball(vec({3, 4}), 1.0)));
  CHECK((c - vec({2.4, 3.2})).norm() <= 1e-15);
}

TEST_CASE("prox_radius_sq") {
  CHECK(prox_radius_sq(ProxSetup::entropy(4)) == doctest::Approx(std::log(4.0)).epsilon(1e-15));
  CHECK(prox_radius_sq(ProxSetup::entropy(4)) == doctest::Approx(1.386294).epsilon(1e-6));
  CHECK(prox_radius_sq(ProxSetup::euclidean(FeasibleSet::box(2, 0.0, 1.0))) == doctest::Approx(1.0));
  const auto block = ProxSetup::euclidean(FeasibleSet::box(3, -1.0, 2.0));
  CHECK(prox_radius_sq(ProxSetup::product({block, block})) ==
        doctest::Approx(2.0 * prox_radius_sq(block)));

  // The value is the max of V(x, x0) over Q: no extreme point exceeds it
  // and some extreme point attains it.
  for (const auto& s : {ProxSetup::euclidean(FeasibleSet::simplex(5)), ProxSetup::entropy(5),
                        ProxSetup::euclidean(FeasibleSet::box(vec({-1, 0.5, 2}), vec({1, 1, 4})))}) {
    const Vector x0 = prox_center(s);
    double best = 0.0;
    const auto vertices = extreme_points(s.set());
    for (const Vector& v : *vertices) best = std::max(best, bregman(s, v, x0));
    CHECK(best == doctest::Approx(prox_radius_sq(s)).epsilon(1e-14));
  }
  // Ball: sampled points never exceed it.
  const auto ball = ProxSetup::euclidean(FeasibleSet::ball(vec({1, 1}), 0.5));
  std::mt19937_64 rng(2);
  const Vector x0 = prox_center(ball);
  for (int t = 0; t < 1000; ++t) {
    CHECK(bregman(ball, sample_point(ball.set(), rng), x0) <= prox_radius_sq(ball) + 1e-12);
  }
}

TEST_CASE("dual_norm") {
  const auto l1 = ProxSetup::entropy(2);
  const auto l2 = ProxSetup::euclidean(FeasibleSet::box(2, 0.0, 1.0));
  CHECK(dual_norm(l1, vec({3, -5})) == 5.0);
  CHECK(dual_norm(l2, vec({3, 4})) == 5.0);
  const auto prod = ProxSetup::product({ProxSetup::entropy(1), ProxSetup::entropy(1)});
  CHECK(dual_norm(prod, vec({3, -4})) == doctest::Approx(5.0).epsilon(1e-15));
}

TEST_CASE("linear_max is exact") {
  std::mt19937_64 rng(31);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (int t = 0; t < 20; ++t) {
    Vector c(3);
    for (Index i = 0; i < 3; ++i) c[i] = normal(rng);
    const auto f = [&](const Vector& x) { return c.dot(x); };
    CHECK(linear_max(FeasibleSet::simplex(3), c).value ==
          doctest::Approx(oracles::simplex_grid_max(3, 20, f)).epsilon(1e-12));
    const Vector lo = vec({-1, 0, 1}), hi = vec({0, 2, 1.5});
    CHECK(linear_max(FeasibleSet::box(lo, hi), c).value ==
          doctest::Approx(oracles::box_grid_max(lo, hi, 4, f)).epsilon(1e-12));
    // Ball: the argmax is feasible and no sample beats it.
    const auto ball = FeasibleSet::ball(vec({1, 2, 3}), 2.0);
    const LinearMax lm = linear_max(ball, c);
    CHECK(ball.contains(lm.argmax, 1e-12));
    CHECK(c.dot(lm.argmax) == doctest::Approx(lm.value));
    for (int p = 0; p < 100; ++p) CHECK(c.dot(sample_point(ball, rng)) <= lm.value + 1e-12);
  }
}

TEST_CASE("feasible sets") {
  CHECK_THROWS_AS(FeasibleSet::box(vec({0, 1}), vec({1, 0})), InputError);
  CHECK_THROWS_AS(FeasibleSet::ball(vec({0}), 0.0), InputError);
  CHECK_THROWS_AS(FeasibleSet::simplex(0), InputError);
  const auto p = FeasibleSet::product({FeasibleSet::simplex(3), FeasibleSet::box(2, 0.0, 1.0)});
  CHECK(p.dim() == 5);
  CHECK(p.contains(vec({0.2, 0.3, 0.5, 0.0, 1.0})));
  CHECK_FALSE(p.contains(vec({0.2, 0.3, 0.6, 0.0, 1.0})));
  CHECK(extreme_points(p)->size() == 12);
  CHECK_FALSE(extreme_points(FeasibleSet::ball(vec({0}), 1.0)).has_value());
  std::mt19937_64 rng(1);
  for (int t = 0; t < 100; ++t) CHECK(p.contains(sample_point(p, rng), 1e-12));
}
