// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "cachenet/errors.hpp"
#include "cachenet/pwl.hpp"

using namespace cachenet;

namespace {

PwlFunction tent() {
  return PwlFunction({Rational(0), Rational(1, 2), Rational(1)},
                     {0.0, 1.0, 0.0});
}

}  // namespace

TEST_CASE("pwl construction validates its node grid") {
  CHECK_THROWS_AS(PwlFunction({Rational(0)}, {1.0}), ParameterError);
  CHECK_THROWS_AS(
      PwlFunction({Rational(0), Rational(1, 2)}, {0.0, 0.0}),
      ParameterError);  // must end at 1
  CHECK_THROWS_AS(
      PwlFunction({Rational(1, 4), Rational(1)}, {0.0, 0.0}),
      ParameterError);  // must start at 0
  CHECK_THROWS_AS(
      PwlFunction({Rational(0), Rational(1, 2), Rational(1, 2), Rational(1)},
                  {0.0, 1.0, 1.0, 0.0}),
      ParameterError);  // strictly increasing
  CHECK_THROWS_AS(PwlFunction({Rational(0), Rational(1)}, {0.0}),
                  ParameterError);  // size mismatch
  const double inf = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(PwlFunction({Rational(0), Rational(1)}, {0.0, inf}),
                  ParameterError);
}

TEST_CASE("pwl evaluation interpolates chords and hits nodes exactly") {
  PwlFunction f = tent();
  CHECK_EQ(f(0.0), 0.0);
  CHECK_EQ(f(0.5), 1.0);
  CHECK_EQ(f(1.0), 0.0);
  CHECK_EQ(f(0.25), doctest::Approx(0.5).epsilon(1e-15));
  CHECK_EQ(f(0.75), doctest::Approx(0.5).epsilon(1e-15));
  CHECK_EQ(f.value_at(Rational(1, 2)), 1.0);
  CHECK_EQ(f.value_at(Rational(1, 3)), doctest::Approx(2.0 / 3).epsilon(1e-15));
  CHECK_EQ(f.segment_count(), 2);
  auto [lo, hi] = f.range();
  CHECK_EQ(lo, 0.0);
  CHECK_EQ(hi, 1.0);
  CHECK_THROWS_AS(f(-0.001), DomainError);
  CHECK_THROWS_AS(f(1.001), DomainError);
  CHECK_THROWS_AS(f.value_at(Rational(3, 2)), DomainError);
}

TEST_CASE("interpolate reproduces functions that already live on the grid") {
  PwlFunction f = tent();
  PwlFunction g = interpolate(f, 2);
  CHECK_EQ(g.segment_count(), 2);
  CHECK_EQ(g.values()[0], 0.0);
  CHECK_EQ(g.values()[1], 1.0);
  CHECK_EQ(g.values()[2], 0.0);
  // One segment: the chord from (0,0) to (1,0) is identically zero.
  PwlFunction h = interpolate(f, 1);
  CHECK_EQ(h.values()[0], 0.0);
  CHECK_EQ(h.values()[1], 0.0);
  CHECK_EQ(sup_dist(f, h), 1.0);  // attained at the off-grid peak
}

TEST_CASE("interpolate accepts a callable and samples the exact grid") {
  auto g = [](double x) { return x * x; };
  PwlFunction p = interpolate(g, 4);
  CHECK_EQ(p.segment_count(), 4);
  CHECK_EQ(p.values()[2], 0.25);
  CHECK_EQ(p.values()[4], 1.0);
  CHECK_THROWS_AS(interpolate(tent(), 0), ParameterError);
}

TEST_CASE("subtract is exact on the union grid") {
  PwlFunction f = tent();
  PwlFunction g = interpolate(f, 1);  // zero function
  PwlFunction d = subtract(f, g);
  CHECK_EQ(sup_dist(d, f), 0.0);
  // Residual against the matching-grid interpolant vanishes exactly at
  // every grid node -- this exactness is what the cache layer relies on.
  for (int pieces : {7, 13}) {
    for (int T : {8, 16}) {
      UnitBallSpec spec;
      spec.kind = UnitBallSpec::Kind::pwl_random;
      spec.pieces = pieces;
      spec.seed = 42;
      PwlFunction fn = make_unit_ball_function(spec);
      PwlFunction res = subtract(fn, interpolate(fn, T));
      for (int t = 0; t <= T; ++t) {
        CHECK_EQ(res.value_at(Rational(t, T)), 0.0);
      }
    }
  }
}

TEST_CASE("sup_dist matches a dense-grid sample within the mesh bound") {
  UnitBallSpec a_spec, b_spec;
  a_spec.pieces = 19;
  a_spec.seed = 3;
  b_spec.pieces = 23;
  b_spec.seed = 4;
  PwlFunction a = make_unit_ball_function(a_spec);
  PwlFunction b = make_unit_ball_function(b_spec);
  CHECK_EQ(sup_dist(a, a), 0.0);
  CHECK_EQ(sup_dist(a, b), sup_dist(b, a));
  const int grid = 20000;
  double grid_max = 0.0;
  for (int k = 0; k <= grid; ++k) {
    double x = static_cast<double>(k) / grid;
    grid_max = std::max(grid_max, std::abs(a(x) - b(x)));
  }
  double exact = sup_dist(a, b);
  CHECK(exact >= grid_max - 1e-12);
  // |a-b| is Lipschitz-2, so the grid can miss at most one mesh step.
  CHECK(exact <= grid_max + 2.0 / grid + 1e-12);
}

TEST_CASE("lipschitz_constant reads the steepest chord") {
  CHECK_EQ(lipschitz_constant(tent()), 2.0);
  PwlFunction flat({Rational(0), Rational(1)}, {0.25, 0.25});
  CHECK_EQ(lipschitz_constant(flat), 0.0);
}

TEST_CASE("unit-ball ids are stable strings") {
  UnitBallSpec p;
  p.kind = UnitBallSpec::Kind::pwl_random;
  p.pieces = 19;
  p.seed = 7;
  CHECK_EQ(p.id(), "pwl-random-p19-s7");
  UnitBallSpec a;
  a.kind = UnitBallSpec::Kind::named_analytic;
  a.family = "sine";
  a.scale = 0.5;
  CHECK_EQ(a.id(), "analytic-sine-0.5");
  a.scale = 2.0;
  CHECK_EQ(a.id(), "analytic-sine-2");
}

TEST_CASE("random unit-ball functions are admissible across seeds") {
  for (int pieces : {19, 31}) {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
      UnitBallSpec spec;
      spec.pieces = pieces;
      spec.seed = seed;
      PwlFunction f = make_unit_ball_function(spec);
      CHECK(lipschitz_constant(f) <= 1.0 + 1e-9);
      auto [lo, hi] = f.range();
      CHECK(lo >= -1.0 - 1e-9);
      CHECK(hi <= 1.0 + 1e-9);
      CHECK_EQ(f.segment_count(), static_cast<std::size_t>(pieces));
    }
  }
}

TEST_CASE("same spec, same function; different seed, different function") {
  UnitBallSpec spec;
  spec.pieces = 19;
  spec.seed = 11;
  PwlFunction a = make_unit_ball_function(spec);
  PwlFunction b = make_unit_ball_function(spec);
  CHECK_EQ(sup_dist(a, b), 0.0);
  spec.seed = 12;
  PwlFunction c = make_unit_ball_function(spec);
  CHECK(sup_dist(a, c) > 0.0);
}

TEST_CASE("analytic families evaluate to the expected shapes") {
  UnitBallSpec sine;
  sine.kind = UnitBallSpec::Kind::named_analytic;
  sine.family = "sine";
  sine.scale = 1.0;
  PwlFunction s = make_unit_ball_function(sine);
  const double tau = 2.0 * std::numbers::pi;
  CHECK_EQ(s(0.0), 0.0);
  CHECK_EQ(s(0.5), doctest::Approx(std::sin(tau * 0.5) / tau).epsilon(1e-9));
  CHECK(lipschitz_constant(s) <= 1.0 + 1e-9);

  UnitBallSpec cos_spec;
  cos_spec.kind = UnitBallSpec::Kind::named_analytic;
  cos_spec.family = "cosine";
  cos_spec.scale = 2.0;
  PwlFunction c = make_unit_ball_function(cos_spec);
  CHECK_EQ(c(0.0), 0.0);
  CHECK(lipschitz_constant(c) <= 1.0 + 1e-9);

  UnitBallSpec par;
  par.kind = UnitBallSpec::Kind::named_analytic;
  par.family = "parabola";
  par.scale = 1.0;
  PwlFunction q = make_unit_ball_function(par);
  // scale * ((x - 1/2)^2 - 1/8): the vertex dips to -1/8.
  CHECK_EQ(q(0.25), doctest::Approx(-0.0625).epsilon(1e-9));
  CHECK_EQ(q(0.5), doctest::Approx(-0.125).epsilon(1e-9));
  CHECK(lipschitz_constant(q) <= 1.0 + 1e-9);

  UnitBallSpec bad;
  bad.kind = UnitBallSpec::Kind::named_analytic;
  bad.family = "spiral";
  CHECK_THROWS_AS(make_unit_ball_function(bad), ParameterError);
}
