// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <vector>

#include "cachenet/cache.hpp"
#include "cachenet/errors.hpp"
#include "cachenet/pwl.hpp"

using namespace cachenet;

TEST_CASE("profile digits round-trip and reject malformed text") {
  ProfileCode code = ProfileCode::from_digits("0+-0");
  CHECK_EQ(code.cells, 4);
  const std::vector<std::int8_t> steps_expected{0, 1, -1, 0};
  CHECK_EQ(code.steps, steps_expected);
  CHECK_EQ(code.digits(), "0+-0");
  CHECK(!code.is_zero());
  CHECK(ProfileCode::from_digits("000").is_zero());
  CHECK_THROWS_AS(ProfileCode::from_digits("++"), ParameterError);   // open
  CHECK_THROWS_AS(ProfileCode::from_digits("0x0"), ParameterError);  // alphabet
  CHECK_THROWS_AS(ProfileCode::from_digits(""), ParameterError);
}

TEST_CASE("profile enumeration counts match the balanced-string numbers") {
  const std::size_t expected[] = {1, 3, 7, 19, 51, 141, 393, 1107};
  for (int cells = 1; cells <= 8; ++cells) {
    auto all = enumerate_profiles(cells);
    CHECK_EQ(all.size(), expected[cells - 1]);
    // Unique, closed, lexicographic with - < 0 < +.
    std::set<std::string> seen;
    for (const auto& code : all) {
      CHECK_EQ(code.cells, cells);
      int sum = 0;
      for (auto s : code.steps) sum += s;
      CHECK_EQ(sum, 0);
      CHECK(seen.insert(code.digits()).second);
    }
    for (std::size_t i = 1; i < all.size(); ++i) {
      CHECK(std::lexicographical_compare(
          all[i - 1].steps.begin(), all[i - 1].steps.end(),
          all[i].steps.begin(), all[i].steps.end()));
    }
  }
  auto three = enumerate_profiles(3);
  CHECK_EQ(three.front().digits(), "-0+");
  CHECK_EQ(three.back().digits(), "+0-");
  CHECK_THROWS_AS(enumerate_profiles(0), ParameterError);
  CHECK_THROWS_AS(enumerate_profiles(17), ParameterError);
}

TEST_CASE("realize_profile lays the code onto the lattice") {
  PwlFunction g = realize_profile(ProfileCode::from_digits("0+-0"));
  CHECK_EQ(g.segment_count(), 4);
  CHECK_EQ(g.values()[0], 0.0);
  CHECK_EQ(g.values()[1], 0.0);
  CHECK_EQ(g.values()[2], 0.5);  // one step up of size 2/4
  CHECK_EQ(g.values()[3], 0.0);
  CHECK_EQ(g.values()[4], 0.0);
  PwlFunction z = realize_profile(ProfileCode::from_digits("00"));
  CHECK_EQ(z.range().first, 0.0);
  CHECK_EQ(z.range().second, 0.0);
}

TEST_CASE("quantize floors samples onto the lattice") {
  // Frozen worked example: m = 4, interior samples 0.4, 0.5, 0.2 floor to
  // levels 0, 1, 0 -- note 0.4 is BELOW the first lattice rung 0.5.
  std::vector<double> s{0.0, 0.4, 0.5, 0.2, 0.0};
  ProfileCode code = quantize(s, 4);
  CHECK_EQ(code.digits(), "0+-0");

  std::vector<double> bad_end{0.1, 0.0, 0.0};
  CHECK_THROWS_AS(quantize(bad_end, 2), PreconditionError);
  std::vector<double> jump{0.0, 2.0, 0.0};  // two levels in one cell
  CHECK_THROWS_AS(quantize(jump, 2), PreconditionError);
  std::vector<double> short_vec{0.0, 0.0};
  CHECK_THROWS_AS(quantize(short_vec, 2), ParameterError);
}

TEST_CASE("quantize inverts realize_profile, with or without sub-step dust") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int cells = 1; cells <= 6; ++cells) {
    for (const auto& code : enumerate_profiles(cells)) {
      PwlFunction g = realize_profile(code);
      std::vector<double> clean(g.values());
      CHECK_EQ(quantize(clean, cells).digits(), code.digits());
      // Perturb interior nodes upward by less than one lattice step: the
      // floor rule must land on the same code.
      std::vector<double> noisy(clean);
      for (int r = 1; r < cells; ++r) {
        noisy[r] += u(rng) * 0.99 * (2.0 / cells);
      }
      CHECK_EQ(quantize(noisy, cells).digits(), code.digits());
    }
  }
}

TEST_CASE("relu coefficients reproduce the profile as a hinge sum") {
  ReluCoeffs c = relu_coeffs(ProfileCode::from_digits("+-"));
  const std::vector<double> c_expected{2.0, -4.0};
  CHECK_EQ(c.c, c_expected);
  for (int cells = 1; cells <= 5; ++cells) {
    for (const auto& code : enumerate_profiles(cells)) {
      ReluCoeffs k = relu_coeffs(code);
      // Closure: the hinge sum returns to zero at x = 1.
      double at_one = 0.0;
      for (int r = 0; r < cells; ++r) {
        at_one += k.c[r] * (1.0 - static_cast<double>(r) / cells);
      }
      CHECK(std::abs(at_one) <= 1e-12);
      PwlFunction g = realize_profile(code);
      for (int i = 0; i <= 40; ++i) {
        double x = i / 40.0;
        double hinge = 0.0;
        for (int r = 0; r < cells; ++r) {
          double z = x - static_cast<double>(r) / cells;
          hinge += k.c[r] * (z > 0.0 ? z : 0.0);
        }
        CHECK(std::abs(hinge - g(x)) <= 1e-12);
      }
    }
  }
}

TEST_CASE("the two-argument gadget vanishes on both axes") {
  for (int cells = 1; cells <= 5; ++cells) {
    for (const auto& code : enumerate_profiles(cells)) {
      ReluCoeffs k = relu_coeffs(code);
      for (double v : {0.0, 0.125, 0.4, 0.75, 1.0}) {
        CHECK(std::abs(profile_gadget(k, v, 0.0)) <= 1e-12);
        CHECK(std::abs(profile_gadget(k, 0.0, v)) <= 1e-12);
      }
    }
  }
}

TEST_CASE("the gadget recovers the profile on matched tent arguments") {
  // Inside one interval the far-edge tent rises as y while the near-edge
  // tent falls as 1-y; fed in that order the gadget returns the profile
  // value at y.
  for (const char* digits : {"+-", "-+", "0+-", "-0+", "+0-0"}) {
    ProfileCode code = ProfileCode::from_digits(digits);
    ReluCoeffs k = relu_coeffs(code);
    PwlFunction g = realize_profile(code);
    for (int i = 0; i <= 64; ++i) {
      double y = i / 64.0;
      CHECK(std::abs(profile_gadget(k, y, 1.0 - y) - g(y)) <= 1e-12);
    }
  }
}

namespace {

PwlFunction residual_of(const PwlFunction& f, int intervals) {
  return subtract(f, interpolate(f, intervals));
}

}  // namespace

TEST_CASE("assign_cache meets its certificate on random residuals") {
  for (std::uint64_t seed : {1, 2, 3, 4, 5}) {
    UnitBallSpec spec;
    spec.pieces = 19;
    spec.seed = seed;
    PwlFunction f = make_unit_ball_function(spec);
    for (auto [T, m] : {std::pair{16, 2}, std::pair{32, 3}}) {
      PwlFunction res = residual_of(f, T);
      CacheAssignment a = assign_cache(res, T, m);
      CHECK_EQ(a.intervals, T);
      CHECK_EQ(a.cells, m);
      CHECK_EQ(static_cast<int>(a.profile_of_interval.size()), T);
      CHECK(a.cache_size() >= 1);
      CHECK(a.cache_size() <= static_cast<std::size_t>(std::pow(3.0, m)));
      CHECK(max_interval_error(res, a) <= 2.0 / (T * m) + 1e-12);
      // Profile list is deduplicated in first-use order.
      std::set<std::string> names;
      std::vector<int> first_use(a.cache_size(), -1);
      for (int t = 0; t < T; ++t) {
        int p = a.profile_of_interval[t];
        CHECK(p >= 0);
        CHECK(p < static_cast<int>(a.cache_size()));
        if (first_use[p] < 0) first_use[p] = t;
      }
      for (const auto& code : a.profiles) {
        CHECK(names.insert(code.digits()).second);
      }
      CHECK(std::is_sorted(first_use.begin(), first_use.end()));
      CHECK_EQ(first_use.front(), 0);
    }
  }
}

TEST_CASE("assign_cache with two cells only ever uses the shallow codes") {
  // With the floor rule, interior levels at m = 2 are 0 or -1, so the only
  // reachable codes are flat-zero and the down-up hook.
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    UnitBallSpec spec;
    spec.pieces = 23;
    spec.seed = seed;
    PwlFunction f = make_unit_ball_function(spec);
    PwlFunction res = residual_of(f, 16);
    CacheAssignment a = assign_cache(res, 16, 2);
    for (const auto& code : a.profiles) {
      bool known = code.digits() == "00" || code.digits() == "-+";
      CHECK(known);
    }
  }
}

TEST_CASE("assign_cache rejects residuals that miss the certificate") {
  // A spike hidden strictly inside a flat-floored cell: both neighbouring
  // lattice samples sit just below zero (level -1) while the interior
  // rises far above the profile. The certificate must catch it.
  PwlFunction spike(
      {Rational(0), Rational(1, 3), Rational(1, 2), Rational(2, 3),
       Rational(1)},
      {0.0, -0.05, 0.55, -0.05, 0.0});
  CHECK_THROWS_AS(assign_cache(spike, 1, 3), AssignmentError);
  try {
    assign_cache(spike, 1, 3);
  } catch (const AssignmentError& e) {
    CHECK_EQ(e.interval(), 0);
  }
}

TEST_CASE("assign_cache insists on exact zeros at interval ends") {
  PwlFunction off({Rational(0), Rational(1, 2), Rational(1)},
                  {0.0, 1e-13, 1e-12});
  CHECK_THROWS_AS(assign_cache(off, 2, 2), PreconditionError);
}
