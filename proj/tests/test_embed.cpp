// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "cachenet/adaptive_net.hpp"
#include "cachenet/embed.hpp"
#include "cachenet/errors.hpp"
#include "cachenet/pwl.hpp"
#include "cachenet/relu_net.hpp"

using namespace cachenet;

TEST_CASE("depth_bound matches the schedule arithmetic") {
  // interpolant (T+2) + worst grouping: 6T spread over at most 3*cache
  // groups, each paying the (m+4) stage overhead, plus the final flush.
  CHECK_EQ(depth_bound(1, 1, 1), 24);
  CHECK_EQ(depth_bound(1, 3, 3), 72);
  CHECK_EQ(depth_bound(562, 3, 27), 4503);
}

TEST_CASE("raw_params applies the floor rules") {
  CHECK_EQ(raw_params(512).intervals, 64);
  CHECK_EQ(raw_params(512).cells, 2);
  CHECK_EQ(raw_params(1024).intervals, 128);
  CHECK_EQ(raw_params(1024).cells, 3);
  CHECK_EQ(raw_params(16384).intervals, 2048);
  CHECK_EQ(raw_params(16384).cells, 4);
  // Boundary: the cell count steps exactly at the ninth powers.
  CHECK_EQ(raw_params(728).cells, 2);
  CHECK_EQ(raw_params(729).cells, 3);
  CHECK_EQ(raw_params(729).intervals, 91);
  CHECK_EQ(raw_params(8).intervals, 1);
  CHECK_EQ(raw_params(8).cells, 1);
  CHECK_THROWS_AS(raw_params(7), ParameterError);
}

TEST_CASE("choose_params gates on worst-case feasibility") {
  CHECK_EQ(min_feasible_budget(), 4503);
  ChosenParams p = choose_params(4503);
  CHECK_EQ(p.intervals, 562);
  CHECK_EQ(p.cells, 3);
  // Feasibility is not monotone: the very next budget fails (the floor
  // rules grow the worst case faster than the budget), and the first
  // budget of the four-cell regime opens a long infeasible window.
  CHECK_THROWS_AS(choose_params(4504), InfeasibleBudgetError);
  try {
    choose_params(4504);
  } catch (const InfeasibleBudgetError& e) {
    CHECK_EQ(e.min_feasible(), 4503);
    CHECK_EQ(e.next_feasible(), 4510);
  }
  CHECK_EQ(choose_params(6560).intervals, 820);
  try {
    choose_params(6561);
  } catch (const InfeasibleBudgetError& e) {
    CHECK_EQ(e.min_feasible(), 4503);
    CHECK_EQ(e.next_feasible(), 15519);
  }
  CHECK_EQ(choose_params(15519).intervals, 1939);
  CHECK_EQ(choose_params(15519).cells, 4);
  // Small budgets are always infeasible in the worst case.
  CHECK_THROWS_AS(choose_params(512), InfeasibleBudgetError);
}

namespace {

PwlFunction test_function(std::uint64_t seed, int pieces = 19) {
  UnitBallSpec spec;
  spec.pieces = pieces;
  spec.seed = seed;
  return make_unit_ball_function(spec);
}

}  // namespace

TEST_CASE("embedding emits the planned schedule") {
  PwlFunction f = test_function(3);
  const int T = 16, m = 2;
  AdaptiveNet anet = build_adaptive(f, T, m);
  Embedded emb = embed_standard(anet, EmbedMode::exact_linear);

  // Segment layout: interpolant first, then stage pairs per kept group.
  REQUIRE(!emb.plan.segments.empty());
  const EmbedSegment& first = emb.plan.segments[0];
  CHECK(first.kind == EmbedSegment::Kind::interpolant);
  CHECK_EQ(first.start_layer, 0);
  CHECK_EQ(first.span, T + 2);

  int cursor = first.span;
  int kept = 0;
  for (std::size_t i = 1; i < emb.plan.segments.size(); i += 2) {
    const EmbedSegment& s1 = emb.plan.segments[i];
    REQUIRE(i + 1 < emb.plan.segments.size());
    const EmbedSegment& s2 = emb.plan.segments[i + 1];
    CHECK(s1.kind == EmbedSegment::Kind::group_stage1);
    CHECK(s2.kind == EmbedSegment::Kind::group_stage2);
    CHECK_EQ(s1.group, s2.group);
    const auto& group = anet.groups()[s1.group];
    CHECK(!anet.assignment().profiles[group.profile].is_zero());
    CHECK_EQ(s1.start_layer, cursor);
    CHECK_EQ(s1.span, 6 * static_cast<int>(group.intervals.size()) + 2);
    CHECK_EQ(s2.start_layer, cursor + s1.span);
    CHECK_EQ(s2.span, m + 2);
    cursor += s1.span + s2.span;
    ++kept;
  }
  CHECK_EQ(cursor, emb.plan.depth);
  CHECK_EQ(emb.net.depth(), emb.plan.depth);
  CHECK(kept >= 1);
  CHECK(emb.plan.depth <=
        depth_bound(T, m, static_cast<int>(anet.assignment().cache_size())));

  // The network is a legal width-5 standard net with the closed-form
  // weight budget.
  StandardShape shape{5, emb.plan.depth};
  ValidationReport rep = validate_standard(emb.net, shape);
  if (!rep.ok) {
    for (const auto& v : rep.violations) MESSAGE(v);
  }
  CHECK(rep.ok);
  CHECK_EQ(weight_count(emb.net), shape.expected_weights());
}

TEST_CASE("exact embedding agrees with the semantic evaluator") {
  for (std::uint64_t seed : {11, 12}) {
    PwlFunction f = test_function(seed, 23);
    for (auto [T, m] : {std::pair{8, 1}, std::pair{16, 2}, std::pair{32, 3}}) {
      AdaptiveNet anet = build_adaptive(f, T, m);
      Embedded emb = embed_standard(anet, EmbedMode::exact_linear);
      CHECK(emb.net.linear_hidden_expected);
      CHECK(!emb.certificate.has_value());
      std::mt19937_64 rng(17);
      std::uniform_real_distribution<double> u(0.0, 1.0);
      for (int i = 0; i <= 160; ++i) {
        double x = (i % 3 == 0) ? u(rng) : i / 160.0;
        CHECK(std::abs(forward(emb.net, x) - eval_adaptive(anet, x)) <=
              1e-12);
      }
    }
  }
}

TEST_CASE("strict embedding is all-relu and matches the exact one") {
  PwlFunction f = test_function(21, 23);
  const int T = 16, m = 2;
  AdaptiveNet anet = build_adaptive(f, T, m);
  Embedded exact = embed_standard(anet, EmbedMode::exact_linear);
  Embedded strict = embed_standard(anet, EmbedMode::strict_relu);

  CHECK(!strict.net.linear_hidden_expected);
  for (const auto& layer : strict.net.hidden) {
    for (const auto& unit : layer) {
      CHECK(unit.mode == Activation::relu);
    }
  }
  ValidationReport rep =
      validate_standard(strict.net, StandardShape{5, strict.plan.depth});
  CHECK(rep.ok);

  REQUIRE(strict.certificate.has_value());
  const BoundCertificate& cert = *strict.certificate;
  REQUIRE_EQ(cert.layers.size(), strict.net.hidden.size());
  // Identity carriers keep their true pre-activation at least one unit
  // above zero, so the relu never clips them; offsets are whole numbers.
  for (const auto& layer : cert.layers) {
    for (const auto& b : layer) {
      CHECK(b.lo <= b.hi);
      if (b.identity) {
        CHECK_EQ(b.intercept, std::round(b.intercept));
        CHECK(b.lo + b.intercept >= 1.0 - 1e-9);
      } else {
        CHECK_EQ(b.intercept, 0.0);
      }
    }
  }

  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i <= 200; ++i) {
    double x = (i % 3 == 0) ? u(rng) : i / 200.0;
    CHECK(std::abs(forward(strict.net, x) - forward(exact.net, x)) <= 1e-9);
  }
}

TEST_CASE("pruning only removes identically-zero groups") {
  PwlFunction f = test_function(33, 19);
  const int T = 32, m = 2;  // plenty of kink-free intervals at this width
  AdaptiveNet anet = build_adaptive(f, T, m);
  bool has_zero_profile = false;
  for (const auto& p : anet.assignment().profiles) {
    if (p.is_zero()) has_zero_profile = true;
  }
  REQUIRE(has_zero_profile);

  Embedded pruned = embed_standard(anet, EmbedMode::exact_linear, true);
  Embedded full = embed_standard(anet, EmbedMode::exact_linear, false);
  CHECK(pruned.plan.depth < full.plan.depth);
  CHECK_EQ(full.plan.segments.size(), 1 + 2 * anet.groups().size());
  for (int i = 0; i <= 100; ++i) {
    double x = i / 100.0;
    CHECK(std::abs(forward(pruned.net, x) - forward(full.net, x)) <= 1e-12);
  }
}
