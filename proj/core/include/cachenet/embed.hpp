// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "cachenet/adaptive_net.hpp"
#include "cachenet/relu_net.hpp"

namespace cachenet {

// How identity pass-through is realized inside a relu network.
//  exact_linear: pass-through units use linear activation (exact algebra).
//  strict_relu:  every hidden unit is relu; each identity unit carries a
//                positive offset chosen from certified value bounds so its
//                pre-activation stays >= 1, and downstream biases cancel
//                the offsets exactly.
enum class EmbedMode { exact_linear, strict_relu };

// One horizontal slice of the schedule.
struct EmbedSegment {
  enum class Kind { interpolant, group_stage1, group_stage2 };
  Kind kind = Kind::interpolant;
  int group = -1;  // index into AdaptiveNet::groups(), -1 for interpolant
  int start_layer = 0;  // first hidden layer of the segment (0-based)
  int span = 0;         // number of hidden layers it occupies
};

struct EmbedPlan {
  std::vector<EmbedSegment> segments;
  int depth = 0;  // hidden layers
  EmbedMode mode = EmbedMode::exact_linear;
};

// Certified bounds on one unit's TRUE pre-activation (before any
// strict-relu offset): true_pre in [lo, hi], and for identity units the
// realized pre-activation is true_pre + intercept.
struct UnitBound {
  double lo = 0.0;
  double hi = 0.0;
  double intercept = 0.0;
  bool identity = false;
};

struct BoundCertificate {
  std::vector<std::vector<UnitBound>> layers;
};

// Parameters chosen for a depth budget.
struct ChosenParams {
  int budget = 0;
  int intervals = 0;  // T
  int cells = 0;      // m
};

// Largest depth the (intervals, cells, cache_size) schedule can need.
long long depth_bound(int intervals, int cells, int cache_size);

// T = budget/8, m = largest k with 9^k <= budget; throws
// InfeasibleBudgetError when the worst-case schedule cannot fit.
ChosenParams choose_params(int budget);

// Same formulas without the worst-case feasibility gate (for callers that
// check the realized depth of a concrete function instead).
ChosenParams raw_params(int budget);

// Smallest budget for which choose_params succeeds.
int min_feasible_budget();

struct Embedded {
  Network net;
  EmbedPlan plan;
  // Present in strict_relu mode: the bounds used to pick offsets.
  std::optional<BoundCertificate> certificate;
};

// Serialize the adaptive net into a width-5 standard network.
// prune_zero: skip gadget segments whose profile is identically zero
// (they contribute nothing; dropping them only shortens the schedule).
Embedded embed_standard(const AdaptiveNet& net, EmbedMode mode,
                        bool prune_zero = true);

}  // namespace cachenet
