// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "cachenet/cache.hpp"
#include "cachenet/pwl.hpp"

namespace cachenet {

// Unit tent: 0 outside (-1,1), peak 1 at 0, slopes +-1.
// tooth(x) == relu(x+1) - 2 relu(x) + relu(x-1).
double tooth(double x);

// Hinge coefficients of the tent at offsets {-1, 0, +1}.
inline constexpr double kToothCoeffs[3] = {1.0, -2.0, 1.0};

// Intervals sharing one profile and one residue class mod 3.  Grouping by
// residue keeps the tents of the selected intervals disjoint, so their sum
// can feed the two-argument gadget without cross-talk.
struct SubnetGroup {
  int profile = 0;  // index into the assignment's profile list
  int residue = 0;  // 0, 1, or 2
  std::vector<int> intervals;
};

// The structured approximant: a coarse interpolant plus, for every
// (profile, residue) group, a gadget subnet that reproduces the scaled
// profile on exactly the group's intervals.
class AdaptiveNet {
 public:
  AdaptiveNet(const PwlFunction& f, int intervals, int cells);

  // Reassemble a net from serialized parts.  Coefficient vectors and the
  // (profile, residue) groups are re-derived from the assignment, so a
  // loaded net is structurally identical to a freshly built one.
  static AdaptiveNet from_parts(int intervals, int cells, double intercept,
                                std::vector<double> ramp_weights,
                                CacheAssignment assignment);

  int intervals() const { return intervals_; }
  int cells() const { return cells_; }
  double intercept() const { return intercept_; }
  const std::vector<double>& ramp_weights() const { return ramp_weights_; }
  const CacheAssignment& assignment() const { return assignment_; }
  const std::vector<ReluCoeffs>& coeffs() const { return coeffs_; }
  const std::vector<SubnetGroup>& groups() const { return groups_; }

 private:
  AdaptiveNet() = default;
  void derive_from_assignment();

  int intervals_ = 0;
  int cells_ = 0;
  double intercept_ = 0.0;            // coarse value at 0
  std::vector<double> ramp_weights_;  // hinge increments of the coarse part
  CacheAssignment assignment_;
  std::vector<ReluCoeffs> coeffs_;  // parallel to assignment_.profiles
  std::vector<SubnetGroup> groups_;
};

AdaptiveNet build_adaptive(const PwlFunction& f, int intervals, int cells);

// Semantic evaluation: coarse part + sum over groups of the gadget applied
// to the group's tent sums.  Summation order is fixed (ascending interval,
// then tent offsets -1,0,+1) to match the layered embedding bit-for-bit
// where float association matters.
double eval_adaptive(const AdaptiveNet& net, double x);

// Independent evaluator: rebuilds interpolant and assignment itself and
// evaluates the mathematical formula (interval lookup, no gadget).
class ReferenceEvaluator {
 public:
  ReferenceEvaluator(const PwlFunction& f, int intervals, int cells);
  double operator()(double x) const;

  // The approximant as an explicit piecewise-linear function.
  const PwlFunction& approximant() const { return approximant_; }

 private:
  PwlFunction approximant_;
};

// Third evaluator: direct formula, computed from f on the fly.
double eval_formula(const PwlFunction& f, int intervals, int cells, double x);

// Witness that at x, of all (profile, residue) groups, the only nonzero
// gadget contributions come from the interval that contains x.
struct Mod3Check {
  bool ok = true;
  int case_hits[3] = {0, 0, 0};  // which disjointness case fired
  double max_gap = 0.0;          // largest |contribution| that should be 0
};

Mod3Check check_mod3_identity(const AdaptiveNet& net, double x);

}  // namespace cachenet
