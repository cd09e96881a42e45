// SPDX-License-Identifier: Apache-2.0
#include "cachenet/adaptive_net.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "cachenet/errors.hpp"

namespace cachenet {

double tooth(double x) {
  auto relu = [](double z) { return z > 0.0 ? z : 0.0; };
  return relu(x + 1.0) - 2.0 * relu(x) + relu(x - 1.0);
}

AdaptiveNet::AdaptiveNet(const PwlFunction& f, int intervals, int cells)
    : intervals_(intervals), cells_(cells) {
  if (intervals < 1) throw ParameterError("adaptive: intervals must be >= 1");
  if (cells < 1) throw ParameterError("adaptive: cells must be >= 1");

  const PwlFunction coarse = interpolate(f, intervals);
  intercept_ = coarse.values().front();
  // Hinge increments: the coarse part is
  //   intercept + sum_t ramp_weights[t] * relu(x - t/T).
  ramp_weights_.resize(intervals);
  double prev_slope = 0.0;
  for (int t = 0; t < intervals; ++t) {
    const double slope =
        (coarse.values()[t + 1] - coarse.values()[t]) * intervals;
    ramp_weights_[t] = slope - prev_slope;
    prev_slope = slope;
  }

  const PwlFunction residual = subtract(f, coarse);
  assignment_ = assign_cache(residual, intervals, cells);
  derive_from_assignment();
}

void AdaptiveNet::derive_from_assignment() {
  coeffs_.clear();
  coeffs_.reserve(assignment_.profiles.size());
  for (const auto& code : assignment_.profiles) {
    coeffs_.push_back(relu_coeffs(code));
  }

  // Group intervals by (profile, residue mod 3).  Groups come out in
  // first-use order of the profile, then by residue; empty combinations
  // are not materialized.
  std::map<std::pair<int, int>, std::vector<int>> buckets;
  for (int t = 0; t < intervals_; ++t) {
    buckets[{assignment_.profile_of_interval[t], t % 3}].push_back(t);
  }
  std::vector<std::pair<int, int>> keys;
  keys.reserve(buckets.size());
  for (const auto& [key, _] : buckets) keys.push_back(key);
  std::sort(keys.begin(), keys.end());
  groups_.clear();
  groups_.reserve(keys.size());
  for (const auto& key : keys) {
    groups_.push_back(SubnetGroup{key.first, key.second,
                                  std::move(buckets[key])});
  }
}

AdaptiveNet AdaptiveNet::from_parts(int intervals, int cells, double intercept,
                                    std::vector<double> ramp_weights,
                                    CacheAssignment assignment) {
  if (intervals < 1) throw ParameterError("adaptive: intervals must be >= 1");
  if (cells < 1) throw ParameterError("adaptive: cells must be >= 1");
  if (static_cast<int>(ramp_weights.size()) != intervals) {
    throw ParameterError("adaptive: ramp weight count must equal intervals");
  }
  if (assignment.intervals != intervals || assignment.cells != cells) {
    throw ParameterError("adaptive: assignment shape mismatch");
  }
  if (static_cast<int>(assignment.profile_of_interval.size()) != intervals) {
    throw ParameterError("adaptive: assignment covers wrong interval count");
  }
  const int n_profiles = static_cast<int>(assignment.profiles.size());
  for (int p : assignment.profile_of_interval) {
    if (p < 0 || p >= n_profiles) {
      throw ParameterError("adaptive: profile index out of range");
    }
  }
  for (const auto& code : assignment.profiles) {
    if (code.cells != cells) {
      throw ParameterError("adaptive: profile cell count mismatch");
    }
  }
  AdaptiveNet net;
  net.intervals_ = intervals;
  net.cells_ = cells;
  net.intercept_ = intercept;
  net.ramp_weights_ = std::move(ramp_weights);
  net.assignment_ = std::move(assignment);
  net.derive_from_assignment();
  return net;
}

AdaptiveNet build_adaptive(const PwlFunction& f, int intervals, int cells) {
  return AdaptiveNet(f, intervals, cells);
}

namespace {

double relu(double z) { return z > 0.0 ? z : 0.0; }

}  // namespace

double eval_adaptive(const AdaptiveNet& net, double x) {
  if (!(x >= 0.0 && x <= 1.0)) {
    throw DomainError("adaptive eval: x outside [0,1]");
  }
  const int T = net.intervals();
  const int m = net.cells();
  const double y = T * x;

  // Coarse part, accumulated in ascending interval order to mirror the
  // layered form.
  double acc = net.intercept();
  for (int t = 0; t < T; ++t) {
    acc += net.ramp_weights()[t] * relu(x - static_cast<double>(t) / T);
  }

  // Gadget part, one (profile, residue) group at a time.
  for (const auto& group : net.groups()) {
    double line_b = 0.0;  // tent translates at the group's intervals
    double line_a = 0.0;  // same, shifted one slot right
    for (int t : group.intervals) {
      for (int j = 0; j <= 1; ++j) {
        double& line = j == 0 ? line_b : line_a;
        for (int q = -1; q <= 1; ++q) {
          line += kToothCoeffs[q + 1] * relu(y - (t + q + j));
        }
      }
    }
    const ReluCoeffs& coeffs = net.coeffs()[group.profile];
    for (int r = 0; r < m; ++r) {
      const double z =
          (static_cast<double>(m - r) / m) * line_a -
          (static_cast<double>(r) / m) * line_b;
      acc += coeffs.c[r] / T * relu(z);
    }
  }
  return acc;
}

ReferenceEvaluator::ReferenceEvaluator(const PwlFunction& f, int intervals,
                                       int cells)
    : approximant_(PwlFunction({Rational(0), Rational(1)}, {0.0, 0.0})) {
  const PwlFunction coarse = interpolate(f, intervals);
  const PwlFunction residual = subtract(f, coarse);
  const CacheAssignment assignment =
      assign_cache(residual, intervals, cells);
  std::vector<PwlFunction> realized;
  realized.reserve(assignment.profiles.size());
  for (const auto& code : assignment.profiles) {
    realized.push_back(realize_profile(code));
  }
  // The approximant is piecewise linear with nodes on the fine grid
  // {(t*m+r)/(T*m)}: coarse interpolant plus the scaled profile of the
  // interval the node belongs to.
  std::vector<Rational> nodes;
  std::vector<double> values;
  nodes.reserve(static_cast<std::size_t>(intervals) * cells + 1);
  values.reserve(nodes.capacity());
  for (int t = 0; t < intervals; ++t) {
    const PwlFunction& profile = realized[assignment.profile_of_interval[t]];
    for (int r = 0; r < cells; ++r) {
      const Rational x(t * cells + r, intervals * cells);
      const Rational y(r, cells);
      nodes.push_back(x);
      values.push_back(coarse.value_at(x) +
                       profile.value_at(y) / intervals);
    }
  }
  nodes.push_back(Rational(1));
  values.push_back(coarse.values().back());
  approximant_ = PwlFunction(std::move(nodes), std::move(values));
}

double ReferenceEvaluator::operator()(double x) const {
  return approximant_(x);
}

double eval_formula(const PwlFunction& f, int intervals, int cells,
                    double x) {
  if (!(x >= 0.0 && x <= 1.0)) {
    throw DomainError("formula eval: x outside [0,1]");
  }
  const int T = intervals;
  const int m = cells;
  int t = std::min(static_cast<int>(x * T), T - 1);

  // Coarse interpolant on interval t, straight from f.
  const double v0 = f.value_at(Rational(t, T));
  const double v1 = f.value_at(Rational(t + 1, T));
  const double coarse = v0 + (x * T - t) * (v1 - v0);

  // Residual samples for this interval, rescaled, then snapped onto the
  // profile lattice.
  std::vector<double> g(m + 1);
  for (int r = 0; r <= m; ++r) {
    const Rational xs(t * m + r, T * m);
    const double chord = v0 + (static_cast<double>(r) / m) * (v1 - v0);
    double v = (f.value_at(xs) - chord) * T;
    if (r == 0 || r == m) v = 0.0;
    if (std::abs(v) <= 1e-9) v = 0.0;
    g[r] = v;
  }
  const ProfileCode code = quantize(g, m);

  // Profile value at the rescaled position.
  const double y = x * T - t;
  int cell = std::min(static_cast<int>(y * m), m - 1);
  int level = 0;
  for (int r = 0; r < cell; ++r) level += code.steps[r];
  const double within = y * m - cell;
  const double gamma =
      2.0 * (level + within * code.steps[cell]) / m;
  return coarse + gamma / T;
}

Mod3Check check_mod3_identity(const AdaptiveNet& net, double x) {
  if (!(x >= 0.0 && x <= 1.0)) {
    throw DomainError("mod3 check: x outside [0,1]");
  }
  const int T = net.intervals();
  const int m = net.cells();
  const double y = T * x;
  const int t_star = std::min(static_cast<int>(y), T - 1);
  const int p_star = net.assignment().profile_of_interval[t_star];

  Mod3Check result;
  int matched = 0;
  for (const auto& group : net.groups()) {
    double line_b = 0.0;
    double line_a = 0.0;
    bool contains = false;
    for (int t : group.intervals) {
      contains = contains || t == t_star;
      line_b += tooth(y - t);
      line_a += tooth(y - t - 1);
    }
    const double contribution =
        profile_gadget(net.coeffs()[group.profile], line_a, line_b) / T;

    if (contains) {
      ++matched;
      result.case_hits[2] += 1;
      continue;  // the one group allowed to contribute
    }
    if (group.residue == t_star % 3 && group.profile != p_star) {
      // Same residue, different profile: every selected interval is at
      // distance >= 3 from t_star, so in exact arithmetic both lines are
      // zero.  The tent is evaluated as a hinge sum (mirroring the layered
      // network), which leaves cancellation dust off its support.
      constexpr double kLineDust = 1e-12;
      result.case_hits[1] += 1;
      if (std::abs(line_a) > kLineDust || std::abs(line_b) > kLineDust) {
        result.ok = false;
      }
    } else {
      // Residue mismatch: at most one of the two lines can be active,
      // and the gadget kills single-sided input up to rounding.
      result.case_hits[0] += 1;
    }
    result.max_gap = std::max(result.max_gap, std::abs(contribution));
  }
  if (matched != 1) result.ok = false;
  if (result.max_gap > 1e-10) result.ok = false;
  return result;
}

}  // namespace cachenet
