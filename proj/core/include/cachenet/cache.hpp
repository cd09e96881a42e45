// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cachenet/pwl.hpp"

namespace cachenet {

// One reusable residual profile, encoded by its per-cell slope signs.
//
// A profile is a piecewise-linear function on [0,1] with breakpoints at
// r/cells, zero at both endpoints, and node increments in
// {-2/cells, 0, +2/cells}.  `steps[r]` in {-1,0,+1} is the sign of the
// increment over cell r; the step sum must be zero so the profile closes.
struct ProfileCode {
  int cells = 0;
  std::vector<std::int8_t> steps;

  bool operator==(const ProfileCode&) const = default;

  bool is_zero() const;

  // Compact text form, one of "+0-" per cell (e.g. "+0-" for {+1,0,-1}).
  std::string digits() const;
  static ProfileCode from_digits(std::string_view text);
};

// The profile as a concrete function (nodes r/cells, values 2*prefix/cells).
PwlFunction realize_profile(const ProfileCode& code);

// All closed profiles with the given cell count, in lexicographic order of
// steps with -1 < 0 < +1.  Size is the number of balanced sign strings
// (1, 3, 7, 19, 51, 141, 393, 1107 for cells = 1..8).
std::vector<ProfileCode> enumerate_profiles(int cells);

// Snap node samples of a rescaled residual onto the profile lattice.
//
// samples[r], r = 0..cells, are the residual's values at r/cells after
// rescaling to unit size; both endpoint samples must be exactly 0.0 (the
// pipeline produces them as exact differences).  Each interior node is
// floored to the lattice 2Z/cells, then clamped so consecutive levels
// differ by at most one step.  Node error is < 2/cells by construction.
ProfileCode quantize(std::span<const double> samples, int cells);

// Coefficients of the profile as a combination of hinge functions:
// realize_profile(code)(x) == sum_r c[r] * max(0, x - r/cells) on [0,1].
struct ReluCoeffs {
  int cells = 0;
  std::vector<double> c;
};

ReluCoeffs relu_coeffs(const ProfileCode& code);

// Two-argument gadget sum_r c[r] * max(0, (1 - r/m)*a - (r/m)*b).
// For a,b >= 0 it vanishes whenever a == 0 or b == 0, and recovers the
// profile when (a, b) trace a matched tent pair.
double profile_gadget(const ReluCoeffs& coeffs, double a, double b);

// Per-interval profile selection for one residual.
//
// `profiles` is deduplicated in first-use order;
// `profile_of_interval[t]` indexes into it.
struct CacheAssignment {
  int intervals = 0;
  int cells = 0;
  std::vector<int> profile_of_interval;
  std::vector<ProfileCode> profiles;

  std::size_t cache_size() const { return profiles.size(); }
};

// Quantize the residual over every interval [t/T, (t+1)/T].
//
// Validates the certificate sup |residual - scaled profile| <= 2/(T*m)
// on each interval and throws AssignmentError (naming the interval) if
// quantization cannot meet it.
CacheAssignment assign_cache(const PwlFunction& residual, int intervals,
                             int cells);

// Largest per-interval certificate error actually attained.
double max_interval_error(const PwlFunction& residual,
                          const CacheAssignment& assignment);

}  // namespace cachenet
