// SPDX-License-Identifier: Apache-2.0
#include "cachenet/cache.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "cachenet/errors.hpp"

namespace cachenet {

namespace {

void check_cells(int cells) {
  if (cells < 1) throw ParameterError("profile: cells must be >= 1");
  if (cells > 62) throw ParameterError("profile: cells out of range");
}

// Snap distance for lattice boundaries.  Floor(x + kSnap) instead of
// floor(x) so that values within dust of a lattice level land on it
// instead of one level below.  Keeps the node error in [-2*kSnap/m, 2/m).
constexpr double kSnap = 1e-9;

}  // namespace

bool ProfileCode::is_zero() const {
  return std::all_of(steps.begin(), steps.end(),
                     [](std::int8_t s) { return s == 0; });
}

std::string ProfileCode::digits() const {
  std::string out;
  out.reserve(steps.size());
  for (std::int8_t s : steps) out.push_back(s < 0 ? '-' : (s > 0 ? '+' : '0'));
  return out;
}

ProfileCode ProfileCode::from_digits(std::string_view text) {
  ProfileCode code;
  code.cells = static_cast<int>(text.size());
  check_cells(code.cells);
  code.steps.reserve(text.size());
  int level = 0;
  for (char ch : text) {
    int s = ch == '+' ? 1 : (ch == '-' ? -1 : (ch == '0' ? 0 : 2));
    if (s == 2) throw ParameterError("profile digits: expected one of +0-");
    code.steps.push_back(static_cast<std::int8_t>(s));
    level += s;
  }
  if (level != 0) throw ParameterError("profile digits: steps do not close");
  return code;
}

PwlFunction realize_profile(const ProfileCode& code) {
  check_cells(code.cells);
  if (static_cast<int>(code.steps.size()) != code.cells) {
    throw ParameterError("profile: step count != cells");
  }
  std::vector<Rational> nodes;
  std::vector<double> values;
  nodes.reserve(code.cells + 1);
  values.reserve(code.cells + 1);
  int level = 0;
  for (int r = 0; r <= code.cells; ++r) {
    nodes.emplace_back(r, code.cells);
    values.push_back(2.0 * level / code.cells);
    if (r < code.cells) level += code.steps[r];
  }
  if (level != 0) throw ParameterError("profile: steps do not close");
  return PwlFunction(std::move(nodes), std::move(values));
}

std::vector<ProfileCode> enumerate_profiles(int cells) {
  check_cells(cells);
  if (cells > 16) {
    throw ParameterError("enumerate: too many cells to enumerate");
  }
  std::vector<ProfileCode> out;
  std::vector<std::int8_t> steps(cells, -1);
  // Odometer over {-1,0,+1}^cells in lexicographic order, keeping the
  // balanced strings.
  while (true) {
    int sum = 0;
    for (std::int8_t s : steps) sum += s;
    if (sum == 0) out.push_back(ProfileCode{cells, steps});
    int i = cells - 1;
    while (i >= 0 && steps[i] == 1) steps[i--] = -1;
    if (i < 0) break;
    ++steps[i];
  }
  return out;
}

ProfileCode quantize(std::span<const double> samples, int cells) {
  check_cells(cells);
  if (static_cast<int>(samples.size()) != cells + 1) {
    throw ParameterError("quantize: need cells+1 samples");
  }
  if (samples.front() != 0.0 || samples.back() != 0.0) {
    throw PreconditionError("quantize: endpoint samples must be exactly 0");
  }
  const double m = cells;
  std::vector<int> level(cells + 1);
  for (int r = 0; r <= cells; ++r) {
    level[r] = static_cast<int>(std::floor(samples[r] * m / 2.0 + kSnap));
  }
  if (level.front() != 0 || level.back() != 0) {
    throw PreconditionError("quantize: endpoint levels not zero");
  }
  ProfileCode code;
  code.cells = cells;
  code.steps.reserve(cells);
  for (int r = 0; r < cells; ++r) {
    const int d = level[r + 1] - level[r];
    if (d < -1 || d > 1) {
      throw PreconditionError(
          "quantize: samples move more than one level per cell");
    }
    code.steps.push_back(static_cast<std::int8_t>(d));
  }
  return code;
}

ReluCoeffs relu_coeffs(const ProfileCode& code) {
  check_cells(code.cells);
  if (static_cast<int>(code.steps.size()) != code.cells) {
    throw ParameterError("relu coeffs: step count != cells");
  }
  // Slope over cell r is 2*steps[r]; hinge coefficients are the slope
  // increments.
  ReluCoeffs out;
  out.cells = code.cells;
  out.c.resize(code.cells);
  double prev = 0.0;
  for (int r = 0; r < code.cells; ++r) {
    const double slope = 2.0 * code.steps[r];
    out.c[r] = slope - prev;
    prev = slope;
  }
  return out;
}

double profile_gadget(const ReluCoeffs& coeffs, double a, double b) {
  const double m = coeffs.cells;
  double acc = 0.0;
  for (int r = 0; r < coeffs.cells; ++r) {
    const double z = (m - r) / m * a - r / m * b;
    acc += coeffs.c[r] * (z > 0.0 ? z : 0.0);
  }
  return acc;
}

namespace {

// Union of the residual's nodes with the profile lattice over one
// interval, as exact rationals.
double interval_sup_error(const PwlFunction& residual, int intervals,
                          int cells, int t, const PwlFunction& profile) {
  const Rational left(t, intervals);
  const Rational right(t + 1, intervals);
  const Rational width(1, intervals);
  std::vector<Rational> points;
  for (int r = 0; r <= cells; ++r) {
    points.push_back(Rational(t * cells + r, intervals * cells));
  }
  for (const auto& x : residual.nodes()) {
    if (x > left && x < right) points.push_back(x);
  }
  std::sort(points.begin(), points.end());
  points.erase(std::unique(points.begin(), points.end()), points.end());

  const double inv_t = 1.0 / intervals;
  double worst = 0.0;
  for (const auto& x : points) {
    const Rational y = (x - left) / width;  // position within the interval
    const double approx = profile.value_at(y) * inv_t;
    worst = std::max(worst, std::abs(residual.value_at(x) - approx));
  }
  return worst;
}

std::vector<double> interval_samples(const PwlFunction& residual,
                                     int intervals, int cells, int t) {
  std::vector<double> g(cells + 1);
  for (int r = 0; r <= cells; ++r) {
    const Rational x(t * cells + r, intervals * cells);
    double v = residual.value_at(x) * intervals;
    // The rescaled residual vanishes at interval ends by construction;
    // interior zeros may carry rounding dust that must not flip the
    // floor level.
    if (r == 0 || r == cells) v = 0.0;
    if (std::abs(v) <= kSnap) v = 0.0;
    g[r] = v;
  }
  return g;
}

}  // namespace

CacheAssignment assign_cache(const PwlFunction& residual, int intervals,
                             int cells) {
  if (intervals < 1) throw ParameterError("assign: intervals must be >= 1");
  check_cells(cells);
  for (int t = 0; t < intervals; ++t) {
    const Rational x(t, intervals);
    if (residual.value_at(x) != 0.0) {
      throw PreconditionError(
          "assign: residual must vanish at interval ends");
    }
  }

  CacheAssignment out;
  out.intervals = intervals;
  out.cells = cells;
  out.profile_of_interval.resize(intervals);
  std::map<std::string, int> seen;  // digits -> profile index
  std::vector<PwlFunction> realized;

  const double budget =
      2.0 / (static_cast<double>(intervals) * cells) + 1e-12;
  for (int t = 0; t < intervals; ++t) {
    const auto g = interval_samples(residual, intervals, cells, t);
    ProfileCode code = quantize(g, cells);
    const std::string key = code.digits();
    auto [it, inserted] = seen.emplace(key, static_cast<int>(out.profiles.size()));
    if (inserted) {
      out.profiles.push_back(code);
      realized.push_back(realize_profile(code));
    }
    const int p = it->second;
    out.profile_of_interval[t] = p;
    const double err =
        interval_sup_error(residual, intervals, cells, t, realized[p]);
    if (err > budget) {
      throw AssignmentError(
          "assign: interval " + std::to_string(t) +
              " misses the error certificate (" + std::to_string(err) +
              " > " + std::to_string(budget) + ")",
          t);
    }
  }
  return out;
}

double max_interval_error(const PwlFunction& residual,
                          const CacheAssignment& assignment) {
  if (assignment.intervals < 1 || assignment.cells < 1) {
    throw ParameterError("max interval error: empty assignment");
  }
  std::vector<PwlFunction> realized;
  realized.reserve(assignment.profiles.size());
  for (const auto& code : assignment.profiles) {
    realized.push_back(realize_profile(code));
  }
  double worst = 0.0;
  for (int t = 0; t < assignment.intervals; ++t) {
    const int p = assignment.profile_of_interval[t];
    worst = std::max(
        worst, interval_sup_error(residual, assignment.intervals,
                                  assignment.cells, t, realized[p]));
  }
  return worst;
}

}  // namespace cachenet
