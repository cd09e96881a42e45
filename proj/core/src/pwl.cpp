// SPDX-License-Identifier: Apache-2.0
#include "cachenet/pwl.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>

#include "cachenet/errors.hpp"

namespace cachenet {

double to_double(const Rational& r) {
  return static_cast<double>(r.numerator()) /
         static_cast<double>(r.denominator());
}

PwlFunction::PwlFunction(std::vector<Rational> nodes,
                         std::vector<double> values)
    : nodes_(std::move(nodes)), values_(std::move(values)) {
  if (nodes_.size() < 2) {
    throw ParameterError("pwl: need at least two nodes");
  }
  if (nodes_.size() != values_.size()) {
    throw ParameterError("pwl: node/value count mismatch");
  }
  if (nodes_.front() != Rational(0) || nodes_.back() != Rational(1)) {
    throw ParameterError("pwl: nodes must start at 0 and end at 1");
  }
  for (std::size_t i = 1; i < nodes_.size(); ++i) {
    if (!(nodes_[i - 1] < nodes_[i])) {
      throw ParameterError("pwl: nodes must be strictly increasing");
    }
  }
  for (double v : values_) {
    if (!std::isfinite(v)) throw ParameterError("pwl: non-finite value");
  }
  node_x_.reserve(nodes_.size());
  for (const auto& n : nodes_) node_x_.push_back(to_double(n));
}

double PwlFunction::operator()(double x) const {
  if (!(x >= 0.0 && x <= 1.0)) {
    throw DomainError("pwl: evaluation outside [0,1]");
  }
  // Index of the segment containing x: last node <= x.
  auto it = std::upper_bound(node_x_.begin(), node_x_.end(), x);
  std::size_t i = static_cast<std::size_t>(it - node_x_.begin());
  if (i == 0) i = 1;  // x below the double image of node 0 (dust)
  if (i == node_x_.size()) return values_.back();
  --i;
  if (x == node_x_[i]) return values_[i];
  const double x0 = node_x_[i], x1 = node_x_[i + 1];
  const double t = (x - x0) / (x1 - x0);
  return values_[i] + t * (values_[i + 1] - values_[i]);
}

double PwlFunction::value_at(const Rational& x) const {
  if (x < Rational(0) || x > Rational(1)) {
    throw DomainError("pwl: evaluation outside [0,1]");
  }
  auto it = std::upper_bound(nodes_.begin(), nodes_.end(), x);
  std::size_t i = static_cast<std::size_t>(it - nodes_.begin());
  // it points past the last node <= x ... upper_bound gives first > x.
  if (i == 0) throw DomainError("pwl: evaluation outside [0,1]");
  --i;
  if (nodes_[i] == x) return values_[i];
  const Rational t = (x - nodes_[i]) / (nodes_[i + 1] - nodes_[i]);
  return values_[i] + to_double(t) * (values_[i + 1] - values_[i]);
}

std::pair<double, double> PwlFunction::range() const {
  auto [mn, mx] = std::minmax_element(values_.begin(), values_.end());
  return {*mn, *mx};
}

PwlFunction interpolate(const PwlFunction& f, int segments) {
  if (segments < 1) throw ParameterError("interpolate: segments must be >= 1");
  std::vector<Rational> nodes;
  std::vector<double> values;
  nodes.reserve(segments + 1);
  values.reserve(segments + 1);
  for (int k = 0; k <= segments; ++k) {
    Rational x(k, segments);
    nodes.push_back(x);
    values.push_back(f.value_at(x));
  }
  return PwlFunction(std::move(nodes), std::move(values));
}

PwlFunction interpolate(const std::function<double(double)>& f, int segments) {
  if (segments < 1) throw ParameterError("interpolate: segments must be >= 1");
  std::vector<Rational> nodes;
  std::vector<double> values;
  nodes.reserve(segments + 1);
  values.reserve(segments + 1);
  for (int k = 0; k <= segments; ++k) {
    Rational x(k, segments);
    nodes.push_back(x);
    values.push_back(f(to_double(x)));
  }
  return PwlFunction(std::move(nodes), std::move(values));
}

namespace {

// Sorted union of two node lists (both already sorted, both spanning
// [0,1]).
std::vector<Rational> union_nodes(const std::vector<Rational>& a,
                                  const std::vector<Rational>& b) {
  std::vector<Rational> out;
  out.reserve(a.size() + b.size());
  std::set_union(a.begin(), a.end(), b.begin(), b.end(),
                 std::back_inserter(out));
  return out;
}

}  // namespace

PwlFunction subtract(const PwlFunction& a, const PwlFunction& b) {
  std::vector<Rational> nodes = union_nodes(a.nodes(), b.nodes());
  std::vector<double> values;
  values.reserve(nodes.size());
  for (const auto& x : nodes) values.push_back(a.value_at(x) - b.value_at(x));
  return PwlFunction(std::move(nodes), std::move(values));
}

namespace {

// Value of f at x given the segment index that contains x (tracked by
// the caller while walking nodes in order).
double value_in_segment(const PwlFunction& f, std::size_t seg,
                        const Rational& x) {
  const auto& nodes = f.nodes();
  const auto& values = f.values();
  if (x == nodes[seg]) return values[seg];
  if (x == nodes[seg + 1]) return values[seg + 1];
  const Rational t = (x - nodes[seg]) / (nodes[seg + 1] - nodes[seg]);
  return values[seg] + to_double(t) * (values[seg + 1] - values[seg]);
}

}  // namespace

double sup_dist(const PwlFunction& a, const PwlFunction& b) {
  // Both functions are linear between consecutive union nodes, so the
  // maximum of |a-b| over [0,1] is attained at a union node.  One merge
  // pass over both node lists visits every union node.
  double best = 0.0;
  std::size_t ia = 0, ib = 0;  // current segment in a and b
  std::size_t pa = 0, pb = 0;  // next unvisited node index
  const auto& na = a.nodes();
  const auto& nb = b.nodes();
  while (pa < na.size() || pb < nb.size()) {
    Rational x = pa < na.size() && (pb >= nb.size() || na[pa] <= nb[pb])
                     ? na[pa]
                     : nb[pb];
    while (pa < na.size() && na[pa] == x) ++pa;
    while (pb < nb.size() && nb[pb] == x) ++pb;
    while (ia + 2 < na.size() && na[ia + 1] <= x) ++ia;
    while (ib + 2 < nb.size() && nb[ib + 1] <= x) ++ib;
    best = std::max(best,
                    std::abs(value_in_segment(a, ia, x) -
                             value_in_segment(b, ib, x)));
  }
  return best;
}

double lipschitz_constant(const PwlFunction& f) {
  double best = 0.0;
  const auto& nodes = f.nodes();
  const auto& values = f.values();
  for (std::size_t i = 1; i < nodes.size(); ++i) {
    const double dx = to_double(nodes[i] - nodes[i - 1]);
    best = std::max(best, std::abs(values[i] - values[i - 1]) / dx);
  }
  return best;
}

namespace {

std::string format_scale(double scale) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", scale);
  return buf;
}

// Platform-stable uniform double in [0,1): 53 top bits of the engine.
double next_uniform(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

PwlFunction make_pwl_random(int pieces, std::uint64_t seed) {
  if (pieces < 1) throw ParameterError("pwl-random: pieces must be >= 1");
  std::mt19937_64 rng(seed);
  std::vector<Rational> nodes;
  std::vector<double> values;
  nodes.reserve(pieces + 1);
  values.reserve(pieces + 1);
  double v = -0.5 + next_uniform(rng);
  for (int k = 0; k <= pieces; ++k) {
    nodes.emplace_back(k, pieces);
    values.push_back(v);
    if (k == pieces) break;
    const double slope = 2.0 * next_uniform(rng) - 1.0;
    double next = v + slope / pieces;
    // Reflect at the walls; the reflected increment is never larger in
    // magnitude than the original one, so the slope stays in [-1,1].
    if (next > 1.0) next = 2.0 - next;
    if (next < -1.0) next = -2.0 - next;
    v = next;
  }
  return PwlFunction(std::move(nodes), std::move(values));
}

PwlFunction make_analytic(const std::string& family, double scale) {
  constexpr int kSampleGrid = 2048;
  const double tau = 2.0 * std::numbers::pi * scale;
  std::function<double(double)> g;
  if (family == "sine") {
    if (!(scale > 0)) throw ParameterError("analytic sine: scale must be > 0");
    if (tau < 1.0) {
      throw ParameterError("analytic sine: scale too small for unit slope");
    }
    g = [tau](double x) { return std::sin(tau * x) / tau; };
  } else if (family == "cosine") {
    if (!(scale > 0)) {
      throw ParameterError("analytic cosine: scale must be > 0");
    }
    if (tau < 1.0) {
      throw ParameterError("analytic cosine: scale too small for unit slope");
    }
    g = [tau](double x) { return (1.0 - std::cos(tau * x)) / tau; };
  } else if (family == "parabola") {
    if (!(scale > 0.0 && scale <= 1.0)) {
      throw ParameterError("analytic parabola: scale must be in (0,1]");
    }
    g = [scale](double x) {
      return scale * ((x - 0.5) * (x - 0.5) - 0.125);
    };
  } else {
    throw ParameterError("analytic: unknown family '" + family + "'");
  }
  return interpolate(g, kSampleGrid);
}

}  // namespace

std::string UnitBallSpec::id() const {
  switch (kind) {
    case Kind::pwl_random:
      return "pwl-random-p" + std::to_string(pieces) + "-s" +
             std::to_string(seed);
    case Kind::named_analytic:
      return "analytic-" + family + "-" + format_scale(scale);
  }
  return "unknown";
}

PwlFunction make_unit_ball_function(const UnitBallSpec& spec) {
  PwlFunction f = [&] {
    switch (spec.kind) {
      case UnitBallSpec::Kind::pwl_random:
        return make_pwl_random(spec.pieces, spec.seed);
      case UnitBallSpec::Kind::named_analytic:
        return make_analytic(spec.family, spec.scale);
    }
    throw ParameterError("unit-ball spec: unknown kind");
  }();
  // Admissibility: slope within the unit ball, values within [-1,1].
  // A tiny allowance covers float rounding in the generators; anything
  // beyond it is a construction bug, not something to rescale away.
  constexpr double kTol = 1e-9;
  if (lipschitz_constant(f) > 1.0 + kTol) {
    throw ConstructionError("unit-ball function exceeds slope 1: " +
                            spec.id());
  }
  auto [lo, hi] = f.range();
  if (lo < -1.0 - kTol || hi > 1.0 + kTol) {
    throw ConstructionError("unit-ball function exceeds range [-1,1]: " +
                            spec.id());
  }
  return f;
}

}  // namespace cachenet
