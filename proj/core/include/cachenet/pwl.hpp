// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <boost/rational.hpp>
#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace cachenet {

// Exact node abscissa.  All breakpoints this library manipulates are
// rationals with small denominators (grid points t/T, r/m, k/pieces), so
// int64 components never get near overflow: reductions keep denominators
// at lcm-scale of the inputs, and the largest lcm we form is ~1e7.
using Rational = boost::rational<std::int64_t>;

double to_double(const Rational& r);

// Continuous piecewise-linear function on [0,1].
//
// Nodes are exact rationals, strictly increasing, first == 0, last == 1.
// Values are doubles.  Between nodes the function is the straight chord;
// evaluation outside [0,1] throws DomainError.
class PwlFunction {
 public:
  PwlFunction(std::vector<Rational> nodes, std::vector<double> values);

  double operator()(double x) const;

  // Value at an exact abscissa.  Exact node hits return the stored value
  // (no interpolation rounding).
  double value_at(const Rational& x) const;

  const std::vector<Rational>& nodes() const { return nodes_; }
  const std::vector<double>& values() const { return values_; }
  std::size_t segment_count() const { return nodes_.size() - 1; }

  // [min, max] over the whole domain (attained at nodes).
  std::pair<double, double> range() const;

 private:
  std::vector<Rational> nodes_;
  std::vector<double> values_;
  std::vector<double> node_x_;  // cached double images of nodes_
};

// Piecewise-linear interpolant of f on the uniform grid {k/segments}.
PwlFunction interpolate(const PwlFunction& f, int segments);
PwlFunction interpolate(const std::function<double(double)>& f, int segments);

// Pointwise difference a - b on the union of both node sets.
PwlFunction subtract(const PwlFunction& a, const PwlFunction& b);

// Exact sup-norm distance: both functions are linear between union nodes,
// so the max of |a-b| is attained at a union node.
double sup_dist(const PwlFunction& a, const PwlFunction& b);

// Largest absolute chord slope.
double lipschitz_constant(const PwlFunction& f);

// Description of one admissible test function (Lipschitz-1, values in
// [-1,1]).  `id()` is the stable name used in reports.
struct UnitBallSpec {
  enum class Kind { pwl_random, named_analytic };

  Kind kind = Kind::pwl_random;
  // pwl_random
  int pieces = 16;
  std::uint64_t seed = 0;
  // named_analytic
  std::string family;  // "sine" | "parabola"
  double scale = 1.0;

  std::string id() const;
};

// Build the function a spec describes.  Throws ConstructionError if the
// result fails the admissibility checks (never rescales silently).
PwlFunction make_unit_ball_function(const UnitBallSpec& spec);

}  // namespace cachenet
