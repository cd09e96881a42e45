// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace cachenet {

enum class Activation { relu, linear };

// One neuron: weights over the previous layer, a bias, and an activation.
struct Unit {
  std::vector<double> weights;
  double bias = 0.0;
  Activation mode = Activation::relu;
};

// Plain feed-forward network with scalar input and scalar output.
// `hidden` holds the hidden layers only; `output` is a single unit over
// the last hidden layer.  Depth == hidden.size().
struct Network {
  int input_width = 1;
  std::vector<std::vector<Unit>> hidden;
  Unit output;
  // Set when hidden units intentionally use linear activations (the
  // exact-linear embedding mode); validate_standard reports rather than
  // rejects them in that case.
  bool linear_hidden_expected = false;

  int depth() const { return static_cast<int>(hidden.size()); }
  int max_width() const;
};

double forward(const Network& net, double x);

// Post-activation values of every layer (last entry = {output}).
std::vector<std::vector<double>> forward_trace(const Network& net, double x);

// Number of adjustable scalars: all weights plus all biases, in every
// hidden unit and in the output unit.
std::size_t weight_count(const Network& net);

// Shape contract for a fixed-width network: every hidden layer has
// exactly `width` units and full connections to the previous layer.
struct StandardShape {
  int width = 5;
  int depth = 0;

  // Adjustable-scalar count of the fully-connected shape:
  // width*(width+1)*(depth-1) + width*(1+1) ... collapsed closed form
  // width^2*(depth-1) + width*(depth+2) + 1, for depth >= 1.
  std::size_t expected_weights() const;
};

struct ValidationReport {
  bool ok = true;
  std::vector<std::string> violations;
  std::string note;  // conventions applied (e.g. hidden-layer depth count)
};

// Check width, connectivity, activation discipline, and weight budget of
// `net` against `shape`.
ValidationReport validate_standard(const Network& net,
                                   const StandardShape& shape);

}  // namespace cachenet
