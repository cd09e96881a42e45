// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <vector>

#include "cachenet/errors.hpp"
#include "cachenet/relu_net.hpp"

using namespace cachenet;

namespace {

// One hidden layer of three hinges computing 1 - x on [0,1] (the tent
// offsets -1, 0, +1 collapsed through the readout 1, -2, 1).
Network tent_net() {
  Network net;
  net.hidden.push_back({Unit{{1.0}, 1.0, Activation::relu},
                        Unit{{1.0}, 0.0, Activation::relu},
                        Unit{{1.0}, -1.0, Activation::relu}});
  net.output = Unit{{1.0, -2.0, 1.0}, 0.0, Activation::linear};
  return net;
}

}  // namespace

TEST_CASE("forward computes layered hinge algebra") {
  Network net = tent_net();
  CHECK_EQ(forward(net, 0.0), 1.0);
  CHECK_EQ(forward(net, 0.25), 0.75);
  CHECK_EQ(forward(net, 1.0), 0.0);
  auto trace = forward_trace(net, 0.25);
  REQUIRE_EQ(trace.size(), 2);  // hidden layer + output
  const std::vector<double> hidden_expected{1.25, 0.25, 0.0};
  const std::vector<double> out_expected{0.75};
  CHECK_EQ(trace[0], hidden_expected);
  CHECK_EQ(trace[1], out_expected);
}

TEST_CASE("forward rejects fan-in mismatches") {
  Network net = tent_net();
  net.hidden[0][1].weights = {1.0, 2.0};  // expects scalar input
  CHECK_THROWS_AS(forward(net, 0.5), StructureError);
}

TEST_CASE("weight_count tallies weights and biases everywhere") {
  Network net = tent_net();
  // 3 hidden units x (1 weight + 1 bias) + output (3 weights + 1 bias).
  CHECK_EQ(weight_count(net), 10);
}

TEST_CASE("standard-shape weight budget follows the closed form") {
  CHECK_EQ((StandardShape{5, 1}.expected_weights()), 16);
  CHECK_EQ((StandardShape{5, 9}.expected_weights()), 256);
  CHECK_EQ((StandardShape{1, 1}.expected_weights()), 4);
  for (int depth = 1; depth <= 50; ++depth) {
    CHECK_EQ((StandardShape{5, depth}.expected_weights()),
             static_cast<std::size_t>(30 * depth - 14));
  }
}

namespace {

// Fully-connected width-w depth-d all-relu net with zero parameters.
Network blank_standard(int width, int depth) {
  Network net;
  for (int l = 0; l < depth; ++l) {
    std::vector<Unit> layer;
    for (int i = 0; i < width; ++i) {
      Unit u;
      u.weights.assign(l == 0 ? 1 : width, 0.0);
      layer.push_back(u);
    }
    net.hidden.push_back(std::move(layer));
  }
  net.output.weights.assign(width, 0.0);
  net.output.mode = Activation::linear;
  return net;
}

}  // namespace

TEST_CASE("validate_standard accepts the reference shape") {
  Network net = blank_standard(5, 9);
  ValidationReport rep = validate_standard(net, StandardShape{5, 9});
  CHECK(rep.ok);
  CHECK(rep.violations.empty());
  CHECK(!rep.note.empty());
  CHECK_EQ(weight_count(net), (StandardShape{5, 9}.expected_weights()));
}

TEST_CASE("validate_standard flags shape and discipline violations") {
  SUBCASE("wrong layer width") {
    Network net = blank_standard(5, 3);
    net.hidden[1].pop_back();
    ValidationReport rep = validate_standard(net, StandardShape{5, 3});
    CHECK(!rep.ok);
    CHECK(!rep.violations.empty());
  }
  SUBCASE("wrong depth") {
    Network net = blank_standard(5, 3);
    CHECK(!validate_standard(net, StandardShape{5, 4}).ok);
  }
  SUBCASE("fan-in mismatch") {
    Network net = blank_standard(5, 3);
    net.hidden[2][0].weights.pop_back();
    CHECK(!validate_standard(net, StandardShape{5, 3}).ok);
  }
  SUBCASE("relu output unit") {
    Network net = blank_standard(5, 2);
    net.output.mode = Activation::relu;
    CHECK(!validate_standard(net, StandardShape{5, 2}).ok);
  }
  SUBCASE("linear hidden unit needs the declared expectation") {
    Network net = blank_standard(5, 2);
    net.hidden[0][2].mode = Activation::linear;
    CHECK(!validate_standard(net, StandardShape{5, 2}).ok);
    net.linear_hidden_expected = true;
    CHECK(validate_standard(net, StandardShape{5, 2}).ok);
  }
  SUBCASE("non-finite parameter") {
    Network net = blank_standard(5, 2);
    net.hidden[1][1].bias = std::nan("");
    CHECK(!validate_standard(net, StandardShape{5, 2}).ok);
  }
}
