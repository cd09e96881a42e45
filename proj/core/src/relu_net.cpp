// SPDX-License-Identifier: Apache-2.0
#include "cachenet/relu_net.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "cachenet/errors.hpp"

namespace cachenet {

namespace {

double activate(const Unit& u, double z) {
  return u.mode == Activation::relu ? (z > 0.0 ? z : 0.0) : z;
}

double pre_activation(const Unit& u, const std::vector<double>& in) {
  if (u.weights.size() != in.size()) {
    throw StructureError("forward: unit fan-in does not match layer width");
  }
  double z = u.bias;
  for (std::size_t k = 0; k < in.size(); ++k) z += u.weights[k] * in[k];
  return z;
}

}  // namespace

int Network::max_width() const {
  std::size_t w = 0;
  for (const auto& layer : hidden) w = std::max(w, layer.size());
  return static_cast<int>(w);
}

double forward(const Network& net, double x) {
  std::vector<double> cur{x};
  std::vector<double> next;
  for (const auto& layer : net.hidden) {
    next.clear();
    next.reserve(layer.size());
    for (const auto& u : layer) next.push_back(activate(u, pre_activation(u, cur)));
    cur.swap(next);
  }
  return activate(net.output, pre_activation(net.output, cur));
}

std::vector<std::vector<double>> forward_trace(const Network& net, double x) {
  std::vector<std::vector<double>> trace;
  trace.reserve(net.hidden.size() + 1);
  std::vector<double> cur{x};
  for (const auto& layer : net.hidden) {
    std::vector<double> next;
    next.reserve(layer.size());
    for (const auto& u : layer) next.push_back(activate(u, pre_activation(u, cur)));
    trace.push_back(next);
    cur.swap(next);
  }
  trace.push_back({activate(net.output, pre_activation(net.output, cur))});
  return trace;
}

std::size_t weight_count(const Network& net) {
  std::size_t n = 0;
  for (const auto& layer : net.hidden) {
    for (const auto& u : layer) n += u.weights.size() + 1;
  }
  n += net.output.weights.size() + 1;
  return n;
}

std::size_t StandardShape::expected_weights() const {
  // First hidden layer: width units over the scalar input; remaining
  // hidden layers: width units over width inputs; affine readout on top.
  const std::size_t w = static_cast<std::size_t>(width);
  const std::size_t d = static_cast<std::size_t>(depth);
  return w * w * (d - 1) + w * (d + 2) + 1;
}

ValidationReport validate_standard(const Network& net,
                                   const StandardShape& shape) {
  ValidationReport report;
  report.note =
      "depth counts hidden layers; the affine readout is not a layer";
  auto fail = [&](std::string msg) {
    report.ok = false;
    report.violations.push_back(std::move(msg));
  };

  if (net.input_width != 1) fail("input width must be 1");
  if (net.depth() != shape.depth) {
    fail("depth " + std::to_string(net.depth()) + " != required " +
         std::to_string(shape.depth));
  }
  std::size_t prev = 1;
  for (std::size_t l = 0; l < net.hidden.size(); ++l) {
    const auto& layer = net.hidden[l];
    if (static_cast<int>(layer.size()) != shape.width) {
      fail("layer " + std::to_string(l) + " width " +
           std::to_string(layer.size()) + " != " + std::to_string(shape.width));
      continue;
    }
    for (std::size_t u = 0; u < layer.size(); ++u) {
      const Unit& unit = layer[u];
      if (unit.weights.size() != prev) {
        fail("layer " + std::to_string(l) + " unit " + std::to_string(u) +
             " fan-in " + std::to_string(unit.weights.size()) + " != " +
             std::to_string(prev));
      }
      if (unit.mode != Activation::relu && !net.linear_hidden_expected) {
        fail("layer " + std::to_string(l) + " unit " + std::to_string(u) +
             " is not relu");
      }
      if (!std::isfinite(unit.bias)) fail("non-finite bias");
      for (double w : unit.weights) {
        if (!std::isfinite(w)) fail("non-finite weight");
      }
    }
    prev = layer.size();
  }
  if (net.output.weights.size() != prev) {
    fail("output fan-in " + std::to_string(net.output.weights.size()) +
         " != " + std::to_string(prev));
  }
  if (net.output.mode != Activation::linear) fail("output must be affine");
  if (net.linear_hidden_expected) {
    report.note += "; hidden identity units use linear activation by design";
  }
  if (report.ok && weight_count(net) != shape.expected_weights()) {
    fail("weight count " + std::to_string(weight_count(net)) + " != " +
         std::to_string(shape.expected_weights()));
  }
  return report;
}

}  // namespace cachenet
