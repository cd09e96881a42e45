// SPDX-License-Identifier: Apache-2.0
#include "cachenet/embed.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "cachenet/errors.hpp"

namespace cachenet {

long long depth_bound(int intervals, int cells, int cache_size) {
  return 7LL * intervals + 3LL * (cells + 4) * cache_size + 2;
}

namespace {

long long pow3(int m) {
  long long p = 1;
  for (int i = 0; i < m; ++i) p *= 3;
  return p;
}

int cells_for_budget(int budget) {
  // Largest m with 9^m <= budget, floored at 1.
  int m = 1;
  long long pw = 9;
  while (pw * 9 <= budget) {
    pw *= 9;
    ++m;
  }
  return m;
}

bool budget_feasible(int budget) {
  if (budget < 8) return false;
  const int t = budget / 8;
  const int m = cells_for_budget(budget);
  return depth_bound(t, m, static_cast<int>(pow3(m))) <= budget;
}

}  // namespace

ChosenParams raw_params(int budget) {
  if (budget < 8) {
    throw ParameterError("depth budget must be at least 8");
  }
  ChosenParams p;
  p.budget = budget;
  p.intervals = budget / 8;
  p.cells = cells_for_budget(budget);
  return p;
}

int min_feasible_budget() {
  static const int cached = [] {
    int n = 8;
    while (!budget_feasible(n)) ++n;
    return n;
  }();
  return cached;
}

ChosenParams choose_params(int budget) {
  ChosenParams p = raw_params(budget);
  if (!budget_feasible(budget)) {
    int next = budget;
    while (!budget_feasible(next)) ++next;
    throw InfeasibleBudgetError(
        "depth budget " + std::to_string(budget) +
            " cannot host the worst-case schedule; smallest workable "
            "budget is " +
            std::to_string(min_feasible_budget()) +
            ", next workable at or above the request is " +
            std::to_string(next),
        min_feasible_budget(), next);
  }
  return p;
}

namespace {

constexpr int kW = 5;
constexpr int kRowX = 0;     // input pass-through
constexpr int kRowCmp = 1;   // per-layer hinge computation
constexpr int kRowLineB = 2; // tent sum, unshifted
constexpr int kRowLineA = 3; // tent sum, shifted one slot
constexpr int kRowAcc = 4;   // running output

enum class Cls { inert, carrier, compute };

struct Iv {
  double lo = 0.0;
  double hi = 0.0;
};

Iv hull(Iv a, Iv b) { return {std::min(a.lo, b.lo), std::max(a.hi, b.hi)}; }

Iv plus(Iv a, Iv b) { return {a.lo + b.lo, a.hi + b.hi}; }

struct Spec {
  std::array<double, kW> w{};
  double bias = 0.0;
  Cls cls = Cls::inert;
  bool has_override = false;
  Iv override_iv{};
  Iv iv{};  // certified true pre-activation range (set by propagation)
};

using LayerSpec = std::array<Spec, kW>;

class Builder {
 public:
  Builder(const AdaptiveNet& anet, bool prune_zero) : anet_(anet) {
    const int T = anet.intervals();
    // Node values and prefix slopes of the coarse interpolant, rebuilt
    // from the hinge form for the running-range overrides.
    node_.resize(T + 1);
    slope_.resize(T);
    node_[0] = anet.intercept();
    double s = 0.0;
    for (int t = 0; t < T; ++t) {
      s += anet.ramp_weights()[t];
      slope_[t] = s;
      node_[t + 1] = node_[t] + s / T;
    }
    interp_range_ = {node_[0], node_[0]};
    for (double v : node_) {
      interp_range_ = hull(interp_range_, {v, v});
    }
    for (const auto& code : anet.assignment().profiles) {
      auto [lo, hi] = realize_profile(code).range();
      profile_range_.push_back(Iv{lo, hi});
    }
    for (std::size_t g = 0; g < anet.groups().size(); ++g) {
      const auto& group = anet.groups()[g];
      if (prune_zero && anet.assignment().profiles[group.profile].is_zero()) {
        continue;
      }
      kept_.push_back(static_cast<int>(g));
    }
  }

  void build(EmbedPlan& plan) {
    emit_interpolant();
    plan.segments.push_back(EmbedSegment{
        EmbedSegment::Kind::interpolant, -1, 0,
        static_cast<int>(layers_.size())});
    acc_base_ = interp_range_;
    gamma_env_ = Iv{0.0, 0.0};
    for (int g : kept_) {
      const auto& group = anet_.groups()[g];
      const int start1 = static_cast<int>(layers_.size());
      emit_stage1(group);
      plan.segments.push_back(EmbedSegment{
          EmbedSegment::Kind::group_stage1, g, start1,
          static_cast<int>(layers_.size()) - start1});
      const int start2 = static_cast<int>(layers_.size());
      emit_stage2(group);
      plan.segments.push_back(EmbedSegment{
          EmbedSegment::Kind::group_stage2, g, start2,
          static_cast<int>(layers_.size()) - start2});
    }
    plan.depth = static_cast<int>(layers_.size());
    propagate();
  }

  std::vector<LayerSpec>& layers() { return layers_; }

 private:
  LayerSpec& push() {
    layers_.emplace_back();
    return layers_.back();
  }

  static void id(Spec& s, int src) {
    s.cls = Cls::carrier;
    s.w[src] = 1.0;
  }

  void set_acc_override(Spec& s, Iv iv) {
    s.has_override = true;
    s.override_iv = iv;
  }

  // Range of the partially built interpolant after k absorbed hinges:
  // the nodes reached so far plus the linear extension to x = 1.
  Iv partial_interp_range(int k) const {
    Iv r{node_[0], node_[0]};
    for (int i = 1; i <= k; ++i) r = hull(r, {node_[i], node_[i]});
    if (k >= 1) {
      const int T = anet_.intervals();
      const double ext =
          node_[k] + slope_[k - 1] * (1.0 - static_cast<double>(k) / T);
      r = hull(r, {ext, ext});
    }
    return r;
  }

  void emit_interpolant() {
    const int T = anet_.intervals();
    {
      LayerSpec& L = push();
      id(L[kRowX], 0);  // layer 0 reads the scalar input at slot 0
      L[kRowAcc].cls = Cls::carrier;
      L[kRowAcc].bias = anet_.intercept();
    }
    for (int l = 1; l <= T + 1; ++l) {
      LayerSpec& L = push();
      id(L[kRowX], kRowX);
      if (l <= T) {
        const int t = l - 1;
        L[kRowCmp].cls = Cls::compute;
        L[kRowCmp].w[kRowX] = 1.0;
        L[kRowCmp].bias = -static_cast<double>(t) / T;
      }
      id(L[kRowAcc], kRowAcc);
      if (l >= 2) L[kRowAcc].w[kRowCmp] = anet_.ramp_weights()[l - 2];
      set_acc_override(L[kRowAcc], partial_interp_range(l - 1));
    }
  }

  void emit_stage1(const SubnetGroup& group) {
    const int T = anet_.intervals();
    const int n = static_cast<int>(group.intervals.size());
    {
      LayerSpec& L = push();
      id(L[kRowX], kRowX);
      L[kRowLineB].cls = Cls::carrier;  // fresh zero line
      L[kRowLineA].cls = Cls::carrier;
      id(L[kRowAcc], kRowAcc);
      set_acc_override(L[kRowAcc], plus(acc_base_, Iv{}));
    }
    // One hinge per layer; the line absorbs it on the following layer.
    for (int step = 0; step <= 6 * n; ++step) {
      LayerSpec& L = push();
      id(L[kRowX], kRowX);
      if (step < 6 * n) {
        const int u = step / 6;
        const int rem = step % 6;
        const int j = rem / 3;
        const int q = rem % 3 - 1;
        const int t = group.intervals[u];
        L[kRowCmp].cls = Cls::compute;
        L[kRowCmp].w[kRowX] = static_cast<double>(T);
        L[kRowCmp].bias = -static_cast<double>(t + q + j);
      }
      for (int line : {kRowLineB, kRowLineA}) id(L[line], line);
      if (step >= 1) {
        const int prev = step - 1;
        const int rem = prev % 6;
        const int j = rem / 3;
        const int q = rem % 3 - 1;
        Spec& line = L[j == 0 ? kRowLineB : kRowLineA];
        line.w[kRowCmp] = kToothCoeffs[q + 1];
        if (rem % 3 == 2) {
          // A whole tent has been absorbed; the line is a sum of
          // disjoint unit tents again.
          line.has_override = true;
          line.override_iv = Iv{0.0, 1.0};
        }
      }
      id(L[kRowAcc], kRowAcc);
      set_acc_override(L[kRowAcc], acc_base_);
    }
  }

  void emit_stage2(const SubnetGroup& group) {
    const int T = anet_.intervals();
    const int m = anet_.cells();
    const ReluCoeffs& coeffs = anet_.coeffs()[group.profile];
    {
      LayerSpec& L = push();
      id(L[kRowX], kRowX);
      id(L[kRowLineB], kRowLineB);
      id(L[kRowLineA], kRowLineA);
      id(L[kRowAcc], kRowAcc);
      set_acc_override(L[kRowAcc], acc_base_);
    }
    Iv partial{0.0, 0.0};
    for (int step = 0; step <= m; ++step) {
      LayerSpec& L = push();
      id(L[kRowX], kRowX);
      if (step < m) {
        L[kRowCmp].cls = Cls::compute;
        L[kRowCmp].w[kRowLineA] = static_cast<double>(m - step) / m;
        L[kRowCmp].w[kRowLineB] = -static_cast<double>(step) / m;
      }
      if (step <= m - 2) {
        id(L[kRowLineB], kRowLineB);
        id(L[kRowLineA], kRowLineA);
      }
      id(L[kRowAcc], kRowAcc);
      if (step >= 1) {
        const double c = coeffs.c[step - 1];
        L[kRowAcc].w[kRowCmp] = c / T;
        partial = plus(partial, Iv{std::min(0.0, c) / T, std::max(0.0, c) / T});
      }
      set_acc_override(L[kRowAcc], plus(acc_base_, partial));
    }
    // The group is finished: fold its profile range into the envelope
    // of "one of the finished profiles, or none".
    gamma_env_ = hull(gamma_env_, profile_range_[group.profile]);
    const int T_d = anet_.intervals();
    acc_base_ = plus(interp_range_,
                     Iv{gamma_env_.lo / T_d, gamma_env_.hi / T_d});
    layers_.back()[kRowAcc].override_iv = acc_base_;
  }

  // Certified true pre-activation intervals, outward-rounded.
  void propagate() {
    constexpr double kInf = std::numeric_limits<double>::infinity();
    Iv input{0.0, 1.0};
    for (std::size_t l = 0; l < layers_.size(); ++l) {
      for (Spec& s : layers_[l]) {
        Iv z{s.bias, s.bias};
        for (int k = 0; k < kW; ++k) {
          if (s.w[k] == 0.0) continue;
          Iv src;
          if (l == 0) {
            if (k != 0) throw StructureError("embed: bad input wire");
            src = input;
          } else {
            const Spec& p = layers_[l - 1][k];
            src = p.cls == Cls::compute
                      ? Iv{std::max(0.0, p.iv.lo), std::max(0.0, p.iv.hi)}
                      : p.iv;
          }
          const double a = s.w[k] * src.lo;
          const double b = s.w[k] * src.hi;
          z.lo += std::min(a, b);
          z.hi += std::max(a, b);
        }
        z.lo = std::nextafter(z.lo, -kInf);
        z.hi = std::nextafter(z.hi, kInf);
        if (s.has_override) {
          z.lo = std::max(z.lo, s.override_iv.lo);
          z.hi = std::min(z.hi, s.override_iv.hi);
          if (z.lo > z.hi) {
            throw StructureError("embed: empty certified interval");
          }
        }
        s.iv = z;
      }
    }
  }

  const AdaptiveNet& anet_;
  std::vector<LayerSpec> layers_;
  std::vector<double> node_;
  std::vector<double> slope_;
  std::vector<Iv> profile_range_;
  Iv interp_range_{};
  Iv acc_base_{};
  Iv gamma_env_{};
  std::vector<int> kept_;
};

}  // namespace

Embedded embed_standard(const AdaptiveNet& anet, EmbedMode mode,
                        bool prune_zero) {
  Embedded out;
  out.plan.mode = mode;
  Builder builder(anet, prune_zero);
  builder.build(out.plan);
  const auto& layers = builder.layers();

  // Offsets that keep every pass-through unit strictly positive in
  // strict mode.  Integers, so the downstream compensation is exact.
  std::vector<std::array<double, kW>> kappa(layers.size());
  if (mode == EmbedMode::strict_relu) {
    for (std::size_t l = 0; l < layers.size(); ++l) {
      for (int u = 0; u < kW; ++u) {
        kappa[l][u] = 0.0;
        if (layers[l][u].cls == Cls::carrier) {
          kappa[l][u] = std::ceil(std::max(0.0, -layers[l][u].iv.lo)) + 1.0;
        }
      }
    }
  } else {
    for (auto& row : kappa) row.fill(0.0);
  }

  Network& net = out.net;
  net.input_width = 1;
  net.linear_hidden_expected = (mode == EmbedMode::exact_linear);
  net.hidden.resize(layers.size());
  for (std::size_t l = 0; l < layers.size(); ++l) {
    const std::size_t fan_in = l == 0 ? 1 : kW;
    net.hidden[l].resize(kW);
    for (int u = 0; u < kW; ++u) {
      const Spec& s = layers[l][u];
      Unit& unit = net.hidden[l][u];
      unit.weights.assign(s.w.begin(), s.w.begin() + fan_in);
      double bias = s.bias + kappa[l][u];
      if (l > 0) {
        for (int k = 0; k < kW; ++k) {
          if (s.w[k] != 0.0) bias -= s.w[k] * kappa[l - 1][k];
        }
      }
      unit.bias = bias;
      unit.mode = (mode == EmbedMode::exact_linear && s.cls == Cls::carrier)
                      ? Activation::linear
                      : Activation::relu;
    }
  }
  net.output.weights.assign(kW, 0.0);
  net.output.weights[kRowAcc] = 1.0;
  net.output.bias =
      mode == EmbedMode::strict_relu ? -kappa.back()[kRowAcc] : 0.0;
  net.output.mode = Activation::linear;

  if (mode == EmbedMode::strict_relu) {
    BoundCertificate cert;
    cert.layers.resize(layers.size());
    for (std::size_t l = 0; l < layers.size(); ++l) {
      cert.layers[l].resize(kW);
      for (int u = 0; u < kW; ++u) {
        const Spec& s = layers[l][u];
        cert.layers[l][u] = UnitBound{s.iv.lo, s.iv.hi, kappa[l][u],
                                      s.cls == Cls::carrier};
      }
    }
    out.certificate = std::move(cert);
  }
  return out;
}

}  // namespace cachenet
