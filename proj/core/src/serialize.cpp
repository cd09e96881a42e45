// SPDX-License-Identifier: Apache-2.0
#include "cachenet/serialize.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>

#include "cachenet/errors.hpp"

namespace cachenet {

namespace {

std::string hex_double(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%a", v);
  return buf;
}

double parse_double_exact(const Json& j, const char* what) {
  if (j.is_number()) return j.get<double>();
  if (!j.is_string()) {
    throw IoError(std::string("json: ") + what + " must be a hex-float string");
  }
  const std::string s = j.get<std::string>();
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size() || s.empty()) {
    throw IoError(std::string("json: bad number '") + s + "' for " + what);
  }
  return v;
}

Json rational_to_json(const Rational& r) {
  return Json::array({r.numerator(), r.denominator()});
}

Rational rational_from_json(const Json& j) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number_integer() ||
      !j[1].is_number_integer()) {
    throw IoError("json: node must be a [numerator, denominator] pair");
  }
  const std::int64_t num = j[0].get<std::int64_t>();
  const std::int64_t den = j[1].get<std::int64_t>();
  if (den <= 0) throw IoError("json: node denominator must be positive");
  return Rational(num, den);
}

void expect_type(const Json& j, const char* type) {
  if (!j.is_object() || j.value("type", "") != type) {
    throw IoError(std::string("json: expected a '") + type + "' object");
  }
}

const Json& field(const Json& j, const char* name) {
  auto it = j.find(name);
  if (it == j.end()) {
    throw IoError(std::string("json: missing field '") + name + "'");
  }
  return *it;
}

Activation activation_from_json(const Json& j) {
  const std::string s = j.get<std::string>();
  if (s == "relu") return Activation::relu;
  if (s == "linear") return Activation::linear;
  throw IoError("json: unknown activation '" + s + "'");
}

Json unit_to_json(const Unit& u) {
  Json w = Json::array();
  for (double v : u.weights) w.push_back(hex_double(v));
  return Json{{"w", std::move(w)},
              {"b", hex_double(u.bias)},
              {"act", u.mode == Activation::relu ? "relu" : "linear"}};
}

Unit unit_from_json(const Json& j) {
  Unit u;
  for (const auto& w : field(j, "w")) {
    u.weights.push_back(parse_double_exact(w, "weight"));
  }
  u.bias = parse_double_exact(field(j, "b"), "bias");
  u.mode = activation_from_json(field(j, "act"));
  return u;
}

}  // namespace

Json to_json(const PwlFunction& f) {
  Json nodes = Json::array();
  for (const auto& n : f.nodes()) nodes.push_back(rational_to_json(n));
  Json values = Json::array();
  for (double v : f.values()) values.push_back(hex_double(v));
  return Json{{"type", "pwl"},
              {"nodes", std::move(nodes)},
              {"values", std::move(values)}};
}

PwlFunction pwl_from_json(const Json& j) {
  expect_type(j, "pwl");
  std::vector<Rational> nodes;
  for (const auto& n : field(j, "nodes")) {
    nodes.push_back(rational_from_json(n));
  }
  std::vector<double> values;
  for (const auto& v : field(j, "values")) {
    values.push_back(parse_double_exact(v, "value"));
  }
  try {
    return PwlFunction(std::move(nodes), std::move(values));
  } catch (const ParameterError& e) {
    throw IoError(std::string("json: invalid pwl payload: ") + e.what());
  }
}

Json to_json(const ProfileCode& code) {
  return Json{{"type", "profile"},
              {"cells", code.cells},
              {"digits", code.digits()}};
}

ProfileCode profile_from_json(const Json& j) {
  expect_type(j, "profile");
  const std::string digits = field(j, "digits").get<std::string>();
  ProfileCode code = [&] {
    try {
      return ProfileCode::from_digits(digits);
    } catch (const ParameterError& e) {
      throw IoError(std::string("json: invalid profile: ") + e.what());
    }
  }();
  if (field(j, "cells").get<int>() != code.cells) {
    throw IoError("json: profile cells does not match digits length");
  }
  return code;
}

Json to_json(const CacheAssignment& a) {
  Json codes = Json::array();
  for (int t = 0; t < a.intervals; ++t) {
    codes.push_back(a.profiles[a.profile_of_interval[t]].digits());
  }
  return Json{{"type", "assignment"},
              {"intervals", a.intervals},
              {"cells", a.cells},
              {"codes", std::move(codes)}};
}

CacheAssignment assignment_from_json(const Json& j) {
  expect_type(j, "assignment");
  CacheAssignment a;
  a.intervals = field(j, "intervals").get<int>();
  a.cells = field(j, "cells").get<int>();
  const Json& codes = field(j, "codes");
  if (!codes.is_array() ||
      static_cast<int>(codes.size()) != a.intervals) {
    throw IoError("json: assignment needs one code per interval");
  }
  std::map<std::string, int> seen;
  for (const auto& c : codes) {
    const std::string digits = c.get<std::string>();
    auto [it, inserted] =
        seen.emplace(digits, static_cast<int>(a.profiles.size()));
    if (inserted) {
      ProfileCode code = [&] {
        try {
          return ProfileCode::from_digits(digits);
        } catch (const ParameterError& e) {
          throw IoError(std::string("json: invalid code: ") + e.what());
        }
      }();
      if (code.cells != a.cells) {
        throw IoError("json: code length does not match cells");
      }
      a.profiles.push_back(std::move(code));
    }
    a.profile_of_interval.push_back(it->second);
  }
  return a;
}

Json to_json(const AdaptiveNet& net) {
  Json ramps = Json::array();
  for (double w : net.ramp_weights()) ramps.push_back(hex_double(w));
  Json coeffs = Json::array();
  for (const auto& rc : net.coeffs()) {
    Json row = Json::array();
    for (double c : rc.c) row.push_back(hex_double(c));
    coeffs.push_back(std::move(row));
  }
  Json groups = Json::array();
  for (const auto& g : net.groups()) {
    groups.push_back(Json{{"profile", g.profile},
                          {"residue", g.residue},
                          {"intervals", g.intervals}});
  }
  return Json{{"type", "adaptive"},
              {"intervals", net.intervals()},
              {"cells", net.cells()},
              {"intercept", hex_double(net.intercept())},
              {"ramp_weights", std::move(ramps)},
              {"assignment", to_json(net.assignment())},
              {"coeffs", std::move(coeffs)},
              {"groups", std::move(groups)}};
}

AdaptiveNet adaptive_from_json(const Json& j) {
  expect_type(j, "adaptive");
  const Json& ji = field(j, "intervals");
  const Json& jc = field(j, "cells");
  if (!ji.is_number_integer() || !jc.is_number_integer()) {
    throw IoError("json: adaptive intervals/cells must be integers");
  }
  std::vector<double> ramps;
  for (const auto& w : field(j, "ramp_weights")) {
    ramps.push_back(parse_double_exact(w, "ramp weight"));
  }
  AdaptiveNet net = [&] {
    try {
      return AdaptiveNet::from_parts(
          ji.get<int>(), jc.get<int>(),
          parse_double_exact(field(j, "intercept"), "intercept"),
          std::move(ramps), assignment_from_json(field(j, "assignment")));
    } catch (const ParameterError& e) {
      throw IoError(std::string("json: inconsistent adaptive payload: ") +
                    e.what());
    }
  }();

  // The coefficient vectors and groups are derived data; when present they
  // must match what the assignment implies, or the file is corrupt.
  if (auto it = j.find("coeffs"); it != j.end()) {
    const Json& stored = *it;
    if (!stored.is_array() || stored.size() != net.coeffs().size()) {
      throw IoError("json: adaptive coeffs do not match the assignment");
    }
    for (std::size_t p = 0; p < net.coeffs().size(); ++p) {
      const auto& derived = net.coeffs()[p].c;
      if (!stored[p].is_array() || stored[p].size() != derived.size()) {
        throw IoError("json: adaptive coeffs do not match the assignment");
      }
      for (std::size_t r = 0; r < derived.size(); ++r) {
        if (parse_double_exact(stored[p][r], "coefficient") != derived[r]) {
          throw IoError("json: adaptive coeffs do not match the assignment");
        }
      }
    }
  }
  if (auto it = j.find("groups"); it != j.end()) {
    const Json& stored = *it;
    if (!stored.is_array() || stored.size() != net.groups().size()) {
      throw IoError("json: adaptive groups do not match the assignment");
    }
    for (std::size_t g = 0; g < net.groups().size(); ++g) {
      const auto& derived = net.groups()[g];
      const Json& row = stored[g];
      if (!row.is_object() ||
          field(row, "profile") != Json(derived.profile) ||
          field(row, "residue") != Json(derived.residue) ||
          field(row, "intervals") != Json(derived.intervals)) {
        throw IoError("json: adaptive groups do not match the assignment");
      }
    }
  }
  return net;
}

Json to_json(const Network& net) {
  Json hidden = Json::array();
  for (const auto& layer : net.hidden) {
    Json row = Json::array();
    for (const auto& u : layer) row.push_back(unit_to_json(u));
    hidden.push_back(std::move(row));
  }
  return Json{{"type", "network"},
              {"input_width", net.input_width},
              {"linear_hidden_expected", net.linear_hidden_expected},
              {"hidden", std::move(hidden)},
              {"output", unit_to_json(net.output)}};
}

Network network_from_json(const Json& j) {
  expect_type(j, "network");
  Network net;
  net.input_width = field(j, "input_width").get<int>();
  net.linear_hidden_expected =
      field(j, "linear_hidden_expected").get<bool>();
  for (const auto& layer : field(j, "hidden")) {
    std::vector<Unit> row;
    for (const auto& u : layer) row.push_back(unit_from_json(u));
    net.hidden.push_back(std::move(row));
  }
  net.output = unit_from_json(field(j, "output"));
  return net;
}

Json to_json(const EmbedPlan& plan) {
  Json segments = Json::array();
  for (const auto& s : plan.segments) {
    const char* kind = s.kind == EmbedSegment::Kind::interpolant
                           ? "interpolant"
                           : s.kind == EmbedSegment::Kind::group_stage1
                                 ? "stage1"
                                 : "stage2";
    segments.push_back(Json{{"kind", kind},
                            {"group", s.group},
                            {"start", s.start_layer},
                            {"span", s.span}});
  }
  return Json{
      {"type", "plan"},
      {"mode", plan.mode == EmbedMode::exact_linear ? "exact" : "strict"},
      {"depth", plan.depth},
      {"segments", std::move(segments)}};
}

EmbedPlan plan_from_json(const Json& j) {
  expect_type(j, "plan");
  EmbedPlan plan;
  const std::string mode = field(j, "mode").get<std::string>();
  if (mode == "exact") {
    plan.mode = EmbedMode::exact_linear;
  } else if (mode == "strict") {
    plan.mode = EmbedMode::strict_relu;
  } else {
    throw IoError("json: unknown plan mode '" + mode + "'");
  }
  plan.depth = field(j, "depth").get<int>();
  for (const auto& s : field(j, "segments")) {
    EmbedSegment seg;
    const std::string kind = field(s, "kind").get<std::string>();
    if (kind == "interpolant") {
      seg.kind = EmbedSegment::Kind::interpolant;
    } else if (kind == "stage1") {
      seg.kind = EmbedSegment::Kind::group_stage1;
    } else if (kind == "stage2") {
      seg.kind = EmbedSegment::Kind::group_stage2;
    } else {
      throw IoError("json: unknown segment kind '" + kind + "'");
    }
    seg.group = field(s, "group").get<int>();
    seg.start_layer = field(s, "start").get<int>();
    seg.span = field(s, "span").get<int>();
    plan.segments.push_back(seg);
  }
  return plan;
}

void save_json(const Json& j, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << j.dump(2) << '\n';
  if (!out) throw IoError("failed writing '" + path + "'");
}

Json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw IoError("cannot parse '" + path + "': " + e.what());
  }
}

}  // namespace cachenet
