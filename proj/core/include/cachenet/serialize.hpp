// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <nlohmann/json.hpp>
#include <string>

#include "cachenet/adaptive_net.hpp"
#include "cachenet/cache.hpp"
#include "cachenet/embed.hpp"
#include "cachenet/pwl.hpp"
#include "cachenet/relu_net.hpp"

namespace cachenet {

// All payloads round-trip exactly: doubles are written as C99 hex floats,
// node abscissae as [num, den] pairs.
using Json = nlohmann::ordered_json;

Json to_json(const PwlFunction& f);
PwlFunction pwl_from_json(const Json& j);

Json to_json(const ProfileCode& code);
ProfileCode profile_from_json(const Json& j);

Json to_json(const CacheAssignment& a);
CacheAssignment assignment_from_json(const Json& j);

Json to_json(const AdaptiveNet& net);
// Rebuilds the net from its serialized parts; the stored coefficient
// vectors and groups are cross-checked against the re-derived ones.
AdaptiveNet adaptive_from_json(const Json& j);

Json to_json(const Network& net);
Network network_from_json(const Json& j);

Json to_json(const EmbedPlan& plan);
EmbedPlan plan_from_json(const Json& j);

void save_json(const Json& j, const std::string& path);  // throws IoError
Json load_json(const std::string& path);

}  // namespace cachenet
