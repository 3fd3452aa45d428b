#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "fso/mutualism.hpp"
#include "fso/runtime.hpp"
#include "fso/topology.hpp"

namespace fso {

using Json = nlohmann::json;

/// Reads a whole file; parse errors and unreadable paths raise Errc::parse.
Json load_json_file(const std::string& path);
Json parse_json(const std::string& text, const std::string& what);

/// {"socs": [{"id", "level", "engine", "members": [...]}]}
HierarchySpec hierarchy_from_json(const Json& j);

/// {"systems": [{"id", "behaviors", "eval"}], "actions": [{"domain",
/// "range", "map"}]}
struct BehaviorModel {
  std::vector<BehaviorSystem> systems;
  std::vector<SocialAction> actions;
};
BehaviorModel behavior_model_from_json(const Json& j);

Json to_json(const TraceRecord& r);
std::string trace_to_jsonl(const std::vector<TraceRecord>& trace);

std::uint64_t fnv1a64(const std::string& bytes);

}  // namespace fso
