#include "fso/json_io.hpp"

#include <fstream>
#include <sstream>

namespace fso {

Json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(Errc::parse, path, "cannot read '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_json(buf.str(), path);
}

Json parse_json(const std::string& text, const std::string& what) {
  Json j = Json::parse(text, nullptr, false);
  if (j.is_discarded()) fail(Errc::parse, what, "invalid JSON in " + what);
  return j;
}

namespace {

std::string require_string(const Json& j, const char* key, const std::string& where) {
  if (!j.contains(key) || !j[key].is_string())
    fail(Errc::parse, where, where + ": missing string field '" + key + "'");
  return j[key].get<std::string>();
}

}  // namespace

HierarchySpec hierarchy_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("socs") || !j["socs"].is_array())
    fail(Errc::parse, "hierarchy", "hierarchy needs a 'socs' array");
  HierarchySpec spec;
  for (const Json& js : j["socs"]) {
    SocSpec s;
    s.id = require_string(js, "id", "soc");
    if (!js.contains("level") || !js["level"].is_number_integer())
      fail(Errc::parse, s.id, "soc '" + s.id + "': missing integer 'level'");
    s.level = js["level"].get<int>();
    s.engine = require_string(js, "engine", "soc '" + s.id + "'");
    if (js.contains("members")) {
      if (!js["members"].is_array())
        fail(Errc::parse, s.id, "soc '" + s.id + "': 'members' must be an array");
      for (const Json& m : js["members"]) {
        if (!m.is_string()) fail(Errc::parse, s.id, "soc '" + s.id + "': member ids are strings");
        s.members.push_back(m.get<std::string>());
      }
    }
    spec.socs.push_back(std::move(s));
  }
  return spec;
}

BehaviorModel behavior_model_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("systems") || !j["systems"].is_array())
    fail(Errc::parse, "model", "behavior model needs a 'systems' array");
  BehaviorModel m;
  for (const Json& js : j["systems"]) {
    BehaviorSystem s;
    s.id = require_string(js, "id", "system");
    if (js.contains("behaviors"))
      for (const Json& b : js["behaviors"]) s.behaviors.insert(b.get<std::string>());
    if (js.contains("eval"))
      for (auto it = js["eval"].begin(); it != js["eval"].end(); ++it) {
        if (!it.value().is_number_integer())
          fail(Errc::parse, s.id, "evaluation of '" + it.key() + "' must be -1, 0, or 1");
        s.evaluation[it.key()] = it.value().get<int>();
      }
    for (const BehaviorId& b : s.behaviors)
      if (!s.evaluation.count(b))
        fail(Errc::parse, s.id, "system '" + s.id + "' does not evaluate '" + b + "'");
    m.systems.push_back(std::move(s));
  }
  if (j.contains("actions"))
    for (const Json& ja : j["actions"]) {
      SocialAction a;
      a.domain = require_string(ja, "domain", "action");
      a.range = require_string(ja, "range", "action");
      if (ja.contains("map"))
        for (auto it = ja["map"].begin(); it != ja["map"].end(); ++it)
          a.mapping[it.key()] = it.value().get<std::string>();
      m.actions.push_back(std::move(a));
    }
  return m;
}

Json to_json(const TraceRecord& r) {
  Json j;
  j["seq"] = r.seq;
  j["soc"] = r.soc;
  j["kind"] = r.kind;
  if (r.request_id) j["request_id"] = *r.request_id;
  if (r.actor) j["actor"] = *r.actor;
  if (r.role) j["role"] = *r.role;
  if (!r.roles.empty()) j["roles"] = r.roles;
  if (r.detail) j["detail"] = *r.detail;
  if (r.capacity) j["capacity"] = *r.capacity;
  return j;
}

std::string trace_to_jsonl(const std::vector<TraceRecord>& trace) {
  std::string out;
  for (const TraceRecord& r : trace) {
    out += to_json(r).dump();
    out += '\n';
  }
  return out;
}

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace fso
