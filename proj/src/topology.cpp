#include "fso/topology.hpp"

#include <algorithm>

namespace fso {

const char* errc_name(Errc c) {
  switch (c) {
    case Errc::parse: return "parse";
    case Errc::cycle: return "cycle";
    case Errc::level_rule: return "level rule violated";
    case Errc::missing_engine: return "missing engine";
    case Errc::duplicate_actor: return "duplicate actor";
    case Errc::duplicate_membership: return "duplicate membership";
    case Errc::multiple_roots: return "multiple roots";
    case Errc::unknown_id: return "unknown id";
    case Errc::not_member: return "not a member";
    case Errc::duplicate_request: return "duplicate request";
    case Errc::precondition: return "precondition";
    case Errc::mismatch: return "mismatch";
  }
  return "unknown";
}

const Soc& Fso::soc(const SocId& id) const {
  auto it = socs.find(id);
  if (it == socs.end()) fail(Errc::unknown_id, id, "unknown SoC '" + id + "'");
  return it->second;
}

bool Fso::is_member(const SocId& s, const ActorId& a) const {
  const Soc& c = soc(s);
  if (std::find(c.actors.begin(), c.actors.end(), a) != c.actors.end()) return true;
  return std::find(c.delegates.begin(), c.delegates.end(), a) != c.delegates.end();
}

Fso build_fso(const HierarchySpec& spec) {
  if (spec.socs.empty()) fail(Errc::parse, "", "hierarchy lists no SoCs");

  Fso f;
  for (const SocSpec& ss : spec.socs) {
    if (ss.id.empty()) fail(Errc::parse, ss.id, "SoC with empty id");
    if (f.socs.count(ss.id))
      fail(Errc::duplicate_membership, ss.id, "SoC '" + ss.id + "' declared twice");
    Soc s;
    s.id = ss.id;
    s.level = ss.level;
    s.engine = ss.engine;
    f.socs.emplace(ss.id, std::move(s));
  }

  // Engines and levels first, so later diagnostics can trust them.
  for (const SocSpec& ss : spec.socs) {
    if (ss.engine.empty())
      fail(Errc::missing_engine, ss.id, "SoC '" + ss.id + "' has no engine");
    if (ss.level < 1)
      fail(Errc::level_rule, ss.id,
           "SoC '" + ss.id + "' has level " + std::to_string(ss.level) +
               "; level 0 denotes an individual, not a community");
  }

  // Resolve members: soc ids become children, everything else is an actor.
  for (const SocSpec& ss : spec.socs) {
    Soc& s = f.socs.at(ss.id);
    for (const std::string& m : ss.members) {
      if (m.empty()) fail(Errc::parse, ss.id, "empty member id in SoC '" + ss.id + "'");
      if (f.socs.count(m)) {
        Soc& child = f.socs.at(m);
        if (child.parent)
          fail(Errc::duplicate_membership, m,
               "SoC '" + m + "' is a member of both '" + *child.parent + "' and '" + ss.id + "'");
        child.parent = ss.id;
        s.children.push_back(m);
      } else {
        if (f.actor_home.count(m))
          fail(Errc::duplicate_actor, m,
               "actor '" + m + "' is a member of both '" + f.actor_home.at(m) + "' and '" + ss.id + "'");
        f.actor_home.emplace(m, ss.id);
        s.actors.push_back(m);
      }
    }
  }

  // Engines are actors too: home is their own community.
  for (const SocSpec& ss : spec.socs) {
    if (f.actor_home.count(ss.engine))
      fail(Errc::duplicate_actor, ss.engine,
           "engine '" + ss.engine + "' of '" + ss.id + "' is also listed as a member of '" +
               f.actor_home.at(ss.engine) + "'");
    if (f.engine_of.count(ss.engine))
      fail(Errc::duplicate_actor, ss.engine,
           "actor '" + ss.engine + "' is the engine of two SoCs");
    f.actor_home.emplace(ss.engine, ss.id);
    f.engine_of.emplace(ss.engine, ss.id);
    f.socs.at(ss.id).actors.push_back(ss.engine);
  }

  // Exactly one root.
  std::vector<SocId> roots;
  for (auto& [id, s] : f.socs)
    if (!s.parent) roots.push_back(id);
  if (roots.empty())
    fail(Errc::cycle, spec.socs.front().id,
         "cycle detected at SoC '" + spec.socs.front().id + "': every SoC has a parent");
  if (roots.size() > 1)
    fail(Errc::multiple_roots, roots[1],
         "multiple roots: '" + roots[0] + "' and '" + roots[1] + "'");
  f.root = roots[0];

  // Reachability from the root; anything unreached sits on a cycle.
  std::set<SocId> seen;
  std::vector<SocId> stack{f.root};
  while (!stack.empty()) {
    SocId cur = stack.back();
    stack.pop_back();
    if (!seen.insert(cur).second)
      fail(Errc::cycle, cur, "cycle detected at SoC '" + cur + "'");
    for (const SocId& c : f.socs.at(cur).children) stack.push_back(c);
  }
  for (auto& [id, s] : f.socs)
    if (!seen.count(id)) fail(Errc::cycle, id, "cycle detected at SoC '" + id + "'");

  // Containment: every child community sits strictly below its parent.
  for (auto& [id, s] : f.socs) {
    for (const SocId& c : s.children) {
      const Soc& child = f.socs.at(c);
      if (child.level >= s.level)
        fail(Errc::level_rule, c,
             "SoC '" + c + "' (level " + std::to_string(child.level) +
                 ") cannot be a member of '" + id + "' (level " + std::to_string(s.level) + ")");
    }
  }

  // Double membership: each non-root engine is also a member of the parent.
  for (auto& [id, s] : f.socs) {
    if (!s.parent) continue;
    f.socs.at(*s.parent).delegates.push_back(s.engine);
  }
  for (auto& [id, s] : f.socs) {
    std::sort(s.children.begin(), s.children.end());
    std::sort(s.delegates.begin(), s.delegates.end());
  }

  f.root_level = f.socs.at(f.root).level;
  return f;
}

std::optional<SocId> parent_of(const Fso& f, const SocId& s) { return f.soc(s).parent; }

std::set<SocId> level_set(const Fso& f, int level) {
  std::set<SocId> out;
  for (auto& [id, s] : f.socs)
    if (s.level == level) out.insert(id);
  return out;
}

std::vector<SocId> escalation_path(const Fso& f, const SocId& s) {
  std::vector<SocId> path;
  SocId cur = f.soc(s).id;
  path.push_back(cur);
  while (auto p = f.soc(cur).parent) {
    cur = *p;
    path.push_back(cur);
  }
  return path;
}

int depth_of(const Fso& f, const SocId& s) {
  return static_cast<int>(escalation_path(f, s).size()) - 1;
}

int tree_distance(const Fso& f, const SocId& a, const SocId& b) {
  std::vector<SocId> pa = escalation_path(f, a);
  std::vector<SocId> pb = escalation_path(f, b);
  std::map<SocId, int> da;
  for (std::size_t i = 0; i < pa.size(); ++i) da[pa[i]] = static_cast<int>(i);
  for (std::size_t j = 0; j < pb.size(); ++j) {
    auto it = da.find(pb[j]);
    if (it != da.end()) return it->second + static_cast<int>(j);
  }
  fail(Errc::cycle, a, "no common ancestor");  // unreachable on a valid tree
}

bool in_subtree(const Fso& f, const SocId& node, const SocId& ancestor) {
  SocId cur = f.soc(node).id;
  f.soc(ancestor);
  while (true) {
    if (cur == ancestor) return true;
    auto p = f.soc(cur).parent;
    if (!p) return false;
    cur = *p;
  }
}

}  // namespace fso
