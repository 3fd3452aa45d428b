#pragma once

#include <map>
#include <optional>
#include <set>
#include <vector>

#include "fso/core.hpp"

namespace fso {

/// One service-oriented community: a coordination locus with an engine actor,
/// direct level-0 members, and child communities of strictly lower level.
struct Soc {
  SocId id;
  int level = 1;
  ActorId engine;
  std::vector<ActorId> actors;     ///< direct members, engine included
  std::vector<SocId> children;     ///< child communities
  std::vector<ActorId> delegates;  ///< engines of child communities
  std::optional<SocId> parent;
};

/// Declarative description of one community, as read from a hierarchy file.
/// Member ids that name another SocSpec are child communities; all other
/// member ids are individual actors.
struct SocSpec {
  SocId id;
  int level = 0;
  ActorId engine;
  std::vector<std::string> members;
};

struct HierarchySpec {
  std::vector<SocSpec> socs;
};

/// The validated nested hierarchy. Immutable once built; engines appear both
/// in their own community and as delegates of the parent community.
struct Fso {
  std::map<SocId, Soc> socs;
  SocId root;
  int root_level = 0;
  std::map<ActorId, SocId> actor_home;  ///< every actor -> home community
  std::map<ActorId, SocId> engine_of;   ///< engine actor -> managed community

  const Soc& soc(const SocId& id) const;
  bool has_soc(const SocId& id) const { return socs.count(id) > 0; }
  bool is_engine(const ActorId& a) const { return engine_of.count(a) > 0; }

  /// Direct member or delegated child engine.
  bool is_member(const SocId& s, const ActorId& a) const;

  std::size_t actor_count() const { return actor_home.size(); }
};

/// Validates the spec and materializes parent links and double membership.
Fso build_fso(const HierarchySpec& spec);

std::optional<SocId> parent_of(const Fso& f, const SocId& s);
std::set<SocId> level_set(const Fso& f, int level);

/// The chain s, parent(s), ..., root.
std::vector<SocId> escalation_path(const Fso& f, const SocId& s);

int depth_of(const Fso& f, const SocId& s);  ///< root has depth 0
int tree_distance(const Fso& f, const SocId& a, const SocId& b);
bool in_subtree(const Fso& f, const SocId& node, const SocId& ancestor);

}  // namespace fso
