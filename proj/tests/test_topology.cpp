#include <doctest.h>

#include <algorithm>

#include "testutil.hpp"

using namespace fso;
using namespace testutil;

TEST_CASE("three-layer hierarchy builds with root level 3") {
  Fso f = build_fso(fig2_spec());
  CHECK(f.root == "building");
  CHECK(f.root_level == 3);
  CHECK(f.socs.size() == 7);
  CHECK(f.actor_home.at("bob") == "room11");
  CHECK(f.actor_home.at("janitor") == "building");
}

TEST_CASE("minimal single SoC") {
  HierarchySpec s;
  s.socs.push_back({"home", 1, "sce", {"ann"}});
  Fso f = build_fso(s);
  CHECK(f.root == "home");
  CHECK(f.root_level == 1);
  CHECK(f.actor_home.at("sce") == "home");
}

TEST_CASE("double membership is materialized") {
  Fso f = build_fso(fig2_spec());
  for (const auto& [id, s] : f.socs) {
    // engine is a member of its own community
    CHECK(std::count(s.actors.begin(), s.actors.end(), s.engine) == 1);
    if (!s.parent) continue;
    const Soc& up = f.soc(*s.parent);
    CHECK(std::count(up.delegates.begin(), up.delegates.end(), s.engine) == 1);
    CHECK(f.is_member(*s.parent, s.engine));
  }
}

TEST_CASE("parent lookups") {
  Fso f = build_fso(fig2_spec());
  CHECK(!parent_of(f, "building").has_value());
  CHECK(parent_of(f, "house1") == SocId("building"));
  CHECK(parent_of(f, "room21") == SocId("house2"));
  CHECK_THROWS_AS((void)parent_of(f, "nowhere"), FsoError);
}

TEST_CASE("level sets") {
  Fso f = build_fso(fig2_spec());
  CHECK(level_set(f, 2) == std::set<SocId>{"house1", "house2"});
  CHECK(level_set(f, 3) == std::set<SocId>{"building"});
  CHECK(level_set(f, 9).empty());
}

TEST_CASE("level sets partition the SoCs of random organizations") {
  std::mt19937_64 g(7101);
  for (int iter = 0; iter < 50; ++iter) {
    Fso f = build_fso(random_hierarchy(g));
    std::set<SocId> all;
    std::size_t total = 0;
    for (int k = 0; k <= f.root_level; ++k) {
      std::set<SocId> ls = level_set(f, k);
      total += ls.size();
      all.insert(ls.begin(), ls.end());
    }
    CHECK(all.size() == f.socs.size());  // disjoint union covers everything
    CHECK(total == f.socs.size());
  }
}

TEST_CASE("escalation paths") {
  Fso f = build_fso(fig2_spec());
  CHECK(escalation_path(f, "building") == std::vector<SocId>{"building"});
  CHECK(escalation_path(f, "room11") == std::vector<SocId>{"room11", "house1", "building"});
}

TEST_CASE("escalation path length equals depth plus one on random trees") {
  std::mt19937_64 g(4242);
  for (int iter = 0; iter < 30; ++iter) {
    Fso f = build_fso(random_hierarchy(g));
    // independent depth computation by walking down from the root
    std::map<SocId, int> depth{{f.root, 0}};
    std::vector<SocId> stack{f.root};
    while (!stack.empty()) {
      SocId cur = stack.back();
      stack.pop_back();
      for (const SocId& c : f.soc(cur).children) {
        depth[c] = depth[cur] + 1;
        stack.push_back(c);
      }
    }
    for (const auto& [id, s] : f.socs) {
      auto path = escalation_path(f, id);
      CHECK(int(path.size()) == depth.at(id) + 1);
      CHECK(path.front() == id);
      CHECK(path.back() == f.root);
      for (std::size_t i = 0; i + 1 < path.size(); ++i)
        CHECK(parent_of(f, path[i]) == path[i + 1]);
    }
  }
}

TEST_CASE("containment keeps levels strictly decreasing") {
  std::mt19937_64 g(99);
  for (int iter = 0; iter < 30; ++iter) {
    Fso f = build_fso(random_hierarchy(g));
    for (const auto& [id, s] : f.socs)
      if (s.parent) CHECK(f.soc(*s.parent).level > s.level);
  }
}

TEST_CASE("tree distance") {
  Fso f = build_fso(fig2_spec());
  CHECK(tree_distance(f, "room11", "room11") == 0);
  CHECK(tree_distance(f, "room11", "house1") == 1);
  CHECK(tree_distance(f, "room11", "room12") == 2);
  CHECK(tree_distance(f, "room11", "room21") == 4);
  CHECK(in_subtree(f, "room11", "building"));
  CHECK(!in_subtree(f, "room11", "house2"));
}

namespace {

Errc build_error(HierarchySpec s) {
  try {
    build_fso(s);
  } catch (const FsoError& e) {
    return e.code();
  }
  return Errc::mismatch;  // sentinel: build unexpectedly succeeded
}

}  // namespace

TEST_CASE("rejects level rule violations") {
  HierarchySpec s = fig2_spec();
  s.socs[1].level = 5;  // house above its building
  CHECK(build_error(s) == Errc::level_rule);

  HierarchySpec z = fig2_spec();
  z.socs[3].level = 0;  // a community may not sit at the individual level
  CHECK(build_error(z) == Errc::level_rule);
}

TEST_CASE("rejects a missing engine") {
  HierarchySpec s = fig2_spec();
  s.socs[2].engine = "";
  CHECK(build_error(s) == Errc::missing_engine);
}

TEST_CASE("rejects duplicate actors") {
  HierarchySpec s = fig2_spec();
  s.socs[4].members.push_back("bob");  // already lives in room11
  CHECK(build_error(s) == Errc::duplicate_actor);

  HierarchySpec t = fig2_spec();
  t.socs[5].members.push_back("sce-room11");  // engines may not be re-listed
  CHECK(build_error(t) == Errc::duplicate_actor);
}

TEST_CASE("rejects multiple roots") {
  HierarchySpec s = fig2_spec();
  SocSpec lone;
  lone.id = "annex";
  lone.level = 2;
  lone.engine = "sce-annex";
  s.socs.push_back(lone);
  CHECK(build_error(s) == Errc::multiple_roots);
}

TEST_CASE("rejects cycles") {
  HierarchySpec s;
  s.socs.push_back({"a", 2, "ea", {"b"}});
  s.socs.push_back({"b", 1, "eb", {"a"}});
  CHECK(build_error(s) == Errc::cycle);
}

TEST_CASE("rejects a SoC claimed by two parents") {
  HierarchySpec s = fig2_spec();
  s.socs[2].members.push_back("room11");  // house2 also claims room11
  CHECK(build_error(s) == Errc::duplicate_membership);
}

TEST_CASE("rejects empty specs") {
  CHECK(build_error(HierarchySpec{}) == Errc::parse);
}

TEST_CASE("single-field mutations of a valid spec are each rejected") {
  struct Mutation {
    Errc expected;
    void (*apply)(HierarchySpec&);
  };
  const Mutation mutations[] = {
      {Errc::level_rule, [](HierarchySpec& s) { s.socs[0].level = 1; }},
      {Errc::missing_engine, [](HierarchySpec& s) { s.socs[0].engine.clear(); }},
      {Errc::duplicate_actor, [](HierarchySpec& s) { s.socs[6].members.push_back("alice"); }},
      {Errc::duplicate_membership,
       [](HierarchySpec& s) { s.socs[1].members.push_back("room22"); }},
      {Errc::multiple_roots,
       [](HierarchySpec& s) { s.socs.push_back({"spare", 1, "sce-spare", {}}); }},
      {Errc::cycle, [](HierarchySpec& s) { s.socs[3].members.push_back("building"); }},
  };
  for (const Mutation& m : mutations) {
    HierarchySpec s = fig2_spec();
    m.apply(s);
    CHECK(build_error(s) == m.expected);
  }
}
