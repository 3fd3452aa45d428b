// Acceptance suite: one line per criterion, nonzero exit on any failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>

#include "fso/json_io.hpp"
#include "fso/mutualism.hpp"
#include "fso/sim.hpp"
#include "testutil.hpp"

using namespace fso;
using namespace testutil;

namespace {

struct Criterion {
  int number;
  const char* title;
  double budget_seconds;
  std::function<bool(std::string&)> run;
};

ScenarioConfig load_fixture(const std::string& name) {
  return scenario_from_json(load_json_file(std::string(FSO_FIXTURES) + "/" + name),
                            FSO_FIXTURES);
}

// Exhaustive double loop over the defining inequalities, independent of the
// library's search.
bool oracle_mp(const BehaviorSystem& d, const BehaviorSystem& r, const SocialAction& a,
               BehaviorId* fwd, BehaviorId* back) {
  for (const BehaviorId& b : d.behaviors) {
    if (!(d.evaluation.at(b) >= 0 && r.evaluation.at(a.mapping.at(b)) > 0)) continue;
    *fwd = b;
    for (const BehaviorId& c : r.behaviors) {
      BehaviorId pre;
      for (const auto& [x, y] : a.mapping)
        if (y == c) pre = x;
      if (r.evaluation.at(c) >= 0 && d.evaluation.at(pre) > 0) {
        *back = c;
        return true;
      }
    }
    return false;
  }
  return false;
}

bool criterion_mp_oracle(std::string& detail) {
  std::mt19937_64 g(20260810);
  for (int iter = 0; iter < 1000; ++iter) {
    int n = randint(g, 0, 5);
    BehaviorSystem d = random_system(g, "d", n);
    BehaviorSystem r = random_system(g, "r", n);
    SocialAction a = random_bijection(g, d, r);
    BehaviorId fwd, back;
    bool expect = oracle_mp(d, r, a, &fwd, &back);
    auto got = check_mp(d, r, a);
    if (got.has_value() != expect) {
      detail = "verdict mismatch at instance " + std::to_string(iter);
      return false;
    }
    if (got && (got->forward_behavior != fwd || got->backward_behavior != back)) {
      detail = "witness mismatch at instance " + std::to_string(iter);
      return false;
    }
  }
  detail = "1000 instances exact";
  return true;
}

bool criterion_chain_specialization(std::string& detail) {
  std::mt19937_64 g(555777);
  for (int iter = 0; iter < 200; ++iter) {
    int n = randint(g, 1, 5);
    BehaviorSystem d = random_system(g, "d", n);
    BehaviorSystem r = random_system(g, "r", n);
    SocialAction a = random_bijection(g, d, r);
    auto pair = check_mp(d, r, a);
    auto chain = check_chain_mp({d, r}, {a});
    bool same = pair.has_value() == chain.has_value() &&
                (!pair || (pair->forward_behavior == chain->forward_behavior &&
                           pair->backward_behavior == chain->backward_behavior));
    if (!same) {
      detail = "divergence at instance " + std::to_string(iter);
      return false;
    }
  }
  detail = "200 two-system chains exact";
  return true;
}

bool criterion_enrollment_oracle(std::string& detail) {
  std::mt19937_64 g(90210);
  const std::vector<std::string> role_pool{"alpha", "beta", "gamma"};
  const std::vector<std::string> cap_pool{"a", "b", "c"};
  for (int iter = 0; iter < 500; ++iter) {
    HierarchySpec spec;
    SocSpec ss;
    ss.id = "hub";
    ss.level = 1;
    ss.engine = "sce";
    int n_actors = randint(g, 1, 8);
    for (int i = 0; i < n_actors; ++i) ss.members.push_back("a" + std::to_string(i));
    spec.socs.push_back(ss);
    Runtime rt(build_fso(spec));
    for (int i = 0; i < n_actors; ++i) {
      std::set<std::string> caps;
      for (const auto& c : cap_pool)
        if (u01(g) < 0.5) caps.insert(c);
      rt.publish("hub", ad_of("a" + std::to_string(i),
                              role_pool[std::size_t(randint(g, 0, 2))], caps,
                              randint(g, 1, 2)));
    }
    int n_roles = randint(g, 1, 3);
    std::vector<RoleDescriptor> roles;
    for (int i = 0; i < n_roles; ++i) {
      std::set<std::string> caps;
      for (const auto& c : cap_pool)
        if (u01(g) < 0.35) caps.insert(c);
      roles.push_back(need(role_pool[std::size_t(randint(g, 0, 2))], caps));
    }
    ServiceRequest req = request_of("r", "a0", roles);
    rt.enable("hub", req);
    OraclePool pool = oracle_pool(rt, "hub", req);
    std::vector<int> bindable = oracle_prefix_greedy(pool.cands, pool.spare);
    LocalOutcome out = rt.local_enroll("hub", "r");
    bool expect_complete = int(bindable.size()) == n_roles;
    if (out.complete != expect_complete) {
      detail = "completeness mismatch at instance " + std::to_string(iter);
      return false;
    }
    if (!out.complete) {
      std::vector<std::string> expect_missing;
      for (int p = 0; p < n_roles; ++p)
        if (std::find(bindable.begin(), bindable.end(), p) == bindable.end())
          expect_missing.push_back(roles[std::size_t(p)].role_id);
      if (out.missing != expect_missing) {
        detail = "missing-set mismatch at instance " + std::to_string(iter);
        return false;
      }
    }
  }
  detail = "500 instances exact";
  return true;
}

bool criterion_escalation(std::string& detail) {
  std::mt19937_64 g(314159);
  const std::vector<std::string> role_pool{"alpha", "beta", "gamma"};
  const std::vector<std::string> cap_pool{"a", "b"};
  int resolved = 0, locals = 0;
  for (int iter = 0; iter < 200; ++iter) {
    Fso f = build_fso(random_hierarchy(g, 4, 30));
    Runtime rt(f);
    for (const auto& [sid, soc] : f.socs)
      for (const ActorId& a : plain_actors(f, sid))
        if (u01(g) < 0.6) {
          std::set<std::string> caps;
          for (const auto& c : cap_pool)
            if (u01(g) < 0.5) caps.insert(c);
          rt.publish(sid, ad_of(a, role_pool[std::size_t(randint(g, 0, 2))], caps,
                                randint(g, 1, 2)));
        }
    std::vector<SocId> origins;
    for (const auto& [sid, soc] : f.socs)
      if (!plain_actors(f, sid).empty()) origins.push_back(sid);
    for (int n = 0; n < 6; ++n) {
      SocId origin = origins[std::size_t(randint(g, 0, int(origins.size()) - 1))];
      std::vector<RoleDescriptor> roles;
      int n_roles = randint(g, 1, 3);
      for (int i = 0; i < n_roles; ++i) {
        std::set<std::string> caps;
        for (const auto& c : cap_pool)
          if (u01(g) < 0.3) caps.insert(c);
        roles.push_back(need(role_pool[std::size_t(randint(g, 0, 2))], caps));
      }
      RequestId id = "r" + std::to_string(iter) + "-" + std::to_string(n);
      ServiceRequest req = request_of(id, plain_actors(f, origin)[0], roles);
      rt.enable(origin, req);
      OraclePool local = oracle_pool(rt, origin, req, true);
      bool local_possible =
          int(oracle_prefix_greedy(local.cands, local.spare).size()) == n_roles;
      ResolveOutcome out = rt.global_enroll(id);
      int exc = rt.exception_count(id);
      if (!out.active) {
        if (local_possible) {
          detail = "missed a feasible local enrollment";
          return false;
        }
        continue;
      }
      resolved++;
      const Son& son = rt.sons().at(*out.son_id);
      if (exc != depth_of(f, origin) - depth_of(f, son.apex)) {
        detail = "exception count != depth(origin) - depth(apex)";
        return false;
      }
      for (const auto& [pos, actor] : son.bindings)
        if (!in_subtree(f, f.actor_home.at(actor), son.apex)) {
          detail = "binding outside the apex subtree";
          return false;
        }
      if (local_possible) {
        locals++;
        if (son.member_socs != std::set<SocId>{origin} || exc != 0) {
          detail = "local preference violated at " + id;
          return false;
        }
      }
    }
  }
  std::ostringstream s;
  s << resolved << " resolved requests, " << locals << " local-preference cases, exact";
  detail = s.str();
  return true;
}

struct SweepTraces {
  std::vector<SweepRow> rows;
  std::vector<std::vector<TraceRecord>> traces;
};

SweepTraces paired_runs(const char* fixture_name, int n_seeds) {
  SweepTraces out;
  ScenarioConfig base = load_fixture(fixture_name);
  for (int i = 0; i < n_seeds; ++i) {
    ScenarioConfig cfg = base;
    cfg.seed = base.seed + std::uint64_t(i);
    SweepRow row;
    row.seed = cfg.seed;
    cfg.cooperation = true;
    RunResult with = run_scenario(cfg);
    cfg.cooperation = false;
    RunResult without = run_scenario(cfg);
    row.with_cooperation = with.metrics;
    row.without_cooperation = without.metrics;
    out.rows.push_back(row);
    out.traces.push_back(std::move(with.trace));
    out.traces.push_back(std::move(without.trace));
  }
  return out;
}

SweepTraces g_fire, g_health;  // shared across criteria 5, 7, 8, 10

bool criterion_capacity_conservation(std::string& detail) {
  std::size_t audited = 0;
  for (const auto* sweep : {&g_fire, &g_health})
    for (const auto& trace : sweep->traces) {
      std::string err;
      if (!audit_capacity(trace, &err)) {
        detail = err;
        return false;
      }
      audited++;
    }
  RunResult falls = run_scenario(load_fixture("falls_default.json"));
  std::string err;
  if (!audit_capacity(falls.trace, &err)) {
    detail = err;
    return false;
  }
  audited++;
  detail = std::to_string(audited) + " traces audited, ledgers restored";
  return true;
}

bool criterion_determinism(std::string& detail) {
  for (const char* fixture :
       {"fire_default.json", "healthcare_default.json", "falls_default.json",
        "falls_filtering.json"}) {
    ScenarioConfig cfg = load_fixture(fixture);
    std::uint64_t h1 = fnv1a64(trace_to_jsonl(run_scenario(cfg).trace));
    std::uint64_t h2 = fnv1a64(trace_to_jsonl(run_scenario(cfg).trace));
    if (h1 != h2) {
      detail = std::string(fixture) + " traces diverge";
      return false;
    }
  }
  detail = "4 fixtures, equal hashes";
  return true;
}

bool criterion_fire_directional(std::string& detail) {
  g_fire = paired_runs("fire_default.json", 20);
  double mean_with = 0, mean_without = 0;
  int le_pairs = 0;
  for (const auto& row : g_fire.rows) {
    mean_with += double(row.with_cooperation.houses_burned_down);
    mean_without += double(row.without_cooperation.houses_burned_down);
    if (row.with_cooperation.houses_burned_down <= row.without_cooperation.houses_burned_down)
      le_pairs++;
  }
  mean_with /= 20.0;
  mean_without /= 20.0;
  std::ostringstream s;
  s << "mean burned " << mean_with << " vs " << mean_without << ", " << le_pairs
    << "/20 pairs <=";
  detail = s.str();
  return mean_with < mean_without && le_pairs >= 16;
}

bool criterion_healthcare_directional(std::string& detail) {
  g_health = paired_runs("healthcare_default.json", 20);
  double wait_with = 0, wait_without = 0;
  std::uint64_t treated_with = 0, treated_without = 0;
  bool per_seed_ok = true;
  for (const auto& row : g_health.rows) {
    wait_with += row.with_cooperation.mean_wait_ticks;
    wait_without += row.without_cooperation.mean_wait_ticks;
    treated_with += row.with_cooperation.treated;
    treated_without += row.without_cooperation.treated;
    if (row.with_cooperation.treated < row.without_cooperation.treated) per_seed_ok = false;
  }
  wait_with /= 20.0;
  wait_without /= 20.0;
  std::ostringstream s;
  s << "mean wait " << wait_with << " vs " << wait_without << "; treated " << treated_with
    << " vs " << treated_without;
  detail = s.str();
  return wait_with < wait_without && per_seed_ok && treated_with > treated_without;
}

bool criterion_falls_filtering(std::string& detail) {
  RunResult out = run_scenario(load_fixture("falls_filtering.json"));
  const double n = 1000.0, p = 0.7;
  const double margin = 2.5758 * std::sqrt(n * p * (1.0 - p));  // 99% binomial CI
  double dispatched = double(out.metrics.dispatches);
  std::ostringstream s;
  s << out.metrics.alarms << " alarms, " << out.metrics.dispatches << " dispatches, CI 700+-"
    << margin;
  detail = s.str();
  if (out.metrics.alarms != 1000) return false;
  return std::abs(dispatched - n * p) <= margin;
}

bool criterion_translucence(std::string& detail) {
  std::size_t sons = 0;
  for (const auto* sweep : {&g_fire, &g_health})
    for (const auto& trace : sweep->traces) {
      std::string err;
      if (!audit_notify_before_bind(trace, &err)) {
        detail = err;
        return false;
      }
      for (const TraceRecord& t : trace)
        if (t.kind == "son-formed") sons++;
    }
  detail = std::to_string(sons) + " SONs, every binding notified first";
  return true;
}

}  // namespace

int main() {
  const Criterion criteria[] = {
      {1, "mutualistic precondition equals the exhaustive oracle", 5.0, criterion_mp_oracle},
      {2, "two-system chains specialize to the pairwise check", 2.0,
       criterion_chain_specialization},
      {3, "local enrollment equals the brute-force assignment search", 10.0,
       criterion_enrollment_oracle},
      {4, "escalation invariants and local preference", 30.0, criterion_escalation},
      {7, "cooperation reduces burned houses", 60.0, criterion_fire_directional},
      {8, "cooperation shortens waits and treats more patients", 60.0,
       criterion_healthcare_directional},
      {5, "capacity ledgers conserve across all runs", 60.0, criterion_capacity_conservation},
      {6, "equal seeds give byte-identical traces", 60.0, criterion_determinism},
      {9, "volunteer verification filters false alarms", 30.0, criterion_falls_filtering},
      {10, "every bound actor was notified before binding", 60.0, criterion_translucence},
  };

  int failures = 0;
  for (const Criterion& c : criteria) {
    auto start = std::chrono::steady_clock::now();
    std::string detail;
    bool ok = false;
    try {
      ok = c.run(detail);
    } catch (const std::exception& e) {
      detail = std::string("exception: ") + e.what();
    }
    double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (elapsed > c.budget_seconds) {
      ok = false;
      detail += " [over budget]";
    }
    std::printf("[%s] criterion %2d: %s (%.2fs, budget %.0fs) — %s\n", ok ? "PASS" : "FAIL",
                c.number, c.title, elapsed, c.budget_seconds, detail.c_str());
    if (!ok) failures++;
  }
  return failures;
}
