#include "fso/runtime.hpp"

#include <algorithm>
#include <cstdio>

namespace fso {

namespace {

// Role positions are assigned to advertisement slots (one slot per spare
// capacity unit) with an augmenting-path search; advertisements may serve
// several positions up to their spare capacity.
struct Assigner {
  struct AdInfo {
    const Advertisement* ad;
    int spare;  // capacity minus ledger holds
  };
  std::vector<AdInfo> ads;                    // unique ads in the pool
  std::map<const Advertisement*, int> index;  // ad -> ads index
  std::map<int, std::vector<int>> cand;       // position -> ad indices, ranked

  int ad_index(const Advertisement* ad, const CapacityLedger& ledger) {
    auto it = index.find(ad);
    if (it != index.end()) return it->second;
    int spare = ad->policy.capacity - ledger.held(ad->actor, ad->offered.role_id);
    int id = static_cast<int>(ads.size());
    ads.push_back({ad, spare});
    index.emplace(ad, id);
    return id;
  }

  // Maximum number of `positions` simultaneously assignable, honoring the
  // extra usage already fixed by a partial selection.
  bool assignable(const std::vector<int>& positions,
                  const std::map<int, int>& fixed_usage) const {
    std::vector<int> slot_ad;  // slot -> ad index
    std::vector<int> slot_of_ad_start(ads.size(), 0);
    for (std::size_t a = 0; a < ads.size(); ++a) {
      int spare = ads[a].spare;
      auto f = fixed_usage.find(static_cast<int>(a));
      if (f != fixed_usage.end()) spare -= f->second;
      slot_of_ad_start[a] = static_cast<int>(slot_ad.size());
      for (int k = 0; k < spare; ++k) slot_ad.push_back(static_cast<int>(a));
    }
    std::vector<int> match_slot(slot_ad.size(), -1);  // slot -> position
    std::map<int, int> match_pos;                     // position -> slot

    std::function<bool(int, std::vector<char>&)> augment =
        [&](int pos, std::vector<char>& seen) -> bool {
      auto it = cand.find(pos);
      if (it == cand.end()) return false;
      for (int a : it->second) {
        int spare = ads[a].spare;
        auto f = fixed_usage.find(a);
        if (f != fixed_usage.end()) spare -= f->second;
        for (int k = 0; k < spare; ++k) {
          int slot = slot_of_ad_start[a] + k;
          if (seen[slot]) continue;
          seen[slot] = 1;
          if (match_slot[slot] == -1 || augment(match_slot[slot], seen)) {
            match_slot[slot] = pos;
            match_pos[pos] = slot;
            return true;
          }
        }
      }
      return false;
    };

    for (int pos : positions) {
      std::vector<char> seen(slot_ad.size(), 0);
      if (!augment(pos, seen)) return false;
    }
    return true;
  }
};

}  // namespace

Runtime::Runtime(Fso fso) : Runtime(std::move(fso), Options()) {}

Runtime::Runtime(Fso fso, Options opt) : fso_(std::move(fso)), opt_(std::move(opt)) {
  for (const auto& [id, s] : fso_.socs) registries_.emplace(id, Registry{});
}

std::vector<int> Runtime::Record::unbound() const {
  std::vector<int> out;
  for (int p = 0; p < static_cast<int>(req.required_roles.size()); ++p)
    if (!bound.count(p)) out.push_back(p);
  return out;
}

Runtime::Record& Runtime::rec(const RequestId& id) {
  auto it = records_.find(id);
  if (it == records_.end()) fail(Errc::unknown_id, id, "unknown request '" + id + "'");
  return it->second;
}

const Runtime::Record& Runtime::rec(const RequestId& id) const {
  auto it = records_.find(id);
  if (it == records_.end()) fail(Errc::unknown_id, id, "unknown request '" + id + "'");
  return it->second;
}

Registry& Runtime::reg(const SocId& soc) {
  auto it = registries_.find(soc);
  if (it == registries_.end()) fail(Errc::unknown_id, soc, "unknown SoC '" + soc + "'");
  return it->second;
}

const Registry& Runtime::registry(const SocId& soc) const {
  auto it = registries_.find(soc);
  if (it == registries_.end()) fail(Errc::unknown_id, soc, "unknown SoC '" + soc + "'");
  return it->second;
}

TraceRecord& Runtime::emit(const SocId& soc, const std::string& kind) {
  TraceRecord r;
  r.seq = seq_++;
  r.soc = soc;
  r.kind = kind;
  trace_.push_back(std::move(r));
  return trace_.back();
}

TraceRecord& Runtime::note(const SocId& soc, const std::string& kind) {
  fso_.soc(soc);
  return emit(soc, kind);
}

std::vector<TraceRecord> Runtime::slice_from(std::size_t mark) const {
  return {trace_.begin() + static_cast<std::ptrdiff_t>(mark), trace_.end()};
}

RequestId Runtime::fresh_request_id() {
  char buf[32];
  std::snprintf(buf, sizeof buf, "req-%06llu", static_cast<unsigned long long>(next_id_++));
  return buf;
}

void Runtime::advance_to(Tick now) {
  if (now < now_)
    fail(Errc::precondition, std::to_string(now), "clock may not move backwards");
  now_ = now;
}

bool Runtime::accepts(const ActorId& a, const std::string& role_id, const RequestId& id) const {
  return opt_.accepts ? opt_.accepts(a, role_id, id) : true;
}

// --- publish ---------------------------------------------------------------

std::vector<TraceRecord> Runtime::publish(const SocId& soc, const Advertisement& ad,
                                          const ActorId& publisher) {
  std::size_t mark = trace_.size();
  Registry& r = reg(soc);
  const ActorId& pub = publisher.empty() ? ad.actor : publisher;
  if (!fso_.is_member(soc, pub))
    fail(Errc::not_member, pub, "publisher '" + pub + "' is not a member of '" + soc + "'");
  if (ad.actor.empty() || ad.offered.role_id.empty())
    fail(Errc::parse, ad.actor, "malformed advertisement");
  if (!fso_.actor_home.count(ad.actor))
    fail(Errc::unknown_id, ad.actor, "unknown actor '" + ad.actor + "'");
  if (fso_.is_engine(ad.actor))
    fail(Errc::precondition, ad.actor, "engine '" + ad.actor + "' may not offer domain roles");
  if (ad.policy.capacity < 1)
    fail(Errc::parse, ad.actor, "advertisement capacity must be positive");

  Advertisement stamped = ad;
  Seq at = seq_;  // the advertise record's own seq doubles as publish time
  stamped.published_at = at;
  r.upsert(stamped);
  TraceRecord& t = emit(soc, "advertise");
  t.actor = ad.actor;
  t.role = ad.offered.role_id;
  t.capacity = ad.policy.capacity;

  // Waiting requests get the new offer first, in enable order; protocol
  // actions come after as fresh enables.
  retry_pending();
  auto enabled = evaluate_protocols(r, stamped, at, soc, [this] { return fresh_request_id(); });
  for (ServiceRequest& nr : enabled) {
    TraceRecord& p = emit(soc, "protocol");
    p.request_id = nr.id;
    enable(soc, nr);
    global_enroll(nr.id);
  }
  return slice_from(mark);
}

std::vector<TraceRecord> Runtime::publish(const SocId& soc, const Event& ev) {
  std::size_t mark = trace_.size();
  Registry& r = reg(soc);
  if (ev.kind.empty()) fail(Errc::parse, ev.actor, "event without kind");
  if (!fso_.is_member(soc, ev.actor))
    fail(Errc::not_member, ev.actor, "publisher '" + ev.actor + "' is not a member of '" + soc + "'");
  Seq at = seq_;
  TraceRecord& t = emit(soc, "event");
  t.actor = ev.actor;
  t.detail = ev.kind;

  auto enabled = evaluate_protocols(r, ev, at, soc, [this] { return fresh_request_id(); });
  for (ServiceRequest& nr : enabled) {
    TraceRecord& p = emit(soc, "protocol");
    p.request_id = nr.id;
    enable(soc, nr);
    global_enroll(nr.id);
  }
  return slice_from(mark);
}

std::vector<TraceRecord> Runtime::publish(const SocId& soc, const ServiceRequest& req) {
  std::size_t mark = trace_.size();
  enable(soc, req);
  global_enroll(req.id);
  return slice_from(mark);
}

void Runtime::register_protocol(const SocId& soc, const RoleProtocol& protocol) {
  if (protocol.id.empty() || (protocol.on_event.empty() && protocol.on_role.empty()))
    fail(Errc::parse, protocol.id, "protocol needs an id and a guard");
  reg(soc).protocols.push_back(protocol);
}

// --- matching, notification, binding ----------------------------------------

std::map<std::string, std::vector<ActorId>> Runtime::match(const SocId& soc,
                                                           const RequestId& id) const {
  const Record& r = rec(id);
  MatchContext ctx{&fso_, &ledger_, r.req.origin_soc};
  return match_candidates(registry(soc), r.req, ctx);
}

std::map<int, std::vector<const Advertisement*>> Runtime::candidates_for(
    const SocId& soc, const Record& r) const {
  const Registry& registry_ = registry(soc);
  std::map<int, std::vector<const Advertisement*>> out;
  for (int p : r.unbound()) {
    const RoleDescriptor& role = r.req.required_roles[p];
    struct Ranked {
      int distance;
      Seq seq;
      const Advertisement* ad;
    };
    std::vector<Ranked> ranked;
    for (const auto& [key, ad] : registry_.ads) {
      if (fso_.is_engine(ad.actor)) continue;
      if (!capability_match(ad, role)) continue;
      if (!admits_binding(ad, &ledger_)) continue;
      int d = tree_distance(fso_, r.req.origin_soc, fso_.actor_home.at(ad.actor));
      ranked.push_back({d, ad.published_at, &ad});
    }
    std::sort(ranked.begin(), ranked.end(), [](const Ranked& a, const Ranked& b) {
      if (a.distance != b.distance) return a.distance < b.distance;
      if (a.seq != b.seq) return a.seq < b.seq;
      return a.ad->actor < b.ad->actor;
    });
    auto& list = out[p];
    for (const Ranked& rk : ranked) list.push_back(rk.ad);
  }
  return out;
}

void Runtime::notify_candidates(const SocId& soc, Record& r,
                                const std::map<int, std::vector<const Advertisement*>>& cands) {
  for (const auto& [pos, ads] : cands) {
    const std::string& role_id = r.req.required_roles[pos].role_id;
    for (const Advertisement* ad : ads) {
      if (!outstanding_.insert({ad->actor, r.req.id, role_id}).second) continue;
      TraceRecord& t = emit(soc, "notify");
      t.request_id = r.req.id;
      t.actor = ad->actor;
      t.role = role_id;
    }
  }
}

std::vector<Notification> Runtime::notify(
    const SocId& soc, const std::map<std::string, std::vector<ActorId>>& candidates,
    const RequestId& id) {
  Record& r = rec(id);
  std::vector<Notification> out;
  for (const auto& [role_id, actors] : candidates) {
    for (const ActorId& a : actors) {
      if (!outstanding_.insert({a, id, role_id}).second) continue;
      TraceRecord& t = emit(soc, "notify");
      t.request_id = id;
      t.actor = a;
      t.role = role_id;
      out.push_back({a, id, role_id, t.seq});
    }
  }
  (void)r;
  return out;
}

void Runtime::bind_position(const SocId& soc, Record& r, int position, const ActorId& actor) {
  const std::string& role_id = r.req.required_roles[position].role_id;
  ledger_.acquire(actor, role_id);
  r.bound.emplace(position, actor);
  TraceRecord& t = emit(soc, "bind");
  t.request_id = r.req.id;
  t.actor = actor;
  t.role = role_id;
}

BindOutcome Runtime::bind(const RequestId& id, const std::map<std::string, ActorId>& acceptances) {
  Record& r = rec(id);
  if (r.req.state != RequestState::enabled)
    fail(Errc::precondition, id, "request '" + id + "' is not enabled");
  BindOutcome out;
  const SocId& soc = r.pend_at;
  for (const auto& [role_id, actor] : acceptances) {
    int position = -1;
    for (int p : r.unbound())
      if (r.req.required_roles[p].role_id == role_id) {
        position = p;
        break;
      }
    if (position < 0) {
      out.rejected.push_back({role_id, actor, "no unbound role '" + role_id + "'"});
      continue;
    }
    if (!outstanding_.count({actor, id, role_id}))
      fail(Errc::precondition, actor,
           "acceptance by '" + actor + "' for role '" + role_id + "' without notification");
    const Advertisement* ad = registry(fso_.actor_home.at(actor)).find(actor, role_id);
    if (!ad || !admits_binding(*ad, &ledger_)) {
      out.rejected.push_back({role_id, actor, "capacity exhausted"});
      continue;
    }
    bind_position(soc, r, position, actor);
    out.bound.emplace_back(role_id, actor);
  }
  if (r.unbound().empty()) {
    activate(r, soc);
    out.active = true;
  }
  return out;
}

// --- enrollment --------------------------------------------------------------

void Runtime::enable(const SocId& soc, const ServiceRequest& req) {
  fso_.soc(soc);
  if (req.id.empty()) fail(Errc::parse, req.id, "request without id");
  if (records_.count(req.id))
    fail(Errc::duplicate_request, req.id, "duplicate request id '" + req.id + "'");
  if (req.duration < 1) fail(Errc::parse, req.id, "request duration must be positive");
  if (!fso_.is_member(soc, req.origin_actor))
    fail(Errc::not_member, req.origin_actor,
         "origin actor '" + req.origin_actor + "' is not a member of '" + soc + "'");
  if (!req.origin_soc.empty() && req.origin_soc != soc)
    fail(Errc::mismatch, req.id, "request origin_soc does not match the enabling SoC");

  Record r;
  r.req = req;
  r.req.origin_soc = soc;
  r.req.state = RequestState::enabled;
  r.pend_at = soc;
  r.enabled_socs.push_back(soc);
  reg(soc).pending.push_back(req.id);
  fifo_.push_back(req.id);
  counters_.requests++;

  TraceRecord& t = emit(soc, "enable");
  t.request_id = req.id;
  t.actor = req.origin_actor;
  for (const RoleDescriptor& rd : req.required_roles) t.roles.push_back(rd.role_id);

  auto [it, ok] = records_.emplace(req.id, std::move(r));
  (void)ok;
  if (it->second.req.required_roles.empty()) {
    activate(it->second, soc);
    form_son(req.id);
  }
}

bool Runtime::enroll_attempt(const SocId& soc, Record& r) {
  auto cands = candidates_for(soc, r);
  notify_candidates(soc, r, cands);

  // Candidates willing to commit, per unbound position.
  Assigner as;
  std::map<int, std::map<int, int>> rank_of;  // position -> ad index -> rank
  std::set<int> distances;
  std::map<int, std::map<int, int>> dist_of;  // position -> ad index -> distance
  std::vector<int> open = r.unbound();
  for (int p : open) {
    for (const Advertisement* ad : cands[p]) {
      if (!accepts(ad->actor, r.req.required_roles[p].role_id, r.req.id)) continue;
      int ai = as.ad_index(ad, ledger_);
      as.cand[p].push_back(ai);
      int d = tree_distance(fso_, r.req.origin_soc, fso_.actor_home.at(ad->actor));
      dist_of[p][ai] = d;
      distances.insert(d);
    }
  }

  // Complete within the smallest proximity radius that admits a full
  // assignment; otherwise hold as many positions as stay jointly satisfiable,
  // preferring earlier positions.
  auto restricted = [&](int limit) {
    Assigner sub;
    sub.ads = as.ads;
    for (auto& [p, list] : as.cand) {
      for (int ai : list)
        if (limit < 0 || dist_of[p][ai] <= limit) sub.cand[p].push_back(ai);
    }
    return sub;
  };

  std::vector<int> to_bind;
  Assigner pool = as;
  bool complete_possible = false;
  for (int d : distances) {
    Assigner sub = restricted(d);
    if (sub.assignable(open, {})) {
      pool = std::move(sub);
      to_bind = open;
      complete_possible = true;
      break;
    }
  }
  if (!complete_possible) {
    for (int p : open) {
      std::vector<int> trial = to_bind;
      trial.push_back(p);
      if (as.assignable(trial, {})) to_bind = trial;
    }
    pool = as;
  }

  // Deterministic selection: earliest-ranked candidate that keeps the rest
  // of the chosen positions satisfiable.
  std::map<int, int> usage;  // ad index -> units taken by this selection
  for (std::size_t i = 0; i < to_bind.size(); ++i) {
    int p = to_bind[i];
    std::vector<int> rest(to_bind.begin() + static_cast<std::ptrdiff_t>(i) + 1, to_bind.end());
    for (int ai : pool.cand[p]) {
      int spare = pool.ads[ai].spare;
      auto u = usage.find(ai);
      if (u != usage.end()) spare -= u->second;
      if (spare <= 0) continue;
      usage[ai]++;
      if (pool.assignable(rest, usage)) {
        bind_position(soc, r, p, pool.ads[ai].ad->actor);
        break;
      }
      if (--usage[ai] == 0) usage.erase(ai);
    }
  }

  std::vector<int> still_open = r.unbound();
  r.last_missing.clear();
  for (int p : still_open) r.last_missing.push_back(r.req.required_roles[p].role_id);
  return still_open.empty();
}

LocalOutcome Runtime::local_enroll(const SocId& soc, const RequestId& id) {
  Record& r = rec(id);
  if (r.req.state != RequestState::enabled)
    fail(Errc::precondition, id, "request '" + id + "' is not enabled");
  const Registry& registry_ = registry(soc);
  if (std::find(registry_.pending.begin(), registry_.pending.end(), id) == registry_.pending.end())
    fail(Errc::precondition, id, "request '" + id + "' is not enabled in '" + soc + "'");
  LocalOutcome out;
  if (enroll_attempt(soc, r)) {
    activate(r, soc);
    form_son(id);
    out.complete = true;
  } else {
    out.missing = r.last_missing;
  }
  return out;
}

void Runtime::relay_into(const SocId& soc, const Advertisement& ad, const RequestId& id) {
  Registry& r = reg(soc);
  const Advertisement* existing = r.find(ad.actor, ad.offered.role_id);
  if (existing && existing->published_at == ad.published_at) return;
  r.upsert(ad);  // keeps the original publish time
  TraceRecord& t = emit(soc, "relay");
  t.request_id = id;
  t.actor = ad.actor;
  t.role = ad.offered.role_id;
}

std::size_t Runtime::query_subtree(const SocId& soc, Record& r) {
  std::size_t mark = trace_.size();
  std::vector<RoleDescriptor> wanted;
  for (int p : r.unbound()) wanted.push_back(r.req.required_roles[p]);

  std::vector<SocId> stack(fso_.soc(soc).children.rbegin(), fso_.soc(soc).children.rend());
  while (!stack.empty()) {
    SocId cur = stack.back();
    stack.pop_back();
    for (const auto& [key, ad] : registry(cur).ads) {
      if (fso_.is_engine(ad.actor)) continue;
      if (!admits_binding(ad, &ledger_)) continue;
      for (const RoleDescriptor& role : wanted) {
        if (capability_match(ad, role)) {
          relay_into(soc, ad, r.req.id);
          break;
        }
      }
    }
    const auto& kids = fso_.soc(cur).children;
    stack.insert(stack.end(), kids.rbegin(), kids.rend());
  }
  return trace_.size() - mark;
}

void Runtime::raise_internal(const SocId& soc, Record& r) {
  SocId parent = *fso_.soc(soc).parent;
  reg(parent).pending.push_back(r.req.id);
  r.enabled_socs.push_back(parent);
  r.pend_at = parent;
  r.exceptions++;
  counters_.exceptions++;
  TraceRecord& t = emit(soc, "exception");
  t.request_id = r.req.id;
  t.roles = r.last_missing;
  t.detail = parent;
}

std::optional<ExceptionRecord> Runtime::raise_exception(const SocId& soc, const RequestId& id) {
  Record& r = rec(id);
  if (r.req.state != RequestState::enabled)
    fail(Errc::precondition, id, "request '" + id + "' is not enabled");
  if (r.pend_at != soc)
    fail(Errc::precondition, id, "request '" + id + "' is not pending in '" + soc + "'");
  if (r.last_missing.empty())
    fail(Errc::precondition, id, "no failed local enrollment to escalate");
  if (soc == fso_.root) return std::nullopt;  // stays pending at the root
  raise_internal(soc, r);
  return ExceptionRecord{id, r.last_missing, soc, r.pend_at};
}

ResolveOutcome Runtime::resolve(Record& r) {
  ResolveOutcome out;
  while (true) {
    SocId soc = r.pend_at;
    bool complete = enroll_attempt(soc, r);
    if (!complete) {
      bool allow_query =
          opt_.cooperation && (soc != r.req.origin_soc || r.retried) &&
          !fso_.soc(soc).children.empty();
      if (allow_query && query_subtree(soc, r) > 0) complete = enroll_attempt(soc, r);
    }
    if (complete) {
      activate(r, soc);
      const Son& son = form_son(r.req.id);
      out.active = true;
      out.son_id = son.id;
      out.apex = soc;
      return out;
    }
    if (!opt_.cooperation || soc == fso_.root) {
      out.pending_at = soc;
      return out;
    }
    raise_internal(soc, r);
  }
}

ResolveOutcome Runtime::global_enroll(const RequestId& id) {
  Record& r = rec(id);
  if (r.req.state == RequestState::active || r.req.state == RequestState::completed) {
    ResolveOutcome out;
    out.active = true;
    out.son_id = r.son_id;
    if (r.son_id) out.apex = sons_.at(*r.son_id).apex;
    return out;
  }
  if (r.req.state == RequestState::unfulfilled)
    fail(Errc::precondition, id, "request '" + id + "' was cancelled");
  return resolve(r);
}

void Runtime::activate(Record& r, const SocId& apex) {
  r.req.state = RequestState::active;
  r.pend_at = apex;
  drop_pending(r);
  TraceRecord& t = emit(apex, "active");
  t.request_id = r.req.id;
}

const Son& Runtime::form_son(const RequestId& id) {
  Record& r = rec(id);
  if (r.req.state != RequestState::active)
    fail(Errc::precondition, id, "request '" + id + "' is not active");
  if (r.son_id) fail(Errc::duplicate_request, id, "SON already formed for '" + id + "'");

  Son son;
  son.id = "son-" + id;
  son.request_id = id;
  son.apex = r.pend_at;
  son.bindings = r.bound;
  son.member_socs.insert(r.req.origin_soc);
  for (const auto& [pos, actor] : r.bound) son.member_socs.insert(fso_.actor_home.at(actor));
  son.created_at = now_;

  r.son_id = son.id;
  counters_.sons_formed++;
  if (son.member_socs.size() > 1)
    counters_.global_enrollments++;
  else
    counters_.local_enrollments++;

  TraceRecord& t = emit(son.apex, "son-formed");
  t.request_id = id;
  t.detail = son.id;

  auto [it, ok] = sons_.emplace(son.id, std::move(son));
  (void)ok;
  return it->second;
}

void Runtime::dissolve_internal(Son& son, Tick at, bool forced) {
  Record& r = rec(son.request_id);
  if (!forced && at != son.created_at + r.req.duration)
    fail(Errc::precondition, son.id,
         "SON '" + son.id + "' dissolves at " + std::to_string(son.created_at + r.req.duration) +
             ", not " + std::to_string(at));
  release_bindings(r);
  son.dissolved_at = at;
  r.req.state = RequestState::completed;
  counters_.completed++;
  TraceRecord& t = emit(son.apex, "son-dissolved");
  t.request_id = son.request_id;
  t.detail = son.id;
  TraceRecord& c = emit(son.apex, "complete");
  c.request_id = son.request_id;
}

void Runtime::dissolve_son(const std::string& son_id, Tick now) {
  auto it = sons_.find(son_id);
  if (it == sons_.end()) fail(Errc::unknown_id, son_id, "unknown SON '" + son_id + "'");
  if (it->second.dissolved_at)
    fail(Errc::precondition, son_id, "SON '" + son_id + "' already dissolved");
  advance_to(now);
  dissolve_internal(it->second, now, false);
  retry_pending();
}

void Runtime::release_bindings(Record& r) {
  for (const auto& [pos, actor] : r.bound)
    ledger_.release(actor, r.req.required_roles[pos].role_id);
  r.bound.clear();
}

void Runtime::drop_pending(Record& r) {
  for (const SocId& s : r.enabled_socs) {
    auto& pending = reg(s).pending;
    pending.erase(std::remove(pending.begin(), pending.end(), r.req.id), pending.end());
  }
  r.enabled_socs.clear();
}

void Runtime::clear_notifications(const RequestId& id) {
  for (auto it = outstanding_.begin(); it != outstanding_.end();) {
    if (std::get<1>(*it) == id)
      it = outstanding_.erase(it);
    else
      ++it;
  }
}

void Runtime::cancel(const RequestId& id) {
  Record& r = rec(id);
  if (r.req.state != RequestState::enabled)
    fail(Errc::precondition, id, "only enabled requests can be cancelled");
  release_bindings(r);
  drop_pending(r);
  clear_notifications(id);
  r.req.state = RequestState::unfulfilled;
  counters_.unfulfilled++;
  TraceRecord& t = emit(r.pend_at, "unfulfilled");
  t.request_id = id;
  retry_pending();
}

std::vector<RequestId> Runtime::retry_pending() {
  std::vector<RequestId> activated;
  if (in_retry_ || finishing_) return activated;
  in_retry_ = true;
  for (const RequestId& id : std::vector<RequestId>(fifo_)) {
    auto it = records_.find(id);
    if (it == records_.end() || it->second.req.state != RequestState::enabled) continue;
    it->second.retried = true;
    ResolveOutcome out = resolve(it->second);
    if (out.active) activated.push_back(id);
  }
  in_retry_ = false;
  return activated;
}

void Runtime::finish(Tick horizon) {
  advance_to(horizon);
  finishing_ = true;
  for (auto& [sid, son] : sons_)
    if (!son.dissolved_at) dissolve_internal(son, horizon, true);
  for (const RequestId& id : fifo_) {
    Record& r = records_.at(id);
    if (r.req.state != RequestState::enabled) continue;
    release_bindings(r);
    drop_pending(r);
    clear_notifications(id);
    r.req.state = RequestState::unfulfilled;
    counters_.unfulfilled++;
    TraceRecord& t = emit(r.pend_at, "unfulfilled");
    t.request_id = id;
  }
}

// --- inspection --------------------------------------------------------------

const ServiceRequest& Runtime::request(const RequestId& id) const { return rec(id).req; }

const std::map<int, ActorId>& Runtime::bindings_of(const RequestId& id) const {
  return rec(id).bound;
}

int Runtime::exception_count(const RequestId& id) const { return rec(id).exceptions; }

SocId Runtime::pending_at(const RequestId& id) const { return rec(id).pend_at; }

std::vector<RequestId> Runtime::pending_requests() const {
  std::vector<RequestId> out;
  for (const RequestId& id : fifo_) {
    auto it = records_.find(id);
    if (it != records_.end() && it->second.req.state == RequestState::enabled)
      out.push_back(id);
  }
  return out;
}

}  // namespace fso
