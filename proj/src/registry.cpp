#include "fso/registry.hpp"

#include <algorithm>

namespace fso {

const char* to_string(RequestState s) {
  switch (s) {
    case RequestState::enabled: return "enabled";
    case RequestState::active: return "active";
    case RequestState::completed: return "completed";
    case RequestState::unfulfilled: return "unfulfilled";
  }
  return "?";
}

bool capability_match(const Advertisement& ad, const RoleDescriptor& role) {
  if (ad.offered.role_id != role.role_id) return false;
  return std::includes(ad.offered.capabilities.begin(), ad.offered.capabilities.end(),
                       role.capabilities.begin(), role.capabilities.end());
}

bool admits_binding(const Advertisement& ad, const CapacityLedger* ledger) {
  if (!ad.policy.available) return false;
  int used = ledger ? ledger->held(ad.actor, ad.offered.role_id) : 0;
  return used < ad.policy.capacity;
}

namespace {

struct Ranked {
  int distance;
  Seq seq;
  const Advertisement* ad;
  bool operator<(const Ranked& o) const {
    if (distance != o.distance) return distance < o.distance;
    if (seq != o.seq) return seq < o.seq;
    return ad->actor < o.ad->actor;
  }
};

int distance_from(const MatchContext& ctx, const ActorId& actor) {
  if (!ctx.fso || ctx.origin.empty()) return 0;
  auto it = ctx.fso->actor_home.find(actor);
  if (it == ctx.fso->actor_home.end()) return 0;
  return tree_distance(*ctx.fso, ctx.origin, it->second);
}

}  // namespace

std::map<std::string, std::vector<ActorId>> match_candidates(
    const Registry& reg, const ServiceRequest& req, const MatchContext& ctx) {
  std::map<std::string, std::vector<ActorId>> out;
  for (const RoleDescriptor& role : req.required_roles) {
    if (out.count(role.role_id)) continue;  // one list per role id
    std::vector<Ranked> ranked;
    for (const auto& [key, ad] : reg.ads) {
      if (ctx.fso && ctx.fso->is_engine(ad.actor)) continue;
      if (!capability_match(ad, role)) continue;
      if (!admits_binding(ad, ctx.ledger)) continue;
      ranked.push_back({distance_from(ctx, ad.actor), ad.published_at, &ad});
    }
    std::sort(ranked.begin(), ranked.end());
    std::vector<ActorId>& list = out[role.role_id];
    for (const Ranked& r : ranked) list.push_back(r.ad->actor);
  }
  return out;
}

namespace {

std::vector<ServiceRequest> fire_protocols(
    Registry& reg, Seq publication_seq, const SocId& soc, const ActorId& origin_actor,
    const std::function<RequestId()>& next_id,
    const std::function<bool(const RoleProtocol&)>& guard_holds) {
  std::vector<ServiceRequest> enabled;
  for (const RoleProtocol& p : reg.protocols) {
    if (!guard_holds(p)) continue;
    if (!reg.fired.insert({p.id, publication_seq}).second) continue;
    for (const RequestTemplate& t : p.actions) {
      ServiceRequest r;
      r.id = next_id();
      r.required_roles = t.roles;
      r.origin_actor = origin_actor;
      r.origin_soc = soc;
      r.duration = t.duration;
      enabled.push_back(std::move(r));
    }
  }
  return enabled;
}

}  // namespace

std::vector<ServiceRequest> evaluate_protocols(
    Registry& reg, const Event& ev, Seq publication_seq, const SocId& soc,
    const std::function<RequestId()>& next_id) {
  return fire_protocols(reg, publication_seq, soc, ev.actor, next_id,
                        [&](const RoleProtocol& p) { return !p.on_event.empty() && p.on_event == ev.kind; });
}

std::vector<ServiceRequest> evaluate_protocols(
    Registry& reg, const Advertisement& ad, Seq publication_seq, const SocId& soc,
    const std::function<RequestId()>& next_id) {
  return fire_protocols(reg, publication_seq, soc, ad.actor, next_id,
                        [&](const RoleProtocol& p) { return !p.on_role.empty() && p.on_role == ad.offered.role_id; });
}

}  // namespace fso
