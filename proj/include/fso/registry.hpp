#pragma once

#include <functional>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "fso/core.hpp"
#include "fso/topology.hpp"

namespace fso {

struct RoleDescriptor {
  std::string role_id;
  std::set<std::string> capabilities;
  std::map<std::string, std::string> attributes;
};

struct EngagementPolicy {
  int capacity = 1;  ///< max simultaneous bindings for this role
  bool available = true;
};

/// A published role offer. `published_at` is assigned by the engine.
struct Advertisement {
  ActorId actor;
  RoleDescriptor offered;
  EngagementPolicy policy;
  Seq published_at = 0;
};

/// A published context fact ("accelerometer-fired", ...).
struct Event {
  std::string kind;
  ActorId actor;
  std::map<std::string, std::string> attributes;
};

enum class RequestState { enabled, active, completed, unfulfilled };
const char* to_string(RequestState s);

/// A guarded action: n >= 0 roles to fill before the service can start.
struct ServiceRequest {
  RequestId id;
  std::vector<RoleDescriptor> required_roles;
  ActorId origin_actor;
  SocId origin_soc;
  Tick duration = 1;
  RequestState state = RequestState::enabled;
};

struct RequestTemplate {
  std::vector<RoleDescriptor> roles;
  Tick duration = 1;
};

/// Guard + actions. The guard fires on events of kind `on_event`, or on
/// advertisements offering `on_role`; firing is recorded per triggering
/// publication so re-evaluation stays idempotent.
struct RoleProtocol {
  std::string id;
  std::string on_event;
  std::string on_role;
  std::vector<RequestTemplate> actions;
};

struct Notification {
  ActorId target;
  RequestId request_id;
  std::string role_id;
  Seq issued_at = 0;
};

/// Per-community registry held by the engine.
struct Registry {
  /// Live advertisements keyed by (actor, role_id); republishing replaces.
  std::map<std::pair<ActorId, std::string>, Advertisement> ads;
  /// Enabled requests awaiting enrollment here, FIFO by enable order.
  std::vector<RequestId> pending;
  std::vector<RoleProtocol> protocols;
  /// (protocol id, publication seq) pairs that already fired.
  std::set<std::pair<std::string, Seq>> fired;

  void upsert(const Advertisement& ad) {
    ads[{ad.actor, ad.offered.role_id}] = ad;
  }
  const Advertisement* find(const ActorId& a, const std::string& role_id) const {
    auto it = ads.find({a, role_id});
    return it == ads.end() ? nullptr : &it->second;
  }
};

/// Held bindings per (actor, role_id); capacity comes from the advertisement.
class CapacityLedger {
public:
  int held(const ActorId& a, const std::string& role_id) const {
    auto it = counts_.find({a, role_id});
    return it == counts_.end() ? 0 : it->second;
  }
  void acquire(const ActorId& a, const std::string& role_id) { ++counts_[{a, role_id}]; }
  void release(const ActorId& a, const std::string& role_id) {
    auto it = counts_.find({a, role_id});
    if (it == counts_.end() || it->second <= 0)
      fail(Errc::precondition, a, "releasing unheld binding for '" + a + "'/" + role_id);
    if (--it->second == 0) counts_.erase(it);
  }
  bool all_released() const { return counts_.empty(); }
  const std::map<std::pair<ActorId, std::string>, int>& counts() const { return counts_; }

private:
  std::map<std::pair<ActorId, std::string>, int> counts_;
};

struct MatchContext {
  const Fso* fso = nullptr;               ///< for proximity ordering; null = flat
  const CapacityLedger* ledger = nullptr;  ///< null = nothing held
  SocId origin;                            ///< requesting locus
};

/// role_id equality plus capability superset.
bool capability_match(const Advertisement& ad, const RoleDescriptor& role);

/// Availability and spare capacity under the ledger.
bool admits_binding(const Advertisement& ad, const CapacityLedger* ledger);

/// Candidates per role, best first: ascending tree distance from the
/// requesting locus, then publish order, then actor id. Engines never match.
std::map<std::string, std::vector<ActorId>> match_candidates(
    const Registry& reg, const ServiceRequest& req, const MatchContext& ctx);

/// Instantiates the action templates of every protocol whose guard holds on
/// the publication; each protocol fires at most once per publication seq.
std::vector<ServiceRequest> evaluate_protocols(
    Registry& reg, const Event& ev, Seq publication_seq, const SocId& soc,
    const std::function<RequestId()>& next_id);
std::vector<ServiceRequest> evaluate_protocols(
    Registry& reg, const Advertisement& ad, Seq publication_seq, const SocId& soc,
    const std::function<RequestId()>& next_id);

}  // namespace fso
