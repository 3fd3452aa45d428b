#pragma once

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "fso/registry.hpp"
#include "fso/topology.hpp"

namespace fso {

/// One engine effect. `roles`, `detail` and `capacity` extend the base
/// {seq, soc, kind, request_id?, actor?, role?} record where a kind needs them.
struct TraceRecord {
  Seq seq = 0;
  SocId soc;
  std::string kind;
  std::optional<RequestId> request_id;
  std::optional<ActorId> actor;
  std::optional<std::string> role;
  std::vector<std::string> roles;
  std::optional<std::string> detail;
  std::optional<int> capacity;
};

struct ExceptionRecord {
  RequestId request_id;
  std::vector<std::string> missing_roles;
  SocId raised_by;
  SocId raised_to;
};

/// The temporary community bound to one request for its duration.
struct Son {
  std::string id;
  RequestId request_id;
  SocId apex;                      ///< where the request became active
  std::map<int, ActorId> bindings; ///< role position -> actor
  std::set<SocId> member_socs;     ///< origin plus homes of bound actors
  Tick created_at = 0;
  std::optional<Tick> dissolved_at;
};

struct LocalOutcome {
  bool complete = false;
  std::vector<std::string> missing;  ///< role ids still unbound, position order
};

struct BindRejection {
  std::string role_id;
  ActorId actor;
  std::string reason;
};

struct BindOutcome {
  bool active = false;
  std::vector<std::pair<std::string, ActorId>> bound;
  std::vector<BindRejection> rejected;
};

struct ResolveOutcome {
  bool active = false;
  std::optional<std::string> son_id;
  std::optional<SocId> apex;
  std::optional<SocId> pending_at;
};

/// Engines of one organization plus the shared ledger, trace, and clock.
/// All operations are serialized; cross-community traffic happens through
/// exceptions (upward) and role queries (downward), both disabled when
/// `cooperation` is off.
class Runtime {
public:
  struct Options {
    bool cooperation = true;
    /// Per-actor acceptance policy; null means accept whenever capacity allows.
    std::function<bool(const ActorId&, const std::string& role_id, const RequestId&)> accepts;
  };

  struct Counters {
    std::uint64_t requests = 0;
    std::uint64_t local_enrollments = 0;
    std::uint64_t global_enrollments = 0;
    std::uint64_t exceptions = 0;
    std::uint64_t sons_formed = 0;
    std::uint64_t completed = 0;
    std::uint64_t unfulfilled = 0;
  };

  explicit Runtime(Fso fso);
  Runtime(Fso fso, Options opt);

  // Engine surface -----------------------------------------------------
  std::vector<TraceRecord> publish(const SocId& soc, const Advertisement& ad,
                                   const ActorId& publisher = {});
  std::vector<TraceRecord> publish(const SocId& soc, const Event& ev);
  std::vector<TraceRecord> publish(const SocId& soc, const ServiceRequest& req);
  void register_protocol(const SocId& soc, const RoleProtocol& protocol);
  std::map<std::string, std::vector<ActorId>> match(const SocId& soc,
                                                    const RequestId& id) const;
  std::vector<Notification> notify(const SocId& soc,
                                   const std::map<std::string, std::vector<ActorId>>& candidates,
                                   const RequestId& id);
  BindOutcome bind(const RequestId& id, const std::map<std::string, ActorId>& acceptances);

  // Enrollment surface -------------------------------------------------
  void enable(const SocId& soc, const ServiceRequest& req);
  LocalOutcome local_enroll(const SocId& soc, const RequestId& id);
  std::optional<ExceptionRecord> raise_exception(const SocId& soc, const RequestId& id);
  ResolveOutcome global_enroll(const RequestId& id);
  const Son& form_son(const RequestId& id);
  void dissolve_son(const std::string& son_id, Tick now);
  void cancel(const RequestId& id);
  /// Re-attempts every enabled request in enable order; returns activations.
  std::vector<RequestId> retry_pending();
  /// Dissolves live SONs and marks enabled requests unfulfilled.
  void finish(Tick horizon);

  // Clock, trace, inspection --------------------------------------------
  void advance_to(Tick now);
  Tick now() const { return now_; }
  Seq next_seq() const { return seq_; }
  const Fso& fso() const { return fso_; }
  const Registry& registry(const SocId& soc) const;
  const ServiceRequest& request(const RequestId& id) const;
  const std::map<int, ActorId>& bindings_of(const RequestId& id) const;
  int exception_count(const RequestId& id) const;
  SocId pending_at(const RequestId& id) const;
  const std::map<std::string, Son>& sons() const { return sons_; }
  const CapacityLedger& ledger() const { return ledger_; }
  const std::vector<TraceRecord>& trace() const { return trace_; }
  const Counters& counters() const { return counters_; }
  std::vector<RequestId> pending_requests() const;
  RequestId fresh_request_id();

  /// Appends a caller-supplied record to the shared trace stream.
  TraceRecord& note(const SocId& soc, const std::string& kind);

private:
  struct Record {
    ServiceRequest req;
    std::map<int, ActorId> bound;
    std::vector<int> unbound() const;
    SocId pend_at;
    std::vector<SocId> enabled_socs;
    std::vector<std::string> last_missing;
    int exceptions = 0;
    std::optional<std::string> son_id;
    bool retried = false;
  };

  Record& rec(const RequestId& id);
  const Record& rec(const RequestId& id) const;
  Registry& reg(const SocId& soc);
  TraceRecord& emit(const SocId& soc, const std::string& kind);
  std::vector<TraceRecord> slice_from(std::size_t mark) const;

  bool accepts(const ActorId& a, const std::string& role_id, const RequestId& id) const;
  void notify_candidates(const SocId& soc, Record& r,
                         const std::map<int, std::vector<const Advertisement*>>& cands);
  std::map<int, std::vector<const Advertisement*>> candidates_for(const SocId& soc,
                                                                  const Record& r) const;
  bool enroll_attempt(const SocId& soc, Record& r);
  std::size_t query_subtree(const SocId& soc, Record& r);
  void relay_into(const SocId& soc, const Advertisement& ad, const RequestId& id);
  void raise_internal(const SocId& soc, Record& r);
  ResolveOutcome resolve(Record& r);
  void activate(Record& r, const SocId& apex);
  void bind_position(const SocId& soc, Record& r, int position, const ActorId& actor);
  void release_bindings(Record& r);
  void drop_pending(Record& r);
  void clear_notifications(const RequestId& id);
  void dissolve_internal(Son& son, Tick at, bool forced);

  Fso fso_;
  Options opt_;
  std::map<SocId, Registry> registries_;
  std::map<RequestId, Record> records_;
  std::vector<RequestId> fifo_;  ///< enable order
  std::map<std::string, Son> sons_;
  CapacityLedger ledger_;
  std::set<std::tuple<ActorId, RequestId, std::string>> outstanding_;
  std::vector<TraceRecord> trace_;
  Counters counters_;
  Seq seq_ = 0;
  Tick now_ = 0;
  std::uint64_t next_id_ = 0;
  bool in_retry_ = false;
  bool finishing_ = false;
};

}  // namespace fso
