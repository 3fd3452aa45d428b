#include "fso/sim.hpp"

#include <algorithm>
#include <cstdio>
#include <queue>
#include <random>

namespace fso {

const char* to_string(ScenarioKind k) {
  switch (k) {
    case ScenarioKind::fire: return "fire";
    case ScenarioKind::healthcare: return "healthcare";
    case ScenarioKind::falls: return "falls";
  }
  return "?";
}

ScenarioKind scenario_kind_from(const std::string& name) {
  if (name == "fire") return ScenarioKind::fire;
  if (name == "healthcare") return ScenarioKind::healthcare;
  if (name == "falls") return ScenarioKind::falls;
  fail(Errc::parse, name, "unknown scenario '" + name + "'");
}

ScenarioConfig scenario_from_json(const Json& j, const std::string& base_dir) {
  if (!j.is_object()) fail(Errc::parse, "config", "scenario config must be an object");
  ScenarioConfig cfg;
  if (!j.contains("scenario") || !j["scenario"].is_string())
    fail(Errc::parse, "config", "config needs a 'scenario' name");
  cfg.scenario = scenario_kind_from(j["scenario"].get<std::string>());
  if (!j.contains("fso")) fail(Errc::parse, "config", "config needs an 'fso' hierarchy");
  if (j["fso"].is_string())
    cfg.fso_spec = load_json_file(base_dir + "/" + j["fso"].get<std::string>());
  else
    cfg.fso_spec = j["fso"];
  if (!j.contains("horizon") || !j["horizon"].is_number_integer())
    fail(Errc::parse, "config", "config needs an integer 'horizon'");
  cfg.horizon = j["horizon"].get<Tick>();
  if (cfg.horizon <= 0) fail(Errc::precondition, "horizon", "horizon must be positive");
  cfg.seed = j.value("seed", 0ull);
  cfg.cooperation = j.value("cooperation", true);
  cfg.params = j.value("params", Json::object());
  for (const char* key : {"ignition_rate", "p_fp", "q", "alarm_rate"}) {
    if (cfg.params.contains(key)) {
      double v = cfg.params[key].get<double>();
      if (v < 0.0 || v > 1.0)
        fail(Errc::precondition, key, std::string(key) + " must lie in [0,1]");
    }
  }
  return cfg;
}

// --- metrics -----------------------------------------------------------------

std::vector<std::pair<std::string, double>> Metrics::numeric_fields() const {
  return {
      {"requests", double(requests)},
      {"local_enrollments", double(local_enrollments)},
      {"global_enrollments", double(global_enrollments)},
      {"exceptions", double(exceptions)},
      {"sons_formed", double(sons_formed)},
      {"completed", double(completed)},
      {"unfulfilled", double(unfulfilled)},
      {"houses_ignited", double(houses_ignited)},
      {"houses_burned_down", double(houses_burned_down)},
      {"houses_saved", double(houses_saved)},
      {"patients", double(patients)},
      {"treated", double(treated)},
      {"untreated", double(untreated)},
      {"mean_wait_ticks", mean_wait_ticks},
      {"alarms", double(alarms)},
      {"true_falls", double(true_falls)},
      {"false_positives", double(false_positives)},
      {"dispatches", double(dispatches)},
      {"verified_dismissals", double(verified_dismissals)},
      {"alarms_handled", double(alarms_handled)},
      {"mean_response_ticks", mean_response_ticks},
  };
}

namespace {

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

bool is_mean_field(const std::string& name) {
  return name == "mean_wait_ticks" || name == "mean_response_ticks";
}

}  // namespace

Json metrics_to_json(const Metrics& m) {
  Json j;
  j["schema"] = "fso-metrics/1";
  j["scenario"] = m.scenario;
  j["seed"] = m.seed;
  j["cooperation"] = m.cooperation;
  j["horizon"] = m.horizon;
  for (const auto& [name, value] : m.numeric_fields()) {
    if (is_mean_field(name))
      j[name] = format_double(value);
    else
      j[name] = static_cast<std::uint64_t>(value);
  }
  return j;
}

Metrics metrics_from_json(const Json& j) {
  if (!j.is_object() || j.value("schema", "") != "fso-metrics/1")
    fail(Errc::parse, "metrics", "not an fso-metrics/1 document");
  Metrics m;
  m.scenario = j.at("scenario").get<std::string>();
  m.seed = j.value("seed", 0ull);
  m.cooperation = j.value("cooperation", true);
  m.horizon = j.value("horizon", Tick(0));
  auto u = [&](const char* k) { return j.value(k, 0ull); };
  m.requests = u("requests");
  m.local_enrollments = u("local_enrollments");
  m.global_enrollments = u("global_enrollments");
  m.exceptions = u("exceptions");
  m.sons_formed = u("sons_formed");
  m.completed = u("completed");
  m.unfulfilled = u("unfulfilled");
  m.houses_ignited = u("houses_ignited");
  m.houses_burned_down = u("houses_burned_down");
  m.houses_saved = u("houses_saved");
  m.patients = u("patients");
  m.treated = u("treated");
  m.untreated = u("untreated");
  m.alarms = u("alarms");
  m.true_falls = u("true_falls");
  m.false_positives = u("false_positives");
  m.dispatches = u("dispatches");
  m.verified_dismissals = u("verified_dismissals");
  m.alarms_handled = u("alarms_handled");
  if (j.contains("mean_wait_ticks"))
    m.mean_wait_ticks = std::stod(j["mean_wait_ticks"].get<std::string>());
  if (j.contains("mean_response_ticks"))
    m.mean_response_ticks = std::stod(j["mean_response_ticks"].get<std::string>());
  return m;
}

std::string metrics_csv_header() {
  std::string out = "schema,scenario,seed,cooperation,horizon";
  Metrics probe;
  for (const auto& [name, value] : probe.numeric_fields()) out += "," + name;
  return out;
}

std::string metrics_csv_row(const Metrics& m) {
  std::string out = "fso-metrics/1," + m.scenario + "," + std::to_string(m.seed) + "," +
                    (m.cooperation ? "true" : "false") + "," + std::to_string(m.horizon);
  for (const auto& [name, value] : m.numeric_fields()) {
    out += ",";
    out += is_mean_field(name) ? format_double(value) : std::to_string(std::uint64_t(value));
  }
  return out;
}

Json compare_runs(const Metrics& a, const Metrics& b) {
  if (a.scenario != b.scenario)
    fail(Errc::mismatch, a.scenario,
         "cannot compare a '" + a.scenario + "' run with a '" + b.scenario + "' run");
  Json j;
  j["schema"] = "fso-delta/1";
  j["scenario"] = a.scenario;
  Json deltas;
  auto fa = a.numeric_fields();
  auto fb = b.numeric_fields();
  for (std::size_t i = 0; i < fa.size(); ++i)
    deltas[fa[i].first] = fb[i].second - fa[i].second;
  j["deltas"] = deltas;
  return j;
}

// --- deterministic streams ----------------------------------------------------

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

/// One stream per entity class, split from the config seed by name, so
/// toggling cooperation never perturbs the generated load.
class Stream {
public:
  Stream(std::uint64_t seed, const std::string& name)
      : gen_(splitmix64(seed ^ fnv1a64(name))) {}
  double u01() { return double(gen_() >> 11) * (1.0 / 9007199254740992.0); }
  bool chance(double p) { return u01() < p; }

private:
  std::mt19937_64 gen_;
};

struct SimEvent {
  Tick t = 0;
  std::uint64_t order = 0;
  enum Kind {
    ignite,
    burn_check,
    responder_arrival,
    patient_arrival,
    alarm,
    verify_reply,
    verify_timeout,
    son_expire,
  } kind = ignite;
  SocId soc;
  ActorId actor;
  RequestId request;
  std::string son_id;
  int index = -1;
  bool flag = false;
};

struct EventOrder {
  bool operator()(const SimEvent& a, const SimEvent& b) const {
    if (a.t != b.t) return a.t > b.t;
    return a.order > b.order;
  }
};

class EventQueue {
public:
  void push(SimEvent ev) {
    ev.order = next_++;
    q_.push(std::move(ev));
  }
  bool empty() const { return q_.empty(); }
  Tick next_time() const { return q_.top().t; }
  SimEvent pop() {
    SimEvent ev = q_.top();
    q_.pop();
    return ev;
  }

private:
  std::priority_queue<SimEvent, std::vector<SimEvent>, EventOrder> q_;
  std::uint64_t next_ = 0;
};

RoleDescriptor role_of(const std::string& role_id, std::vector<std::string> needs) {
  RoleDescriptor r;
  r.role_id = role_id;
  r.capabilities.insert(needs.begin(), needs.end());
  return r;
}

std::vector<RoleDescriptor> roles_from(const Json& j, std::vector<RoleDescriptor> fallback) {
  if (!j.is_array()) return fallback;
  std::vector<RoleDescriptor> out;
  for (const Json& jr : j) {
    RoleDescriptor r;
    r.role_id = jr.at("role").get<std::string>();
    if (jr.contains("needs"))
      for (const Json& n : jr["needs"]) r.capabilities.insert(n.get<std::string>());
    out.push_back(std::move(r));
  }
  return out;
}

/// soc -> ordered actor list, e.g. {"houses": {"nbA": ["h1","h2"]}}.
std::vector<std::pair<SocId, ActorId>> placed_actors(const Json& j) {
  std::vector<std::pair<SocId, ActorId>> out;
  if (!j.is_object()) return out;
  for (auto it = j.begin(); it != j.end(); ++it)
    for (const Json& a : it.value()) out.emplace_back(it.key(), a.get<std::string>());
  return out;
}

void publish_initial_ads(Runtime& rt, const Json& params) {
  if (!params.contains("advertisements")) return;
  for (const Json& ja : params["advertisements"]) {
    Advertisement ad;
    ad.actor = ja.at("actor").get<std::string>();
    ad.offered.role_id = ja.at("role").get<std::string>();
    if (ja.contains("capabilities"))
      for (const Json& c : ja["capabilities"]) ad.offered.capabilities.insert(c.get<std::string>());
    ad.policy.capacity = ja.value("capacity", 1);
    ad.policy.available = ja.value("available", true);
    rt.publish(ja.at("soc").get<std::string>(), ad);
  }
}

RequestId request_id_from(const std::vector<TraceRecord>& effects) {
  for (const TraceRecord& r : effects)
    if (r.kind == "enable" && r.request_id) return *r.request_id;
  return {};
}

Tick arrival_delay(const Runtime& rt, const Son& son, const SocId& origin) {
  Tick d = 0;
  for (const auto& [pos, actor] : son.bindings)
    d = std::max<Tick>(d, tree_distance(rt.fso(), origin, rt.fso().actor_home.at(actor)));
  return d;
}

void fill_shared(Metrics& m, const Runtime& rt) {
  const Runtime::Counters& c = rt.counters();
  m.requests = c.requests;
  m.local_enrollments = c.local_enrollments;
  m.global_enrollments = c.global_enrollments;
  m.exceptions = c.exceptions;
  m.sons_formed = c.sons_formed;
  m.completed = c.completed;
  m.unfulfilled = c.unfulfilled;
}

// --- fire ---------------------------------------------------------------------

struct FireSim {
  const ScenarioConfig& cfg;
  Runtime rt;
  Metrics m;
  EventQueue q;
  Tick burn_threshold;
  Tick response_duration;
  std::vector<RoleDescriptor> roles;

  struct House {
    enum State { idle, burning, burned } state = idle;
    bool ignited_once = false;  // one ignition per house keeps paired seeds comparable
    Tick deadline = 0;
    RequestId request;
    SocId soc;
  };
  std::map<ActorId, House> houses;
  std::map<RequestId, ActorId> request_house;
  std::set<std::string> scheduled_sons;

  FireSim(const ScenarioConfig& c, Fso fso)
      : cfg(c), rt(std::move(fso), {c.cooperation, nullptr}) {
    m.scenario = "fire";
    m.seed = c.seed;
    m.cooperation = c.cooperation;
    m.horizon = c.horizon;
    burn_threshold = c.params.value("burn_threshold", 15);
    response_duration = c.params.value("response_duration", 10);
    roles = roles_from(c.params.value("roles", Json()),
                       {role_of("firefighter", {"firefighting"})});
  }

  void generate_ignitions() {
    double rate = cfg.params.value("ignition_rate", 0.02);
    if (rate < 0.0 || rate > 1.0)
      fail(Errc::precondition, "ignition_rate", "ignition_rate must lie in [0,1]");
    auto placed = placed_actors(cfg.params.value("houses", Json::object()));
    for (const auto& [soc, house] : placed) houses[house].soc = soc;
    Stream ignition(cfg.seed, "ignition");
    // Ignitions whose burn check would fall past the horizon are skipped so
    // every ignition resolves as burned or saved by the end of the run.
    for (Tick t = 0; t + burn_threshold <= cfg.horizon; ++t)
      for (const auto& [soc, house] : placed)
        if (ignition.chance(rate)) {
          SimEvent ev;
          ev.t = t;
          ev.kind = SimEvent::ignite;
          ev.soc = soc;
          ev.actor = house;
          q.push(ev);
        }
  }

  void absorb_new_sons() {
    for (const auto& [sid, son] : rt.sons()) {
      if (!scheduled_sons.insert(sid).second) continue;
      auto rh = request_house.find(son.request_id);
      if (rh != request_house.end()) {
        SimEvent arrive;
        arrive.t = son.created_at + arrival_delay(rt, son, rt.request(son.request_id).origin_soc);
        arrive.kind = SimEvent::responder_arrival;
        arrive.request = son.request_id;
        q.push(arrive);
      }
      SimEvent expire;
      expire.t = son.created_at + rt.request(son.request_id).duration;
      expire.kind = SimEvent::son_expire;
      expire.son_id = sid;
      q.push(expire);
    }
  }

  void step(const SimEvent& ev) {
    switch (ev.kind) {
      case SimEvent::ignite: {
        House& h = houses[ev.actor];
        if (h.state != House::idle || h.ignited_once) return;
        h.ignited_once = true;
        h.state = House::burning;
        h.deadline = ev.t + burn_threshold;
        m.houses_ignited++;
        rt.note(ev.soc, "ignite").actor = ev.actor;

        ServiceRequest req;
        req.id = rt.fresh_request_id();
        req.required_roles = roles;
        req.origin_actor = ev.actor;
        req.origin_soc = ev.soc;
        req.duration = response_duration;
        rt.publish(ev.soc, req);
        h.request = req.id;
        request_house[req.id] = ev.actor;

        SimEvent check;
        check.t = h.deadline;
        check.kind = SimEvent::burn_check;
        check.actor = ev.actor;
        check.request = req.id;
        q.push(check);
        break;
      }
      case SimEvent::responder_arrival: {
        auto rh = request_house.find(ev.request);
        if (rh == request_house.end()) return;
        House& h = houses[rh->second];
        if (h.state == House::burning && h.request == ev.request && ev.t < h.deadline) {
          h.state = House::idle;
          m.houses_saved++;
          TraceRecord& t = rt.note(h.soc, "saved");
          t.actor = rh->second;
          t.request_id = ev.request;
        }
        break;
      }
      case SimEvent::burn_check: {
        House& h = houses[ev.actor];
        if (h.state != House::burning || h.request != ev.request) return;
        h.state = House::burned;
        m.houses_burned_down++;
        TraceRecord& t = rt.note(h.soc, "burned");
        t.actor = ev.actor;
        t.request_id = ev.request;
        if (rt.request(ev.request).state == RequestState::enabled) rt.cancel(ev.request);
        break;
      }
      case SimEvent::son_expire:
        rt.dissolve_son(ev.son_id, ev.t);
        break;
      default:
        break;
    }
  }
};

// --- healthcare ----------------------------------------------------------------

struct HealthcareSim {
  const ScenarioConfig& cfg;
  Runtime rt;
  Metrics m;
  EventQueue q;
  Tick treatment_duration;
  std::vector<RoleDescriptor> roles;
  std::map<RequestId, Tick> arrival_of;
  double wait_sum = 0.0;
  std::set<std::string> scheduled_sons;

  HealthcareSim(const ScenarioConfig& c, Fso fso)
      : cfg(c), rt(std::move(fso), {c.cooperation, nullptr}) {
    m.scenario = "healthcare";
    m.seed = c.seed;
    m.cooperation = c.cooperation;
    m.horizon = c.horizon;
    treatment_duration = c.params.value("treatment_duration", 20);
    roles = roles_from(c.params.value("roles", Json()),
                       {role_of("nurse", {"nursing"}), role_of("physician", {"medicine"})});
  }

  void generate_arrivals() {
    const Json& rates = cfg.params.value("arrival_rates", Json::object());
    const Json& pools = cfg.params.value("patients", Json::object());
    Stream arrivals(cfg.seed, "arrival");
    std::map<SocId, std::size_t> cursor;
    for (Tick t = 0; t < cfg.horizon; ++t) {
      for (auto it = rates.begin(); it != rates.end(); ++it) {
        double rate = it.value().get<double>();
        if (rate < 0.0 || rate > 1.0)
          fail(Errc::precondition, it.key(), "arrival rate must lie in [0,1]");
        if (!arrivals.chance(rate)) continue;
        const Json& pool = pools.value(it.key(), Json::array());
        if (pool.empty()) continue;
        SimEvent ev;
        ev.t = t;
        ev.kind = SimEvent::patient_arrival;
        ev.soc = it.key();
        ev.actor = pool[cursor[it.key()]++ % pool.size()].get<std::string>();
        q.push(ev);
      }
    }
  }

  void absorb_new_sons() {
    for (const auto& [sid, son] : rt.sons()) {
      if (!scheduled_sons.insert(sid).second) continue;
      auto it = arrival_of.find(son.request_id);
      if (it != arrival_of.end()) {
        m.treated++;
        wait_sum += double(son.created_at - it->second);
        TraceRecord& t = rt.note(son.apex, "treated");
        t.request_id = son.request_id;
        t.detail = "wait=" + std::to_string(son.created_at - it->second);
      }
      SimEvent expire;
      expire.t = son.created_at + rt.request(son.request_id).duration;
      expire.kind = SimEvent::son_expire;
      expire.son_id = sid;
      q.push(expire);
    }
  }

  void step(const SimEvent& ev) {
    switch (ev.kind) {
      case SimEvent::patient_arrival: {
        m.patients++;
        rt.note(ev.soc, "patient").actor = ev.actor;
        ServiceRequest req;
        req.id = rt.fresh_request_id();
        req.required_roles = roles;
        req.origin_actor = ev.actor;
        req.origin_soc = ev.soc;
        req.duration = treatment_duration;
        arrival_of[req.id] = ev.t;
        rt.publish(ev.soc, req);
        break;
      }
      case SimEvent::son_expire:
        rt.dissolve_son(ev.son_id, ev.t);
        break;
      default:
        break;
    }
  }
};

// --- falls ----------------------------------------------------------------------

struct FallsSim {
  const ScenarioConfig& cfg;
  Runtime rt;
  Metrics m;
  EventQueue q;
  double p_fp, q_accuracy;
  Tick verify_delay, verify_timeout, response_duration;
  RoleDescriptor verifier_role, responder_role;

  struct Alarm {
    ActorId elderly;
    SocId soc;
    Tick at = 0;
    bool true_fall = false;
    bool verifier_correct = true;
    bool resolved = false;
    RequestId verify_request;
    RequestId respond_request;
  };
  std::vector<Alarm> alarms;
  std::map<RequestId, int> verify_index;
  std::map<RequestId, int> respond_index;
  double response_sum = 0.0;
  std::uint64_t responses = 0;
  std::set<std::string> scheduled_sons;

  FallsSim(const ScenarioConfig& c, Fso fso)
      : cfg(c), rt(std::move(fso), {c.cooperation, nullptr}) {
    m.scenario = "falls";
    m.seed = c.seed;
    m.cooperation = c.cooperation;
    m.horizon = c.horizon;
    p_fp = c.params.value("p_fp", 0.3);
    q_accuracy = c.params.value("q", 0.9);
    for (auto [name, v] : {std::pair<const char*, double>{"p_fp", p_fp}, {"q", q_accuracy}})
      if (v < 0.0 || v > 1.0)
        fail(Errc::precondition, name, std::string(name) + " must lie in [0,1]");
    verify_delay = c.params.value("verify_delay", 2);
    verify_timeout = c.params.value("verify_timeout", 5);
    response_duration = c.params.value("response_duration", 5);
    verifier_role = role_of("verifier", {"verification"});
    responder_role = role_of("responder", {"response"});
  }

  void register_protocols() {
    // The accelerometer protocol lives in every community that hosts elderly.
    RoleProtocol p;
    p.id = "fall-detected";
    p.on_event = "accelerometer-fired";
    RequestTemplate t;
    t.roles = {verifier_role};
    t.duration = verify_delay;
    p.actions = {t};
    std::set<SocId> where;
    for (const auto& [soc, e] : placed_actors(cfg.params.value("elderly", Json::object())))
      where.insert(soc);
    for (const SocId& soc : where) rt.register_protocol(soc, p);
  }

  void generate_alarms() {
    auto placed = placed_actors(cfg.params.value("elderly", Json::object()));
    if (placed.empty()) return;
    Stream alarm_stream(cfg.seed, "alarm");
    Stream verify_stream(cfg.seed, "verify");
    auto push_alarm = [&](Tick t, const std::pair<SocId, ActorId>& who) {
      SimEvent ev;
      ev.t = t;
      ev.kind = SimEvent::alarm;
      ev.soc = who.first;
      ev.actor = who.second;
      ev.index = static_cast<int>(alarms.size());
      Alarm a;
      a.elderly = who.second;
      a.soc = who.first;
      a.at = t;
      a.true_fall = !alarm_stream.chance(p_fp);
      a.verifier_correct = verify_stream.chance(q_accuracy);
      alarms.push_back(a);
      q.push(ev);
    };
    std::uint64_t fixed = cfg.params.value("total_alarms", 0ull);
    if (fixed > 0) {
      for (std::uint64_t i = 0; i < fixed; ++i)
        push_alarm(Tick(i % std::uint64_t(std::max<Tick>(cfg.horizon - verify_timeout - 4, 1))),
                   placed[i % placed.size()]);
    } else {
      double rate = cfg.params.value("alarm_rate", 0.01);
      for (Tick t = 0; t + verify_timeout + 4 <= cfg.horizon; ++t)
        for (const auto& who : placed)
          if (alarm_stream.chance(rate)) push_alarm(t, who);
    }
  }

  void dispatch(int index, Tick t) {
    Alarm& a = alarms[index];
    a.resolved = true;
    m.dispatches++;
    m.alarms_handled++;
    TraceRecord& tr = rt.note(a.soc, "dispatch");
    tr.actor = a.elderly;
    ServiceRequest req;
    req.id = rt.fresh_request_id();
    req.required_roles = {responder_role};
    req.origin_actor = a.elderly;
    req.origin_soc = a.soc;
    req.duration = response_duration;
    a.respond_request = req.id;
    respond_index[req.id] = index;
    rt.publish(a.soc, req);
    (void)t;
  }

  void absorb_new_sons() {
    for (const auto& [sid, son] : rt.sons()) {
      if (!scheduled_sons.insert(sid).second) continue;
      auto vi = verify_index.find(son.request_id);
      if (vi != verify_index.end()) {
        SimEvent reply;
        reply.t = son.created_at + verify_delay;
        reply.kind = SimEvent::verify_reply;
        reply.index = vi->second;
        q.push(reply);
      }
      auto ri = respond_index.find(son.request_id);
      if (ri != respond_index.end()) {
        SimEvent arrive;
        arrive.t = son.created_at + arrival_delay(rt, son, rt.request(son.request_id).origin_soc);
        arrive.kind = SimEvent::responder_arrival;
        arrive.request = son.request_id;
        arrive.index = ri->second;
        q.push(arrive);
      }
      SimEvent expire;
      expire.t = son.created_at + rt.request(son.request_id).duration;
      expire.kind = SimEvent::son_expire;
      expire.son_id = sid;
      q.push(expire);
    }
  }

  void step(const SimEvent& ev) {
    switch (ev.kind) {
      case SimEvent::alarm: {
        Alarm& a = alarms[ev.index];
        m.alarms++;
        if (a.true_fall)
          m.true_falls++;
        else
          m.false_positives++;
        Event fired;
        fired.kind = "accelerometer-fired";
        fired.actor = a.elderly;
        auto effects = rt.publish(a.soc, fired);
        a.verify_request = request_id_from(effects);
        if (!a.verify_request.empty()) verify_index[a.verify_request] = ev.index;

        SimEvent timeout;
        timeout.t = ev.t + verify_timeout;
        timeout.kind = SimEvent::verify_timeout;
        timeout.index = ev.index;
        q.push(timeout);
        break;
      }
      case SimEvent::verify_reply: {
        Alarm& a = alarms[ev.index];
        if (a.resolved) return;
        if (!a.true_fall && a.verifier_correct) {
          a.resolved = true;
          m.verified_dismissals++;
          m.alarms_handled++;
          rt.note(a.soc, "dismiss").actor = a.elderly;
        } else {
          dispatch(ev.index, ev.t);
        }
        break;
      }
      case SimEvent::verify_timeout: {
        Alarm& a = alarms[ev.index];
        if (a.resolved) return;
        // No verdict in time: fail open and dispatch anyway.
        if (!a.verify_request.empty() &&
            rt.request(a.verify_request).state == RequestState::enabled)
          rt.cancel(a.verify_request);
        dispatch(ev.index, ev.t);
        break;
      }
      case SimEvent::responder_arrival: {
        Alarm& a = alarms[ev.index];
        if (a.true_fall) {
          response_sum += double(ev.t - a.at);
          responses++;
          TraceRecord& t = rt.note(a.soc, "respond");
          t.actor = a.elderly;
          t.request_id = ev.request;
        }
        break;
      }
      case SimEvent::son_expire:
        rt.dissolve_son(ev.son_id, ev.t);
        break;
      default:
        break;
    }
  }
};

template <class Sim>
RunResult drive(Sim& sim, const ScenarioConfig& cfg) {
  publish_initial_ads(sim.rt, cfg.params);
  sim.absorb_new_sons();
  while (!sim.q.empty() && sim.q.next_time() <= cfg.horizon) {
    SimEvent ev = sim.q.pop();
    sim.rt.advance_to(ev.t);
    sim.step(ev);
    sim.absorb_new_sons();
  }
  sim.rt.finish(cfg.horizon);
  fill_shared(sim.m, sim.rt);
  return {sim.m, sim.rt.trace()};
}

}  // namespace

RunResult run_scenario(const ScenarioConfig& cfg) {
  Fso fso = build_fso(hierarchy_from_json(cfg.fso_spec));
  switch (cfg.scenario) {
    case ScenarioKind::fire: {
      FireSim sim(cfg, std::move(fso));
      sim.generate_ignitions();
      return drive(sim, cfg);
    }
    case ScenarioKind::healthcare: {
      HealthcareSim sim(cfg, std::move(fso));
      sim.generate_arrivals();
      RunResult out = drive(sim, cfg);
      out.metrics.untreated = out.metrics.patients - out.metrics.treated;
      if (out.metrics.treated > 0)
        out.metrics.mean_wait_ticks = sim.wait_sum / double(out.metrics.treated);
      return out;
    }
    case ScenarioKind::falls: {
      FallsSim sim(cfg, std::move(fso));
      sim.register_protocols();
      sim.generate_alarms();
      RunResult out = drive(sim, cfg);
      if (sim.responses > 0)
        out.metrics.mean_response_ticks = sim.response_sum / double(sim.responses);
      return out;
    }
  }
  fail(Errc::parse, "scenario", "unhandled scenario kind");
}

std::vector<SweepRow> run_sweep(const ScenarioConfig& base, int n_seeds) {
  if (n_seeds < 1) fail(Errc::precondition, "seeds", "a sweep needs at least one seed");
  std::vector<SweepRow> rows;
  for (int i = 0; i < n_seeds; ++i) {
    ScenarioConfig cfg = base;
    cfg.seed = base.seed + std::uint64_t(i);
    SweepRow row;
    row.seed = cfg.seed;
    cfg.cooperation = true;
    row.with_cooperation = run_scenario(cfg).metrics;
    cfg.cooperation = false;
    row.without_cooperation = run_scenario(cfg).metrics;
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace fso
