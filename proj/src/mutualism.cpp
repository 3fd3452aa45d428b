#include "fso/mutualism.hpp"

#include <algorithm>

namespace fso {

BehaviorId SocialAction::apply(const BehaviorId& b) const {
  auto it = mapping.find(b);
  if (it == mapping.end())
    fail(Errc::unknown_id, b, "behavior '" + b + "' is not in the action's domain");
  return it->second;
}

BehaviorId SocialAction::invert(const BehaviorId& c) const {
  for (const auto& [b, image] : mapping)
    if (image == c) return b;
  fail(Errc::unknown_id, c, "behavior '" + c + "' is not in the action's range");
}

void validate_action(const SocialAction& a, const BehaviorSystem& domain,
                     const BehaviorSystem& range) {
  if (a.domain != domain.id || a.range != range.id)
    fail(Errc::mismatch, a.domain,
         "action connects '" + a.domain + "'->'" + a.range + "', got systems '" + domain.id +
             "'/'" + range.id + "'");
  if (domain.behaviors.size() != range.behaviors.size())
    fail(Errc::mismatch, a.domain, "behavior sets of '" + domain.id + "' and '" + range.id +
                                       "' differ in size; no bijection exists");
  std::set<BehaviorId> images;
  for (const BehaviorId& b : domain.behaviors) {
    auto it = a.mapping.find(b);
    if (it == a.mapping.end())
      fail(Errc::parse, b, "action map misses domain behavior '" + b + "'");
    if (!range.behaviors.count(it->second))
      fail(Errc::parse, it->second,
           "image '" + it->second + "' is not a behavior of '" + range.id + "'");
    if (!images.insert(it->second).second)
      fail(Errc::parse, it->second, "duplicate image '" + it->second + "' breaks bijectivity");
  }
  if (a.mapping.size() != domain.behaviors.size())
    fail(Errc::parse, a.domain, "action map mentions behaviors outside '" + domain.id + "'");
}

int evaluate(const BehaviorSystem& s, const BehaviorId& b) {
  auto it = s.evaluation.find(b);
  if (it == s.evaluation.end())
    fail(Errc::parse, b, "system '" + s.id + "' does not evaluate behavior '" + b + "'");
  if (it->second < -1 || it->second > 1)
    fail(Errc::parse, b, "evaluation of '" + b + "' outside {-1,0,1}");
  return it->second;
}

std::optional<MpWitness> check_mp(const BehaviorSystem& domain, const BehaviorSystem& range,
                                  const SocialAction& sigma) {
  validate_action(sigma, domain, range);
  std::optional<BehaviorId> forward;
  for (const BehaviorId& b : domain.behaviors) {
    if (evaluate(domain, b) >= 0 && evaluate(range, sigma.apply(b)) > 0) {
      forward = b;
      break;
    }
  }
  if (!forward) return std::nullopt;
  for (const BehaviorId& c : range.behaviors) {
    if (evaluate(range, c) >= 0 && evaluate(domain, sigma.invert(c)) > 0)
      return MpWitness{*forward, c};
  }
  return std::nullopt;
}

std::map<BehaviorId, BehaviorId> compose_sigma(const std::vector<SocialAction>& chain, int i) {
  int t = static_cast<int>(chain.size());
  if (i > t || i < -t)
    fail(Errc::precondition, std::to_string(i), "composite index out of range");
  for (int k = 0; k + 1 < t; ++k)
    if (chain[k].range != chain[k + 1].domain)
      fail(Errc::mismatch, chain[k].range,
           "link " + std::to_string(k) + " ends at '" + chain[k].range +
               "' but link " + std::to_string(k + 1) + " starts at '" + chain[k + 1].domain + "'");

  std::map<BehaviorId, BehaviorId> out;
  if (i >= 0) {
    if (t == 0) return out;
    for (const auto& [b, img] : chain.front().mapping) {
      BehaviorId cur = b;
      for (int k = 0; k < i; ++k) cur = chain[k].apply(cur);
      out[b] = cur;
    }
  } else {
    for (const auto& [b, img] : chain.back().mapping) {
      BehaviorId cur = img;
      BehaviorId start = cur;
      for (int k = 0; k < -i; ++k) cur = chain[t - 1 - k].invert(cur);
      out[start] = cur;
    }
  }
  return out;
}

std::optional<ChainWitness> check_chain_mp(const std::vector<BehaviorSystem>& systems,
                                           const std::vector<SocialAction>& links) {
  if (systems.size() < 2)
    fail(Errc::precondition, "", "a chain needs at least two systems");
  if (links.size() + 1 != systems.size())
    fail(Errc::mismatch, "", "a chain over n systems needs n-1 actions");
  int t = static_cast<int>(links.size());
  for (int k = 0; k < t; ++k) validate_action(links[k], systems[k], systems[k + 1]);

  std::optional<BehaviorId> forward;
  for (const BehaviorId& b : systems.front().behaviors) {
    BehaviorId cur = b;
    bool ok = true;
    for (int i = 0; i < t; ++i) {
      if (evaluate(systems[i], cur) < 0) {
        ok = false;
        break;
      }
      cur = links[i].apply(cur);
    }
    if (ok && evaluate(systems[t], cur) > 0) {
      forward = b;
      break;
    }
  }
  if (!forward) return std::nullopt;

  // Dual direction, walking inverses from the last system; at one link this
  // is exactly the backward half of check_mp.
  for (const BehaviorId& c : systems.back().behaviors) {
    BehaviorId cur = c;
    bool ok = true;
    for (int i = 0; i < t; ++i) {
      if (evaluate(systems[t - i], cur) < 0) {
        ok = false;
        break;
      }
      cur = links[t - 1 - i].invert(cur);
    }
    if (ok && evaluate(systems.front(), cur) > 0) return ChainWitness{*forward, c};
  }
  return std::nullopt;
}

std::vector<TranslucenceNotice> translucence_set(const Fso& f,
                                                 const std::vector<ActorId>& participants,
                                                 const std::string& witness) {
  std::vector<TranslucenceNotice> out;
  if (participants.empty()) return out;

  std::set<SocId> homes;
  for (const ActorId& a : participants) {
    auto it = f.actor_home.find(a);
    if (it == f.actor_home.end())
      fail(Errc::unknown_id, a, "participant '" + a + "' is not in the organization");
    homes.insert(it->second);
  }

  // Communities on the paths joining the participants' homes to their lowest
  // common ancestor; engines of the non-home ones relay the awareness.
  std::vector<SocId> apex_path = escalation_path(f, *homes.begin());
  std::set<SocId> apex_set(apex_path.begin(), apex_path.end());
  for (const SocId& h : homes) {
    std::set<SocId> keep;
    for (const SocId& s : escalation_path(f, h))
      if (apex_set.count(s)) keep.insert(s);
    apex_set = keep;
  }
  SocId apex;
  int best = -1;
  for (const SocId& s : apex_set) {
    int d = depth_of(f, s);
    if (d > best) {
      best = d;
      apex = s;
    }
  }

  std::set<SocId> span;
  for (const SocId& h : homes)
    for (const SocId& s : escalation_path(f, h)) {
      span.insert(s);
      if (s == apex) break;
    }

  std::set<ActorId> sorted(participants.begin(), participants.end());
  for (const ActorId& a : sorted)
    out.push_back({a, f.actor_home.at(a), false, witness});
  for (const SocId& s : span) {
    if (homes.count(s)) continue;
    out.push_back({f.soc(s).engine, s, true, witness});
  }
  return out;
}

}  // namespace fso
