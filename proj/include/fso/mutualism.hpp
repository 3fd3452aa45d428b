#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "fso/core.hpp"
#include "fso/topology.hpp"

namespace fso {

using BehaviorId = std::string;

/// A social system with a finite behavior set and a total evaluation of each
/// behavior as beneficial (+1), insignificant (0), or disadvantageous (-1).
struct BehaviorSystem {
  std::string id;
  std::set<BehaviorId> behaviors;
  std::map<BehaviorId, int> evaluation;
};

/// A bijection mapping behaviors of the domain system onto the behaviors the
/// range system experiences.
struct SocialAction {
  std::string domain;
  std::string range;
  std::map<BehaviorId, BehaviorId> mapping;

  BehaviorId apply(const BehaviorId& b) const;
  BehaviorId invert(const BehaviorId& c) const;
};

/// Rejects non-total, non-injective, or mismatched action maps.
void validate_action(const SocialAction& a, const BehaviorSystem& domain,
                     const BehaviorSystem& range);

/// Witness pair for the mutualistic precondition: a domain behavior that is
/// neutral-or-positive at home and strictly positive across the action, and
/// the dual behavior on the range side.
struct MpWitness {
  BehaviorId forward_behavior;
  BehaviorId backward_behavior;
};

struct ChainWitness {
  BehaviorId forward_behavior;   ///< in the first system
  BehaviorId backward_behavior;  ///< in the last system
};

int evaluate(const BehaviorSystem& s, const BehaviorId& b);

/// First witnesses in lexicographic behavior order, or nothing.
std::optional<MpWitness> check_mp(const BehaviorSystem& domain, const BehaviorSystem& range,
                                  const SocialAction& sigma);

/// i-fold composite along the chain: i >= 0 maps behaviors of the first
/// system forward; i < 0 walks |i| links backward from the last system using
/// per-link inverses. i = 0 is the identity on the first system.
std::map<BehaviorId, BehaviorId> compose_sigma(const std::vector<SocialAction>& chain, int i);

/// Chain form of the precondition over systems S_0..S_t (t >= 1). The
/// forward condition keeps every intermediate image neutral-or-positive and
/// the final image strictly positive; the backward condition mirrors it from
/// the last system using inverses, so a single link reduces exactly to
/// check_mp.
std::optional<ChainWitness> check_chain_mp(const std::vector<BehaviorSystem>& systems,
                                           const std::vector<SocialAction>& links);

/// One awareness record per participant, plus one per engine relaying between
/// the participants' communities.
struct TranslucenceNotice {
  ActorId target;
  SocId soc;
  bool relay = false;
  std::string witness;
};

std::vector<TranslucenceNotice> translucence_set(const Fso& f,
                                                 const std::vector<ActorId>& participants,
                                                 const std::string& witness);

}  // namespace fso
