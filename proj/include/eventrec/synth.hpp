#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "eventrec/eval.hpp"
#include "eventrec/types.hpp"

namespace eventrec::synth {

// Planted-community scenario: `groups` user groups with disjoint context
// blocks, one event per group in every session (so a session has exactly
// `groups` parallel events). Warm users attend their group's event each
// session (flipped to a random other event with probability `noise`); the
// trailing cold_fraction of each group sits out the training window entirely
// and is tied back in through planted encounters with warm group mates.
struct GeneratorSpec {
  int groups = 2;
  int users_per_group = 20;
  int contexts_per_group = 1;
  int sessions = 8;
  int training_sessions = 6;   // leading sessions; the rest are the test set
  double noise = 0.0;          // per (user, session) off-script probability
  double cold_fraction = 0.0;  // trailing fraction of each group
  int friends_per_cold = 2;    // planted warm partners per cold user
  int encounters_per_friendship = 6;
  double encounter_duration = 350.0;  // seconds per planted encounter
  double event_duration = 3000.0;     // scheduled seconds per event
  double attend_fraction = 0.9;       // attended share of the event
  std::uint64_t seed = 0;

  void validate() const;  // ConfigError on infeasible combinations
};

struct Bundle {
  std::vector<EventDescriptor> schedule;
  std::vector<ParticipationRecord> participation;  // training + test windows
  std::vector<EncounterRecord> encounters;         // training window
  eval::GroundTruth truth;                         // from test participation
  double split_time = 0;  // end of the last training session

  // analytic facts the generator is the oracle for
  std::map<std::string, int> group_of;
  std::set<std::string> cold_users;
  std::vector<std::vector<std::string>> group_contexts;  // per group
};

// Deterministic in spec (seed included). Event ids rotate across room slots
// session by session, so id-order tie-breaking favors each group equally
// often whenever the test-session count divides by `groups`.
Bundle generate(const GeneratorSpec& spec);

}  // namespace eventrec::synth
