#pragma once

#include <string>
#include <utility>
#include <vector>

namespace eventrec {

// Non-fatal diagnostics collected by operations that can degrade gracefully.
using Warnings = std::vector<std::string>;

// Canonical unordered user pair: first < second.
using UserPair = std::pair<std::string, std::string>;

inline UserPair make_user_pair(std::string a, std::string b) {
  if (b < a) std::swap(a, b);
  return {std::move(a), std::move(b)};
}

// One sessionized stay of a user inside a zone (room or common area).
struct PresenceInterval {
  std::string user_id;
  std::string zone_id;
  double start = 0;  // unix seconds
  double end = 0;    // unix seconds, > start
};

// One user's attendance of one prescheduled event, aggregated.
struct ParticipationRecord {
  std::string user_id;
  std::string event_id;
  double duration = 0;  // seconds, > 0
};

// One co-presence of a user pair in a common area. Pair is canonical
// (user_a < user_b).
struct EncounterRecord {
  std::string user_a;
  std::string user_b;
  double duration = 0;  // seconds, > 0
  double start = 0;     // unix seconds
};

// A prescheduled event: talk, keynote, ... held in one room for one slot.
struct EventDescriptor {
  std::string id;
  std::string session_id;
  std::string zone_id;
  double start = 0;
  double end = 0;
  std::vector<std::string> contexts;

  double scheduled_duration() const { return end - start; }
};

struct CleansingConfig {
  double min_participation_duration = 180.0;  // seconds
  int min_participation_count = 3;            // distinct events per user
  double min_encounter_duration = 180.0;      // seconds

  void validate() const;  // all values > 0
};

enum class EncounterMode { frequency, time };

struct RelationThresholds {
  int k_neighbors = 6;             // K, like-minded peer count
  double relevancy = 0.4;          // phi, co-attendee cut on mu
  int encounter_frequency = 6;     // delta, friend cut on EF
  double encounter_time = 1800.0;  // theta, friend cut on ET (seconds)

  void validate() const;
};

struct LbpParams {
  double damping = 0.5;     // weight kept on the previous message, in [0,1)
  double tolerance = 1e-6;  // stop when max absolute message change <= this
  int max_iterations = 200;

  void validate() const;
};

// Which pairwise factor families enter the factor graph, and the agreement
// level of the friend-constraint table.
struct FactorOptions {
  bool use_correlation = true;       // co-attendee factors
  bool use_constraint = true;        // friend factors
  double constraint_strength = 0.7;  // agreement entry of the friend table
};

// All factor entries are clamped into [kFactorEpsilon, 1 - kFactorEpsilon]
// so no assignment gets exactly zero mass.
inline constexpr double kFactorEpsilon = 1e-4;

}  // namespace eventrec
