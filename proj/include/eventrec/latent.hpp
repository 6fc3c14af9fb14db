#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "eventrec/obsnet.hpp"
#include "eventrec/types.hpp"

namespace eventrec::latent {

// Ordered context universe plus the event -> contexts mapping, taken from
// the schedule. An event without contexts is rejected here, so downstream
// scoring never sees one.
struct ContextCatalog {
  std::vector<std::string> contexts;  // sorted unique
  std::map<std::string, std::vector<std::string>> event_contexts;

  bool has_context(const std::string& c) const;
};

ContextCatalog build_catalog(const std::vector<EventDescriptor>& schedule);

// Per-user, per-context participation counts (PF) and times (PT), plus each
// context's total scheduled time. A multi-context event credits its full
// duration to every context it carries.
struct ContextStats {
  std::vector<std::string> users;     // sorted
  std::vector<std::string> contexts;  // catalog order
  std::map<std::string, std::map<std::string, int>> pf;
  std::map<std::string, std::map<std::string, double>> pt;
  // context -> summed scheduled duration of the training events carrying it
  std::map<std::string, double> total_session_time;
};

ContextStats context_stats(const obsnet::EventParticipationNetwork& network,
                           const ContextCatalog& catalog);

// Preference matrix: z_ij = min(1, PT_ij / total_session_time_j), 0 when the
// context has no scheduled time (warned).
struct PreferenceMatrix {
  std::vector<std::string> users;     // sorted
  std::vector<std::string> contexts;  // catalog order
  std::map<std::string, std::map<std::string, double>> z;

  // 0 for unknown users/contexts: a cold user simply has no preferences yet.
  double at(const std::string& user, const std::string& context) const;
  // dense row in `contexts` order
  std::vector<double> row(const std::string& user) const;
};

PreferenceMatrix latent_preferences(const ContextStats& stats,
                                    Warnings* warnings = nullptr);

// Adjusted-cosine similarity: per-user means over all d contexts are
// subtracted first; result in [-1,1]. nullopt when either centered vector
// has zero norm (flat preferences carry no collaborative signal).
std::optional<double> adjusted_cosine(const std::vector<double>& zi,
                                      const std::vector<double>& zj);

// Maps raw similarity in [-1,1] onto [0,1]: 1 - acos(raw)/pi. Strictly
// increasing; -1 -> 0, 0 -> 0.5, 1 -> 1 exactly.
double normalize_similarity(double raw);

// Normalized adjusted-cosine, or nullopt when undefined.
std::optional<double> preference_similarity(const std::vector<double>& zi,
                                            const std::vector<double>& zj);

// All defined pairwise similarities: user -> (other -> lambda). Symmetric.
using AllPairsSimilarity = std::map<std::string, std::map<std::string, double>>;

AllPairsSimilarity all_pairs_similarity(const PreferenceMatrix& prefs);

// Directed KNN graph over normalized similarity: each user keeps edges to
// its K highest-lambda defined-similarity peers, ties by ascending user id.
struct SimilarityNetwork {
  std::set<std::string> users;
  // user -> (neighbor -> lambda), out-degree <= K
  std::map<std::string, std::map<std::string, double>> out;
};

SimilarityNetwork build_similarity_network(const PreferenceMatrix& prefs,
                                           int k_neighbors,
                                           Warnings* warnings = nullptr);

// Weighted Jaccard of the two users' duration profiles on common events over
// their combined totals. 0 when the denominator is 0.
double attendance_relevancy(const obsnet::EventParticipationNetwork& network,
                            const std::string& user_a,
                            const std::string& user_b);

struct RelevancyEdge {
  std::string user_a;  // canonical, user_a < user_b
  std::string user_b;
  double mu = 0;  // in [0,1]
};

// One edge per user pair sharing at least one event, weighted mu. Not
// thresholded; co-attendee classification happens on top.
struct RelevancyNetwork {
  std::set<std::string> users;
  std::vector<RelevancyEdge> edges;  // sorted by (user_a, user_b)
  std::map<std::string, std::map<std::string, double>> neighbors;
};

RelevancyNetwork build_relevancy_network(
    const obsnet::EventParticipationNetwork& network);

// Pairs with mu >= min_relevancy (inclusive).
std::set<UserPair> classify_co_attendees(const RelevancyNetwork& network,
                                         double min_relevancy);

struct EncounterStat {
  int frequency = 0;  // EF: parallel-edge count
  double time = 0;    // ET: summed duration, seconds
};

std::map<UserPair, EncounterStat> encounter_stats(
    const obsnet::PhysicalProximityNetwork& network);

struct EncounterEdge {
  std::string user_a;  // canonical
  std::string user_b;
  int frequency = 0;
  double time = 0;

  double weight(EncounterMode mode) const {
    return mode == EncounterMode::frequency ? frequency : time;
  }
};

// Aggregated encounter graph; the mode tags which weight is live.
struct EncounterNetwork {
  EncounterMode mode = EncounterMode::frequency;
  std::set<std::string> users;
  std::vector<EncounterEdge> edges;  // sorted by (user_a, user_b)
};

EncounterNetwork build_encounter_network(
    const obsnet::PhysicalProximityNetwork& network, EncounterMode mode);

// frequency mode: EF >= delta; time mode: ET >= theta. Both inclusive.
std::set<UserPair> classify_friends(const EncounterNetwork& network,
                                    const RelationThresholds& thresholds);

}  // namespace eventrec::latent
