#pragma once

#include <map>
#include <set>
#include <vector>

#include "eventrec/types.hpp"

namespace eventrec::obsnet {

// Bipartite user-event network. One edge per (user, event); repeated
// participation rows sum into the edge weight.
struct EventParticipationNetwork {
  std::set<std::string> users;
  std::map<std::string, EventDescriptor> events;  // id -> descriptor
  // user -> event -> summed attendance duration (seconds)
  std::map<std::string, std::map<std::string, double>> edges;
  int last_slice = 0;

  bool has_user(const std::string& user) const { return users.count(user) > 0; }
  double edge_weight(const std::string& user, const std::string& event) const;
  std::size_t edge_count() const;
};

struct ProximityEdge {
  std::string user_a;  // canonical, user_a < user_b
  std::string user_b;
  double weight = 0;  // encounter duration, seconds
};

// User-user network. A pair may carry multiple parallel edges, one per
// encounter record.
struct PhysicalProximityNetwork {
  std::set<std::string> users;
  std::vector<ProximityEdge> edges;
  int last_slice = 0;

  double total_weight() const;
};

// Everything observed during one session slot.
struct TimeSlice {
  int index = 0;  // must be previous slice index + 1
  std::vector<EventDescriptor> events;
  std::vector<ParticipationRecord> participation;
  std::vector<EncounterRecord> encounters;
};

// Event nodes come from the whole schedule window, user nodes from the
// records. Records referencing an event outside the schedule are a hard
// error.
EventParticipationNetwork build_participation_network(
    const std::vector<ParticipationRecord>& records,
    const std::vector<EventDescriptor>& schedule);

// One parallel edge per record, input order preserved. user_universe adds
// users that should exist as nodes even without encounters.
PhysicalProximityNetwork build_proximity_network(
    const std::vector<EncounterRecord>& records,
    const std::set<std::string>& user_universe = {});

struct ObservedNetworks {
  EventParticipationNetwork participation;
  PhysicalProximityNetwork proximity;
  int last_slice = 0;
};

// Union-merge of one slice into the accumulated networks. Iterated merges
// over any ordered partition of the records equal the one-shot batch build.
ObservedNetworks merge_slice(const ObservedNetworks& prev,
                             const TimeSlice& slice);

}  // namespace eventrec::obsnet
