#include "eventrec/obsnet.hpp"

#include <string>

#include "eventrec/error.hpp"

namespace eventrec::obsnet {

double EventParticipationNetwork::edge_weight(const std::string& user,
                                              const std::string& event) const {
  auto it = edges.find(user);
  if (it == edges.end()) return 0;
  auto jt = it->second.find(event);
  return jt == it->second.end() ? 0 : jt->second;
}

std::size_t EventParticipationNetwork::edge_count() const {
  std::size_t n = 0;
  for (const auto& [user, row] : edges) n += row.size();
  return n;
}

double PhysicalProximityNetwork::total_weight() const {
  double sum = 0;
  for (const auto& e : edges) sum += e.weight;
  return sum;
}

EventParticipationNetwork build_participation_network(
    const std::vector<ParticipationRecord>& records,
    const std::vector<EventDescriptor>& schedule) {
  EventParticipationNetwork net;
  for (const auto& ev : schedule) net.events.emplace(ev.id, ev);
  for (const auto& rec : records) {
    if (!net.events.count(rec.event_id))
      throw DataError("participation record references event '" +
                      rec.event_id + "' missing from the schedule");
    if (!(rec.duration > 0))
      throw DataError("participation record for user '" + rec.user_id +
                      "' has non-positive duration");
    net.users.insert(rec.user_id);
    net.edges[rec.user_id][rec.event_id] += rec.duration;
  }
  return net;
}

PhysicalProximityNetwork build_proximity_network(
    const std::vector<EncounterRecord>& records,
    const std::set<std::string>& user_universe) {
  PhysicalProximityNetwork net;
  net.users = user_universe;
  for (const auto& rec : records) {
    if (rec.user_a == rec.user_b)
      throw DataError("encounter record pairs user '" + rec.user_a +
                      "' with itself");
    if (!(rec.duration > 0))
      throw DataError("encounter record for pair (" + rec.user_a + ", " +
                      rec.user_b + ") has non-positive duration");
    auto pair = make_user_pair(rec.user_a, rec.user_b);
    net.users.insert(pair.first);
    net.users.insert(pair.second);
    net.edges.push_back({pair.first, pair.second, rec.duration});
  }
  return net;
}

ObservedNetworks merge_slice(const ObservedNetworks& prev,
                             const TimeSlice& slice) {
  if (slice.index != prev.last_slice + 1)
    throw DataError("time slice " + std::to_string(slice.index) +
                    " does not follow slice " +
                    std::to_string(prev.last_slice));

  ObservedNetworks next = prev;
  next.last_slice = slice.index;
  next.participation.last_slice = slice.index;
  next.proximity.last_slice = slice.index;

  for (const auto& ev : slice.events)
    next.participation.events.emplace(ev.id, ev);
  for (const auto& rec : slice.participation) {
    if (!next.participation.events.count(rec.event_id))
      throw DataError("slice " + std::to_string(slice.index) +
                      " references event '" + rec.event_id +
                      "' missing from the accumulated schedule");
    if (!(rec.duration > 0))
      throw DataError("slice participation record for user '" + rec.user_id +
                      "' has non-positive duration");
    next.participation.users.insert(rec.user_id);
    next.participation.edges[rec.user_id][rec.event_id] += rec.duration;
  }

  for (const auto& rec : slice.encounters) {
    if (rec.user_a == rec.user_b)
      throw DataError("slice encounter record pairs user '" + rec.user_a +
                      "' with itself");
    auto pair = make_user_pair(rec.user_a, rec.user_b);
    next.proximity.users.insert(pair.first);
    next.proximity.users.insert(pair.second);
    next.proximity.edges.push_back({pair.first, pair.second, rec.duration});
  }
  return next;
}

}  // namespace eventrec::obsnet
