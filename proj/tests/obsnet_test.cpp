#include <random>

#include "doctest.h"
#include "eventrec/error.hpp"
#include "eventrec/obsnet.hpp"

using namespace eventrec;
using namespace eventrec::obsnet;

namespace {

EventDescriptor ev(const std::string& id, const std::string& sess,
                   double s, double e) {
  EventDescriptor d;
  d.id = id;
  d.session_id = sess;
  d.zone_id = "room";
  d.start = s;
  d.end = e;
  d.contexts = {"c"};
  return d;
}

bool same_participation(const EventParticipationNetwork& x,
                        const EventParticipationNetwork& y) {
  return x.users == y.users && x.edges == y.edges &&
         x.events.size() == y.events.size();
}

}  // namespace

TEST_CASE("participation network has the bipartite fixture shape") {
  // 4 users, 6 events over 2 slots, duration-weighted edges
  std::vector<EventDescriptor> schedule;
  for (int s = 0; s < 2; ++s)
    for (int i = 0; i < 3; ++i)
      schedule.push_back(ev("e" + std::to_string(s * 3 + i),
                            "s" + std::to_string(s), s * 4000.0,
                            s * 4000.0 + 3000));
  std::vector<ParticipationRecord> records = {
      {"u1", "e0", 3000}, {"u1", "e3", 1500}, {"u2", "e0", 2000},
      {"u2", "e4", 2500}, {"u3", "e1", 3000}, {"u3", "e5", 700},
      {"u4", "e2", 900},  {"u4", "e3", 800},
  };
  auto net = build_participation_network(records, schedule);
  CHECK(net.users.size() == 4);
  CHECK(net.events.size() == 6);
  CHECK(net.edge_count() == 8);
  CHECK(net.edge_weight("u1", "e0") == 3000);
  CHECK(net.edge_weight("u4", "e3") == 800);
  CHECK(net.edge_weight("u1", "e5") == 0);
  // bipartite by construction: every edge endpoint pair is (user, event)
  for (const auto& [user, row] : net.edges) {
    CHECK(net.users.count(user) == 1);
    for (const auto& [event, w] : row) {
      CHECK(net.events.count(event) == 1);
      CHECK(w > 0);
    }
  }
}

TEST_CASE("participation network keeps event nodes without records") {
  std::vector<EventDescriptor> schedule = {ev("e0", "s0", 0, 3000),
                                           ev("e1", "s0", 0, 3000)};
  auto net = build_participation_network({}, schedule);
  CHECK(net.users.empty());
  CHECK(net.events.size() == 2);
  CHECK(net.edge_count() == 0);
}

TEST_CASE("duplicate participation rows sum into one edge") {
  std::vector<EventDescriptor> schedule = {ev("e0", "s0", 0, 3000)};
  auto net = build_participation_network({{"u", "e0", 1000}, {"u", "e0", 450}},
                                         schedule);
  CHECK(net.edge_count() == 1);
  CHECK(net.edge_weight("u", "e0") == 1450);
}

TEST_CASE("a record naming an unknown event is a hard error") {
  std::vector<EventDescriptor> schedule = {ev("e0", "s0", 0, 3000)};
  CHECK_THROWS_AS(build_participation_network({{"u", "ghost", 100}}, schedule),
                  DataError);
}

TEST_CASE("proximity network keeps parallel edges") {
  std::vector<EncounterRecord> records = {
      {"a", "b", 600, 0}, {"a", "b", 600, 1000}, {"a", "b", 600, 2000}};
  auto net = build_proximity_network(records);
  CHECK(net.users.size() == 2);
  CHECK(net.edges.size() == 3);
  CHECK(net.total_weight() == 1800);
}

TEST_CASE("proximity multiplicities follow the records") {
  std::vector<EncounterRecord> records = {{"a", "b", 300, 0},
                                          {"a", "b", 300, 400},
                                          {"a", "b", 300, 800},
                                          {"c", "d", 200, 0},
                                          {"c", "d", 200, 300}};
  auto net = build_proximity_network(records);
  int ab = 0, cd = 0;
  for (const auto& e : net.edges) {
    if (e.user_a == "a" && e.user_b == "b") ++ab;
    if (e.user_a == "c" && e.user_b == "d") ++cd;
  }
  CHECK(ab == 3);
  CHECK(cd == 2);
  CHECK(net.total_weight() == 1300);
}

TEST_CASE("proximity network without records is edgeless") {
  auto net = build_proximity_network({}, {"a", "b"});
  CHECK(net.edges.empty());
  CHECK(net.users == std::set<std::string>{"a", "b"});
}

TEST_CASE("a self-pair encounter is a hard error") {
  CHECK_THROWS_AS(build_proximity_network({{"a", "a", 300, 0}}), DataError);
}

TEST_CASE("merging an empty slice changes nothing") {
  std::vector<EventDescriptor> schedule = {ev("e0", "s0", 0, 3000)};
  ObservedNetworks base;
  TimeSlice s1;
  s1.index = 1;
  s1.events = schedule;
  s1.participation = {{"u", "e0", 500}};
  s1.encounters = {{"a", "b", 300, 0}};
  auto after1 = merge_slice(base, s1);

  TimeSlice s2;  // no records at all
  s2.index = 2;
  auto after2 = merge_slice(after1, s2);
  CHECK(same_participation(after1.participation, after2.participation));
  CHECK(after2.proximity.edges.size() == after1.proximity.edges.size());
  CHECK(after2.last_slice == 2);
}

TEST_CASE("iterated merges equal the one-shot batch build") {
  std::vector<EventDescriptor> schedule;
  std::vector<ParticipationRecord> participation;
  std::vector<EncounterRecord> encounters;
  for (int s = 0; s < 4; ++s) {
    for (int i = 0; i < 2; ++i) {
      std::string id = "e" + std::to_string(s * 2 + i);
      schedule.push_back(ev(id, "s" + std::to_string(s), s * 4000.0,
                            s * 4000.0 + 3000));
      participation.push_back({"u" + std::to_string(i), id, 1000.0 + 10 * s});
    }
    encounters.push_back({"u0", "u1", 200.0 + s, s * 4000.0});
  }

  auto batch = build_participation_network(participation, schedule);
  auto batch_prox = build_proximity_network(encounters);

  ObservedNetworks inc;
  for (int s = 0; s < 4; ++s) {
    TimeSlice slice;
    slice.index = s + 1;
    slice.events = {schedule[s * 2], schedule[s * 2 + 1]};
    slice.participation = {participation[s * 2], participation[s * 2 + 1]};
    slice.encounters = {encounters[s]};
    inc = merge_slice(inc, slice);
  }
  CHECK(same_participation(inc.participation, batch));
  REQUIRE(inc.proximity.edges.size() == batch_prox.edges.size());
  CHECK(inc.proximity.total_weight() == batch_prox.total_weight());
}

TEST_CASE("random partitions into slices also equal the batch build") {
  std::mt19937 rng(7);
  std::vector<EventDescriptor> schedule;
  std::vector<ParticipationRecord> records;
  for (int i = 0; i < 12; ++i) {
    std::string id = "e" + std::to_string(i);
    schedule.push_back(ev(id, "s" + std::to_string(i / 3), i * 1000.0,
                          i * 1000.0 + 900));
    records.push_back({"u" + std::to_string(i % 5), id, 200.0 + i});
  }
  auto batch = build_participation_network(records, schedule);

  for (int trial = 0; trial < 5; ++trial) {
    // split [0,12) into 3 ordered chunks at random cut points
    std::uniform_int_distribution<int> cut(0, 12);
    int c1 = cut(rng), c2 = cut(rng);
    if (c2 < c1) std::swap(c1, c2);
    std::vector<std::pair<int, int>> chunks = {{0, c1}, {c1, c2}, {c2, 12}};
    ObservedNetworks inc;
    int index = 0;
    for (auto [lo, hi] : chunks) {
      TimeSlice slice;
      slice.index = ++index;
      for (int i = lo; i < hi; ++i) {
        slice.events.push_back(schedule[i]);
        slice.participation.push_back(records[i]);
      }
      // every slice carries the full schedule tail so event nodes match
      if (hi == 12)
        for (const auto& e : schedule) slice.events.push_back(e);
      inc = merge_slice(inc, slice);
    }
    CHECK(same_participation(inc.participation, batch));
  }
}

TEST_CASE("a non-monotone slice index is rejected") {
  ObservedNetworks base;
  TimeSlice s1;
  s1.index = 1;
  base = merge_slice(base, s1);
  TimeSlice wrong;
  wrong.index = 1;  // replay
  CHECK_THROWS_AS(merge_slice(base, wrong), DataError);
  TimeSlice jump;
  jump.index = 5;  // skip
  CHECK_THROWS_AS(merge_slice(base, jump), DataError);
}

TEST_CASE("proximity weight is conserved through merges") {
  std::vector<EncounterRecord> all = {{"a", "b", 300, 0},
                                      {"a", "c", 400, 100},
                                      {"b", "c", 500, 200}};
  ObservedNetworks inc;
  double expected = 0;
  int index = 0;
  for (const auto& r : all) {
    TimeSlice slice;
    slice.index = ++index;
    slice.encounters = {r};
    inc = merge_slice(inc, slice);
    expected += r.duration;
  }
  CHECK(inc.proximity.total_weight() == expected);
}
