#include <algorithm>
#include <cmath>
#include <limits>

#include "doctest.h"
#include "eventrec/ingest.hpp"

using namespace eventrec;
using namespace eventrec::ingest;

namespace {

RawRead rr(const char* u, const char* z, double t) { return {u, z, t}; }

PresenceInterval pi(const char* u, const char* z, double s, double e) {
  return {u, z, s, e};
}

EventDescriptor ev(const char* id, const char* sess, const char* zone,
                   double s, double e) {
  EventDescriptor d;
  d.id = id;
  d.session_id = sess;
  d.zone_id = zone;
  d.start = s;
  d.end = e;
  d.contexts = {"c"};
  return d;
}

}  // namespace

TEST_CASE("sessionize merges reads within the gap") {
  std::vector<RawRead> rows = {rr("u", "z", 0), rr("u", "z", 60),
                               rr("u", "z", 120)};
  auto ivs = sessionize(rows, 120.0);
  REQUIRE(ivs.size() == 1);
  CHECK(ivs[0].user_id == "u");
  CHECK(ivs[0].zone_id == "z");
  CHECK(ivs[0].start == 0);
  CHECK(ivs[0].end == 180);  // last read + gap/2
}

TEST_CASE("sessionize splits on gaps larger than the threshold") {
  std::vector<RawRead> rows = {rr("u", "z", 0), rr("u", "z", 300)};
  auto ivs = sessionize(rows, 120.0);
  REQUIRE(ivs.size() == 2);
  CHECK(ivs[0].start == 0);
  CHECK(ivs[0].end == 60);
  CHECK(ivs[1].start == 300);
  CHECK(ivs[1].end == 360);
}

TEST_CASE("sessionize keeps zones and users apart") {
  std::vector<RawRead> rows = {rr("u", "z1", 0), rr("u", "z2", 60),
                               rr("v", "z1", 0)};
  auto ivs = sessionize(rows, 120.0);
  CHECK(ivs.size() == 3);
}

TEST_CASE("sessionize is order-insensitive and rejects bad rows") {
  std::vector<RawRead> rows = {rr("u", "z", 120), rr("u", "z", 0),
                               rr("", "z", 50),  rr("u", "", 50),
                               rr("u", "z", std::numeric_limits<double>::quiet_NaN()),
                               rr("u", "z", 60)};
  CleansingReport report;
  auto ivs = sessionize(rows, 120.0, &report);
  CHECK(report.rows_rejected == 3);
  REQUIRE(ivs.size() == 1);
  CHECK(ivs[0].start == 0);
  CHECK(ivs[0].end == 180);
}

TEST_CASE("sessionize of empty input is empty") {
  CHECK(sessionize({}, 120.0).empty());
}

TEST_CASE("participation: full 50-minute talk yields 3000 s") {
  std::vector<EventDescriptor> schedule = {ev("e", "s", "room", 1000, 4000)};
  auto recs = extract_participation({pi("u", "room", 900, 4100)}, schedule,
                                    CleansingConfig{});
  REQUIRE(recs.size() == 1);
  CHECK(recs[0].user_id == "u");
  CHECK(recs[0].event_id == "e");
  CHECK(recs[0].duration == 3000);
}

TEST_CASE("participation: 150 s overlap is dropped under the default floor") {
  std::vector<EventDescriptor> schedule = {ev("e", "s", "room", 1000, 4000)};
  CleansingReport report;
  auto recs = extract_participation({pi("u", "room", 1000, 1150)}, schedule,
                                    CleansingConfig{}, &report);
  CHECK(recs.empty());
  CHECK(report.participation_dropped_short == 1);
  CHECK(report.records_dropped_short() == 1);
}

TEST_CASE("participation: a user in a different room leaves no record") {
  std::vector<EventDescriptor> schedule = {ev("e", "s", "room", 1000, 4000)};
  CleansingReport report;
  auto recs = extract_participation({pi("u", "other", 1000, 4000)}, schedule,
                                    CleansingConfig{}, &report);
  CHECK(recs.empty());
  CHECK(report.participation_dropped_short == 0);
}

TEST_CASE("participation: overlap sums across a user's intervals") {
  std::vector<EventDescriptor> schedule = {ev("e", "s", "room", 0, 3000)};
  auto recs = extract_participation(
      {pi("u", "room", 0, 100), pi("u", "room", 500, 600),
       pi("u", "room", 2900, 3500)},
      schedule, CleansingConfig{});
  REQUIRE(recs.size() == 1);
  CHECK(recs[0].duration == 300);
}

TEST_CASE("encounters: overlapping stays intersect") {
  auto recs = extract_encounters(
      {pi("A", "z", 0, 600), pi("B", "z", 300, 900)}, {"z"},
      CleansingConfig{});
  REQUIRE(recs.size() == 1);
  CHECK(recs[0].user_a == "A");
  CHECK(recs[0].user_b == "B");
  CHECK(recs[0].start == 300);
  CHECK(recs[0].duration == 300);
}

TEST_CASE("encounters: 100 s co-presence is dropped and counted") {
  CleansingReport report;
  auto recs = extract_encounters(
      {pi("A", "z", 0, 100), pi("B", "z", 0, 400)}, {"z"}, CleansingConfig{},
      &report);
  CHECK(recs.empty());
  CHECK(report.encounters_dropped_short == 1);
}

TEST_CASE("encounters: co-presence inside a conference room is ignored") {
  auto recs = extract_encounters(
      {pi("A", "room", 0, 600), pi("B", "room", 0, 600)}, {"lobby"},
      CleansingConfig{});
  CHECK(recs.empty());
}

TEST_CASE("encounters: one record per maximal co-presence") {
  auto recs = extract_encounters(
      {pi("A", "z", 0, 600), pi("A", "z", 1000, 1600), pi("B", "z", 0, 1600)},
      {"z"}, CleansingConfig{});
  REQUIRE(recs.size() == 2);
  CHECK(recs[0].start == 0);
  CHECK(recs[0].duration == 600);
  CHECK(recs[1].start == 1000);
  CHECK(recs[1].duration == 600);
}

TEST_CASE("encounters: swapping user labels only permutes canonicalization") {
  std::vector<PresenceInterval> ivs = {pi("A", "z", 0, 600),
                                       pi("B", "z", 300, 900)};
  std::vector<PresenceInterval> swapped = {pi("B", "z", 0, 600),
                                           pi("A", "z", 300, 900)};
  auto a = extract_encounters(ivs, {"z"}, CleansingConfig{});
  auto b = extract_encounters(swapped, {"z"}, CleansingConfig{});
  REQUIRE(a.size() == 1);
  REQUIRE(b.size() == 1);
  CHECK(a[0].user_a == b[0].user_a);
  CHECK(a[0].user_b == b[0].user_b);
  CHECK(a[0].duration == b[0].duration);
}

TEST_CASE("cleanse removes users below the distinct-event floor") {
  std::vector<ParticipationRecord> recs = {
      {"two", "e1", 200}, {"two", "e2", 200},
      {"three", "e1", 200}, {"three", "e2", 200}, {"three", "e3", 200}};
  CleansingReport report;
  auto result = cleanse_attendees(recs, CleansingConfig{}, &report);
  CHECK(result.removed_users == std::set<std::string>{"two"});
  CHECK(report.users_dropped_sparse == 1);
  REQUIRE(result.kept.size() == 3);
  for (const auto& r : result.kept) CHECK(r.user_id == "three");
}

TEST_CASE("cleanse counts distinct events, not raw records") {
  // three rows but only one distinct event -> removed
  std::vector<ParticipationRecord> recs = {
      {"u", "e1", 200}, {"u", "e1", 300}, {"u", "e1", 400}};
  auto result = cleanse_attendees(recs, CleansingConfig{});
  CHECK(result.kept.empty());
  CHECK(result.removed_users.count("u") == 1);
}

TEST_CASE("cleanse removing everyone warns") {
  std::vector<ParticipationRecord> recs = {{"u", "e1", 200}};
  Warnings warnings;
  auto result = cleanse_attendees(recs, CleansingConfig{}, nullptr, &warnings);
  CHECK(result.kept.empty());
  CHECK_FALSE(warnings.empty());
}

TEST_CASE("filter drops encounters touching removed users") {
  std::vector<EncounterRecord> enc = {{"a", "b", 300, 0},
                                      {"b", "c", 300, 0},
                                      {"c", "d", 300, 0}};
  auto kept = filter_encounters_by_users(enc, {"b"});
  REQUIRE(kept.size() == 1);
  CHECK(kept[0].user_a == "c");
  CHECK(kept[0].user_b == "d");
}

TEST_CASE("ingest output respects the duration floors") {
  // a mixed fixture: every emitted record must satisfy its threshold
  std::vector<PresenceInterval> ivs;
  for (int i = 0; i < 8; ++i) {
    double s = i * 1000.0;
    ivs.push_back(pi(i % 2 ? "A" : "B", "hall", s, s + 100 + 47.0 * i));
    ivs.push_back(pi(i % 2 ? "B" : "A", "hall", s + 30, s + 260));
    ivs.push_back(pi("A", "room", s, s + 90 + 60.0 * (i % 3)));
  }
  std::vector<EventDescriptor> schedule;
  for (int i = 0; i < 8; ++i)
    schedule.push_back(
        ev(("e" + std::to_string(i)).c_str(), "s", "room", i * 1000.0,
           i * 1000.0 + 900));
  CleansingConfig cfg;
  auto parts = extract_participation(ivs, schedule, cfg);
  for (const auto& p : parts) CHECK(p.duration >= cfg.min_participation_duration);
  auto encs = extract_encounters(ivs, {"hall"}, cfg);
  for (const auto& e : encs) CHECK(e.duration >= cfg.min_encounter_duration);

  // determinism: identical input, identical output
  auto parts2 = extract_participation(ivs, schedule, cfg);
  REQUIRE(parts.size() == parts2.size());
  for (std::size_t i = 0; i < parts.size(); ++i) {
    CHECK(parts[i].user_id == parts2[i].user_id);
    CHECK(parts[i].event_id == parts2[i].event_id);
    CHECK(parts[i].duration == parts2[i].duration);
  }
}
