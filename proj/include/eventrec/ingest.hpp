#pragma once

#include <cstdint>
#include <set>
#include <vector>

#include "eventrec/types.hpp"

namespace eventrec::ingest {

// One reader poll: user seen in zone at a point in time.
struct RawRead {
  std::string user_id;
  std::string zone_id;
  double timestamp = 0;  // unix seconds
};

struct CleansingReport {
  std::int64_t rows_read = 0;
  std::int64_t rows_rejected = 0;
  std::int64_t participation_dropped_short = 0;
  std::int64_t encounters_dropped_short = 0;
  std::int64_t users_dropped_sparse = 0;

  std::int64_t records_dropped_short() const {
    return participation_dropped_short + encounters_dropped_short;
  }
};

// Merges consecutive reads of the same (user, zone) that are at most `gap`
// seconds apart into one interval; the interval ends gap/2 after the last
// read. Rows with empty ids or a non-finite timestamp are rejected and
// counted, never fatal.
std::vector<PresenceInterval> sessionize(const std::vector<RawRead>& rows,
                                         double gap = 120.0,
                                         CleansingReport* report = nullptr);

// Per (user, event): total overlap of the user's intervals in the event's
// room with the event's window. Records shorter than
// cfg.min_participation_duration are dropped and counted.
std::vector<ParticipationRecord> extract_participation(
    const std::vector<PresenceInterval>& intervals,
    const std::vector<EventDescriptor>& schedule, const CleansingConfig& cfg,
    CleansingReport* report = nullptr);

// One record per maximal co-presence of an unordered user pair in the same
// common zone. Records shorter than cfg.min_encounter_duration are dropped
// and counted.
std::vector<EncounterRecord> extract_encounters(
    const std::vector<PresenceInterval>& intervals,
    const std::set<std::string>& common_zones, const CleansingConfig& cfg,
    CleansingReport* report = nullptr);

struct AttendeeCleanseResult {
  std::vector<ParticipationRecord> kept;
  std::set<std::string> removed_users;
};

// Removes every record of users with fewer than cfg.min_participation_count
// distinct-event records. removed_users feeds filter_encounters_by_users.
AttendeeCleanseResult cleanse_attendees(
    const std::vector<ParticipationRecord>& participation,
    const CleansingConfig& cfg, CleansingReport* report = nullptr,
    Warnings* warnings = nullptr);

// Drops encounters that touch a removed user.
std::vector<EncounterRecord> filter_encounters_by_users(
    const std::vector<EncounterRecord>& encounters,
    const std::set<std::string>& removed_users);

}  // namespace eventrec::ingest
