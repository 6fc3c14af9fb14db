#include "eventrec/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <utility>

#include "eventrec/error.hpp"

namespace eventrec::ingest {

std::vector<PresenceInterval> sessionize(const std::vector<RawRead>& rows,
                                         double gap,
                                         CleansingReport* report) {
  if (!(gap > 0)) throw ConfigError("sessionize gap must be > 0");

  std::map<std::pair<std::string, std::string>, std::vector<double>> reads;
  for (const auto& row : rows) {
    if (row.user_id.empty() || row.zone_id.empty() ||
        !std::isfinite(row.timestamp)) {
      if (report) report->rows_rejected++;
      continue;
    }
    reads[{row.user_id, row.zone_id}].push_back(row.timestamp);
  }

  std::vector<PresenceInterval> out;
  for (auto& [key, ts] : reads) {
    std::sort(ts.begin(), ts.end());
    std::size_t i = 0;
    while (i < ts.size()) {
      std::size_t j = i;
      while (j + 1 < ts.size() && ts[j + 1] - ts[j] <= gap) j++;
      out.push_back({key.first, key.second, ts[i], ts[j] + gap / 2});
      i = j + 1;
    }
  }
  return out;  // sorted by (user, zone, start) via the map + per-key order
}

std::vector<ParticipationRecord> extract_participation(
    const std::vector<PresenceInterval>& intervals,
    const std::vector<EventDescriptor>& schedule, const CleansingConfig& cfg,
    CleansingReport* report) {
  cfg.validate();

  std::map<std::string, std::vector<const EventDescriptor*>> by_zone;
  for (const auto& ev : schedule) {
    if (ev.zone_id.empty())
      throw ConfigError("event '" + ev.id + "' has no zone");
    if (!(ev.end > ev.start))
      throw ConfigError("event '" + ev.id + "' has an empty time window");
    by_zone[ev.zone_id].push_back(&ev);
  }

  // (user, event) -> summed overlap
  std::map<std::pair<std::string, std::string>, double> overlap;
  for (const auto& iv : intervals) {
    auto it = by_zone.find(iv.zone_id);
    if (it == by_zone.end()) continue;  // common area or unused room
    for (const EventDescriptor* ev : it->second) {
      double o = std::min(iv.end, ev->end) - std::max(iv.start, ev->start);
      if (o > 0) overlap[{iv.user_id, ev->id}] += o;
    }
  }

  std::vector<ParticipationRecord> out;
  for (const auto& [key, dur] : overlap) {
    if (dur < cfg.min_participation_duration) {
      if (report) report->participation_dropped_short++;
      continue;
    }
    out.push_back({key.first, key.second, dur});
  }
  return out;
}

std::vector<EncounterRecord> extract_encounters(
    const std::vector<PresenceInterval>& intervals,
    const std::set<std::string>& common_zones, const CleansingConfig& cfg,
    CleansingReport* report) {
  cfg.validate();

  std::map<std::string, std::vector<const PresenceInterval*>> by_zone;
  for (const auto& iv : intervals)
    if (common_zones.count(iv.zone_id)) by_zone[iv.zone_id].push_back(&iv);

  std::vector<EncounterRecord> out;
  for (auto& [zone, zone_ivs] : by_zone) {
    std::sort(zone_ivs.begin(), zone_ivs.end(),
              [](const PresenceInterval* a, const PresenceInterval* b) {
                return a->start < b->start;
              });
    for (std::size_t i = 0; i < zone_ivs.size(); i++) {
      for (std::size_t j = i + 1; j < zone_ivs.size(); j++) {
        const auto& a = *zone_ivs[i];
        const auto& b = *zone_ivs[j];
        if (b.start >= a.end) break;  // later intervals start even later
        if (a.user_id == b.user_id) continue;
        double start = std::max(a.start, b.start);
        double dur = std::min(a.end, b.end) - start;
        if (dur <= 0) continue;
        if (dur < cfg.min_encounter_duration) {
          if (report) report->encounters_dropped_short++;
          continue;
        }
        auto pair = make_user_pair(a.user_id, b.user_id);
        out.push_back({pair.first, pair.second, dur, start});
      }
    }
  }
  std::sort(out.begin(), out.end(),
            [](const EncounterRecord& a, const EncounterRecord& b) {
              return std::tie(a.user_a, a.user_b, a.start, a.duration) <
                     std::tie(b.user_a, b.user_b, b.start, b.duration);
            });
  return out;
}

AttendeeCleanseResult cleanse_attendees(
    const std::vector<ParticipationRecord>& participation,
    const CleansingConfig& cfg, CleansingReport* report, Warnings* warnings) {
  cfg.validate();

  std::map<std::string, std::set<std::string>> events_of;
  for (const auto& rec : participation)
    events_of[rec.user_id].insert(rec.event_id);

  AttendeeCleanseResult result;
  for (const auto& [user, events] : events_of)
    if (static_cast<int>(events.size()) < cfg.min_participation_count)
      result.removed_users.insert(user);

  for (const auto& rec : participation)
    if (!result.removed_users.count(rec.user_id)) result.kept.push_back(rec);

  if (report)
    report->users_dropped_sparse +=
        static_cast<std::int64_t>(result.removed_users.size());
  if (warnings && result.kept.empty() && !participation.empty())
    warnings->push_back("attendee cleansing removed every user");
  return result;
}

std::vector<EncounterRecord> filter_encounters_by_users(
    const std::vector<EncounterRecord>& encounters,
    const std::set<std::string>& removed_users) {
  std::vector<EncounterRecord> out;
  for (const auto& rec : encounters)
    if (!removed_users.count(rec.user_a) && !removed_users.count(rec.user_b))
      out.push_back(rec);
  return out;
}

}  // namespace eventrec::ingest
