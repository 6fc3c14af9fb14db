#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "eventrec/eval.hpp"
#include "eventrec/ingest.hpp"
#include "eventrec/latent.hpp"
#include "eventrec/lnf.hpp"
#include "eventrec/obsnet.hpp"
#include "eventrec/rank.hpp"
#include "eventrec/types.hpp"

namespace eventrec::io {

// Shortest decimal form that round-trips, locale-independent. All numeric
// output goes through this so reruns are byte-identical.
std::string format_double(double value);

// FNV-1a, 64 bit.
std::uint64_t fnv1a64(std::string_view bytes);
std::string fnv1a64_hex(std::string_view bytes);

std::string read_file(const std::string& path);  // DataError if unreadable
void write_file(const std::string& path, const std::string& content);
std::string hash_file(const std::string& path);

// CSV dialect is strict: comma-separated, no quoting, header row required.
// Fields must not contain commas.

// Raw log rows `user_id,zone_id,timestamp_unix_s`. Malformed rows are
// counted in the report and skipped.
std::vector<ingest::RawRead> read_raw_log(const std::string& path,
                                          ingest::CleansingReport* report);

// JSON array of {id, session_id, zone_id, start_unix_s, end_unix_s,
// contexts:[...]}.
std::vector<EventDescriptor> read_schedule(const std::string& path);
void write_schedule(const std::string& path,
                    const std::vector<EventDescriptor>& schedule);

// `user_id,event_id,duration_s`
std::vector<ParticipationRecord> read_participation(const std::string& path);
void write_participation(const std::string& path,
                         const std::vector<ParticipationRecord>& records);

// `user_a,user_b,start_unix_s,duration_s`
std::vector<EncounterRecord> read_encounters(const std::string& path);
void write_encounters(const std::string& path,
                      const std::vector<EncounterRecord>& records);

// `user_id,session_id,event_id`
eval::GroundTruth read_truth(const std::string& path);
void write_truth(const std::string& path, const eval::GroundTruth& truth);

void write_cleansing_report(const std::string& path,
                            const ingest::CleansingReport& report);

// `user_id,session_id,rank,event_id,score`
void write_recommendations(
    const std::string& path,
    const std::vector<rank::RankedRecommendation>& recs);

// `user_id,context,probability,converged`
void write_marginals(const std::string& path,
                     const lnf::MarginalTable& marginals);

// `session_id,event_id,top1_count,expected_count`
void write_attendance(const std::string& path,
                      const std::vector<eval::AttendanceForecast>& forecasts);

void write_metrics_json(const std::string& path,
                        const eval::MetricsReport& report);
void write_metrics_csv(const std::string& path,
                       const eval::MetricsReport& report);

// Inspection dumps: {kind, users:[...], (events:[...],) edges:[{a,b,w}]}.
void write_network_json(const std::string& path,
                        const obsnet::EventParticipationNetwork& network);
void write_network_json(const std::string& path,
                        const obsnet::PhysicalProximityNetwork& network);
void write_network_json(const std::string& path,
                        const latent::SimilarityNetwork& network);
void write_network_json(const std::string& path,
                        const latent::RelevancyNetwork& network);
void write_network_json(const std::string& path,
                        const latent::EncounterNetwork& network);

// Deliberately timestamp-free so reruns stay byte-identical.
struct RunManifest {
  std::string command;
  std::string config_hash;
  std::map<std::string, std::string> input_hashes;  // input role -> fnv64 hex
  std::vector<std::string> outputs;                 // file names, sorted
};

void write_manifest(const std::string& path, const RunManifest& manifest);

}  // namespace eventrec::io
