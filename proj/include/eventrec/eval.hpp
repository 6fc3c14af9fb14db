#pragma once

#include <map>
#include <string>
#include <vector>

#include "eventrec/rank.hpp"
#include "eventrec/types.hpp"

namespace eventrec::eval {

// (user, session) -> the event actually attended, from test-window
// participation. Multiple attendances in one session keep the longest
// duration (ties: ascending event id).
struct GroundTruth {
  std::map<std::pair<std::string, std::string>, std::string> attended;
};

GroundTruth build_ground_truth(const std::vector<ParticipationRecord>& records,
                               const std::vector<EventDescriptor>& schedule);

// Fraction of attended (user, session) pairs whose rank-1 event matches.
// Recommendations must cover every pair in the truth; empty truth is an
// error (undefined metric).
double precision(const std::vector<rank::RankedRecommendation>& recs,
                 const GroundTruth& truth);

// nDCG for one list with a single relevant item: rel is 1 at the attended
// event's position, IDCG = 1, so nDCG = 1/log2(position + 1). The attended
// event must be in the list.
double ndcg(const std::vector<rank::RankedEvent>& ranking,
            const std::string& attended_event);

// Mean nDCG over the (user, session) pairs that have an attended event.
double mean_ndcg(const std::vector<rank::RankedRecommendation>& recs,
                 const GroundTruth& truth);

// Organizer view of one session: per event, how many users rank it first
// (top1) and the sum of per-user score shares (expected; sums to the number
// of users).
struct AttendanceForecast {
  std::string session_id;
  std::map<std::string, int> top1;
  std::map<std::string, double> expected;
};

AttendanceForecast predicted_attendance(
    const std::vector<rank::RankedRecommendation>& recs);

// Input bundle for the experiment harness: cleansed training-window records
// plus test-window participation for ground truth. Events ending at or
// before split_time are the training window.
struct Dataset {
  std::vector<EventDescriptor> schedule;
  double split_time = 0;
  std::vector<ParticipationRecord> training;
  std::vector<EncounterRecord> encounters;  // training window
  std::vector<ParticipationRecord> test;
};

// Training events (end <= split_time).
std::vector<EventDescriptor> training_schedule(const Dataset& data);

// Test sessions with >= 2 parallel events, as (session_id, events) in
// ascending session order. Training sessions excluded.
std::vector<std::pair<std::string, std::vector<EventDescriptor>>>
test_sessions(const Dataset& data);

struct MethodOutput {
  std::vector<rank::RankedRecommendation> recommendations;
  lnf::MarginalTable marginals;  // empty for Naive/UBCF
  int n_users = 0;               // recommendation universe size
};

// Runs one method at one threshold setting over all test sessions. The
// universe covers training users, encounter-only (cold) users, and any user
// appearing in the test window.
MethodOutput run_method(const Dataset& data, rank::Method method,
                        const RelationThresholds& thresholds,
                        const LbpParams& lbp, const FactorOptions& options,
                        Warnings* warnings = nullptr);

struct ExperimentCell {
  rank::Method method = rank::Method::naive;
  RelationThresholds thresholds;
  double precision = 0;
  double ndcg = 0;
  int n_users = 0;
  int n_sessions = 0;
};

struct MetricsReport {
  std::vector<ExperimentCell> cells;  // method-major, then grid order
};

struct ExperimentConfig {
  std::vector<rank::Method> methods;
  // one cell per setting; defaults to a single default-threshold row when empty
  std::vector<RelationThresholds> threshold_grid;
  LbpParams lbp;
  FactorOptions options;
};

// methods x thresholds grid; every cell evaluated against the same truth.
MetricsReport run_experiment(const Dataset& data,
                             const ExperimentConfig& config,
                             Warnings* warnings = nullptr);

}  // namespace eventrec::eval
