#include "eventrec/eval.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "eventrec/error.hpp"
#include "eventrec/obsnet.hpp"

namespace eventrec::eval {

GroundTruth build_ground_truth(const std::vector<ParticipationRecord>& records,
                               const std::vector<EventDescriptor>& schedule) {
  std::map<std::string, std::string> session_of;
  for (const auto& ev : schedule) session_of[ev.id] = ev.session_id;

  GroundTruth truth;
  // (user, session) -> (duration, event): longest wins, ties keep the
  // ascending event id
  std::map<std::pair<std::string, std::string>, std::pair<double, std::string>>
      best;
  for (const auto& rec : records) {
    auto it = session_of.find(rec.event_id);
    if (it == session_of.end())
      throw DataError("ground-truth record references event '" + rec.event_id +
                      "' missing from the schedule");
    auto key = std::make_pair(rec.user_id, it->second);
    auto cur = best.find(key);
    if (cur == best.end() || rec.duration > cur->second.first ||
        (rec.duration == cur->second.first &&
         rec.event_id < cur->second.second))
      best[key] = {rec.duration, rec.event_id};
  }
  for (const auto& [key, val] : best) truth.attended[key] = val.second;
  return truth;
}

namespace {

using RecIndex = std::map<std::pair<std::string, std::string>,
                          const rank::RankedRecommendation*>;

RecIndex index_recommendations(
    const std::vector<rank::RankedRecommendation>& recs) {
  RecIndex index;
  for (const auto& rec : recs) index[{rec.user_id, rec.session_id}] = &rec;
  return index;
}

const rank::RankedRecommendation& lookup(
    const RecIndex& index, const std::pair<std::string, std::string>& key) {
  auto it = index.find(key);
  if (it == index.end())
    throw DataError("no recommendation for user '" + key.first +
                    "' in session '" + key.second + "'");
  return *it->second;
}

}  // namespace

double precision(const std::vector<rank::RankedRecommendation>& recs,
                 const GroundTruth& truth) {
  if (truth.attended.empty())
    throw DataError("precision is undefined on an empty ground truth");
  RecIndex index = index_recommendations(recs);
  int hits = 0;
  for (const auto& [key, attended] : truth.attended) {
    const auto& rec = lookup(index, key);
    if (!rec.ranking.empty() && rec.ranking.front().event_id == attended)
      hits++;
  }
  return static_cast<double>(hits) /
         static_cast<double>(truth.attended.size());
}

double ndcg(const std::vector<rank::RankedEvent>& ranking,
            const std::string& attended_event) {
  for (std::size_t i = 0; i < ranking.size(); i++)
    if (ranking[i].event_id == attended_event)
      return 1.0 / std::log2(static_cast<double>(i) + 2.0);
  throw DataError("attended event '" + attended_event +
                  "' is not in the ranked list");
}

double mean_ndcg(const std::vector<rank::RankedRecommendation>& recs,
                 const GroundTruth& truth) {
  if (truth.attended.empty())
    throw DataError("nDCG is undefined on an empty ground truth");
  RecIndex index = index_recommendations(recs);
  double sum = 0;
  for (const auto& [key, attended] : truth.attended)
    sum += ndcg(lookup(index, key).ranking, attended);
  return sum / static_cast<double>(truth.attended.size());
}

AttendanceForecast predicted_attendance(
    const std::vector<rank::RankedRecommendation>& recs) {
  AttendanceForecast forecast;
  for (const auto& rec : recs) {
    if (forecast.session_id.empty())
      forecast.session_id = rec.session_id;
    else if (forecast.session_id != rec.session_id)
      throw DataError("predicted attendance mixes sessions '" +
                      forecast.session_id + "' and '" + rec.session_id + "'");
    if (rec.ranking.empty()) continue;

    for (const auto& re : rec.ranking) {
      forecast.top1.try_emplace(re.event_id, 0);
      forecast.expected.try_emplace(re.event_id, 0.0);
    }
    forecast.top1[rec.ranking.front().event_id]++;

    double total = 0;
    for (const auto& re : rec.ranking) total += re.score;
    for (const auto& re : rec.ranking) {
      // all-zero scores mean a full tie: uniform share
      double share = total > 0
                         ? re.score / total
                         : 1.0 / static_cast<double>(rec.ranking.size());
      forecast.expected[re.event_id] += share;
    }
  }
  return forecast;
}

std::vector<EventDescriptor> training_schedule(const Dataset& data) {
  std::vector<EventDescriptor> out;
  for (const auto& ev : data.schedule)
    if (ev.end <= data.split_time) out.push_back(ev);
  return out;
}

std::vector<std::pair<std::string, std::vector<EventDescriptor>>>
test_sessions(const Dataset& data) {
  std::map<std::string, std::vector<EventDescriptor>> sessions;
  for (const auto& ev : data.schedule)
    if (ev.end > data.split_time) sessions[ev.session_id].push_back(ev);

  std::vector<std::pair<std::string, std::vector<EventDescriptor>>> out;
  for (auto& [id, events] : sessions) {
    if (events.size() < 2) continue;  // nothing to rank in a 1-event session
    std::sort(events.begin(), events.end(),
              [](const EventDescriptor& a, const EventDescriptor& b) {
                return a.id < b.id;
              });
    out.push_back({id, std::move(events)});
  }
  return out;
}

MethodOutput run_method(const Dataset& data, rank::Method method,
                        const RelationThresholds& thresholds,
                        const LbpParams& lbp, const FactorOptions& options,
                        Warnings* warnings) {
  thresholds.validate();
  lbp.validate();

  const auto train_events = training_schedule(data);
  auto participation =
      obsnet::build_participation_network(data.training, train_events);
  auto proximity = obsnet::build_proximity_network(data.encounters);

  // catalog over the full schedule so test-only contexts stay rankable;
  // preferences still derive from the training window alone
  auto catalog = latent::build_catalog(data.schedule);
  auto stats = latent::context_stats(participation, catalog);
  auto prefs = latent::latent_preferences(stats, warnings);

  // training users + encounter-only users + anyone in the test window
  std::set<std::string> universe = participation.users;
  universe.insert(proximity.users.begin(), proximity.users.end());
  for (const auto& rec : data.test) universe.insert(rec.user_id);
  std::vector<std::string> users(universe.begin(), universe.end());
  if (users.empty()) throw DataError("no users to recommend for");

  const auto sessions = test_sessions(data);
  if (sessions.empty())
    throw DataError("no test sessions with at least 2 parallel events");

  MethodOutput output;
  output.n_users = static_cast<int>(users.size());

  auto append = [&](std::vector<rank::RankedRecommendation> recs) {
    output.recommendations.insert(output.recommendations.end(),
                                  std::make_move_iterator(recs.begin()),
                                  std::make_move_iterator(recs.end()));
  };

  switch (method) {
    case rank::Method::naive: {
      for (const auto& [sid, events] : sessions)
        append(rank::naive_rank(users, sid, events, prefs));
      break;
    }
    case rank::Method::ubcf: {
      auto sim = latent::all_pairs_similarity(prefs);
      for (const auto& [sid, events] : sessions)
        append(rank::ubcf_rank(users, sid, events, prefs, sim));
      break;
    }
    default: {
      FactorOptions opts = options;
      opts.use_correlation = method != rank::Method::lnf_g;
      opts.use_constraint = method == rank::Method::lnf_gfh_ef ||
                            method == rank::Method::lnf_gfh_et;

      auto similarity = latent::build_similarity_network(
          prefs, thresholds.k_neighbors, warnings);
      auto relevancy = latent::build_relevancy_network(participation);

      std::set<UserPair> friends;
      if (opts.use_constraint) {
        auto mode = method == rank::Method::lnf_gfh_ef
                        ? EncounterMode::frequency
                        : EncounterMode::time;
        auto encounter = latent::build_encounter_network(proximity, mode);
        friends = latent::classify_friends(encounter, thresholds);
      }

      output.marginals =
          lnf::infer_all_contexts(users, catalog.contexts, prefs, similarity,
                                  relevancy, friends, thresholds, opts, lbp);
      if (warnings)
        for (const auto& [context, ok] : output.marginals.converged)
          if (!ok)
            warnings->push_back("context '" + context +
                                "': inference did not converge within " +
                                std::to_string(lbp.max_iterations) +
                                " iterations");
      for (const auto& [sid, events] : sessions)
        append(rank::rank_session(users, sid, events, output.marginals,
                                  warnings));
      break;
    }
  }
  return output;
}

MetricsReport run_experiment(const Dataset& data,
                             const ExperimentConfig& config,
                             Warnings* warnings) {
  if (config.methods.empty())
    throw ConfigError("experiment method list must not be empty");

  std::vector<RelationThresholds> grid = config.threshold_grid;
  if (grid.empty()) grid.push_back(RelationThresholds{});

  GroundTruth truth = build_ground_truth(data.test, data.schedule);
  std::set<std::string> truth_users;
  for (const auto& [key, ev] : truth.attended) truth_users.insert(key.first);

  MetricsReport report;
  for (rank::Method method : config.methods) {
    for (const auto& thresholds : grid) {
      MethodOutput out =
          run_method(data, method, thresholds, config.lbp, config.options,
                     warnings);
      ExperimentCell cell;
      cell.method = method;
      cell.thresholds = thresholds;
      cell.precision = precision(out.recommendations, truth);
      cell.ndcg = mean_ndcg(out.recommendations, truth);
      cell.n_users = static_cast<int>(truth_users.size());
      cell.n_sessions = static_cast<int>(test_sessions(data).size());
      report.cells.push_back(cell);
    }
  }
  return report;
}

}  // namespace eventrec::eval
