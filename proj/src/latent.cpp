#include "eventrec/latent.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "eventrec/error.hpp"

namespace eventrec::latent {

namespace {

// Deviations smaller than this are indistinguishable from a flat preference
// vector (they arise from mean-subtraction rounding alone).
constexpr double kFlatNorm = 1e-12;

}  // namespace

bool ContextCatalog::has_context(const std::string& c) const {
  return std::binary_search(contexts.begin(), contexts.end(), c);
}

ContextCatalog build_catalog(const std::vector<EventDescriptor>& schedule) {
  ContextCatalog catalog;
  std::set<std::string> all;
  for (const auto& ev : schedule) {
    if (ev.contexts.empty())
      throw DataError("event '" + ev.id + "' has no contexts");
    std::set<std::string> own(ev.contexts.begin(), ev.contexts.end());
    catalog.event_contexts[ev.id] =
        std::vector<std::string>(own.begin(), own.end());
    all.insert(own.begin(), own.end());
  }
  if (all.empty()) throw DataError("schedule defines no contexts");
  catalog.contexts.assign(all.begin(), all.end());
  return catalog;
}

ContextStats context_stats(const obsnet::EventParticipationNetwork& network,
                           const ContextCatalog& catalog) {
  ContextStats stats;
  stats.users.assign(network.users.begin(), network.users.end());
  stats.contexts = catalog.contexts;

  for (const auto& [id, ev] : network.events) {
    auto it = catalog.event_contexts.find(id);
    if (it == catalog.event_contexts.end())
      throw DataError("event '" + id + "' is not mapped in the catalog");
    for (const auto& c : it->second)
      stats.total_session_time[c] += ev.scheduled_duration();
  }

  for (const auto& [user, row] : network.edges) {
    for (const auto& [event, weight] : row) {
      auto it = catalog.event_contexts.find(event);
      if (it == catalog.event_contexts.end())
        throw DataError("event '" + event + "' is not mapped in the catalog");
      for (const auto& c : it->second) {
        stats.pf[user][c] += 1;
        stats.pt[user][c] += weight;
      }
    }
  }

  // Materialize zeros so never-attended contexts are still queryable.
  for (const auto& user : stats.users) {
    auto& pf_row = stats.pf[user];
    auto& pt_row = stats.pt[user];
    for (const auto& c : stats.contexts) {
      pf_row.try_emplace(c, 0);
      pt_row.try_emplace(c, 0.0);
    }
  }
  return stats;
}

double PreferenceMatrix::at(const std::string& user,
                            const std::string& context) const {
  auto it = z.find(user);
  if (it == z.end()) return 0;
  auto jt = it->second.find(context);
  return jt == it->second.end() ? 0 : jt->second;
}

std::vector<double> PreferenceMatrix::row(const std::string& user) const {
  std::vector<double> out;
  out.reserve(contexts.size());
  for (const auto& c : contexts) out.push_back(at(user, c));
  return out;
}

PreferenceMatrix latent_preferences(const ContextStats& stats,
                                    Warnings* warnings) {
  PreferenceMatrix prefs;
  prefs.users = stats.users;
  prefs.contexts = stats.contexts;

  for (const auto& c : stats.contexts) {
    auto it = stats.total_session_time.find(c);
    if ((it == stats.total_session_time.end() || !(it->second > 0)) &&
        warnings)
      warnings->push_back("context '" + c +
                          "' has zero scheduled time; preferences default to 0");
  }

  for (const auto& user : stats.users) {
    auto& row = prefs.z[user];
    auto pt_it = stats.pt.find(user);
    for (const auto& c : stats.contexts) {
      double value = 0;
      if (pt_it != stats.pt.end()) {
        auto jt = pt_it->second.find(c);
        auto tt = stats.total_session_time.find(c);
        if (jt != pt_it->second.end() && tt != stats.total_session_time.end() &&
            tt->second > 0)
          value = std::min(1.0, jt->second / tt->second);
      }
      row[c] = value;
    }
  }
  return prefs;
}

std::optional<double> adjusted_cosine(const std::vector<double>& zi,
                                      const std::vector<double>& zj) {
  if (zi.size() != zj.size())
    throw DataError("preference vectors differ in length");
  if (zi.empty()) return std::nullopt;

  const auto d = static_cast<double>(zi.size());
  double mi = 0, mj = 0;
  for (std::size_t k = 0; k < zi.size(); k++) {
    mi += zi[k];
    mj += zj[k];
  }
  mi /= d;
  mj /= d;

  double dot = 0, ni = 0, nj = 0;
  for (std::size_t k = 0; k < zi.size(); k++) {
    double a = zi[k] - mi;
    double b = zj[k] - mj;
    dot += a * b;
    ni += a * a;
    nj += b * b;
  }
  if (std::sqrt(ni) <= kFlatNorm || std::sqrt(nj) <= kFlatNorm)
    return std::nullopt;

  // sqrt(ni * nj) rather than sqrt(ni) * sqrt(nj): one rounding instead of
  // two keeps raw at exactly +/-1 for (anti)parallel deviations.  The product
  // cannot overflow: entries lie in [0,1], so ni, nj <= dimension.
  double raw = dot / std::sqrt(ni * nj);
  return std::clamp(raw, -1.0, 1.0);
}

double normalize_similarity(double raw) {
  raw = std::clamp(raw, -1.0, 1.0);
  return 1.0 - std::acos(raw) / std::numbers::pi;
}

std::optional<double> preference_similarity(const std::vector<double>& zi,
                                            const std::vector<double>& zj) {
  auto raw = adjusted_cosine(zi, zj);
  if (!raw) return std::nullopt;
  return normalize_similarity(*raw);
}

AllPairsSimilarity all_pairs_similarity(const PreferenceMatrix& prefs) {
  AllPairsSimilarity sim;
  std::vector<std::vector<double>> rows;
  rows.reserve(prefs.users.size());
  for (const auto& u : prefs.users) rows.push_back(prefs.row(u));

  for (std::size_t i = 0; i < prefs.users.size(); i++) {
    for (std::size_t j = i + 1; j < prefs.users.size(); j++) {
      auto lambda = preference_similarity(rows[i], rows[j]);
      if (!lambda) continue;
      sim[prefs.users[i]][prefs.users[j]] = *lambda;
      sim[prefs.users[j]][prefs.users[i]] = *lambda;
    }
  }
  return sim;
}

SimilarityNetwork build_similarity_network(const PreferenceMatrix& prefs,
                                           int k_neighbors,
                                           Warnings* warnings) {
  if (k_neighbors < 1) throw ConfigError("K must be >= 1");

  SimilarityNetwork net;
  net.users.insert(prefs.users.begin(), prefs.users.end());
  if (net.users.size() < 2) {
    if (warnings)
      warnings->push_back("similarity network has fewer than 2 users");
    return net;
  }

  AllPairsSimilarity sim = all_pairs_similarity(prefs);
  for (const auto& user : prefs.users) {
    auto it = sim.find(user);
    if (it == sim.end()) continue;  // all similarities undefined
    // (-lambda, id): highest similarity first, ties by ascending user id
    std::vector<std::pair<double, std::string>> candidates;
    candidates.reserve(it->second.size());
    for (const auto& [other, lambda] : it->second)
      candidates.push_back({-lambda, other});
    std::sort(candidates.begin(), candidates.end());
    const auto keep =
        std::min(candidates.size(), static_cast<std::size_t>(k_neighbors));
    for (std::size_t i = 0; i < keep; i++)
      net.out[user][candidates[i].second] = -candidates[i].first;
  }
  return net;
}

double attendance_relevancy(const obsnet::EventParticipationNetwork& network,
                            const std::string& user_a,
                            const std::string& user_b) {
  static const std::map<std::string, double> kEmpty;
  auto profile = [&](const std::string& u) -> const auto& {
    auto it = network.edges.find(u);
    return it == network.edges.end() ? kEmpty : it->second;
  };
  const auto& da = profile(user_a);
  const auto& db = profile(user_b);

  double common = 0, total = 0;
  for (const auto& [event, w] : da) {
    total += w;
    auto jt = db.find(event);
    if (jt != db.end()) common += w + jt->second;
  }
  for (const auto& [event, w] : db) total += w;
  return total > 0 ? common / total : 0.0;
}

RelevancyNetwork build_relevancy_network(
    const obsnet::EventParticipationNetwork& network) {
  RelevancyNetwork net;
  net.users = network.users;

  // pairs sharing at least one event
  std::map<std::string, std::vector<std::string>> attendees;
  for (const auto& [user, row] : network.edges)
    for (const auto& [event, w] : row) attendees[event].push_back(user);

  std::set<UserPair> pairs;
  for (const auto& [event, users] : attendees)
    for (std::size_t i = 0; i < users.size(); i++)
      for (std::size_t j = i + 1; j < users.size(); j++)
        pairs.insert(make_user_pair(users[i], users[j]));

  for (const auto& [a, b] : pairs) {
    double mu = attendance_relevancy(network, a, b);
    net.edges.push_back({a, b, mu});
    net.neighbors[a][b] = mu;
    net.neighbors[b][a] = mu;
  }
  return net;
}

std::set<UserPair> classify_co_attendees(const RelevancyNetwork& network,
                                         double min_relevancy) {
  std::set<UserPair> out;
  for (const auto& e : network.edges)
    if (e.mu >= min_relevancy) out.insert({e.user_a, e.user_b});
  return out;
}

std::map<UserPair, EncounterStat> encounter_stats(
    const obsnet::PhysicalProximityNetwork& network) {
  std::map<UserPair, EncounterStat> stats;
  for (const auto& e : network.edges) {
    auto& s = stats[make_user_pair(e.user_a, e.user_b)];
    s.frequency += 1;
    s.time += e.weight;
  }
  return stats;
}

EncounterNetwork build_encounter_network(
    const obsnet::PhysicalProximityNetwork& network, EncounterMode mode) {
  EncounterNetwork net;
  net.mode = mode;
  net.users = network.users;
  for (const auto& [pair, stat] : encounter_stats(network))
    net.edges.push_back({pair.first, pair.second, stat.frequency, stat.time});
  return net;
}

std::set<UserPair> classify_friends(const EncounterNetwork& network,
                                    const RelationThresholds& thresholds) {
  std::set<UserPair> out;
  for (const auto& e : network.edges) {
    bool friends = network.mode == EncounterMode::frequency
                       ? e.frequency >= thresholds.encounter_frequency
                       : e.time >= thresholds.encounter_time;
    if (friends) out.insert({e.user_a, e.user_b});
  }
  return out;
}

}  // namespace eventrec::latent
