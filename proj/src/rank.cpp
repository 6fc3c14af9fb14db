#include "eventrec/rank.hpp"

#include <algorithm>
#include <cmath>

#include "eventrec/error.hpp"

namespace eventrec::rank {

Method parse_method(const std::string& name) {
  for (Method m : all_methods())
    if (method_name(m) == name) return m;
  throw ConfigError("unknown method '" + name +
                    "' (expected one of: Naive, UBCF, LNF-g, LNF-gf, "
                    "LNF-gfh-EF, LNF-gfh-ET)");
}

std::string method_name(Method method) {
  switch (method) {
    case Method::naive: return "Naive";
    case Method::ubcf: return "UBCF";
    case Method::lnf_g: return "LNF-g";
    case Method::lnf_gf: return "LNF-gf";
    case Method::lnf_gfh_ef: return "LNF-gfh-EF";
    case Method::lnf_gfh_et: return "LNF-gfh-ET";
  }
  throw ConfigError("unknown method value");
}

const std::vector<Method>& all_methods() {
  static const std::vector<Method> methods = {
      Method::naive,      Method::ubcf,       Method::lnf_g,
      Method::lnf_gf,     Method::lnf_gfh_ef, Method::lnf_gfh_et,
  };
  return methods;
}

double event_score(const std::map<std::string, double>& context_scores,
                   const EventDescriptor& event) {
  if (event.contexts.empty())
    throw DataError("event '" + event.id + "' has no contexts");
  double sum = 0;
  for (const auto& c : event.contexts) {
    auto it = context_scores.find(c);
    if (it == context_scores.end())
      throw DataError("no score for context '" + c + "' of event '" +
                      event.id + "'");
    sum += it->second;
  }
  return sum / static_cast<double>(event.contexts.size());
}

namespace {

// score descending, ties by ascending event id; independent of input order
std::vector<RankedEvent> order_events(
    const std::vector<EventDescriptor>& events,
    const std::map<std::string, double>& context_scores) {
  std::vector<RankedEvent> out;
  out.reserve(events.size());
  for (const auto& ev : events)
    out.push_back({ev.id, event_score(context_scores, ev)});
  std::sort(out.begin(), out.end(),
            [](const RankedEvent& a, const RankedEvent& b) {
              if (a.score != b.score) return a.score > b.score;
              return a.event_id < b.event_id;
            });
  return out;
}

void check_session(const std::vector<EventDescriptor>& events) {
  if (events.size() < 2)
    throw DataError("a session needs at least 2 parallel events to rank");
}

std::vector<std::string> sorted_unique(const std::vector<std::string>& users) {
  std::vector<std::string> out = users;
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace

std::vector<RankedRecommendation> rank_session(
    const std::vector<std::string>& users, const std::string& session_id,
    const std::vector<EventDescriptor>& session_events,
    const lnf::MarginalTable& marginals, Warnings* warnings) {
  check_session(session_events);

  std::set<std::string> contexts;
  for (const auto& ev : session_events)
    contexts.insert(ev.contexts.begin(), ev.contexts.end());

  std::vector<RankedRecommendation> out;
  for (const auto& user : sorted_unique(users)) {
    std::map<std::string, double> scores;
    bool known = true;
    for (const auto& c : contexts) {
      if (!marginals.has(user, c)) {
        known = false;
        break;
      }
      scores[c] = marginals.at(user, c);
    }
    if (!known) {
      if (warnings)
        warnings->push_back("user '" + user +
                            "' has no marginals; skipped in session '" +
                            session_id + "'");
      continue;
    }
    out.push_back({user, session_id, order_events(session_events, scores)});
  }
  return out;
}

std::vector<RankedRecommendation> naive_rank(
    const std::vector<std::string>& users, const std::string& session_id,
    const std::vector<EventDescriptor>& session_events,
    const latent::PreferenceMatrix& prefs) {
  check_session(session_events);

  std::vector<RankedRecommendation> out;
  for (const auto& user : sorted_unique(users)) {
    std::map<std::string, double> scores;
    for (const auto& ev : session_events)
      for (const auto& c : ev.contexts) scores[c] = prefs.at(user, c);
    out.push_back({user, session_id, order_events(session_events, scores)});
  }
  return out;
}

std::vector<RankedRecommendation> ubcf_rank(
    const std::vector<std::string>& users, const std::string& session_id,
    const std::vector<EventDescriptor>& session_events,
    const latent::PreferenceMatrix& prefs,
    const latent::AllPairsSimilarity& similarity, double neighbor_fraction) {
  if (!(neighbor_fraction > 0 && neighbor_fraction <= 1))
    throw ConfigError("UBCF neighbor fraction must be in (0,1]");
  check_session(session_events);

  std::vector<RankedRecommendation> out;
  for (const auto& user : sorted_unique(users)) {
    // the top ceil(fraction * N) most-similar peers, fixed per user
    std::vector<std::pair<double, std::string>> top;
    if (auto it = similarity.find(user); it != similarity.end()) {
      for (const auto& [other, lambda] : it->second)
        top.push_back({-lambda, other});
      std::sort(top.begin(), top.end());
      auto keep = static_cast<std::size_t>(
          std::ceil(neighbor_fraction * static_cast<double>(top.size())));
      top.resize(std::min(top.size(), keep));
    }

    std::map<std::string, double> scores;
    for (const auto& ev : session_events) {
      for (const auto& c : ev.contexts) {
        double z = prefs.at(user, c);
        if (z <= 0) {
          double wsum = 0, wz = 0;
          for (const auto& [neg_lambda, other] : top) {
            wsum += -neg_lambda;
            wz += -neg_lambda * prefs.at(other, c);
          }
          z = wsum > 0 ? wz / wsum : 0.0;
        }
        scores[c] = z;
      }
    }
    out.push_back({user, session_id, order_events(session_events, scores)});
  }
  return out;
}

}  // namespace eventrec::rank
