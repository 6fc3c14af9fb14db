#pragma once

#include <map>
#include <string>
#include <vector>

#include "eventrec/latent.hpp"
#include "eventrec/lnf.hpp"
#include "eventrec/types.hpp"

namespace eventrec::rank {

enum class Method {
  naive,
  ubcf,
  lnf_g,
  lnf_gf,
  lnf_gfh_ef,
  lnf_gfh_et,
};

// Canonical names: Naive, UBCF, LNF-g, LNF-gf, LNF-gfh-EF, LNF-gfh-ET.
Method parse_method(const std::string& name);  // ConfigError on unknown
std::string method_name(Method method);
const std::vector<Method>& all_methods();

struct RankedEvent {
  std::string event_id;
  double score = 0;  // in [0,1]
};

struct RankedRecommendation {
  std::string user_id;
  std::string session_id;
  // scores non-increasing; ties by ascending event id; covers exactly the
  // session's parallel events
  std::vector<RankedEvent> ranking;
};

// Mean of the user's per-context scores over the event's contexts. The
// catalog guarantees a nonempty context set.
double event_score(const std::map<std::string, double>& context_scores,
                   const EventDescriptor& event);

// Orders a session's parallel events for each user by mean context marginal.
// Sessions need >= 2 parallel events. Users missing from the marginal table
// are skipped with a warning.
std::vector<RankedRecommendation> rank_session(
    const std::vector<std::string>& users, const std::string& session_id,
    const std::vector<EventDescriptor>& session_events,
    const lnf::MarginalTable& marginals, Warnings* warnings = nullptr);

// Baseline: score events by mean raw preference z over their contexts.
std::vector<RankedRecommendation> naive_rank(
    const std::vector<std::string>& users, const std::string& session_id,
    const std::vector<EventDescriptor>& session_events,
    const latent::PreferenceMatrix& prefs);

// Baseline: z with collaborative fill-in. Where z_im = 0, substitute the
// lambda-weighted mean preference of the top ceil(fraction * N) most-similar
// users (N = peers with defined similarity); 0 when there are none.
std::vector<RankedRecommendation> ubcf_rank(
    const std::vector<std::string>& users, const std::string& session_id,
    const std::vector<EventDescriptor>& session_events,
    const latent::PreferenceMatrix& prefs,
    const latent::AllPairsSimilarity& similarity,
    double neighbor_fraction = 0.05);

}  // namespace eventrec::rank
