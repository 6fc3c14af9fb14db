#pragma once

#include <array>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "eventrec/latent.hpp"
#include "eventrec/types.hpp"

namespace eventrec::lnf {

// 2x2 pairwise factor over binary variables, row-major:
// [p(0,0), p(0,1), p(1,0), p(1,1)].
using Factor2 = std::array<double, 4>;

struct Variable {
  std::string user_id;
  // unary factor g: [p(y=0), p(y=1)], clamped
  std::array<double, 2> prior = {0.5, 0.5};
};

struct PairFactor {
  int a = 0;  // variable indices, a < b
  int b = 0;
  Factor2 table = {0.25, 0.25, 0.25, 0.25};
};

// Factor graph for one context: a binary variable per user, unary priors,
// and pairwise factors on qualifying pairs.
struct FactorGraph {
  std::string context;
  std::vector<Variable> variables;      // sorted by user id
  std::map<std::string, int> index_of;  // user id -> variable index
  std::vector<PairFactor> factors;      // sorted by (a, b), one per pair
};

// Prior attendance probability for one (user, context). Own preference wins
// when it beats the lambda-weighted mean of the KNN neighbors' preferences;
// an empty neighbor list leaves just the own value. Clamped to [eps, 1-eps].
// neighbors: (lambda, neighbor z) pairs.
double compute_prior(double own_z,
                     const std::vector<std::pair<double, double>>& neighbors,
                     double eps = kFactorEpsilon);

// Co-attendee correlation factor: agreement mass mu on the diagonal.
Factor2 correlation_factor(double mu, double eps = kFactorEpsilon);

// Friend constraint factor: fixed agreement mass beta on the diagonal.
Factor2 constraint_factor(double beta, double eps = kFactorEpsilon);

// Entrywise product, clamped; used when a pair is co-attendees and friends.
Factor2 combine_factors(const Factor2& f, const Factor2& g,
                        double eps = kFactorEpsilon);

// Assembles the graph for one context: priors via compute_prior over the
// similarity network, correlation factors on co-attendee pairs (mu >=
// thresholds.relevancy), constraint factors on friend pairs, entrywise
// product where both apply. FactorOptions switches each family off for the
// reduced model variants.
FactorGraph build_context_graph(const std::string& context,
                                const std::vector<std::string>& users,
                                const latent::PreferenceMatrix& prefs,
                                const latent::SimilarityNetwork& similarity,
                                const latent::RelevancyNetwork& relevancy,
                                const std::set<UserPair>& friend_pairs,
                                const RelationThresholds& thresholds,
                                const FactorOptions& options);

struct LbpResult {
  bool converged = false;
  int iterations = 0;
  double final_delta = 0;
  // P(y=1) per variable, aligned with graph.variables
  std::vector<double> marginals;
};

// Sum-product loopy belief propagation, synchronous flooding schedule.
// Messages start uniform and are normalized each update; damping is the
// weight kept on the previous message. Convergence: max absolute message
// change <= tolerance. Hitting max_iterations returns the current beliefs
// with converged=false — not an error.
LbpResult run_lbp(const FactorGraph& graph, const LbpParams& params);

// Exact marginals P(y=1) by enumerating all 2^N assignments. Graphs over 20
// variables are refused.
std::vector<double> exact_marginals(const FactorGraph& graph);

// Marginals for every (user, context), plus per-context convergence.
struct MarginalTable {
  // context -> user -> P(y=1)
  std::map<std::string, std::map<std::string, double>> p1;
  std::map<std::string, bool> converged;
  std::map<std::string, int> iterations;

  bool has(const std::string& user, const std::string& context) const;
  double at(const std::string& user, const std::string& context) const;
  bool all_converged() const;
};

// Solves the d independent per-context graphs and concatenates the results.
MarginalTable infer_all_contexts(const std::vector<std::string>& users,
                                 const std::vector<std::string>& contexts,
                                 const latent::PreferenceMatrix& prefs,
                                 const latent::SimilarityNetwork& similarity,
                                 const latent::RelevancyNetwork& relevancy,
                                 const std::set<UserPair>& friend_pairs,
                                 const RelationThresholds& thresholds,
                                 const FactorOptions& options,
                                 const LbpParams& params);

}  // namespace eventrec::lnf
