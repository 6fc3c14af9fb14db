#include "eventrec/lnf.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include "eventrec/error.hpp"

namespace eventrec::lnf {

namespace {

double clamp_unit(double v, double eps) {
  return std::clamp(v, eps, 1.0 - eps);
}

using Pair2 = std::array<double, 2>;

Pair2 normalized(Pair2 v) {
  double sum = v[0] + v[1];
  return {v[0] / sum, v[1] / sum};
}

Pair2 mul(const Pair2& a, const Pair2& b) {
  // renormalize at every multiply so long products cannot underflow
  return normalized({a[0] * b[0], a[1] * b[1]});
}

}  // namespace

double compute_prior(double own_z,
                     const std::vector<std::pair<double, double>>& neighbors,
                     double eps) {
  double p = own_z;
  if (!neighbors.empty()) {
    double wsum = 0, wz = 0;
    for (const auto& [lambda, z] : neighbors) {
      wsum += lambda;
      wz += lambda * z;
    }
    if (wsum > 0) p = std::max(own_z, wz / wsum);
  }
  return clamp_unit(p, eps);
}

Factor2 correlation_factor(double mu, double eps) {
  double agree = clamp_unit(mu, eps);
  double disagree = clamp_unit(1.0 - mu, eps);
  return {agree, disagree, disagree, agree};
}

Factor2 constraint_factor(double beta, double eps) {
  double agree = clamp_unit(beta, eps);
  double disagree = clamp_unit(1.0 - beta, eps);
  return {agree, disagree, disagree, agree};
}

Factor2 combine_factors(const Factor2& f, const Factor2& g, double eps) {
  Factor2 out;
  for (int i = 0; i < 4; i++) out[i] = clamp_unit(f[i] * g[i], eps);
  return out;
}

FactorGraph build_context_graph(const std::string& context,
                                const std::vector<std::string>& users,
                                const latent::PreferenceMatrix& prefs,
                                const latent::SimilarityNetwork& similarity,
                                const latent::RelevancyNetwork& relevancy,
                                const std::set<UserPair>& friend_pairs,
                                const RelationThresholds& thresholds,
                                const FactorOptions& options) {
  if (users.empty()) throw DataError("factor graph has an empty user universe");

  FactorGraph graph;
  graph.context = context;

  std::set<std::string> unique(users.begin(), users.end());
  for (const auto& user : unique) {
    std::vector<std::pair<double, double>> neighbors;
    auto it = similarity.out.find(user);
    if (it != similarity.out.end())
      for (const auto& [other, lambda] : it->second)
        neighbors.push_back({lambda, prefs.at(other, context)});
    double p = compute_prior(prefs.at(user, context), neighbors);
    graph.index_of[user] = static_cast<int>(graph.variables.size());
    graph.variables.push_back({user, {1.0 - p, p}});
  }

  auto pair_key = [&](const std::string& ua, const std::string& ub)
      -> std::optional<std::pair<int, int>> {
    auto a = graph.index_of.find(ua);
    auto b = graph.index_of.find(ub);
    if (a == graph.index_of.end() || b == graph.index_of.end())
      return std::nullopt;
    return std::pair<int, int>{std::min(a->second, b->second),
                               std::max(a->second, b->second)};
  };

  std::map<std::pair<int, int>, Factor2> tables;
  if (options.use_correlation) {
    for (const auto& e : relevancy.edges) {
      if (e.mu < thresholds.relevancy) continue;
      if (auto key = pair_key(e.user_a, e.user_b))
        tables[*key] = correlation_factor(e.mu);
    }
  }
  if (options.use_constraint) {
    Factor2 h = constraint_factor(options.constraint_strength);
    for (const auto& [ua, ub] : friend_pairs) {
      auto key = pair_key(ua, ub);
      if (!key) continue;
      auto it = tables.find(*key);
      if (it == tables.end())
        tables[*key] = h;
      else
        it->second = combine_factors(it->second, h);
    }
  }
  for (const auto& [key, table] : tables)
    graph.factors.push_back({key.first, key.second, table});
  return graph;
}

LbpResult run_lbp(const FactorGraph& graph, const LbpParams& params) {
  params.validate();

  const int n = static_cast<int>(graph.variables.size());
  const int m = static_cast<int>(graph.factors.size());

  // incidence: per variable, the directed message slots entering it.
  // factor e couples (a, b); slot 2e carries a->b, slot 2e+1 carries b->a.
  std::vector<std::vector<int>> in_slots(n);
  for (int e = 0; e < m; e++) {
    in_slots[graph.factors[e].b].push_back(2 * e);
    in_slots[graph.factors[e].a].push_back(2 * e + 1);
  }

  std::vector<Pair2> msg(2 * m, Pair2{0.5, 0.5});
  std::vector<Pair2> next(2 * m);
  // cavity beliefs, rebuilt each iteration: cavity[slot] is the belief of
  // the slot's *receiver* excluding that slot's message.
  std::vector<Pair2> cavity(2 * m);
  std::vector<Pair2> belief(n);

  auto rebuild = [&]() {
    for (int i = 0; i < n; i++) {
      const auto& slots = in_slots[i];
      const auto deg = slots.size();
      // prefix[t] = prior * msg[slots[0..t)], suffix from the other end
      std::vector<Pair2> prefix(deg + 1), suffix(deg + 1);
      prefix[0] = normalized(graph.variables[i].prior);
      for (std::size_t t = 0; t < deg; t++)
        prefix[t + 1] = mul(prefix[t], msg[slots[t]]);
      suffix[deg] = {0.5, 0.5};
      for (std::size_t t = deg; t > 0; t--)
        suffix[t - 1] = mul(msg[slots[t - 1]], suffix[t]);
      belief[i] = prefix[deg];
      for (std::size_t t = 0; t < deg; t++)
        cavity[slots[t]] = mul(prefix[t], suffix[t + 1]);
    }
  };

  LbpResult result;
  for (int iter = 1; iter <= params.max_iterations; iter++) {
    rebuild();
    double delta = 0;
    for (int e = 0; e < m; e++) {
      const auto& f = graph.factors[e];
      const auto& t = f.table;
      // a -> b: marginalize x_a out of table[x_a*2 + x_b]
      const Pair2& ca = cavity[2 * e + 1];  // a's belief minus b's message
      Pair2 ab = normalized({t[0] * ca[0] + t[2] * ca[1],
                             t[1] * ca[0] + t[3] * ca[1]});
      const Pair2& cb = cavity[2 * e];
      Pair2 ba = normalized({t[0] * cb[0] + t[1] * cb[1],
                             t[2] * cb[0] + t[3] * cb[1]});
      for (int k = 0; k < 2; k++) {
        next[2 * e][k] = params.damping * msg[2 * e][k] +
                         (1 - params.damping) * ab[k];
        next[2 * e + 1][k] = params.damping * msg[2 * e + 1][k] +
                             (1 - params.damping) * ba[k];
        delta = std::max(delta, std::abs(next[2 * e][k] - msg[2 * e][k]));
        delta =
            std::max(delta, std::abs(next[2 * e + 1][k] - msg[2 * e + 1][k]));
      }
    }
    msg.swap(next);
    result.iterations = iter;
    result.final_delta = delta;
    if (delta <= params.tolerance) {
      result.converged = true;
      break;
    }
  }

  rebuild();  // beliefs from the final messages
  result.marginals.reserve(n);
  for (int i = 0; i < n; i++) result.marginals.push_back(belief[i][1]);
  return result;
}

std::vector<double> exact_marginals(const FactorGraph& graph) {
  const auto n = graph.variables.size();
  if (n > 20)
    throw DataError("exact enumeration refused: " + std::to_string(n) +
                    " variables (limit 20)");

  std::vector<double> ones(n, 0.0);
  double total = 0;
  for (std::uint32_t mask = 0; mask < (1u << n); mask++) {
    double w = 1;
    for (std::size_t i = 0; i < n; i++)
      w *= graph.variables[i].prior[(mask >> i) & 1];
    for (const auto& f : graph.factors)
      w *= f.table[((mask >> f.a) & 1) * 2 + ((mask >> f.b) & 1)];
    total += w;
    for (std::size_t i = 0; i < n; i++)
      if ((mask >> i) & 1) ones[i] += w;
  }
  if (!(total > 0)) throw DataError("factor graph has zero total mass");
  for (auto& v : ones) v /= total;
  return ones;
}

bool MarginalTable::has(const std::string& user,
                        const std::string& context) const {
  auto it = p1.find(context);
  return it != p1.end() && it->second.count(user) > 0;
}

double MarginalTable::at(const std::string& user,
                         const std::string& context) const {
  auto it = p1.find(context);
  if (it != p1.end()) {
    auto jt = it->second.find(user);
    if (jt != it->second.end()) return jt->second;
  }
  throw DataError("no marginal for user '" + user + "' and context '" +
                  context + "'");
}

bool MarginalTable::all_converged() const {
  for (const auto& [context, flag] : converged)
    if (!flag) return false;
  return true;
}

MarginalTable infer_all_contexts(const std::vector<std::string>& users,
                                 const std::vector<std::string>& contexts,
                                 const latent::PreferenceMatrix& prefs,
                                 const latent::SimilarityNetwork& similarity,
                                 const latent::RelevancyNetwork& relevancy,
                                 const std::set<UserPair>& friend_pairs,
                                 const RelationThresholds& thresholds,
                                 const FactorOptions& options,
                                 const LbpParams& params) {
  MarginalTable table;
  for (const auto& context : contexts) {
    try {
      FactorGraph graph =
          build_context_graph(context, users, prefs, similarity, relevancy,
                              friend_pairs, thresholds, options);
      LbpResult result = run_lbp(graph, params);
      auto& column = table.p1[context];
      for (std::size_t i = 0; i < graph.variables.size(); i++)
        column[graph.variables[i].user_id] = result.marginals[i];
      table.converged[context] = result.converged;
      table.iterations[context] = result.iterations;
    } catch (const DataError& e) {
      throw DataError("context '" + context + "': " + e.what());
    }
  }
  return table;
}

}  // namespace eventrec::lnf
