#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>

#include "doctest.h"
#include "eventrec/error.hpp"
#include "eventrec/lnf.hpp"

using namespace eventrec;
using namespace eventrec::lnf;

namespace {

FactorGraph graph_of(const std::vector<double>& priors,
                     const std::vector<std::tuple<int, int, Factor2>>& pairs) {
  FactorGraph g;
  g.context = "c";
  for (std::size_t i = 0; i < priors.size(); ++i) {
    Variable v;
    char buf[8];
    std::snprintf(buf, sizeof buf, "u%02zu", i);
    v.user_id = buf;
    v.prior = {1.0 - priors[i], priors[i]};
    g.index_of[v.user_id] = static_cast<int>(i);
    g.variables.push_back(v);
  }
  for (const auto& [a, b, t] : pairs) {
    PairFactor f;
    f.a = a;
    f.b = b;
    f.table = t;
    g.factors.push_back(f);
  }
  return g;
}

// random priors and agreement factors safely inside the clamp band
FactorGraph random_graph(std::mt19937_64& rng, int n,
                         const std::vector<std::pair<int, int>>& edges) {
  std::uniform_real_distribution<double> prior(0.05, 0.95);
  std::uniform_real_distribution<double> agree(0.15, 0.85);
  std::vector<double> priors(n);
  for (auto& p : priors) p = prior(rng);
  std::vector<std::tuple<int, int, Factor2>> pairs;
  for (auto [a, b] : edges) {
    double m = agree(rng);
    pairs.push_back({a, b, correlation_factor(m)});
  }
  return graph_of(priors, pairs);
}

std::vector<std::pair<int, int>> random_tree(std::mt19937_64& rng, int n) {
  std::vector<std::pair<int, int>> edges;
  for (int v = 1; v < n; ++v) {
    int parent = static_cast<int>(rng() % static_cast<unsigned>(v));
    edges.push_back({parent, v});
  }
  return edges;
}

LbpParams tight_params() {
  LbpParams p;
  p.tolerance = 1e-10;
  p.max_iterations = 5000;
  return p;
}

}  // namespace

TEST_CASE("prior: own preference wins over a weaker neighborhood") {
  CHECK(compute_prior(0.6, {{0.8, 0.3}, {0.2, 0.3}}) == 0.6);
}

TEST_CASE("prior: neighborhood average fills in a zero preference") {
  double p = compute_prior(0.0, {{0.8, 0.5}, {0.2, 0.0}});
  CHECK(p == doctest::Approx(0.4).epsilon(1e-15));
}

TEST_CASE("prior: clamping boundaries") {
  CHECK(compute_prior(1.0, {}) == 1.0 - kFactorEpsilon);
  CHECK(compute_prior(0.0, {}) == kFactorEpsilon);
  CHECK(compute_prior(0.5, {}) == 0.5);
}

TEST_CASE("factor tables match their agreement masses") {
  auto f = correlation_factor(0.9);
  CHECK(f[0] == 0.9);   // p(0,0)
  CHECK(f[1] == doctest::Approx(0.1));
  CHECK(f[2] == doctest::Approx(0.1));
  CHECK(f[3] == 0.9);

  auto h = constraint_factor(0.7);
  CHECK(h[0] == 0.7);
  CHECK(h[1] == doctest::Approx(0.3));
  CHECK(h[3] == 0.7);

  // extreme mu is clamped away from 0/1
  auto hot = correlation_factor(1.0);
  CHECK(hot[0] == 1.0 - kFactorEpsilon);
  CHECK(hot[1] == kFactorEpsilon);

  auto combined = combine_factors(f, h);
  CHECK(combined[0] == doctest::Approx(0.63));
  CHECK(combined[1] == doctest::Approx(0.03));
}

TEST_CASE("disconnected graphs return priors exactly") {
  auto g = graph_of({0.3, 0.8, 0.55}, {});
  auto res = run_lbp(g, LbpParams{});
  REQUIRE(res.converged);
  for (std::size_t i = 0; i < g.variables.size(); ++i) {
    double p = g.variables[i].prior[1];
    CHECK(std::abs(res.marginals[i] - p) <= 1e-12);
  }
}

TEST_CASE("a 2-node chain matches enumeration to 1e-10") {
  auto g = graph_of({0.3, 0.8}, {{0, 1, correlation_factor(0.75)}});
  auto res = run_lbp(g, tight_params());
  auto exact = exact_marginals(g);
  REQUIRE(res.converged);
  for (int i = 0; i < 2; ++i)
    CHECK(std::abs(res.marginals[i] - exact[i]) <= 1e-10);
}

TEST_CASE("loopy triangles stay within 0.05 of enumeration") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 10; ++trial) {
    auto g = random_graph(rng, 3, {{0, 1}, {0, 2}, {1, 2}});
    auto res = run_lbp(g, tight_params());
    auto exact = exact_marginals(g);
    for (int i = 0; i < 3; ++i)
      CHECK(std::abs(res.marginals[i] - exact[i]) <= 0.05);
  }
}

TEST_CASE("trees are exact: 100 random topologies within 1e-6") {
  std::mt19937_64 rng(4242);
  double worst = 0;
  for (int trial = 0; trial < 100; ++trial) {
    int n = 2 + static_cast<int>(rng() % 14);  // up to 15 variables
    auto g = random_graph(rng, n, random_tree(rng, n));
    auto res = run_lbp(g, tight_params());
    auto exact = exact_marginals(g);
    REQUIRE(res.converged);
    for (int i = 0; i < n; ++i)
      worst = std::max(worst, std::abs(res.marginals[i] - exact[i]));
  }
  CHECK(worst <= 1e-6);
}

TEST_CASE("loopy graphs stay within coarse oracle bounds") {
  std::mt19937_64 rng(777);
  std::vector<double> errs;
  for (int trial = 0; trial < 50; ++trial) {
    int n = 4 + static_cast<int>(rng() % 9);  // up to 12 variables
    // tree plus 1-3 extra chords -> loopy
    auto edges = random_tree(rng, n);
    int chords = 1 + static_cast<int>(rng() % 3);
    std::set<std::pair<int, int>> have(edges.begin(), edges.end());
    while (chords > 0) {
      int a = static_cast<int>(rng() % static_cast<unsigned>(n));
      int b = static_cast<int>(rng() % static_cast<unsigned>(n));
      if (a == b) continue;
      if (b < a) std::swap(a, b);
      if (have.count({a, b})) continue;
      have.insert({a, b});
      edges.push_back({a, b});
      --chords;
    }
    auto g = random_graph(rng, n, edges);
    auto res = run_lbp(g, tight_params());
    auto exact = exact_marginals(g);
    double worst = 0;
    for (int i = 0; i < n; ++i)
      worst = std::max(worst, std::abs(res.marginals[i] - exact[i]));
    errs.push_back(worst);
    CHECK(worst <= 0.1);
  }
  std::sort(errs.begin(), errs.end());
  CHECK(errs[errs.size() / 2] <= 0.05);
}

TEST_CASE("exact enumeration worked cases") {
  auto single = graph_of({0.3}, {});
  auto m = exact_marginals(single);
  CHECK(m[0] == doctest::Approx(0.3).epsilon(1e-15));

  auto indep = graph_of({0.2, 0.9}, {});
  auto mi = exact_marginals(indep);
  CHECK(mi[0] == doctest::Approx(0.2).epsilon(1e-14));
  CHECK(mi[1] == doctest::Approx(0.9).epsilon(1e-14));
}

TEST_CASE("enumeration refuses graphs over 20 variables") {
  std::vector<double> priors(21, 0.5);
  auto g = graph_of(priors, {});
  CHECK_THROWS_AS(exact_marginals(g), DataError);
}

TEST_CASE("monotone coupling: stronger agreement never lowers the peer") {
  // node 0 fixed at prior 0.9; node 1 at 0.5; raising mu pulls node 1 up
  double prev = 0;
  for (double mu = 0.5; mu <= 0.96; mu += 0.05) {
    auto g = graph_of({0.9, 0.5}, {{0, 1, correlation_factor(mu)}});
    auto exact = exact_marginals(g);
    auto res = run_lbp(g, tight_params());
    CHECK(std::abs(res.marginals[1] - exact[1]) <= 1e-9);
    CHECK(exact[1] >= prev - 1e-12);
    prev = exact[1];
  }
}

TEST_CASE("damping 0 and 0.5 land on the same fixed point") {
  std::mt19937_64 rng(31);
  auto g = random_graph(rng, 8, random_tree(rng, 8));
  LbpParams p0 = tight_params();
  p0.damping = 0.0;
  LbpParams p5 = tight_params();
  p5.damping = 0.5;
  auto r0 = run_lbp(g, p0);
  auto r5 = run_lbp(g, p5);
  REQUIRE(r0.converged);
  REQUIRE(r5.converged);
  for (std::size_t i = 0; i < g.variables.size(); ++i)
    CHECK(std::abs(r0.marginals[i] - r5.marginals[i]) <= 1e-8);
}

TEST_CASE("inference is bit-identical across runs") {
  std::mt19937_64 rng(64);
  auto edges = random_tree(rng, 10);
  edges.push_back({0, 9});
  auto g = random_graph(rng, 10, edges);
  auto r1 = run_lbp(g, LbpParams{});
  auto r2 = run_lbp(g, LbpParams{});
  REQUIRE(r1.marginals.size() == r2.marginals.size());
  for (std::size_t i = 0; i < r1.marginals.size(); ++i)
    CHECK(r1.marginals[i] == r2.marginals[i]);
  CHECK(r1.iterations == r2.iterations);
}

TEST_CASE("hitting the iteration cap is reported, not thrown") {
  std::mt19937_64 rng(15);
  auto g = random_graph(rng, 6, {{0, 1}, {1, 2}, {2, 0}, {3, 4}, {4, 5},
                                 {5, 3}, {0, 3}});
  LbpParams strict;
  strict.max_iterations = 1;
  strict.tolerance = 1e-15;
  auto res = run_lbp(g, strict);
  CHECK_FALSE(res.converged);
  CHECK(res.iterations == 1);
  CHECK(res.marginals.size() == 6);
  for (double m : res.marginals) {
    CHECK(m >= 0.0);
    CHECK(m <= 1.0);
  }
}

namespace {

// a small planted world reused by the integration-shaped cases
struct SmallWorld {
  latent::PreferenceMatrix prefs;
  latent::SimilarityNetwork similarity;
  latent::RelevancyNetwork relevancy;
  std::set<UserPair> friends;
  std::vector<std::string> users;
  std::vector<std::string> contexts;
};

SmallWorld make_world() {
  SmallWorld w;
  w.users = {"u0", "u1", "u2", "u3", "u4", "u5"};
  w.contexts = {"ca", "cb"};
  w.prefs.users = w.users;
  w.prefs.contexts = w.contexts;
  // two taste groups: u0-u2 like ca, u3-u5 like cb; u2/u5 lukewarm
  double za[6] = {0.9, 0.8, 0.4, 0.1, 0.05, 0.3};
  for (int i = 0; i < 6; ++i) {
    w.prefs.z[w.users[i]]["ca"] = za[i];
    w.prefs.z[w.users[i]]["cb"] = 0.9 - za[i];
  }
  w.similarity = latent::build_similarity_network(w.prefs, 3);
  // relevancy edges inside each group
  auto add_mu = [&](const std::string& a, const std::string& b, double mu) {
    w.relevancy.users.insert(a);
    w.relevancy.users.insert(b);
    w.relevancy.edges.push_back({a, b, mu});
    w.relevancy.neighbors[a][b] = mu;
    w.relevancy.neighbors[b][a] = mu;
  };
  add_mu("u0", "u1", 0.8);
  add_mu("u1", "u2", 0.5);
  add_mu("u3", "u4", 0.7);
  add_mu("u4", "u5", 0.45);
  add_mu("u0", "u3", 0.1);  // below phi, never a factor
  w.friends = {make_user_pair("u0", "u2"), make_user_pair("u3", "u5")};
  return w;
}

}  // namespace

TEST_CASE("context graphs assemble priors and qualifying pair factors") {
  auto w = make_world();
  RelationThresholds th;  // phi = 0.4
  FactorOptions opts;     // both families on
  auto g = build_context_graph("ca", w.users, w.prefs, w.similarity,
                               w.relevancy, w.friends, th, opts);
  REQUIRE(g.variables.size() == 6);
  // factors: 4 relevancy edges >= 0.4, plus 2 friend pairs, no overlap
  CHECK(g.factors.size() == 6);
  // disable each family in turn
  FactorOptions only_f;
  only_f.use_constraint = false;
  CHECK(build_context_graph("ca", w.users, w.prefs, w.similarity, w.relevancy,
                            w.friends, th, only_f)
            .factors.size() == 4);
  FactorOptions only_g;
  only_g.use_correlation = false;
  only_g.use_constraint = false;
  auto bare = build_context_graph("ca", w.users, w.prefs, w.similarity,
                                  w.relevancy, w.friends, th, only_g);
  CHECK(bare.factors.empty());

  // prior of u0 in ca: own z = 0.9 beats any neighborhood average
  int i0 = bare.index_of.at("u0");
  CHECK(bare.variables[i0].prior[1] == doctest::Approx(0.9));
}

TEST_CASE("an empty user universe cannot build a graph") {
  auto w = make_world();
  CHECK_THROWS_AS(build_context_graph("ca", {}, w.prefs, w.similarity,
                                      w.relevancy, w.friends,
                                      RelationThresholds{}, FactorOptions{}),
                  DataError);
}

TEST_CASE("identical per-context inputs give identical marginal columns") {
  auto w = make_world();
  // d=3 catalog, all contexts share priors/topology by construction:
  // copy z of ca into all three
  for (const auto& u : w.users) {
    double v = w.prefs.z[u]["ca"];
    w.prefs.z[u]["c1"] = v;
    w.prefs.z[u]["c2"] = v;
    w.prefs.z[u]["c3"] = v;
  }
  w.prefs.contexts = {"c1", "c2", "c3"};
  auto sim = latent::build_similarity_network(w.prefs, 3);
  auto table = infer_all_contexts(w.users, {"c1", "c2", "c3"}, w.prefs, sim,
                                  w.relevancy, w.friends, RelationThresholds{},
                                  FactorOptions{}, LbpParams{});
  for (const auto& u : w.users) {
    double c1 = table.at(u, "c1");
    CHECK(table.at(u, "c2") == c1);
    CHECK(table.at(u, "c3") == c1);
  }
}

TEST_CASE("infer_all_contexts equals per-context enumeration on the fixture") {
  auto w = make_world();
  RelationThresholds th;
  FactorOptions opts;
  LbpParams params = tight_params();
  auto table = infer_all_contexts(w.users, w.contexts, w.prefs, w.similarity,
                                  w.relevancy, w.friends, th, opts, params);
  for (const auto& c : w.contexts) {
    auto g = build_context_graph(c, w.users, w.prefs, w.similarity,
                                 w.relevancy, w.friends, th, opts);
    auto exact = exact_marginals(g);
    for (const auto& u : w.users) {
      int i = g.index_of.at(u);
      // the fixture graphs have at most one loop; LBP lands near exact
      CHECK(std::abs(table.at(u, c) - exact[i]) <= 0.05);
    }
  }
}

TEST_CASE("marginal table bookkeeping") {
  auto w = make_world();
  auto table = infer_all_contexts(w.users, w.contexts, w.prefs, w.similarity,
                                  w.relevancy, w.friends, RelationThresholds{},
                                  FactorOptions{}, LbpParams{});
  CHECK(table.has("u0", "ca"));
  CHECK_FALSE(table.has("ghost", "ca"));
  CHECK_FALSE(table.has("u0", "ghost"));
  CHECK(table.all_converged());
  for (const auto& u : w.users)
    for (const auto& c : w.contexts) {
      double p = table.at(u, c);
      CHECK(p >= 0.0);
      CHECK(p <= 1.0);
    }
}
