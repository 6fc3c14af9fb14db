#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "eventrec/error.hpp"
#include "eventrec/eval.hpp"
#include "eventrec/latent.hpp"
#include "eventrec/lnf.hpp"
#include "eventrec/pipeline.hpp"
#include "eventrec/rank.hpp"
#include "eventrec/synth.hpp"
#include "eventrec/version.hpp"

namespace py = pybind11;
using namespace eventrec;

namespace {

// (user, p1) priors plus (a, b, agreement) pair factors -> FactorGraph
lnf::FactorGraph graph_from_spec(
    const std::vector<std::pair<std::string, double>>& priors,
    const std::vector<std::tuple<std::string, std::string, double>>& factors) {
  lnf::FactorGraph g;
  g.context = "c";
  for (const auto& [user, p] : priors) {
    if (g.index_of.count(user))
      throw ConfigError("duplicate variable '" + user + "'");
    lnf::Variable v;
    v.user_id = user;
    double clamped = std::min(1.0 - kFactorEpsilon,
                              std::max(kFactorEpsilon, p));
    v.prior = {1.0 - clamped, clamped};
    g.index_of[user] = static_cast<int>(g.variables.size());
    g.variables.push_back(v);
  }
  for (const auto& [a, b, agreement] : factors) {
    auto ia = g.index_of.find(a);
    auto ib = g.index_of.find(b);
    if (ia == g.index_of.end() || ib == g.index_of.end())
      throw ConfigError("factor references unknown variable");
    if (ia->second == ib->second)
      throw ConfigError("factor must join two distinct variables");
    lnf::PairFactor f;
    f.a = std::min(ia->second, ib->second);
    f.b = std::max(ia->second, ib->second);
    f.table = lnf::correlation_factor(agreement);
    g.factors.push_back(f);
  }
  return g;
}

py::dict marginal_dict(const lnf::FactorGraph& g,
                       const std::vector<double>& p1) {
  py::dict out;
  for (std::size_t i = 0; i < g.variables.size(); ++i)
    out[py::str(g.variables[i].user_id)] = p1[i];
  return out;
}

pipeline::PipelineConfig config_for(const std::string& config_path,
                                    const std::optional<std::string>& out) {
  auto config = pipeline::load_config(config_path);
  if (out) config.paths.output_dir = *out;
  return config;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "event recommendation core: latent networks, factor-graph "
            "inference, ranking, and the batch pipeline";
  m.attr("__version__") = kVersion;

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<DataError>(m, "DataError", PyExc_RuntimeError);

  m.def("normalize_similarity", &latent::normalize_similarity, py::arg("raw"),
        "Map a raw adjusted-cosine value in [-1,1] onto [0,1].");
  m.def("adjusted_cosine", &latent::adjusted_cosine, py::arg("zi"),
        py::arg("zj"),
        "Mean-centered cosine of two preference rows; None when undefined.");
  m.def("preference_similarity", &latent::preference_similarity,
        py::arg("zi"), py::arg("zj"),
        "Normalized adjusted-cosine similarity; None when undefined.");

  m.def("compute_prior", &lnf::compute_prior, py::arg("own_z"),
        py::arg("neighbors"), py::arg("eps") = kFactorEpsilon,
        "Unary prior: max of own preference and the lambda-weighted "
        "neighborhood mean, clamped. neighbors: [(lambda, z), ...]");

  m.def(
      "ndcg",
      [](const std::vector<std::pair<std::string, double>>& ranking,
         const std::string& attended) {
        std::vector<rank::RankedEvent> list;
        for (const auto& [id, score] : ranking) list.push_back({id, score});
        return eval::ndcg(list, attended);
      },
      py::arg("ranking"), py::arg("attended"),
      "nDCG of a ranked [(event_id, score), ...] list with one relevant "
      "item.");

  m.def(
      "lbp_marginals",
      [](const std::vector<std::pair<std::string, double>>& priors,
         const std::vector<std::tuple<std::string, std::string, double>>&
             factors,
         double damping, double tolerance, int max_iterations) {
        auto g = graph_from_spec(priors, factors);
        LbpParams params;
        params.damping = damping;
        params.tolerance = tolerance;
        params.max_iterations = max_iterations;
        params.validate();
        auto res = lnf::run_lbp(g, params);
        py::dict out;
        out["marginals"] = marginal_dict(g, res.marginals);
        out["converged"] = res.converged;
        out["iterations"] = res.iterations;
        return out;
      },
      py::arg("priors"), py::arg("factors") =
          std::vector<std::tuple<std::string, std::string, double>>{},
      py::arg("damping") = LbpParams{}.damping,
      py::arg("tolerance") = LbpParams{}.tolerance,
      py::arg("max_iterations") = LbpParams{}.max_iterations,
      "Loopy-BP marginals P(y=1). priors: [(name, p1)]; factors: "
      "[(a, b, agreement)] with the agreement mass on the diagonal.");

  m.def(
      "exact_marginals",
      [](const std::vector<std::pair<std::string, double>>& priors,
         const std::vector<std::tuple<std::string, std::string, double>>&
             factors) {
        auto g = graph_from_spec(priors, factors);
        return marginal_dict(g, lnf::exact_marginals(g));
      },
      py::arg("priors"), py::arg("factors") =
          std::vector<std::tuple<std::string, std::string, double>>{},
      "Brute-force enumeration oracle for the same graph spec (<= 20 "
      "variables).");

  m.def(
      "generate_synthetic",
      [](int groups, int users_per_group, int sessions, int training_sessions,
         double noise, double cold_fraction, std::uint64_t seed) {
        synth::GeneratorSpec spec;
        spec.groups = groups;
        spec.users_per_group = users_per_group;
        spec.sessions = sessions;
        spec.training_sessions = training_sessions;
        spec.noise = noise;
        spec.cold_fraction = cold_fraction;
        spec.seed = seed;
        auto bundle = synth::generate(spec);
        py::dict out;
        out["events"] = bundle.schedule.size();
        out["participation_records"] = bundle.participation.size();
        out["encounters"] = bundle.encounters.size();
        out["truth_pairs"] = bundle.truth.attended.size();
        out["split_time"] = bundle.split_time;
        out["cold_users"] = bundle.cold_users.size();
        return out;
      },
      py::arg("groups") = 2, py::arg("users_per_group") = 20,
      py::arg("sessions") = 8, py::arg("training_sessions") = 6,
      py::arg("noise") = 0.0, py::arg("cold_fraction") = 0.0,
      py::arg("seed") = 0,
      "Generate a planted-community bundle in memory; returns size "
      "summaries (use run_synth to write one to disk).");

  m.def(
      "run_synth",
      [](const std::string& config_path, std::optional<std::string> out,
         std::optional<std::uint64_t> seed) {
        auto config = config_for(config_path, out);
        if (seed) {
          config.seed = *seed;
          config.seed_set = true;
        }
        pipeline::run_synth(config);
      },
      py::arg("config"), py::arg("out") = std::nullopt,
      py::arg("seed") = std::nullopt,
      "Write a synthetic input bundle per the config's synth_spec.");

  m.def(
      "run_recommend",
      [](const std::string& config_path, std::optional<std::string> out) {
        pipeline::run_recommend(config_for(config_path, out));
      },
      py::arg("config"), py::arg("out") = std::nullopt,
      "Rank upcoming parallel events per attendee; writes CSV outputs.");

  m.def(
      "run_evaluate",
      [](const std::string& config_path, std::optional<std::string> out,
         std::optional<std::string> sweep) {
        std::optional<pipeline::SweepSpec> parsed;
        if (sweep) parsed = pipeline::parse_sweep(*sweep);
        pipeline::run_evaluate(config_for(config_path, out), parsed);
      },
      py::arg("config"), py::arg("out") = std::nullopt,
      py::arg("sweep") = std::nullopt,
      "Score the configured methods against ground truth; writes report "
      "files. sweep: e.g. 'K=2..10' or 'phi=0.2,0.3'.");

  m.def(
      "run_ingest",
      [](const std::string& config_path, std::optional<std::string> out) {
        pipeline::run_ingest(config_for(config_path, out));
      },
      py::arg("config"), py::arg("out") = std::nullopt,
      "Extract and cleanse records from a raw presence log.");
}
