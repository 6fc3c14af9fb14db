#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "eventrec/error.hpp"
#include "eventrec/pipeline.hpp"
#include "eventrec/version.hpp"

int main(int argc, char** argv) {
  CLI::App app{"event recommendation pipeline for proximity-sensed "
               "conference data"};
  app.set_version_flag("--version",
                       std::string(eventrec::kToolName) + " " +
                           eventrec::kVersion);
  app.fallthrough();
  app.require_subcommand(1);

  std::string config_path, out_dir, sweep_text;
  std::uint64_t seed = 0;
  int threads = 0;
  auto* config_opt =
      app.add_option("--config", config_path, "configuration file (JSON)");
  auto* out_opt =
      app.add_option("--out", out_dir, "output directory (overrides config)");
  auto* seed_opt =
      app.add_option("--seed", seed, "generator seed (overrides config)");
  auto* threads_opt =
      app.add_option("--threads", threads, "worker threads (reserved)");

  auto* recommend = app.add_subcommand(
      "recommend", "rank upcoming parallel events per attendee");
  auto* evaluate = app.add_subcommand(
      "evaluate", "score methods against ground truth");
  evaluate->add_option("--sweep", sweep_text,
                       "threshold sweep, e.g. K=2..10 or phi=0.2,0.3,0.4");
  auto* synth = app.add_subcommand(
      "synth", "generate a synthetic planted-community bundle");
  auto* ingest = app.add_subcommand(
      "ingest", "extract and cleanse records from a raw presence log");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;  // bad usage is a configuration problem
  }

  const std::string stage = recommend->parsed()   ? "recommend"
                            : evaluate->parsed()  ? "evaluate"
                            : synth->parsed()     ? "synth"
                                                  : "ingest";
  try {
    eventrec::pipeline::PipelineConfig config;
    if (config_opt->count())
      config = eventrec::pipeline::load_config(config_path);
    if (out_opt->count()) config.paths.output_dir = out_dir;
    if (seed_opt->count()) {
      config.seed = seed;
      config.seed_set = true;
    }
    if (threads_opt->count()) config.threads = threads;

    std::optional<eventrec::pipeline::SweepSpec> sweep;
    if (!sweep_text.empty())
      sweep = eventrec::pipeline::parse_sweep(sweep_text);

    if (recommend->parsed())
      eventrec::pipeline::run_recommend(config);
    else if (evaluate->parsed())
      eventrec::pipeline::run_evaluate(config, sweep);
    else if (synth->parsed())
      eventrec::pipeline::run_synth(config);
    else
      eventrec::pipeline::run_ingest(config);
    return 0;
  } catch (const eventrec::ConfigError& e) {
    std::cerr << stage << ": config error: " << e.what() << "\n";
    return 2;
  } catch (const eventrec::DataError& e) {
    std::cerr << stage << ": data error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << stage << ": internal error: " << e.what() << "\n";
    return 4;
  }
}
