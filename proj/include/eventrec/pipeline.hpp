#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "eventrec/eval.hpp"
#include "eventrec/ingest.hpp"
#include "eventrec/types.hpp"

namespace eventrec::pipeline {

// One config file drives every subcommand; CLI flags override single keys.
struct PipelineConfig {
  struct Paths {
    std::string raw_log;        // raw reader log (optional)
    std::string schedule;       // required by recommend/evaluate/ingest
    std::string participation;  // pre-extracted records (optional)
    std::string encounters;     // pre-extracted records (optional)
    std::string synth_spec;     // generator spec (synth only)
    std::string output_dir = "out";
  } paths;

  std::vector<std::string> common_zones;  // encounter areas in raw logs
  double sessionize_gap = 120.0;
  double split_time = 0;  // events ending at or before this train the model

  CleansingConfig cleansing;
  RelationThresholds thresholds;
  LbpParams lbp;
  FactorOptions factors;

  std::string method = "LNF-gfh-ET";   // recommend
  std::vector<std::string> methods;    // evaluate; defaulted to all six
  std::uint64_t seed = 0;              // synth; overrides the spec when set
  bool seed_set = false;
  int threads = 1;

  std::string config_path;  // for the run manifest; empty when flag-only

  void validate_common() const;
};

// ConfigError names the offending field. Relative paths are resolved
// against the config file's directory.
PipelineConfig load_config(const std::string& path);

// Threshold sweep, e.g. "K=2..10" (integer range) or "phi=0.2,0.3,0.4".
// Keys: K, phi, delta, theta.
struct SweepSpec {
  std::string key;
  std::vector<double> values;
};

SweepSpec parse_sweep(const std::string& text);

// Grid rows: the base thresholds with the swept key replaced per value.
std::vector<RelationThresholds> apply_sweep(
    const RelationThresholds& base, const std::optional<SweepSpec>& sweep);

// Everything the commands share: schedule, the cleansed training/test split,
// and the cleansing report.
struct LoadedData {
  eval::Dataset dataset;
  ingest::CleansingReport report;
  bool from_raw_log = false;
  Warnings warnings;
};

LoadedData load_dataset(const PipelineConfig& config);

// Subcommand bodies. They throw ConfigError/DataError; the CLI maps those to
// exit codes 2/3 (anything else: 4).
void run_recommend(const PipelineConfig& config);
void run_evaluate(const PipelineConfig& config,
                  const std::optional<SweepSpec>& sweep);
void run_synth(const PipelineConfig& config);
void run_ingest(const PipelineConfig& config);

}  // namespace eventrec::pipeline
