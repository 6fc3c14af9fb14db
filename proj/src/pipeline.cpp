#include "eventrec/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <set>

#include "eventrec/error.hpp"
#include "eventrec/io.hpp"
#include "eventrec/rank.hpp"
#include "eventrec/synth.hpp"
#include "json.hpp"

namespace eventrec::pipeline {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

const std::vector<std::string>& default_methods() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (rank::Method m : rank::all_methods())
      out.push_back(rank::method_name(m));
    return out;
  }();
  return names;
}

void reject_unknown_keys(const json& obj, const std::set<std::string>& known,
                         const std::string& where) {
  for (const auto& [key, value] : obj.items())
    if (!known.count(key))
      throw ConfigError("config: unknown key '" + where + key + "'");
}

template <typename T>
void read_key(const json& obj, const char* key, T& out,
              const std::string& where) {
  if (!obj.contains(key)) return;
  try {
    out = obj[key].get<T>();
  } catch (const json::exception&) {
    throw ConfigError("config: '" + where + key + "' has the wrong type");
  }
}

std::string resolve(const fs::path& base, const std::string& path) {
  if (path.empty()) return path;
  fs::path p(path);
  return p.is_absolute() ? p.string() : (base / p).string();
}

}  // namespace

void PipelineConfig::validate_common() const {
  cleansing.validate();
  thresholds.validate();
  lbp.validate();
  if (!(sessionize_gap > 0))
    throw ConfigError("sessionize_gap must be > 0");
  if (!(factors.constraint_strength > 0 && factors.constraint_strength < 1))
    throw ConfigError("factors.beta must be in (0,1)");
  if (threads < 1) throw ConfigError("threads must be >= 1");
}

PipelineConfig load_config(const std::string& path) {
  PipelineConfig config;
  config.methods = default_methods();
  config.config_path = path;

  json root = json::parse(io::read_file(path), nullptr, false);
  if (root.is_discarded())
    throw ConfigError("config '" + path + "' is not valid JSON");
  if (!root.is_object())
    throw ConfigError("config '" + path + "' must be a JSON object");

  reject_unknown_keys(root,
                      {"paths", "common_zones", "sessionize_gap", "split_time",
                       "cleansing", "thresholds", "lbp", "factors", "method",
                       "methods", "seed", "threads"},
                      "");

  if (root.contains("paths")) {
    const json& p = root["paths"];
    reject_unknown_keys(p,
                        {"raw_log", "schedule", "participation", "encounters",
                         "synth_spec", "output_dir"},
                        "paths.");
    read_key(p, "raw_log", config.paths.raw_log, "paths.");
    read_key(p, "schedule", config.paths.schedule, "paths.");
    read_key(p, "participation", config.paths.participation, "paths.");
    read_key(p, "encounters", config.paths.encounters, "paths.");
    read_key(p, "synth_spec", config.paths.synth_spec, "paths.");
    read_key(p, "output_dir", config.paths.output_dir, "paths.");
  }
  read_key(root, "common_zones", config.common_zones, "");
  read_key(root, "sessionize_gap", config.sessionize_gap, "");
  read_key(root, "split_time", config.split_time, "");

  if (root.contains("cleansing")) {
    const json& c = root["cleansing"];
    reject_unknown_keys(c,
                        {"min_participation_duration",
                         "min_participation_count", "min_encounter_duration"},
                        "cleansing.");
    read_key(c, "min_participation_duration",
             config.cleansing.min_participation_duration, "cleansing.");
    read_key(c, "min_participation_count",
             config.cleansing.min_participation_count, "cleansing.");
    read_key(c, "min_encounter_duration",
             config.cleansing.min_encounter_duration, "cleansing.");
  }
  if (root.contains("thresholds")) {
    const json& t = root["thresholds"];
    reject_unknown_keys(t, {"K", "phi", "delta", "theta"}, "thresholds.");
    read_key(t, "K", config.thresholds.k_neighbors, "thresholds.");
    read_key(t, "phi", config.thresholds.relevancy, "thresholds.");
    read_key(t, "delta", config.thresholds.encounter_frequency, "thresholds.");
    read_key(t, "theta", config.thresholds.encounter_time, "thresholds.");
  }
  if (root.contains("lbp")) {
    const json& l = root["lbp"];
    reject_unknown_keys(l, {"damping", "tolerance", "max_iterations"}, "lbp.");
    read_key(l, "damping", config.lbp.damping, "lbp.");
    read_key(l, "tolerance", config.lbp.tolerance, "lbp.");
    read_key(l, "max_iterations", config.lbp.max_iterations, "lbp.");
  }
  if (root.contains("factors")) {
    const json& f = root["factors"];
    reject_unknown_keys(f, {"beta"}, "factors.");
    read_key(f, "beta", config.factors.constraint_strength, "factors.");
  }
  read_key(root, "method", config.method, "");
  if (root.contains("methods")) {
    read_key(root, "methods", config.methods, "");
    if (config.methods.empty())
      throw ConfigError("config: 'methods' must not be empty");
  }
  if (root.contains("seed")) {
    read_key(root, "seed", config.seed, "");
    config.seed_set = true;
  }
  read_key(root, "threads", config.threads, "");

  const fs::path base = fs::path(path).parent_path();
  config.paths.raw_log = resolve(base, config.paths.raw_log);
  config.paths.schedule = resolve(base, config.paths.schedule);
  config.paths.participation = resolve(base, config.paths.participation);
  config.paths.encounters = resolve(base, config.paths.encounters);
  config.paths.synth_spec = resolve(base, config.paths.synth_spec);
  config.paths.output_dir = resolve(base, config.paths.output_dir);

  config.validate_common();
  return config;
}

SweepSpec parse_sweep(const std::string& text) {
  auto eq = text.find('=');
  if (eq == std::string::npos)
    throw ConfigError("sweep must look like 'K=2..10' or 'phi=0.2,0.4'");
  SweepSpec spec;
  spec.key = text.substr(0, eq);
  if (spec.key != "K" && spec.key != "phi" && spec.key != "delta" &&
      spec.key != "theta")
    throw ConfigError("sweep key must be one of K, phi, delta, theta");

  std::string rest = text.substr(eq + 1);
  auto dots = rest.find("..");
  try {
    if (dots != std::string::npos) {
      int lo = std::stoi(rest.substr(0, dots));
      int hi = std::stoi(rest.substr(dots + 2));
      if (hi < lo) throw ConfigError("sweep range is empty");
      for (int v = lo; v <= hi; v++)
        spec.values.push_back(static_cast<double>(v));
    } else {
      std::size_t from = 0;
      while (from <= rest.size()) {
        auto comma = rest.find(',', from);
        if (comma == std::string::npos) comma = rest.size();
        spec.values.push_back(std::stod(rest.substr(from, comma - from)));
        from = comma + 1;
      }
    }
  } catch (const std::logic_error&) {
    throw ConfigError("sweep values must be numeric");
  }
  if (spec.values.empty()) throw ConfigError("sweep lists no values");
  return spec;
}

std::vector<RelationThresholds> apply_sweep(
    const RelationThresholds& base, const std::optional<SweepSpec>& sweep) {
  if (!sweep) return {base};
  std::vector<RelationThresholds> grid;
  for (double v : sweep->values) {
    RelationThresholds row = base;
    if (sweep->key == "K")
      row.k_neighbors = static_cast<int>(std::lround(v));
    else if (sweep->key == "phi")
      row.relevancy = v;
    else if (sweep->key == "delta")
      row.encounter_frequency = static_cast<int>(std::lround(v));
    else
      row.encounter_time = v;
    row.validate();
    grid.push_back(row);
  }
  return grid;
}

namespace {

struct SplitRecords {
  std::vector<ParticipationRecord> training;
  std::vector<ParticipationRecord> test;
};

SplitRecords split_participation(const std::vector<ParticipationRecord>& all,
                                 const std::vector<EventDescriptor>& schedule,
                                 double split_time) {
  std::map<std::string, double> end_of;
  for (const auto& ev : schedule) end_of[ev.id] = ev.end;

  SplitRecords out;
  for (const auto& rec : all) {
    auto it = end_of.find(rec.event_id);
    if (it == end_of.end())
      throw DataError("participation record references event '" +
                      rec.event_id + "' missing from the schedule");
    (it->second <= split_time ? out.training : out.test).push_back(rec);
  }
  return out;
}

// duration floor for pre-extracted record files (raw-log extraction applies
// it inline)
std::vector<ParticipationRecord> floor_participation(
    std::vector<ParticipationRecord> records, const CleansingConfig& cfg,
    ingest::CleansingReport* report) {
  std::vector<ParticipationRecord> out;
  for (auto& rec : records) {
    if (rec.duration < cfg.min_participation_duration) {
      if (report) report->participation_dropped_short++;
      continue;
    }
    out.push_back(std::move(rec));
  }
  return out;
}

std::vector<EncounterRecord> floor_encounters(
    std::vector<EncounterRecord> records, const CleansingConfig& cfg,
    ingest::CleansingReport* report) {
  std::vector<EncounterRecord> out;
  for (auto& rec : records) {
    if (rec.duration < cfg.min_encounter_duration) {
      if (report) report->encounters_dropped_short++;
      continue;
    }
    out.push_back(std::move(rec));
  }
  return out;
}

struct ExtractedRecords {
  std::vector<ParticipationRecord> participation;
  std::vector<EncounterRecord> encounters;
};

ExtractedRecords extract_records(const PipelineConfig& config,
                                 const std::vector<EventDescriptor>& schedule,
                                 ingest::CleansingReport* report) {
  ExtractedRecords out;
  if (!config.paths.raw_log.empty()) {
    if (!config.paths.participation.empty())
      throw ConfigError(
          "give paths.raw_log or paths.participation, not both");

    std::set<std::string> rooms;
    for (const auto& ev : schedule) rooms.insert(ev.zone_id);
    std::set<std::string> common(config.common_zones.begin(),
                                 config.common_zones.end());
    for (const auto& z : common)
      if (rooms.count(z))
        throw ConfigError("common zone '" + z + "' is also an event room");

    auto rows = io::read_raw_log(config.paths.raw_log, report);
    auto intervals = ingest::sessionize(rows, config.sessionize_gap, report);
    out.participation = ingest::extract_participation(intervals, schedule,
                                                      config.cleansing,
                                                      report);
    out.encounters = ingest::extract_encounters(intervals, common,
                                                config.cleansing, report);
    return out;
  }

  if (config.paths.participation.empty())
    throw ConfigError("paths.participation (or paths.raw_log) is required");
  out.participation =
      floor_participation(io::read_participation(config.paths.participation),
                          config.cleansing, report);
  if (!config.paths.encounters.empty())
    out.encounters = floor_encounters(
        io::read_encounters(config.paths.encounters), config.cleansing,
        report);
  return out;
}

void emit_warnings(const Warnings& warnings) {
  for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
}

io::RunManifest make_manifest(
    const PipelineConfig& config, const std::string& command,
    const std::vector<std::pair<std::string, std::string>>& inputs,
    const std::vector<std::string>& outputs) {
  io::RunManifest manifest;
  manifest.command = command;
  manifest.config_hash = config.config_path.empty()
                             ? "-"
                             : io::hash_file(config.config_path);
  // Key by input role, not path, so manifests do not depend on where the
  // inputs live or what the files are called.
  for (const auto& [role, path] : inputs)
    if (!path.empty()) manifest.input_hashes[role] = io::hash_file(path);
  manifest.outputs = outputs;
  return manifest;
}

std::string join(const std::string& dir, const std::string& name) {
  return (fs::path(dir) / name).string();
}

}  // namespace

LoadedData load_dataset(const PipelineConfig& config) {
  config.validate_common();
  if (config.paths.schedule.empty())
    throw ConfigError("paths.schedule is required");

  LoadedData data;
  data.dataset.schedule = io::read_schedule(config.paths.schedule);
  data.dataset.split_time = config.split_time;
  data.from_raw_log = !config.paths.raw_log.empty();

  bool has_training = false, has_test = false;
  for (const auto& ev : data.dataset.schedule)
    (ev.end <= config.split_time ? has_training : has_test) = true;
  if (!has_training || !has_test)
    throw ConfigError("split_time must fall inside the schedule range");

  auto extracted = extract_records(config, data.dataset.schedule, &data.report);
  auto split = split_participation(extracted.participation,
                                   data.dataset.schedule, config.split_time);

  auto cleansed = ingest::cleanse_attendees(split.training, config.cleansing,
                                            &data.report, &data.warnings);
  data.dataset.training = std::move(cleansed.kept);
  data.dataset.test = std::move(split.test);

  std::vector<EncounterRecord> training_encounters;
  for (const auto& rec : extracted.encounters)
    if (rec.start <= config.split_time) training_encounters.push_back(rec);
  data.dataset.encounters = ingest::filter_encounters_by_users(
      training_encounters, cleansed.removed_users);
  return data;
}

void run_recommend(const PipelineConfig& config) {
  rank::Method method = rank::parse_method(config.method);
  LoadedData data = load_dataset(config);

  eval::MethodOutput out =
      eval::run_method(data.dataset, method, config.thresholds, config.lbp,
                       config.factors, &data.warnings);

  // forecasts per test session, session order
  std::map<std::string, std::vector<rank::RankedRecommendation>> by_session;
  for (const auto& rec : out.recommendations)
    by_session[rec.session_id].push_back(rec);
  std::vector<eval::AttendanceForecast> forecasts;
  for (const auto& [sid, recs] : by_session)
    forecasts.push_back(eval::predicted_attendance(recs));

  const std::string& dir = config.paths.output_dir;
  std::vector<std::string> outputs = {"recommendations.csv", "attendance.csv",
                                      "cleansing_report.json",
                                      "run_manifest.json"};
  io::write_recommendations(join(dir, "recommendations.csv"),
                            out.recommendations);
  io::write_attendance(join(dir, "attendance.csv"), forecasts);
  io::write_cleansing_report(join(dir, "cleansing_report.json"), data.report);
  if (!out.marginals.p1.empty()) {
    io::write_marginals(join(dir, "marginals.csv"), out.marginals);
    outputs.push_back("marginals.csv");
  }

  auto manifest = make_manifest(
      config, "recommend",
      {{"schedule", config.paths.schedule},
       {"raw_log", config.paths.raw_log},
       {"participation", config.paths.participation},
       {"encounters", config.paths.encounters}},
      outputs);
  io::write_manifest(join(dir, "run_manifest.json"), manifest);
  emit_warnings(data.warnings);
}

void run_evaluate(const PipelineConfig& config,
                  const std::optional<SweepSpec>& sweep) {
  LoadedData data = load_dataset(config);

  eval::ExperimentConfig experiment;
  for (const auto& name : config.methods)
    experiment.methods.push_back(rank::parse_method(name));
  experiment.threshold_grid = apply_sweep(config.thresholds, sweep);
  experiment.lbp = config.lbp;
  experiment.options = config.factors;

  eval::MetricsReport report =
      eval::run_experiment(data.dataset, experiment, &data.warnings);

  const std::string& dir = config.paths.output_dir;
  io::write_metrics_json(join(dir, "report.json"), report);
  io::write_metrics_csv(join(dir, "report.csv"), report);
  io::write_cleansing_report(join(dir, "cleansing_report.json"), data.report);

  auto manifest = make_manifest(
      config, "evaluate",
      {{"schedule", config.paths.schedule},
       {"raw_log", config.paths.raw_log},
       {"participation", config.paths.participation},
       {"encounters", config.paths.encounters}},
      {"report.json", "report.csv", "cleansing_report.json",
       "run_manifest.json"});
  io::write_manifest(join(dir, "run_manifest.json"), manifest);
  emit_warnings(data.warnings);
}

void run_synth(const PipelineConfig& config) {
  if (config.paths.synth_spec.empty())
    throw ConfigError("paths.synth_spec is required");

  json root = json::parse(io::read_file(config.paths.synth_spec), nullptr,
                          false);
  if (root.is_discarded() || !root.is_object())
    throw ConfigError("synth spec '" + config.paths.synth_spec +
                      "' is not a JSON object");
  reject_unknown_keys(
      root,
      {"groups", "users_per_group", "contexts_per_group", "sessions",
       "training_sessions", "noise", "cold_fraction", "friends_per_cold",
       "encounters_per_friendship", "encounter_duration", "event_duration",
       "attend_fraction", "seed"},
      "synth.");

  synth::GeneratorSpec spec;
  read_key(root, "groups", spec.groups, "synth.");
  read_key(root, "users_per_group", spec.users_per_group, "synth.");
  read_key(root, "contexts_per_group", spec.contexts_per_group, "synth.");
  read_key(root, "sessions", spec.sessions, "synth.");
  read_key(root, "training_sessions", spec.training_sessions, "synth.");
  read_key(root, "noise", spec.noise, "synth.");
  read_key(root, "cold_fraction", spec.cold_fraction, "synth.");
  read_key(root, "friends_per_cold", spec.friends_per_cold, "synth.");
  read_key(root, "encounters_per_friendship", spec.encounters_per_friendship,
           "synth.");
  read_key(root, "encounter_duration", spec.encounter_duration, "synth.");
  read_key(root, "event_duration", spec.event_duration, "synth.");
  read_key(root, "attend_fraction", spec.attend_fraction, "synth.");
  read_key(root, "seed", spec.seed, "synth.");
  if (config.seed_set) spec.seed = config.seed;

  synth::Bundle bundle = synth::generate(spec);

  const std::string& dir = config.paths.output_dir;
  io::write_schedule(join(dir, "schedule.json"), bundle.schedule);
  io::write_participation(join(dir, "participation.csv"),
                          bundle.participation);
  io::write_encounters(join(dir, "encounters.csv"), bundle.encounters);
  io::write_truth(join(dir, "truth.csv"), bundle.truth);

  // a ready-to-run config so the bundle feeds recommend/evaluate directly
  json bundle_config = {
      {"paths",
       {{"schedule", "schedule.json"},
        {"participation", "participation.csv"},
        {"encounters", "encounters.csv"},
        {"output_dir", "out"}}},
      {"split_time", bundle.split_time},
  };
  io::write_file(join(dir, "config.json"), bundle_config.dump(2) + "\n");

  auto manifest =
      make_manifest(config, "synth", {{"synth_spec", config.paths.synth_spec}},
                    {"schedule.json", "participation.csv", "encounters.csv",
                     "truth.csv", "config.json", "run_manifest.json"});
  io::write_manifest(join(dir, "run_manifest.json"), manifest);
}

void run_ingest(const PipelineConfig& config) {
  config.validate_common();
  if (config.paths.raw_log.empty())
    throw ConfigError("paths.raw_log is required");
  if (config.paths.schedule.empty())
    throw ConfigError("paths.schedule is required");

  auto schedule = io::read_schedule(config.paths.schedule);
  ingest::CleansingReport report;
  Warnings warnings;
  auto extracted = extract_records(config, schedule, &report);

  // with a split point the sparse-attendee rule sees only the training
  // window; otherwise the whole log counts as training
  std::vector<ParticipationRecord> participation;
  std::set<std::string> removed;
  if (config.split_time > 0) {
    auto split =
        split_participation(extracted.participation, schedule,
                            config.split_time);
    auto cleansed = ingest::cleanse_attendees(split.training, config.cleansing,
                                              &report, &warnings);
    participation = std::move(cleansed.kept);
    participation.insert(participation.end(), split.test.begin(),
                         split.test.end());
    removed = std::move(cleansed.removed_users);
  } else {
    auto cleansed = ingest::cleanse_attendees(
        extracted.participation, config.cleansing, &report, &warnings);
    participation = std::move(cleansed.kept);
    removed = std::move(cleansed.removed_users);
  }
  auto encounters =
      ingest::filter_encounters_by_users(extracted.encounters, removed);

  const std::string& dir = config.paths.output_dir;
  io::write_participation(join(dir, "participation.csv"), participation);
  io::write_encounters(join(dir, "encounters.csv"), encounters);
  io::write_cleansing_report(join(dir, "cleansing_report.json"), report);

  auto manifest = make_manifest(
      config, "ingest",
      {{"raw_log", config.paths.raw_log}, {"schedule", config.paths.schedule}},
      {"participation.csv", "encounters.csv", "cleansing_report.json",
       "run_manifest.json"});
  io::write_manifest(join(dir, "run_manifest.json"), manifest);
  emit_warnings(warnings);
}

}  // namespace eventrec::pipeline
