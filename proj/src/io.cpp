#include "eventrec/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <tuple>

#include "eventrec/error.hpp"
#include "eventrec/version.hpp"
#include "json.hpp"

namespace eventrec::io {

using nlohmann::json;

std::string format_double(double value) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc{}) throw DataError("failed to format a number");
  return std::string(buf, ptr);
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t hash = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    hash ^= c;
    hash *= 0x100000001b3ull;
  }
  return hash;
}

std::string fnv1a64_hex(std::string_view bytes) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(fnv1a64(bytes)));
  return buf;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read '" + path + "'");
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

void write_file(const std::string& path, const std::string& content) {
  auto parent = std::filesystem::path(path).parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write '" + path + "'");
  out << content;
  if (!out) throw DataError("failed while writing '" + path + "'");
}

std::string hash_file(const std::string& path) {
  return fnv1a64_hex(read_file(path));
}

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t from = 0;
  while (true) {
    auto comma = line.find(',', from);
    if (comma == std::string::npos) {
      fields.push_back(line.substr(from));
      return fields;
    }
    fields.push_back(line.substr(from, comma - from));
    from = comma + 1;
  }
}

// lines without the trailing newline; CRLF tolerated
std::vector<std::string> read_lines(const std::string& path) {
  std::string content = read_file(path);
  std::vector<std::string> lines;
  std::size_t from = 0;
  while (from < content.size()) {
    auto nl = content.find('\n', from);
    if (nl == std::string::npos) nl = content.size();
    std::string line = content.substr(from, nl - from);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(std::move(line));
    from = nl + 1;
  }
  return lines;
}

bool parse_double(const std::string& text, double& out) {
  auto [ptr, ec] =
      std::from_chars(text.data(), text.data() + text.size(), out);
  return ec == std::errc{} && ptr == text.data() + text.size() &&
         std::isfinite(out);
}

void expect_header(const std::vector<std::string>& lines,
                   const std::string& header, const std::string& path) {
  if (lines.empty() || lines.front() != header)
    throw DataError("'" + path + "' must start with header '" + header + "'");
}

std::string csv_line(std::initializer_list<std::string> fields) {
  std::string line;
  for (const auto& f : fields) {
    if (f.find(',') != std::string::npos ||
        f.find('\n') != std::string::npos)
      throw DataError("field '" + f + "' contains a delimiter");
    if (!line.empty()) line += ',';
    line += f;
  }
  line += '\n';
  return line;
}

json parse_json(const std::string& path) {
  json parsed = json::parse(read_file(path), nullptr, false);
  if (parsed.is_discarded())
    throw DataError("'" + path + "' is not valid JSON");
  return parsed;
}

}  // namespace

std::vector<ingest::RawRead> read_raw_log(const std::string& path,
                                          ingest::CleansingReport* report) {
  auto lines = read_lines(path);
  expect_header(lines, "user_id,zone_id,timestamp_unix_s", path);

  std::vector<ingest::RawRead> rows;
  for (std::size_t i = 1; i < lines.size(); i++) {
    if (lines[i].empty()) continue;
    if (report) report->rows_read++;
    auto fields = split_line(lines[i]);
    double ts;
    if (fields.size() != 3 || fields[0].empty() || fields[1].empty() ||
        !parse_double(fields[2], ts)) {
      if (report) report->rows_rejected++;
      continue;
    }
    rows.push_back({fields[0], fields[1], ts});
  }
  return rows;
}

std::vector<EventDescriptor> read_schedule(const std::string& path) {
  json parsed = parse_json(path);
  if (!parsed.is_array())
    throw DataError("'" + path + "' must be a JSON array of events");

  std::vector<EventDescriptor> schedule;
  for (std::size_t i = 0; i < parsed.size(); i++) {
    const json& row = parsed[i];
    auto field = [&](const char* key) -> const json& {
      if (!row.is_object() || !row.contains(key))
        throw DataError("'" + path + "': event " + std::to_string(i) +
                        " is missing '" + key + "'");
      return row[key];
    };
    EventDescriptor ev;
    try {
      ev.id = field("id").get<std::string>();
      ev.session_id = field("session_id").get<std::string>();
      ev.zone_id = field("zone_id").get<std::string>();
      ev.start = field("start_unix_s").get<double>();
      ev.end = field("end_unix_s").get<double>();
      ev.contexts = field("contexts").get<std::vector<std::string>>();
    } catch (const json::exception& e) {
      throw DataError("'" + path + "': event " + std::to_string(i) + ": " +
                      e.what());
    }
    if (ev.id.empty())
      throw DataError("'" + path + "': event " + std::to_string(i) +
                      " has an empty id");
    if (!(ev.end > ev.start))
      throw DataError("'" + path + "': event '" + ev.id +
                      "' has end <= start");
    schedule.push_back(std::move(ev));
  }
  return schedule;
}

void write_schedule(const std::string& path,
                    const std::vector<EventDescriptor>& schedule) {
  json out = json::array();
  for (const auto& ev : schedule) {
    out.push_back({{"id", ev.id},
                   {"session_id", ev.session_id},
                   {"zone_id", ev.zone_id},
                   {"start_unix_s", ev.start},
                   {"end_unix_s", ev.end},
                   {"contexts", ev.contexts}});
  }
  write_file(path, out.dump(2) + "\n");
}

std::vector<ParticipationRecord> read_participation(const std::string& path) {
  auto lines = read_lines(path);
  expect_header(lines, "user_id,event_id,duration_s", path);

  std::vector<ParticipationRecord> records;
  for (std::size_t i = 1; i < lines.size(); i++) {
    if (lines[i].empty()) continue;
    auto fields = split_line(lines[i]);
    double dur;
    if (fields.size() != 3 || fields[0].empty() || fields[1].empty() ||
        !parse_double(fields[2], dur) || !(dur > 0))
      throw DataError("'" + path + "' line " + std::to_string(i + 1) +
                      " is malformed");
    records.push_back({fields[0], fields[1], dur});
  }
  return records;
}

void write_participation(const std::string& path,
                         const std::vector<ParticipationRecord>& records) {
  std::string out = "user_id,event_id,duration_s\n";
  for (const auto& r : records)
    out += csv_line({r.user_id, r.event_id, format_double(r.duration)});
  write_file(path, out);
}

std::vector<EncounterRecord> read_encounters(const std::string& path) {
  auto lines = read_lines(path);
  expect_header(lines, "user_a,user_b,start_unix_s,duration_s", path);

  std::vector<EncounterRecord> records;
  for (std::size_t i = 1; i < lines.size(); i++) {
    if (lines[i].empty()) continue;
    auto fields = split_line(lines[i]);
    double start, dur;
    if (fields.size() != 4 || fields[0].empty() || fields[1].empty() ||
        !parse_double(fields[2], start) || !parse_double(fields[3], dur) ||
        !(dur > 0))
      throw DataError("'" + path + "' line " + std::to_string(i + 1) +
                      " is malformed");
    if (fields[0] == fields[1])
      throw DataError("'" + path + "' line " + std::to_string(i + 1) +
                      " pairs a user with itself");
    auto pair = make_user_pair(fields[0], fields[1]);
    records.push_back({pair.first, pair.second, dur, start});
  }
  return records;
}

void write_encounters(const std::string& path,
                      const std::vector<EncounterRecord>& records) {
  std::string out = "user_a,user_b,start_unix_s,duration_s\n";
  for (const auto& r : records)
    out += csv_line({r.user_a, r.user_b, format_double(r.start),
                     format_double(r.duration)});
  write_file(path, out);
}

eval::GroundTruth read_truth(const std::string& path) {
  auto lines = read_lines(path);
  expect_header(lines, "user_id,session_id,event_id", path);

  eval::GroundTruth truth;
  for (std::size_t i = 1; i < lines.size(); i++) {
    if (lines[i].empty()) continue;
    auto fields = split_line(lines[i]);
    if (fields.size() != 3 || fields[0].empty() || fields[1].empty() ||
        fields[2].empty())
      throw DataError("'" + path + "' line " + std::to_string(i + 1) +
                      " is malformed");
    truth.attended[{fields[0], fields[1]}] = fields[2];
  }
  return truth;
}

void write_truth(const std::string& path, const eval::GroundTruth& truth) {
  std::string out = "user_id,session_id,event_id\n";
  for (const auto& [key, event] : truth.attended)
    out += csv_line({key.first, key.second, event});
  write_file(path, out);
}

void write_cleansing_report(const std::string& path,
                            const ingest::CleansingReport& report) {
  json out = {
      {"rows_read", report.rows_read},
      {"rows_rejected", report.rows_rejected},
      {"records_dropped_short", report.records_dropped_short()},
      {"participation_dropped_short", report.participation_dropped_short},
      {"encounters_dropped_short", report.encounters_dropped_short},
      {"users_dropped_sparse", report.users_dropped_sparse},
  };
  write_file(path, out.dump(2) + "\n");
}

void write_recommendations(
    const std::string& path,
    const std::vector<rank::RankedRecommendation>& recs) {
  std::string out = "user_id,session_id,rank,event_id,score\n";
  for (const auto& rec : recs) {
    for (std::size_t i = 0; i < rec.ranking.size(); i++)
      out += csv_line({rec.user_id, rec.session_id, std::to_string(i + 1),
                       rec.ranking[i].event_id,
                       format_double(rec.ranking[i].score)});
  }
  write_file(path, out);
}

void write_marginals(const std::string& path,
                     const lnf::MarginalTable& marginals) {
  // (user, context) rows, user-major
  std::map<std::string, std::map<std::string, double>> by_user;
  for (const auto& [context, column] : marginals.p1)
    for (const auto& [user, p] : column) by_user[user][context] = p;

  std::string out = "user_id,context,probability,converged\n";
  for (const auto& [user, row] : by_user) {
    for (const auto& [context, p] : row) {
      bool ok = marginals.converged.count(context)
                    ? marginals.converged.at(context)
                    : true;
      out += csv_line(
          {user, context, format_double(p), ok ? "true" : "false"});
    }
  }
  write_file(path, out);
}

void write_attendance(const std::string& path,
                      const std::vector<eval::AttendanceForecast>& forecasts) {
  std::string out = "session_id,event_id,top1_count,expected_count\n";
  for (const auto& f : forecasts) {
    for (const auto& [event, count] : f.top1) {
      double expected =
          f.expected.count(event) ? f.expected.at(event) : 0.0;
      out += csv_line({f.session_id, event, std::to_string(count),
                       format_double(expected)});
    }
  }
  write_file(path, out);
}

namespace {

json cell_to_json(const eval::ExperimentCell& cell) {
  return {{"method", rank::method_name(cell.method)},
          {"thresholds",
           {{"K", cell.thresholds.k_neighbors},
            {"phi", cell.thresholds.relevancy},
            {"delta", cell.thresholds.encounter_frequency},
            {"theta", cell.thresholds.encounter_time}}},
          {"precision", cell.precision},
          {"ndcg", cell.ndcg},
          {"n_users", cell.n_users},
          {"n_sessions", cell.n_sessions}};
}

}  // namespace

void write_metrics_json(const std::string& path,
                        const eval::MetricsReport& report) {
  json cells = json::array();
  for (const auto& cell : report.cells) cells.push_back(cell_to_json(cell));
  write_file(path, json{{"cells", cells}}.dump(2) + "\n");
}

void write_metrics_csv(const std::string& path,
                       const eval::MetricsReport& report) {
  std::string out =
      "method,K,phi,delta,theta,precision,ndcg,n_users,n_sessions\n";
  for (const auto& c : report.cells)
    out += csv_line({rank::method_name(c.method),
                     std::to_string(c.thresholds.k_neighbors),
                     format_double(c.thresholds.relevancy),
                     std::to_string(c.thresholds.encounter_frequency),
                     format_double(c.thresholds.encounter_time),
                     format_double(c.precision), format_double(c.ndcg),
                     std::to_string(c.n_users),
                     std::to_string(c.n_sessions)});
  write_file(path, out);
}

namespace {

json edges_json(const std::vector<std::tuple<std::string, std::string, double>>&
                    edges) {
  json out = json::array();
  for (const auto& [a, b, w] : edges)
    out.push_back({{"a", a}, {"b", b}, {"w", w}});
  return out;
}

}  // namespace

void write_network_json(const std::string& path,
                        const obsnet::EventParticipationNetwork& network) {
  std::vector<std::tuple<std::string, std::string, double>> edges;
  for (const auto& [user, row] : network.edges)
    for (const auto& [event, w] : row) edges.push_back({user, event, w});
  json events = json::array();
  for (const auto& [id, ev] : network.events) events.push_back(id);
  json out = {{"kind", "participation"},
              {"users", network.users},
              {"events", events},
              {"edges", edges_json(edges)}};
  write_file(path, out.dump(2) + "\n");
}

void write_network_json(const std::string& path,
                        const obsnet::PhysicalProximityNetwork& network) {
  std::vector<std::tuple<std::string, std::string, double>> edges;
  for (const auto& e : network.edges)
    edges.push_back({e.user_a, e.user_b, e.weight});
  json out = {{"kind", "proximity"},
              {"users", network.users},
              {"edges", edges_json(edges)}};
  write_file(path, out.dump(2) + "\n");
}

void write_network_json(const std::string& path,
                        const latent::SimilarityNetwork& network) {
  std::vector<std::tuple<std::string, std::string, double>> edges;
  for (const auto& [user, row] : network.out)
    for (const auto& [other, lambda] : row)
      edges.push_back({user, other, lambda});
  json out = {{"kind", "similarity"},
              {"users", network.users},
              {"edges", edges_json(edges)}};
  write_file(path, out.dump(2) + "\n");
}

void write_network_json(const std::string& path,
                        const latent::RelevancyNetwork& network) {
  std::vector<std::tuple<std::string, std::string, double>> edges;
  for (const auto& e : network.edges)
    edges.push_back({e.user_a, e.user_b, e.mu});
  json out = {{"kind", "relevancy"},
              {"users", network.users},
              {"edges", edges_json(edges)}};
  write_file(path, out.dump(2) + "\n");
}

void write_network_json(const std::string& path,
                        const latent::EncounterNetwork& network) {
  std::vector<std::tuple<std::string, std::string, double>> edges;
  for (const auto& e : network.edges)
    edges.push_back({e.user_a, e.user_b, e.weight(network.mode)});
  json out = {{"kind", network.mode == EncounterMode::frequency
                           ? "encounter-frequency"
                           : "encounter-time"},
              {"users", network.users},
              {"edges", edges_json(edges)}};
  write_file(path, out.dump(2) + "\n");
}

void write_manifest(const std::string& path, const RunManifest& manifest) {
  json inputs = json::object();
  for (const auto& [file, hash] : manifest.input_hashes) inputs[file] = hash;
  std::vector<std::string> outputs = manifest.outputs;
  std::sort(outputs.begin(), outputs.end());
  json out = {{"tool", kToolName},
              {"version", kVersion},
              {"command", manifest.command},
              {"config_hash", manifest.config_hash},
              {"input_hashes", inputs},
              {"outputs", outputs}};
  write_file(path, out.dump(2) + "\n");
}

}  // namespace eventrec::io
