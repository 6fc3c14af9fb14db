#include "eventrec/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>

#include "eventrec/error.hpp"

namespace eventrec::synth {

namespace {

std::string fmt(const char* pattern, int a, int b = 0) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), pattern, a, b);
  return buf;
}

// top 53 bits -> uniform double in [0,1); portable across standard libraries
double next_unit(std::mt19937_64& gen) {
  return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

}  // namespace

void GeneratorSpec::validate() const {
  if (groups < 2)
    throw ConfigError("synth.groups must be >= 2 (a session needs parallel "
                      "events)");
  if (groups > 10) throw ConfigError("synth.groups must be <= 10");
  if (users_per_group < 1 || users_per_group > 999)
    throw ConfigError("synth.users_per_group must be in [1,999]");
  if (contexts_per_group < 1 || contexts_per_group > 99)
    throw ConfigError("synth.contexts_per_group must be in [1,99]");
  if (sessions < 2 || sessions > 999)
    throw ConfigError("synth.sessions must be in [2,999]");
  if (training_sessions < 1 || training_sessions >= sessions)
    throw ConfigError("synth.training_sessions must be in [1, sessions)");
  if (!(noise >= 0 && noise <= 1))
    throw ConfigError("synth.noise must be in [0,1]");
  if (!(cold_fraction >= 0 && cold_fraction < 1))
    throw ConfigError("synth.cold_fraction must be in [0,1)");
  if (friends_per_cold < 0)
    throw ConfigError("synth.friends_per_cold must be >= 0");
  if (encounters_per_friendship < 0)
    throw ConfigError("synth.encounters_per_friendship must be >= 0");
  if (!(encounter_duration > 0))
    throw ConfigError("synth.encounter_duration must be > 0");
  if (!(event_duration > 0))
    throw ConfigError("synth.event_duration must be > 0");
  if (!(attend_fraction > 0 && attend_fraction <= 1))
    throw ConfigError("synth.attend_fraction must be in (0,1]");

  int cold = static_cast<int>(std::floor(cold_fraction * users_per_group));
  int warm = users_per_group - cold;
  if (cold > 0 && friends_per_cold > warm)
    throw ConfigError("synth.friends_per_cold exceeds the warm users per "
                      "group");
}

Bundle generate(const GeneratorSpec& spec) {
  spec.validate();

  Bundle bundle;
  const double slot_length = spec.event_duration + 600.0;
  const double t0 = 10000.0;

  for (int g = 0; g < spec.groups; g++) {
    std::vector<std::string> contexts;
    for (int k = 0; k < spec.contexts_per_group; k++)
      contexts.push_back(fmt("ctx_g%02d_%02d", g, k));
    bundle.group_contexts.push_back(contexts);
  }

  // event of group g in session s sits in room slot (g + s) % groups, so
  // id-order tie-breaking rotates over the groups
  auto event_id = [&](int g, int s) {
    return fmt("e%03d_%d", s, (g + s) % spec.groups);
  };
  for (int s = 0; s < spec.sessions; s++) {
    double start = t0 + s * slot_length;
    for (int slot = 0; slot < spec.groups; slot++) {
      int g = (slot - s % spec.groups + spec.groups) % spec.groups;
      EventDescriptor ev;
      ev.id = fmt("e%03d_%d", s, slot);
      ev.session_id = fmt("s%03d", s);
      ev.zone_id = fmt("room_%d", slot);
      ev.start = start;
      ev.end = start + spec.event_duration;
      ev.contexts = bundle.group_contexts[static_cast<std::size_t>(g)];
      bundle.schedule.push_back(ev);
    }
  }
  bundle.split_time =
      t0 + (spec.training_sessions - 1) * slot_length + spec.event_duration;

  const int cold_count =
      static_cast<int>(std::floor(spec.cold_fraction * spec.users_per_group));
  const int warm_count = spec.users_per_group - cold_count;

  std::vector<std::string> users;
  for (int g = 0; g < spec.groups; g++) {
    for (int i = 0; i < spec.users_per_group; i++) {
      std::string user = fmt("u_g%02d_%03d", g, i);
      users.push_back(user);
      bundle.group_of[user] = g;
      if (i >= warm_count) bundle.cold_users.insert(user);
    }
  }

  std::mt19937_64 gen(spec.seed);
  const double attend_time = spec.attend_fraction * spec.event_duration;
  for (const auto& user : users) {
    int g = bundle.group_of[user];
    bool cold = bundle.cold_users.count(user) > 0;
    for (int s = 0; s < spec.sessions; s++) {
      bool flip = next_unit(gen) < spec.noise;
      if (cold && s < spec.training_sessions) continue;
      int g2 = g;
      if (flip) {
        auto r = static_cast<int>(gen() %
                                  static_cast<std::uint64_t>(spec.groups - 1));
        g2 = (g + 1 + r) % spec.groups;
      }
      bundle.participation.push_back({user, event_id(g2, s), attend_time});
    }
  }

  for (int g = 0; g < spec.groups; g++) {
    for (int c = 0; c < cold_count; c++) {
      std::string cold_user = fmt("u_g%02d_%03d", g, warm_count + c);
      std::set<std::string> partners;
      for (int k = 0; k < spec.friends_per_cold; k++) {
        int w = (c * spec.friends_per_cold + k) % warm_count;
        partners.insert(fmt("u_g%02d_%03d", g, w));
      }
      for (const auto& warm_user : partners) {
        for (int j = 0; j < spec.encounters_per_friendship; j++) {
          int s = j % spec.training_sessions;  // inside the training window
          double start = t0 + s * slot_length + 100.0 + j;
          auto pair = make_user_pair(cold_user, warm_user);
          bundle.encounters.push_back(
              {pair.first, pair.second, spec.encounter_duration, start});
        }
      }
    }
  }

  std::vector<ParticipationRecord> test_records;
  for (const auto& rec : bundle.participation) {
    int s = std::stoi(rec.event_id.substr(1, 3));
    if (s >= spec.training_sessions) test_records.push_back(rec);
  }
  bundle.truth = eval::build_ground_truth(test_records, bundle.schedule);
  return bundle;
}

}  // namespace eventrec::synth
