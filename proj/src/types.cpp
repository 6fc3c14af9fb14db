#include "eventrec/types.hpp"

#include <cmath>

#include "eventrec/error.hpp"

namespace eventrec {

void CleansingConfig::validate() const {
  if (!(min_participation_duration > 0))
    throw ConfigError("cleansing.min_participation_duration must be > 0");
  if (min_participation_count < 1)
    throw ConfigError("cleansing.min_participation_count must be >= 1");
  if (!(min_encounter_duration > 0))
    throw ConfigError("cleansing.min_encounter_duration must be > 0");
}

void RelationThresholds::validate() const {
  if (k_neighbors < 1) throw ConfigError("thresholds.K must be >= 1");
  if (!(relevancy >= 0 && relevancy <= 1))
    throw ConfigError("thresholds.phi must be in [0,1]");
  if (encounter_frequency < 1)
    throw ConfigError("thresholds.delta must be >= 1");
  if (!(encounter_time > 0)) throw ConfigError("thresholds.theta must be > 0");
}

void LbpParams::validate() const {
  if (!(damping >= 0 && damping < 1))
    throw ConfigError("lbp.damping must be in [0,1)");
  if (!(tolerance > 0)) throw ConfigError("lbp.tolerance must be > 0");
  if (max_iterations < 1)
    throw ConfigError("lbp.max_iterations must be >= 1");
}

}  // namespace eventrec
