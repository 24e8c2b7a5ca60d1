#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "netfuse/channel.hpp"
#include "netfuse/estimator.hpp"
#include "netfuse/model.hpp"
#include "netfuse/receiver.hpp"

namespace netfuse {

/// A fully materialized experiment description.
struct Scenario {
  std::string name;
  SystemModel system;
  std::vector<SensorModel> sensors;
  int horizon = 0;
  int N = 0;                      // maximum transmission delay
  DelayModel delay_model;
  double dropout_prob = 0.0;
  TriggerConfig trigger;          // disabled by default (delta = 0, Omega = I)
  double alpha = 3.0;
  std::vector<double> gamma;      // per-sensor disturbance attenuation level bound
  int monte_carlo_runs = 1;
  std::uint64_t seed = 0;
  WCovModel w_cov;                // how E(w w^T) enters the bound recursions

  int L() const { return static_cast<int>(sensors.size()); }
  void validate() const;
};

/// Parse a scenario from JSON text. Unset fields take the documented
/// defaults; violations raise ConfigError naming the field.
Scenario load_scenario_text(const std::string& json_text);

/// Load a scenario file from disk.
Scenario load_scenario(const std::string& path);

/// FNV-1a hash of the scenario file bytes, recorded in every artifact.
std::uint64_t scenario_hash(const std::string& bytes);

/// The built-in three-sensor target-tracking scenario (also shipped as
/// scenarios/tracking3.json).
Scenario tracking3_scenario();

/// Tiny single-sensor scenario wired to the pinned disorder delay table.
Scenario golden_disorder_scenario();

}  // namespace netfuse
