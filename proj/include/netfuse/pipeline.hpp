#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "netfuse/analysis.hpp"
#include "netfuse/compensation.hpp"
#include "netfuse/fusion.hpp"
#include "netfuse/scenario.hpp"

namespace netfuse {

enum class ChannelMode { LogicZoh, Zoh, Lossless };

/// How a local estimate is mapped to the current step for fusion.
enum class CompensationRule { Linear, OneStepPrediction, StaleHold };

ChannelMode channel_mode_from_string(const std::string& s);
CompensationRule baseline_from_string(const std::string& s);

struct RunConfig {
  std::string scenario_path;    // empty: built-in tracking3
  std::string mode = "single";  // single | monte-carlo | steady-state | hinf-check | golden-fig2 | compare
  int runs = 0;                 // 0: take from scenario
  std::optional<std::uint64_t> seed;
  std::string out_dir = ".";
  ChannelMode channel = ChannelMode::LogicZoh;
  std::string baseline = "zoh";  // compare mode: zoh | one-step-prediction | stale-hold
  bool write_traces = true;
};

/// Per-sensor timeline entry recorded whenever the local filter processes a
/// timestamp (measurement update or prediction-only fill-in).
struct FilterRecord {
  int k = 0;   // arrival step at which the timestamp was processed
  int t = 0;   // processed timestamp
  bool measured = false;
  Vec xf;
  double trace_theta = 0.0;
  double trace_sigma = 0.0;
  double trace_P = 0.0;
  int filled = 0;  // cumulative fill-ins for this sensor
};

struct ReceiverRecord {
  int k = 0;
  int sensor_id = 0;
  int held_timestamp = -1;
  int tau = 0;  // staleness k - held_timestamp (0 when nothing held)
  bool accepted = false;
  bool trigger_fired = false;
};

struct SensorRunData {
  std::vector<FilterRecord> filter_records;
  std::vector<ReceiverRecord> receiver_records;
  int disorder_discards = 0;
  int filled = 0;
};

struct PipelineRun {
  std::vector<Vec> truth;                 // x_0 .. x_horizon
  std::vector<std::optional<Vec>> fused;  // per step k
  std::vector<double> fused_trace;        // trace(P_fused) per step (-1 when absent)
  std::vector<std::vector<std::optional<Vec>>> local_current;  // [sensor][k]
  std::vector<std::vector<int>> local_tau;                     // [sensor][k], -1 = none
  std::vector<SensorRunData> sensors;
  std::vector<double> theta_trace_at_k;   // flattened [sensor][k]: bound of the newest processed t
  double max_weight_identity_error = 0.0;
  bool fused_trace_dominated = true;

  double theta_trace(int sensor, int k, int horizon) const {
    return theta_trace_at_k[sensor * horizon + k];
  }
};

/// Fixed network realization shared by every Monte-Carlo run: a per-sensor
/// timestamp -> delay table with dropped timestamps absent. Lossless mode
/// maps every timestamp to delay 0.
struct ChannelRealization {
  std::vector<DelayModel> tables;
  std::vector<ChannelRecord> trace;
};

ChannelRealization realize_channel(const Scenario& sc, ChannelMode mode);

/// Simulate truth + raw measurements for one run index.
void simulate_truth(const Scenario& sc, std::uint64_t run, std::vector<Vec>* truth,
                    std::vector<std::vector<Vec>>* measurements);

/// Full estimation pipeline over one noise realization.
PipelineRun run_pipeline(const Scenario& sc, std::uint64_t run, const ChannelRealization& chan,
                         ChannelMode mode, CompensationRule rule = CompensationRule::Linear);

struct ExperimentResult {
  Vec fused_mse;
  std::vector<Vec> local_mse;
  double runtime_seconds = 0.0;
  int runs = 0;
  int first_fused_step = -1;
  double max_weight_identity_error = 0.0;
  bool fused_trace_dominated = true;
  long long disorder_discards = 0;
};

/// Monte-Carlo experiment with a fixed channel realization, fanned out
/// across worker threads; deterministic for a given (scenario, seed).
ExperimentResult monte_carlo(const Scenario& sc, ChannelMode mode, int runs,
                             std::uint64_t master_seed,
                             CompensationRule rule = CompensationRule::Linear);

/// CLI entry point; writes artifacts into config.out_dir, returns exit code
/// (0 ok, 2 configuration error, 3 numerical failure).
int run(const RunConfig& config);

int worker_threads();

}  // namespace netfuse
