#pragma once

#include <vector>

#include "netfuse/estimator.hpp"

namespace netfuse {

/// A local estimate mapped to the current step k.
struct CompensatedEstimate {
  int sensor_id = 0;
  int k = 0;
  Vec x_comp;      // xhat_{k|t}
  int tau = 0;     // transmission delay of the packet the estimate is based on
  int filled = 0;  // one-step-prediction fill-ins applied so far
};

inline double compensation_factor(int tau, int N) { return 1.0 - double(tau - 1) / N; }

/// Linear delay compensation: xhat_{k|t} = (1 - (tau - 1)/N) xhat_{t+1|t}
/// for a packet that took tau in [1, N] steps to arrive.
Vec compensate(const Vec& xp, int tau, int N);

/// Current-step estimate for a held packet with delay tau: the filter value
/// for a delay-free packet, the scaled predictor otherwise.
Vec current_estimate(const LocalFilterState& state, int tau, int N);

/// Drive the filter through the missing timestamps state.t+1 .. s-1 with
/// one-step predictions so the packet stamped s can be processed next.
/// Returns the intermediate prediction-only states (possibly empty).
std::vector<LocalFilterState> fill_missing(LocalFilterState& state, int s,
                                           const SensorModel& sensor, const SystemModel& model,
                                           const WCovModel& wcov);

}  // namespace netfuse
