#include "netfuse/compensation.hpp"

namespace netfuse {

Vec compensate(const Vec& xp, int tau, int N) {
  if (tau > N)
    throw ConfigError("compensate: tau " + std::to_string(tau) + " exceeds channel bound N " +
                      std::to_string(N));
  if (tau < 1) throw ConfigError("compensate: tau must be >= 1 (tau = 0 needs no compensation)");
  return compensation_factor(tau, N) * xp;
}

Vec current_estimate(const LocalFilterState& state, int tau, int N) {
  if (tau == 0) return state.xf;
  return compensate(state.xp, tau, N);
}

std::vector<LocalFilterState> fill_missing(LocalFilterState& state, int s,
                                           const SensorModel& sensor, const SystemModel& model,
                                           const WCovModel& wcov) {
  if (s <= state.t)
    throw ConfigError("fill_missing: timestamp " + std::to_string(s) +
                      " is stale (last processed " + std::to_string(state.t) + ")");
  std::vector<LocalFilterState> filled;
  for (int u = state.t + 1; u < s; ++u) {
    state = step_filter(state, sensor, model, u, std::nullopt, wcov);
    filled.push_back(state);
  }
  return filled;
}

}  // namespace netfuse
