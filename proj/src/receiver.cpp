#include "netfuse/receiver.hpp"

namespace netfuse {

void TriggerConfig::validate(int r) const {
  if (Omega.rows() != r || Omega.cols() != r)
    throw ConfigError("trigger: Omega must be r x r");
  if ((Omega - Omega.transpose()).cwiseAbs().maxCoeff() > 1e-9)
    throw ConfigError("trigger: Omega must be symmetric");
  if (!is_positive_definite(Omega))
    throw ConfigError("trigger: Omega must be positive definite");
  if (delta < 0.0 || delta >= 1.0)
    throw ConfigError("trigger: delta must lie in [0, 1)");
}

std::pair<ZohState, bool> accept(const ZohState& state, const Packet& packet) {
  ZohState next = state;
  bool accepted;
  if (state.mode == ZohMode::LogicZoh) {
    accepted = packet.timestamp >= state.held_timestamp;
  } else {
    accepted = true;  // plain ZOH keeps whatever arrived last
  }
  if (accepted) {
    next.held = packet;
    next.held_timestamp = packet.timestamp;
  }
  return {next, accepted};
}

bool trigger_fires(const Vec& sigma, const Vec& xhat_k1, const TriggerConfig& cfg) {
  const double f = sigma.dot(cfg.Omega * sigma) - cfg.delta * xhat_k1.dot(cfg.Omega * xhat_k1);
  return f > 0.0;
}

std::optional<Reorganized> reorganize(const ZohState& state, int k) {
  if (!state.held) return std::nullopt;
  return Reorganized{state.held->payload, state.held->timestamp, k - state.held->timestamp};
}

}  // namespace netfuse
