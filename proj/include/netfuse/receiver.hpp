#pragma once

#include <optional>

#include "netfuse/channel.hpp"
#include "netfuse/linalg.hpp"

namespace netfuse {

/// Signal-selection mode at the processor. Logic ZOH accepts a packet only if
/// its time-stamp is not older than the held one (disorders are discarded);
/// plain ZOH always keeps the most recent arrival.
enum class ZohMode { LogicZoh, Zoh };

struct ZohState {
  ZohMode mode = ZohMode::LogicZoh;
  std::optional<Packet> held;
  int held_timestamp = -1;  // -1: nothing held yet, first arrival always accepted

  static ZohState logic() { return {ZohMode::LogicZoh, std::nullopt, -1}; }
  static ZohState plain() { return {ZohMode::Zoh, std::nullopt, -1}; }
};

/// Event-trigger weight and threshold; fires when
/// sigma^T Omega sigma - delta * xhat^T Omega xhat > 0.
struct TriggerConfig {
  Mat Omega;           // symmetric positive definite, r x r
  double delta = 0.0;  // in [0, 1)

  bool enabled() const { return Omega.size() > 0; }
  void validate(int r) const;
  static TriggerConfig disabled(int r) { return {Mat::Identity(r, r), 0.0}; }
};

/// Feed one delivered packet into the hold. Returns the updated state and
/// whether the packet was accepted.
std::pair<ZohState, bool> accept(const ZohState& state, const Packet& packet);

bool trigger_fires(const Vec& sigma, const Vec& xhat_k1, const TriggerConfig& cfg);

struct Reorganized {
  Vec y;          // y_k = z_t
  int timestamp;  // t
  int tau;        // k - t
};

/// Measurement re-organization: expose the held packet as the step-k input.
std::optional<Reorganized> reorganize(const ZohState& state, int k);

/// Diagnostic beta_k = k1 - k2 relating the logic-ZOH and plain-ZOH holds.
inline int beta(const ZohState& logic_state, const ZohState& plain_state) {
  return logic_state.held_timestamp - plain_state.held_timestamp;
}

}  // namespace netfuse
