#pragma once

#include <map>
#include <optional>
#include <vector>

#include "netfuse/linalg.hpp"
#include "netfuse/rng.hpp"

namespace netfuse {

/// A time-stamped measurement in flight. `timestamp` is the sampling instant t,
/// `arrival` the step k = t + tau at which the processor sees it.
struct Packet {
  int sensor_id = 0;
  int timestamp = 0;
  Vec payload;
  int arrival = 0;

  int delay() const { return arrival - timestamp; }
};

/// Random transmission-delay law, support in [0, N].
struct DelayModel {
  enum class Kind { UniformInteger, FixedTable, CustomWeights };
  Kind kind = Kind::UniformInteger;
  int N = 0;
  std::vector<double> weights;       // CustomWeights: probability of delay 0..N
  std::map<int, int> table;          // FixedTable: timestamp -> delay (missing = dropped)

  void validate() const;
  static DelayModel uniform(int N) { return {Kind::UniformInteger, N, {}, {}}; }
  static DelayModel custom(int N, std::vector<double> w) {
    return {Kind::CustomWeights, N, std::move(w), {}};
  }
  static DelayModel fixed(int N, std::map<int, int> t) {
    return {Kind::FixedTable, N, {}, std::move(t)};
  }
};

struct ChannelRecord {
  int sensor_id = 0;
  int timestamp = 0;
  int arrival = -1;      // -1 when dropped
  bool dropped = false;
};

/// Push a per-sensor stream of packets through the lossy network.
/// Surviving packets get arrival = timestamp + tau with tau drawn from the
/// delay model and clamped to min(N, timestamp); dropped packets are absent.
/// Output is sorted by arrival; simultaneous arrivals are delivered with the
/// most recent timestamp last, so the receiver ends the step holding the
/// freshest admissible packet.
std::vector<Packet> transmit(const std::vector<Packet>& stream, const DelayModel& delay_model,
                             double dropout_prob, Rng& rng,
                             std::vector<ChannelRecord>* trace = nullptr);

/// Number of adjacent-in-arrival pairs with strictly decreasing timestamps.
int disorder_count(const std::vector<Packet>& schedule);

/// The pinned delay realization behind the typical-scenario walkthrough:
/// packets stamped 3, 8 and 11 end up held at steps 5, 9 and 12 while
/// 2, 7, 9 and 10 arrive stale and must be discarded; 4, 5, 6 are dropped.
/// Timestamps start at 1; run for at least 14 steps to see the full pattern.
DelayModel golden_disorder_table();

}  // namespace netfuse
