#include "netfuse/channel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace netfuse {

void DelayModel::validate() const {
  if (N < 0) throw ConfigError("delay model: N must be >= 0");
  if (kind == Kind::CustomWeights) {
    if (static_cast<int>(weights.size()) != N + 1)
      throw ConfigError("delay model: need one weight per delay value 0..N");
    double sum = 0.0;
    for (double w : weights) {
      if (w < 0.0) throw ConfigError("delay model: negative weight");
      sum += w;
    }
    if (std::abs(sum - 1.0) > 1e-9) throw ConfigError("delay model: weights must sum to 1");
  }
  if (kind == Kind::FixedTable) {
    for (const auto& [t, d] : table)
      if (d < 0 || d > N) throw ConfigError("delay model: table delay outside [0, N]");
  }
}

namespace {

int draw_delay(const DelayModel& dm, Rng& rng) {
  switch (dm.kind) {
    case DelayModel::Kind::UniformInteger:
      return rng.uniform_int(0, dm.N);
    case DelayModel::Kind::CustomWeights: {
      const double u = rng.uniform();
      double acc = 0.0;
      for (int d = 0; d <= dm.N; ++d) {
        acc += dm.weights[d];
        if (u < acc) return d;
      }
      return dm.N;
    }
    case DelayModel::Kind::FixedTable:
      return 0;  // resolved by the caller via the table
  }
  return 0;
}

}  // namespace

std::vector<Packet> transmit(const std::vector<Packet>& stream, const DelayModel& delay_model,
                             double dropout_prob, Rng& rng, std::vector<ChannelRecord>* trace) {
  delay_model.validate();
  if (dropout_prob < 0.0 || dropout_prob > 1.0)
    throw ConfigError("dropout_prob must be in [0, 1]");

  std::vector<Packet> out;
  out.reserve(stream.size());
  for (const Packet& pkt : stream) {
    bool dropped;
    int tau = 0;
    if (delay_model.kind == DelayModel::Kind::FixedTable) {
      // A table is a pinned realization; its delays are used verbatim.
      auto it = delay_model.table.find(pkt.timestamp);
      dropped = (it == delay_model.table.end());
      if (!dropped) tau = it->second;
    } else {
      // Draw in fixed order so the realization only depends on the stream,
      // not on which packets survive. Drawn delays cannot reach back past
      // step 0, so tau <= min(N, timestamp).
      tau = draw_delay(delay_model, rng);
      dropped = rng.bernoulli(dropout_prob);
      tau = std::min({tau, delay_model.N, pkt.timestamp});
    }
    if (trace)
      trace->push_back({pkt.sensor_id, pkt.timestamp, dropped ? -1 : pkt.timestamp + tau, dropped});
    if (dropped) continue;
    Packet p = pkt;
    p.arrival = p.timestamp + tau;
    out.push_back(std::move(p));
  }
  std::stable_sort(out.begin(), out.end(), [](const Packet& a, const Packet& b) {
    if (a.arrival != b.arrival) return a.arrival < b.arrival;
    return a.timestamp < b.timestamp;  // most recent timestamp last
  });
  return out;
}

int disorder_count(const std::vector<Packet>& schedule) {
  int count = 0;
  for (std::size_t i = 1; i < schedule.size(); ++i)
    if (schedule[i].timestamp < schedule[i - 1].timestamp) ++count;
  return count;
}

DelayModel golden_disorder_table() {
  // timestamp -> delay; 4, 5, 6, 12, 13 dropped
  std::map<int, int> t{{1, 1}, {2, 4}, {3, 2}, {7, 3}, {8, 1}, {9, 4}, {10, 3}, {11, 1}};
  return DelayModel::fixed(5, std::move(t));
}

}  // namespace netfuse
