#pragma once

#include <cstdint>
#include <random>

namespace netfuse {

/// Noise-stream kinds used when splitting the master seed.
enum class StreamKind : std::uint64_t {
  InitialState = 1,
  WhiteNoise = 2,        // v_k
  Multiplicative = 3,    // varpi_{theta,k}
  ThetaVariance = 4,     // per-step true variance draw
  Channel = 5,           // delays + dropouts
};

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Deterministic per-(run, sensor, kind) substream seed from one master seed.
/// Channel streams intentionally ignore the run index: the network realization
/// is part of the scenario, Monte-Carlo runs vary only the noise draws.
inline std::uint64_t split_seed(std::uint64_t master, std::uint64_t run,
                                std::uint64_t sensor, StreamKind kind) {
  std::uint64_t s = splitmix64(master);
  if (kind != StreamKind::Channel) s = splitmix64(s ^ (0xA5A5ULL + run));
  s = splitmix64(s ^ (0x5A5A0000ULL + sensor));
  s = splitmix64(s ^ static_cast<std::uint64_t>(kind));
  return s;
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double gaussian(double mean = 0.0, double stddev = 1.0) {
    std::normal_distribution<double> d(mean, stddev);
    return d(engine_);
  }
  double uniform(double lo = 0.0, double hi = 1.0) {
    std::uniform_real_distribution<double> d(lo, hi);
    return d(engine_);
  }
  int uniform_int(int lo, int hi) {  // inclusive bounds
    std::uniform_int_distribution<int> d(lo, hi);
    return d(engine_);
  }
  bool bernoulli(double p) {
    std::bernoulli_distribution d(p);
    return d(engine_);
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace netfuse
