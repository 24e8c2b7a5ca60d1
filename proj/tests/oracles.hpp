#pragma once

// Independent reference implementations used only by the test suite. These
// deliberately avoid the library's internals: plain predictor/corrector
// recursions written from scratch.

#include <cstdint>
#include <vector>

#include "netfuse/linalg.hpp"

namespace oracles {

using netfuse::Mat;
using netfuse::Vec;

/// Classical Kalman filter in predictor form for
///   x' = A x + G v,   z = C x + D v,   v ~ N(0, R)
/// (the same white noise drives plant and measurement, so the predictor gain
/// carries the G R D^T cross term).
struct Kalman {
  Mat A, C, G, D;
  double R = 0.0;
  Vec xp;      // xhat_{t|t-1}
  Mat Sigma;   // prediction-error covariance
  Vec xf;      // xhat_{t|t}
  Mat Theta;   // filtering-error covariance
  Mat Kf, Lp;  // last gains

  void init(const Vec& x0, const Mat& P0) {
    xp = x0;
    Sigma = P0;
  }
  void step(const Vec& z);
};

/// Exact cross-covariance recursion between two Kalman filters driven by the
/// same plant and the same white noise.
struct CrossKalman {
  Mat A, G;
  double R = 0.0;
  Mat Ci, Di, Cj, Dj;
  Mat Sij;  // prediction-error cross covariance

  /// Advance with the gains the two filters used this step; returns the
  /// filtering-error cross covariance at the current time.
  Mat step(const Mat& Ki, const Mat& Li, const Mat& Kj, const Mat& Lj);
};

/// A random discrete-time system with spectral radius scaled below 1.
struct Random2D {
  Mat A, C, G, D;
  double R = 0.0;
  Vec x0;
  Mat P0;
};
Random2D random_stable_system(std::uint64_t seed, int r = 2, int m = 1);

/// Draw a p x p contraction (||F|| <= 1) for dominance sweeps.
Mat random_contraction(std::uint64_t seed, int p);

}  // namespace oracles
