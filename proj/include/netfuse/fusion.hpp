#pragma once

#include <vector>

#include "netfuse/estimator.hpp"

namespace netfuse {

/// Filtering / prediction error cross-covariance bounds between sensors i, j.
struct CrossCov {
  int i = 0;
  int j = 0;
  Mat Theta_ij;  // filtering-error bound at t
  Mat Sigma_ij;  // prediction-error bound for t+1
};

struct FusionResult {
  Vec x_fused;
  std::vector<Mat> Omega;  // per-sensor r x r weights, sum to I
  Mat Pi;                  // rL x rL stacked covariance
  Mat P_fused;             // (I0^T Pi^{-1} I0)^{-1}
};

/// One step of the cross-covariance recursion at common timestamp t.
/// `Sigma_ij` of `prev` is the bound entering the step; both sensors'
/// parameters must belong to the same timestamp, P is the shared state
/// second-moment bound and w2 = E(w_t w_t^T).
CrossCov cross_cov_step(const CrossCov& prev, const Mat& P, double w2, double alpha,
                        const SystemModel& model,
                        const SensorModel& sensor_i, const SensorModel& sensor_j,
                        const FilterParams& params_i, const FilterParams& params_j);

/// Stack the L x L grid of filtering-error bounds into the rL x rL matrix Pi.
/// Symmetrized; a ridge is applied (with a warning) if Pi is not PD.
Mat build_pi(const std::vector<std::vector<Mat>>& theta_grid);

/// Optimal unbiased weighted fusion:
///   Omega = (I0^T Pi^{-1} I0)^{-1} I0^T Pi^{-1},  x = sum_i Omega_i x_i.
FusionResult fuse(const std::vector<Vec>& x_locals, const Mat& Pi);

/// Book-keeping for the full L x L grid advanced at the slowest common
/// timestamp across the local filters.
class CrossCovGrid {
 public:
  CrossCovGrid(const SystemModel& sys, int L, double alpha);

  /// Advance the grid one timestamp using every sensor's parameters at `t`.
  void step(int t, const Mat& P, double w2,
            const std::vector<SensorModel>& sensors,
            const std::vector<FilterParams>& params);

  int timestamp() const { return t_; }  // timestamps consumed so far
  const Mat& theta(int i, int j) const { return theta_[i][j]; }
  const Mat& sigma(int i, int j) const { return sigma_[i][j]; }
  const std::vector<std::vector<Mat>>& theta_grid() const { return theta_; }

 private:
  const SystemModel* sys_;
  double alpha_;
  int t_ = 0;
  std::vector<std::vector<Mat>> theta_;
  std::vector<std::vector<Mat>> sigma_;
};

}  // namespace netfuse
