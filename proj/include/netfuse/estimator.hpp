#pragma once

#include <optional>
#include <vector>

#include "netfuse/linalg.hpp"
#include "netfuse/model.hpp"

namespace netfuse {

/// How E(w_t w_t^T) enters the bound recursions: either the exact square of
/// the known deterministic signal, or a constant bound from the scenario.
struct WCovModel {
  enum class Kind { ExactSignal, Constant };
  Kind kind = Kind::ExactSignal;
  double value = 0.0;

  double at(const SystemModel& sys, int k) const {
    if (kind == Kind::Constant) return value;
    const double w = sys.w(k);
    return w * w;
  }
  static WCovModel exact() { return {Kind::ExactSignal, 0.0}; }
  static WCovModel constant(double v) { return {Kind::Constant, v}; }
};

/// Robust finite-horizon filter gains for one sensor at one timestamp.
struct FilterParams {
  Mat C_hat;  // m x r
  Mat K;      // r x m
  Mat A_hat;  // r x r
  Mat L;      // r x m
  bool measured = true;  // false: zero-gain prediction-only step
};

/// Per-sensor filter state. After processing timestamp t the state holds
/// xf = xhat_{t|t}, xp = xhat_{t+1|t}, theta_bar = filtering-error bound at t,
/// sigma_bar = prediction-error bound for t+1 and P = state second-moment
/// bound for t+1.
struct LocalFilterState {
  int sensor_id = 0;
  int t = -1;       // last processed timestamp (-1: nothing processed)
  Vec xf;
  Vec xp;
  Mat sigma_bar;
  Mat P;
  Mat theta_bar;
  double alpha = 1.0;
};

/// Initial state: xp = xhat_{0|-1} = mu0, sigma_bar = P0, P = mu0 mu0^T + P0.
LocalFilterState initial_filter_state(const SystemModel& sys, int sensor_id, double alpha);

/// Filter gains at timestamp t (= state.t + 1) from the current bounds.
/// Requires alpha^{-1}I - E_s Sigma E_s^T > 0 and alpha^{-1}I - E_s P E_s^T > 0.
FilterParams filter_params(const LocalFilterState& state, const SensorModel& sensor,
                           const SystemModel& model, int t, const WCovModel& wcov);

/// Zero-gain parameters for a timestamp with no usable measurement.
FilterParams prediction_only_params(const LocalFilterState& state, const SensorModel& sensor,
                                    const SystemModel& model, int t, const WCovModel& wcov);

/// Estimate update with the re-organized measurement y at timestamp t:
///   xf' = xp + K (y - C_hat xp),  xp' = A_hat xp + L (y - C_hat xp).
/// Pass y = nullopt for a prediction-only step (xf' = xp, xp' = A_hat xp).
LocalFilterState update(const LocalFilterState& state, const FilterParams& params,
                        const std::optional<Vec>& y);

struct BoundTriple {
  Mat theta_bar;   // filtering-error bound at t
  Mat sigma_bar;   // prediction-error bound for t+1
  Mat P;           // state second-moment bound for t+1
};

/// Riccati-like upper-bound recursion step at timestamp t. Multiplicative
/// noise enters with its variance upper bound so the outputs dominate every
/// admissible true variance. All outputs are symmetrized and PSD-checked.
BoundTriple propagate_bounds(const LocalFilterState& state, const FilterParams& params,
                             const SensorModel& sensor, const SystemModel& model, int t,
                             const WCovModel& wcov);

/// One full filter step at timestamp t = state.t + 1; y empty means no packet.
LocalFilterState step_filter(const LocalFilterState& state, const SensorModel& sensor,
                             const SystemModel& model, int t, const std::optional<Vec>& y,
                             const WCovModel& wcov, FilterParams* params_out = nullptr);

/// Augmented state-space blocks for [error; estimate] stacking.
struct AugmentedMatrices {
  Mat A_t1, H_t1, E_t1, B_t1, G_t1;       // filtering stack
  Mat A_t2, H_t2, E_t2, B_t2, G_t2;       // prediction stack
  std::vector<Mat> A_theta_t2;            // multiplicative-noise blocks
};

AugmentedMatrices build_augmented(const SystemModel& model, const SensorModel& sensor,
                                  const FilterParams& params);

/// Uncertainty-quadratic bound: for any F with ||F|| <= f_norm_bound,
///   (A + H F E) X (A + H F E)^T <= A (X^{-1} - alpha E^T E)^{-1} A^T
///                                   + alpha^{-1} f^2 H H^T.
/// Requires alpha > 0 and alpha^{-1} I - E X E^T > 0.
Mat lemma3_bound(const Mat& A, const Mat& H, const Mat& E, double f_norm_bound,
                 const Mat& X, double alpha);

}  // namespace netfuse
