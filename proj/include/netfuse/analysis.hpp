#pragma once

#include <optional>
#include <vector>

#include "netfuse/estimator.hpp"

namespace netfuse {

/// Error-dynamics blocks for the stacked vector [x; e_pred] of one subsystem.
struct T3Matrices {
  Mat A_t3;                   // 2r x 2r
  Mat dA_t3;                  // 2r x 2r, uncertainty part at a fixed F
  std::vector<Mat> A_theta_t3;  // 2r x 2r per multiplicative-noise channel
  Mat B_t3;                   // 2r x 1
  Mat G_t3;                   // 2r x 1
  Mat D_t3;                   // r x 2r
};

/// Build the stacked error-dynamics blocks from the plant, the sensor and the
/// filter gains, with the deterministic uncertainty evaluated at f_value.
T3Matrices build_t3(const SystemModel& model, const SensorModel& sensor,
                    const FilterParams& params, double f_value);

/// Assemble the 3x3-block dissipation matrix of the H-infinity test; the
/// multiplicative noise enters through its variance upper bound theta.
Mat build_delta(const Mat& A_t3, const Mat& dA_t3, const std::vector<Mat>& A_theta_t3,
                const Mat& B_t3, const Mat& D_t3, const std::vector<double>& theta,
                const Mat& X, double gamma);

/// Block matrix of the scaled S-procedure equivalence:
///   [ -sigma I   sigma G2   0        ]
///   [ *          G1         G3       ]
///   [ *          *          -sigma I ]
Mat lemma2_block(const Mat& G1, const Mat& G2, const Mat& G3, double sigma);

struct HinfCertificate {
  Mat X;
  double gamma = 0.0;
  bool feasible = false;
  double min_eig = 0.0;  // largest eigenvalue of the assembled block (< 0 when feasible)
};

/// Feasibility check of a candidate X for the disturbance-attenuation LMI.
HinfCertificate check_hinf(const Mat& X, double gamma, const Mat& A_t3, const Mat& dA_t3,
                           const std::vector<Mat>& A_theta_t3, const Mat& B_t3, const Mat& D_t3,
                           const std::vector<double>& theta);

/// Direct (Schur-complement-free) evaluation of the same condition; used to
/// cross-validate the block form. Requires gamma^2 I - B^T X B > 0.
bool hinf_direct(const Mat& X, double gamma, const Mat& A_t3, const Mat& dA_t3,
                 const std::vector<Mat>& A_theta_t3, const Mat& B_t3, const Mat& D_t3,
                 const std::vector<double>& theta, double tol = 1e-9);

/// Crude scalar search over X = c I (log-spaced c); heuristic convenience,
/// not a solver. Returns the first feasible certificate found.
std::optional<HinfCertificate> scalar_search_hinf(double gamma, const Mat& A_t3, const Mat& dA_t3,
                                                  const std::vector<Mat>& A_theta_t3,
                                                  const Mat& B_t3, const Mat& D_t3,
                                                  const std::vector<double>& theta,
                                                  double c_min = 1e-3, double c_max = 1e3,
                                                  int steps = 61);

/// Steady H2 cost bound  trace(R G^T X G).
double h2_bound(const Mat& X, const Mat& G_t3, double R);

struct SteadyStateReport {
  bool converged = false;
  int iterations = 0;
  double increment = 0.0;        // last Frobenius increment of Sigma
  double spectral_radius = 0.0;  // rho(A)
  double growth_factor = 0.0;    // ratio of successive Sigma norms near the end
  Mat Sigma;                     // fixed point of the prediction-bound recursion
  Mat Theta;                     // matching filtering bound
  Mat P;                         // fixed point of the state-moment bound
};

/// Iterate the constant-coefficient bound recursion for one sensor until the
/// Frobenius increment drops below tol. Divergence (unstable A) is reported,
/// not thrown. E(w w^T) is frozen to `wcov` evaluated at k = 0.
SteadyStateReport steady_state(const SystemModel& model, const SensorModel& sensor, double alpha,
                               const WCovModel& wcov, int max_iters = 500, double tol = 1e-8);

struct MseReport {
  std::vector<Vec> per_sensor;  // component-wise MSE per sensor
  Vec fused;                    // component-wise MSE of the fused estimate
  double runtime_seconds = 0.0;
  int runs = 0;
};

/// Component-wise mean squared error over aligned truth/estimate runs.
/// truth[run][k] and estimates[run][k] must have equal lengths.
Vec mse_components(const std::vector<std::vector<Vec>>& truth,
                   const std::vector<std::vector<Vec>>& estimates);

}  // namespace netfuse
