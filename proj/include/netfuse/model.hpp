#pragma once

#include <cstdint>
#include <vector>

#include "netfuse/linalg.hpp"
#include "netfuse/rng.hpp"

namespace netfuse {

/// Scalar signal s(k), used for the energy-bounded noise w_k and the
/// uncertainty scaling F_k = s(k) * I.
struct Signal {
  enum class Kind { Zero, Constant, Cosine, Sine };
  Kind kind = Kind::Zero;
  double amplitude = 0.0;
  double frequency = 0.0;

  double at(int k) const {
    switch (kind) {
      case Kind::Zero: return 0.0;
      case Kind::Constant: return amplitude;
      case Kind::Cosine: return amplitude * std::cos(frequency * k);
      case Kind::Sine: return amplitude * std::sin(frequency * k);
    }
    return 0.0;
  }
  static Signal zero() { return {}; }
  static Signal constant(double c) { return {Kind::Constant, c, 0.0}; }
  static Signal cosine(double a, double f) { return {Kind::Cosine, a, f}; }
  static Signal sine(double a, double f) { return {Kind::Sine, a, f}; }
};

/// Stochastic uncertain plant
///   x_{k+1} = (A + Fcal F_k E + sum_theta A_mult[theta] varpi_{theta,k}) x_k
///             + B w_k + G v_k
/// with F_k F_k^T <= I, var(varpi_{theta,k}) in [theta_lower, theta_upper],
/// var(v_k) = R and deterministic energy-bounded w_k.
struct SystemModel {
  Mat A;                      // r x r
  Mat Fcal;                   // r x p
  Mat E;                      // p x r
  std::vector<Mat> A_mult;    // each r x r
  Mat B;                      // r x 1
  Mat G;                      // r x 1
  std::vector<double> theta_lower;
  std::vector<double> theta_upper;
  double R = 0.0;             // variance of v_k
  Vec mu0;                    // mean of x_0
  Mat P0;                     // covariance of x_0

  Signal w_signal;            // deterministic w_k
  Signal f_signal;            // scalar s(k) in F_k = s(k) I, |s| <= 1

  int r() const { return static_cast<int>(A.rows()); }
  int p() const { return static_cast<int>(E.rows()); }
  int hbar() const { return static_cast<int>(A_mult.size()); }

  double w(int k) const { return w_signal.at(k); }
  /// F_k = s(k) * I_p; satisfies F F^T <= I by construction.
  Mat F(int k) const { return f_signal.at(k) * Mat::Identity(p(), p()); }

  void validate() const;
};

/// Per-sensor output model  z_k^i = (C + Hcal F_k E_s) x_k + B_s w_k + G_s v_k.
struct SensorModel {
  int id = 0;
  Mat C;      // m x r
  Mat Hcal;   // m x p
  Mat E_s;    // p x r
  Mat B_s;    // m x 1
  Mat G_s;    // m x 1

  int m() const { return static_cast<int>(C.rows()); }
  void validate(const SystemModel& sys) const;
};

/// One realization of every random / deterministic input over a horizon.
/// Draws are materialized up front so replays are bit-identical and any
/// step can be inspected.
struct NoiseRealization {
  std::vector<double> w;                    // w_k (deterministic signal, stored for replay)
  std::vector<double> v;                    // v_k ~ N(0, R)
  std::vector<std::vector<double>> varpi;   // varpi[theta][k] ~ N(0, theta_{theta,k})
  std::vector<std::vector<double>> theta;   // per-step true variance in [L, U]
  const SystemModel* system = nullptr;
  std::uint64_t seed = 0;

  double f_scalar(int k) const { return system->f_signal.at(k); }
  Mat F(int k) const { return system->F(k); }
};

/// Draw a full noise realization for `horizon` steps from split substreams
/// of (master seed, run index).
NoiseRealization make_noise(const SystemModel& sys, int horizon,
                            std::uint64_t master_seed, std::uint64_t run);

/// Truth recursion of the plant; returns x_{k+1}.
Vec step_truth(const Vec& x, int k, const SystemModel& model, const NoiseRealization& noise);

/// Raw measurement of sensor `s` at step k.
Vec measure(const SensorModel& s, const Vec& x, int k, const SystemModel& model,
            const NoiseRealization& noise);

/// Draw x_0 ~ N(mu0, P0).
Vec draw_initial_state(const SystemModel& sys, std::uint64_t master_seed, std::uint64_t run);

}  // namespace netfuse
