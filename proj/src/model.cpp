#include "netfuse/model.hpp"

#include <cmath>

namespace netfuse {

void SystemModel::validate() const {
  const int n = r();
  if (n == 0) throw ConfigError("system matrix A is empty");
  if (A.rows() != A.cols()) throw ConfigError("A must be square");
  const int np = p();
  if (Fcal.rows() != n || Fcal.cols() != np)
    throw ConfigError("Fcal must be r x p (" + std::to_string(n) + " x " + std::to_string(np) + ")");
  if (E.cols() != n) throw ConfigError("E must be p x r");
  for (const Mat& am : A_mult)
    if (am.rows() != n || am.cols() != n) throw ConfigError("A_mult entries must be r x r");
  if (theta_lower.size() != A_mult.size() || theta_upper.size() != A_mult.size())
    throw ConfigError("theta bounds must have one entry per A_mult matrix");
  for (std::size_t i = 0; i < theta_lower.size(); ++i) {
    if (theta_lower[i] < 0.0) throw ConfigError("theta_lower must be >= 0");
    if (theta_lower[i] > theta_upper[i])
      throw ConfigError("theta_lower exceeds theta_upper for multiplicative noise " + std::to_string(i));
  }
  if (B.rows() != n || B.cols() != 1) throw ConfigError("B must be r x 1");
  if (G.rows() != n || G.cols() != 1) throw ConfigError("G must be r x 1");
  if (R < 0.0) throw ConfigError("R must be >= 0");
  if (mu0.size() != n) throw ConfigError("mu0 must have r entries");
  if (P0.rows() != n || P0.cols() != n) throw ConfigError("P0 must be r x r");
  if ((P0 - P0.transpose()).cwiseAbs().maxCoeff() > 1e-9) throw ConfigError("P0 must be symmetric");
  if (min_eigenvalue(P0) < -1e-9) throw ConfigError("P0 must be positive semidefinite");
  if (std::abs(f_signal.amplitude) > 1.0 + 1e-12)
    throw ConfigError("uncertainty signal amplitude must satisfy |s(k)| <= 1");
}

void SensorModel::validate(const SystemModel& sys) const {
  const int n = sys.r(), np = sys.p(), mm = m();
  if (mm == 0) throw ConfigError("sensor " + std::to_string(id) + ": C is empty");
  if (C.cols() != n) throw ConfigError("sensor " + std::to_string(id) + ": C must be m x r");
  if (Hcal.rows() != mm || Hcal.cols() != np)
    throw ConfigError("sensor " + std::to_string(id) + ": Hcal must be m x p");
  if (E_s.rows() != np || E_s.cols() != n)
    throw ConfigError("sensor " + std::to_string(id) + ": E_s must be p x r");
  if (B_s.rows() != mm || B_s.cols() != 1)
    throw ConfigError("sensor " + std::to_string(id) + ": B_s must be m x 1");
  if (G_s.rows() != mm || G_s.cols() != 1)
    throw ConfigError("sensor " + std::to_string(id) + ": G_s must be m x 1");
}

NoiseRealization make_noise(const SystemModel& sys, int horizon,
                            std::uint64_t master_seed, std::uint64_t run) {
  NoiseRealization n;
  n.system = &sys;
  n.seed = master_seed;
  n.w.resize(horizon);
  for (int k = 0; k < horizon; ++k) n.w[k] = sys.w(k);

  Rng vr(split_seed(master_seed, run, 0, StreamKind::WhiteNoise));
  const double sd = std::sqrt(sys.R);
  n.v.resize(horizon);
  for (int k = 0; k < horizon; ++k) n.v[k] = vr.gaussian(0.0, sd);

  n.varpi.resize(sys.hbar());
  n.theta.resize(sys.hbar());
  for (int t = 0; t < sys.hbar(); ++t) {
    Rng tr(split_seed(master_seed, run, static_cast<std::uint64_t>(t), StreamKind::ThetaVariance));
    Rng mr(split_seed(master_seed, run, static_cast<std::uint64_t>(t), StreamKind::Multiplicative));
    n.theta[t].resize(horizon);
    n.varpi[t].resize(horizon);
    for (int k = 0; k < horizon; ++k) {
      n.theta[t][k] = tr.uniform(sys.theta_lower[t], sys.theta_upper[t]);
      n.varpi[t][k] = mr.gaussian(0.0, std::sqrt(n.theta[t][k]));
    }
  }
  return n;
}

Vec step_truth(const Vec& x, int k, const SystemModel& model, const NoiseRealization& noise) {
  if (x.size() != model.r()) throw ConfigError("step_truth: state dimension mismatch");
  Mat Ak = model.A + model.Fcal * model.F(k) * model.E;
  for (int t = 0; t < model.hbar(); ++t) Ak += model.A_mult[t] * noise.varpi[t][k];
  return Ak * x + model.B * noise.w[k] + model.G * noise.v[k];
}

Vec measure(const SensorModel& s, const Vec& x, int k, const SystemModel& model,
            const NoiseRealization& noise) {
  if (x.size() != s.C.cols()) throw ConfigError("measure: state dimension mismatch");
  const Mat Ck = s.C + s.Hcal * model.F(k) * s.E_s;
  return Ck * x + s.B_s * noise.w[k] + s.G_s * noise.v[k];
}

Vec draw_initial_state(const SystemModel& sys, std::uint64_t master_seed, std::uint64_t run) {
  Rng r0(split_seed(master_seed, run, 0, StreamKind::InitialState));
  Vec z(sys.r());
  for (int i = 0; i < sys.r(); ++i) z(i) = r0.gaussian();
  Eigen::LLT<Mat> llt(sys.P0 + 1e-15 * Mat::Identity(sys.r(), sys.r()));
  return sys.mu0 + llt.matrixL() * z;
}

}  // namespace netfuse
