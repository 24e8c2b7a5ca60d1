#include "netfuse/analysis.hpp"

#include <cmath>

namespace netfuse {

T3Matrices build_t3(const SystemModel& model, const SensorModel& sensor,
                    const FilterParams& params, double f_value) {
  const int r = model.r();
  const Mat& A = model.A;
  const Mat& C = sensor.C;
  const Mat& L = params.L;
  const Mat dC = params.C_hat - C;
  const Mat F = f_value * Mat::Identity(model.p(), model.p());

  T3Matrices t;
  t.A_t3 = Mat::Zero(2 * r, 2 * r);
  t.A_t3.topLeftCorner(r, r) = A;
  t.A_t3.bottomLeftCorner(r, r) = A - params.A_hat + L * dC;
  t.A_t3.bottomRightCorner(r, r) = params.A_hat - L * params.C_hat;

  t.dA_t3 = Mat::Zero(2 * r, 2 * r);
  t.dA_t3.topLeftCorner(r, r) = model.Fcal * F * model.E;
  t.dA_t3.bottomLeftCorner(r, r) = (model.Fcal - L * sensor.Hcal) * F * model.E;

  for (const Mat& av : model.A_mult) {
    Mat blk = Mat::Zero(2 * r, 2 * r);
    blk.topLeftCorner(r, r) = av;
    blk.bottomLeftCorner(r, r) = av;
    t.A_theta_t3.push_back(std::move(blk));
  }

  t.B_t3 = Mat::Zero(2 * r, 1);
  t.B_t3.topRows(r) = model.B;
  t.B_t3.bottomRows(r) = model.B - L * sensor.B_s;
  t.G_t3 = Mat::Zero(2 * r, 1);
  t.G_t3.topRows(r) = model.G;
  t.G_t3.bottomRows(r) = model.G - L * sensor.G_s;

  t.D_t3 = Mat::Zero(r, 2 * r);
  t.D_t3.rightCols(r) = Mat::Identity(r, r);
  return t;
}

Mat build_delta(const Mat& A_t3, const Mat& dA_t3, const std::vector<Mat>& A_theta_t3,
                const Mat& B_t3, const Mat& D_t3, const std::vector<double>& theta,
                const Mat& X, double gamma) {
  const int n = static_cast<int>(A_t3.rows());
  const int q = static_cast<int>(B_t3.cols());
  if (X.rows() != n || X.cols() != n) throw ConfigError("build_delta: X dimension mismatch");
  if (dA_t3.rows() != n || B_t3.rows() != n || D_t3.cols() != n)
    throw ConfigError("build_delta: block dimension mismatch");
  if (theta.size() != A_theta_t3.size())
    throw ConfigError("build_delta: one theta bound per multiplicative block required");

  Mat ups = Mat::Zero(n, n);
  for (std::size_t v = 0; v < A_theta_t3.size(); ++v)
    ups += theta[v] * A_theta_t3[v].transpose() * X * A_theta_t3[v];

  const Mat Abar = A_t3 + dA_t3;
  const Mat XA = X * Abar;
  const Mat XB = X * B_t3;
  Mat delta = Mat::Zero(2 * n + q, 2 * n + q);
  delta.block(0, 0, n, n) = -X;
  delta.block(0, n, n, n) = XA;
  delta.block(n, 0, n, n) = XA.transpose();
  delta.block(0, 2 * n, n, q) = XB;
  delta.block(2 * n, 0, q, n) = XB.transpose();
  delta.block(n, n, n, n) = D_t3.transpose() * D_t3 + ups - X;
  delta.block(2 * n, 2 * n, q, q) = -gamma * gamma * Mat::Identity(q, q);
  return symmetrize(delta);
}

Mat lemma2_block(const Mat& G1, const Mat& G2, const Mat& G3, double sigma) {
  const int n = static_cast<int>(G1.rows());
  const int p = static_cast<int>(G2.rows());
  const int q = static_cast<int>(G3.cols());
  Mat blk = Mat::Zero(p + n + q, p + n + q);
  blk.block(0, 0, p, p) = -sigma * Mat::Identity(p, p);
  blk.block(0, p, p, n) = sigma * G2;
  blk.block(p, 0, n, p) = sigma * G2.transpose();
  blk.block(p, p, n, n) = G1;
  blk.block(p, p + n, n, q) = G3;
  blk.block(p + n, p, q, n) = G3.transpose();
  blk.block(p + n, p + n, q, q) = -sigma * Mat::Identity(q, q);
  return blk;
}

HinfCertificate check_hinf(const Mat& X, double gamma, const Mat& A_t3, const Mat& dA_t3,
                           const std::vector<Mat>& A_theta_t3, const Mat& B_t3, const Mat& D_t3,
                           const std::vector<double>& theta) {
  HinfCertificate cert;
  cert.X = symmetrize(X);
  cert.gamma = gamma;
  const Mat delta = build_delta(A_t3, dA_t3, A_theta_t3, B_t3, D_t3, theta, cert.X, gamma);
  cert.min_eig = max_eigenvalue(delta);
  cert.feasible = cert.min_eig < -1e-9;
  return cert;
}

bool hinf_direct(const Mat& X, double gamma, const Mat& A_t3, const Mat& dA_t3,
                 const std::vector<Mat>& A_theta_t3, const Mat& B_t3, const Mat& D_t3,
                 const std::vector<double>& theta, double tol) {
  const Mat Xs = symmetrize(X);
  if (min_eigenvalue(Xs) <= 0.0) return false;
  const int q = static_cast<int>(B_t3.cols());
  const Mat gap = gamma * gamma * Mat::Identity(q, q) - B_t3.transpose() * Xs * B_t3;
  if (min_eigenvalue(gap) <= 0.0) return false;

  const Mat Abar = A_t3 + dA_t3;
  Mat ups = Mat::Zero(A_t3.rows(), A_t3.cols());
  for (std::size_t v = 0; v < A_theta_t3.size(); ++v)
    ups += theta[v] * A_theta_t3[v].transpose() * Xs * A_theta_t3[v];
  const Mat xab = Xs * B_t3;
  const Mat lhs = Abar.transpose() * Xs * Abar + D_t3.transpose() * D_t3 + ups - Xs +
                  Abar.transpose() * xab * solve_sym(gap, xab.transpose() * Abar);
  return max_eigenvalue(lhs) < -tol;
}

std::optional<HinfCertificate> scalar_search_hinf(double gamma, const Mat& A_t3, const Mat& dA_t3,
                                                  const std::vector<Mat>& A_theta_t3,
                                                  const Mat& B_t3, const Mat& D_t3,
                                                  const std::vector<double>& theta, double c_min,
                                                  double c_max, int steps) {
  const int n = static_cast<int>(A_t3.rows());
  const double lmin = std::log10(c_min), lmax = std::log10(c_max);
  for (int s = 0; s < steps; ++s) {
    const double c = std::pow(10.0, lmin + (lmax - lmin) * s / (steps - 1));
    HinfCertificate cert =
        check_hinf(c * Mat::Identity(n, n), gamma, A_t3, dA_t3, A_theta_t3, B_t3, D_t3, theta);
    if (cert.feasible) return cert;
  }
  return std::nullopt;
}

double h2_bound(const Mat& X, const Mat& G_t3, double R) {
  return (R * G_t3.transpose() * symmetrize(X) * G_t3).trace();
}

SteadyStateReport steady_state(const SystemModel& model, const SensorModel& sensor, double alpha,
                               const WCovModel& wcov, int max_iters, double tol) {
  SteadyStateReport rep;
  rep.spectral_radius = spectral_radius(model.A);
  const WCovModel frozen = WCovModel::constant(wcov.at(model, 0));

  LocalFilterState st = initial_filter_state(model, sensor.id, alpha);
  for (int it = 0; it < max_iters; ++it) {
    LocalFilterState next;
    try {
      next = step_filter(st, sensor, model, st.t + 1, std::optional<Vec>(Vec::Zero(sensor.m())),
                         frozen);
    } catch (const NumericalError&) {
      rep.converged = false;  // bound recursion blew past a PD precondition
      break;
    }
    rep.increment = (next.sigma_bar - st.sigma_bar).norm();
    const double prev_norm = st.sigma_bar.norm();
    rep.growth_factor = prev_norm > 0.0 ? next.sigma_bar.norm() / prev_norm : 0.0;
    st = next;
    rep.iterations = it + 1;
    if (rep.increment < tol) {
      rep.converged = true;
      break;
    }
    if (!std::isfinite(rep.increment) || st.sigma_bar.norm() > 1e12) {
      rep.converged = false;
      break;
    }
  }
  rep.Sigma = st.sigma_bar;
  rep.Theta = st.theta_bar;
  rep.P = st.P;
  return rep;
}

Vec mse_components(const std::vector<std::vector<Vec>>& truth,
                   const std::vector<std::vector<Vec>>& estimates) {
  if (truth.size() != estimates.size())
    throw ConfigError("mse: run counts differ");
  if (truth.empty()) throw ConfigError("mse: no runs");
  const int r = static_cast<int>(truth[0][0].size());
  Vec acc = Vec::Zero(r);
  long n = 0;
  for (std::size_t run = 0; run < truth.size(); ++run) {
    if (truth[run].size() != estimates[run].size())
      throw ConfigError("mse: trajectory lengths differ in run " + std::to_string(run));
    for (std::size_t k = 0; k < truth[run].size(); ++k) {
      const Vec d = truth[run][k] - estimates[run][k];
      acc += d.cwiseProduct(d);
      ++n;
    }
  }
  if (n == 0) throw ConfigError("mse: empty trajectories");
  return acc / static_cast<double>(n);
}

}  // namespace netfuse
