#include "netfuse/fusion.hpp"

#include <cstdio>

namespace netfuse {

CrossCov cross_cov_step(const CrossCov& prev, const Mat& P, double w2, double alpha,
                        const SystemModel& model,
                        const SensorModel& si, const SensorModel& sj,
                        const FilterParams& pi, const FilterParams& pj) {
  const int r = model.r();
  const Mat I = Mat::Identity(r, r);
  const Mat& S = prev.Sigma_ij;
  const Mat PmS = P - S;

  Mat Mt = Mat::Identity(model.p(), model.p()) / alpha - si.E_s * P * sj.E_s.transpose();
  Eigen::FullPivLU<Mat> mlu(Mt);
  if (!mlu.isInvertible()) {
    const double ridge = 1e-10 * std::max(std::abs(Mt.trace()), 1.0) / Mt.rows();
    NETFUSE_WARN_LIMITED(3, "singular M~ in cross-covariance step, ridge %.3e\n", ridge);
    Mt += ridge * Mat::Identity(Mt.rows(), Mt.cols());
    mlu.compute(Mt);
  }
  const Mat Mt_inv_Ej = mlu.solve(sj.E_s);

  const Mat dCi = pi.C_hat - si.C;
  const Mat dCj = pj.C_hat - sj.C;

  CrossCov out;
  out.i = prev.i;
  out.j = prev.j;

  // Filtering-error cross bound.
  Mat theta = (I - pi.K * si.C) * S * (I - pj.K * sj.C).transpose() +
              (pi.K * dCi) * PmS * (pj.K * dCj).transpose() +
              (pi.K * si.Hcal) * (pj.K * sj.Hcal).transpose() / alpha +
              (pi.K * si.G_s) * model.R * (pj.K * sj.G_s).transpose() +
              (pi.K * si.B_s) * w2 * (pj.K * sj.B_s).transpose();
  const Mat ui = S + pi.K * (pi.C_hat * PmS - si.C * P);
  const Mat uj = S + pj.K * (pj.C_hat * PmS - sj.C * P);
  theta += ui * si.E_s.transpose() * Mt_inv_Ej * uj.transpose();
  out.Theta_ij = theta;

  // Prediction-error cross bound.
  const Mat Di = model.A - pi.A_hat + pi.L * dCi;
  const Mat Dj = model.A - pj.A_hat + pj.L * dCj;
  Mat mult = Mat::Zero(r, r);
  for (int v = 0; v < model.hbar(); ++v)
    mult += model.theta_upper[v] * model.A_mult[v] * P * model.A_mult[v].transpose();
  Mat sig = (model.A - pi.L * si.C) * S * (model.A - pj.L * sj.C).transpose() +
            Di * PmS * Dj.transpose() +
            (model.Fcal - pi.L * si.Hcal) * (model.Fcal - pj.L * sj.Hcal).transpose() / alpha +
            mult +
            (model.B - pi.L * si.B_s) * w2 * (model.B - pj.L * sj.B_s).transpose() +
            (model.G - pi.L * si.G_s) * model.R * (model.G - pj.L * sj.G_s).transpose();
  const Mat vi = (model.A - pi.L * si.C) * S + Di * PmS;
  const Mat vj = (model.A - pj.L * sj.C) * S + Dj * PmS;
  sig += vi * si.E_s.transpose() * Mt_inv_Ej * vj.transpose();
  out.Sigma_ij = sig;
  return out;
}

Mat build_pi(const std::vector<std::vector<Mat>>& theta_grid) {
  const int L = static_cast<int>(theta_grid.size());
  if (L == 0) throw ConfigError("build_pi: empty grid");
  const int r = static_cast<int>(theta_grid[0][0].rows());
  for (int i = 0; i < L; ++i) {
    if (static_cast<int>(theta_grid[i].size()) != L) throw ConfigError("build_pi: ragged grid");
    for (int j = 0; j < L; ++j)
      if ((theta_grid[i][j] - theta_grid[j][i].transpose()).cwiseAbs().maxCoeff() > 1e-6)
        throw ConfigError("build_pi: grid is not transpose-consistent");
  }
  Mat Pi(r * L, r * L);
  for (int i = 0; i < L; ++i)
    for (int j = 0; j < L; ++j) Pi.block(i * r, j * r, r, r) = theta_grid[i][j];
  Pi = symmetrize(Pi);
  const double me = min_eigenvalue(Pi);
  if (me <= 0.0) {
    const double ridge = 1e-9 * Pi.trace() / static_cast<double>(r * L);
    NETFUSE_WARN_LIMITED(3, "Pi not PD (min eigenvalue %.3e), ridge %.3e\n", me, ridge);
    Pi += std::max(ridge, -2.0 * me) * Mat::Identity(r * L, r * L);
  }
  return Pi;
}

FusionResult fuse(const std::vector<Vec>& x_locals, const Mat& Pi) {
  const int L = static_cast<int>(x_locals.size());
  if (L == 0) throw ConfigError("fuse: no local estimates");
  const int r = static_cast<int>(x_locals[0].size());
  if (Pi.rows() != r * L || Pi.cols() != r * L) throw ConfigError("fuse: Pi dimension mismatch");

  Mat I0(r * L, r);
  for (int i = 0; i < L; ++i) I0.block(i * r, 0, r, r) = Mat::Identity(r, r);

  Eigen::LDLT<Mat> ldlt(Pi);
  Mat Y;
  if (ldlt.info() == Eigen::Success) {
    Y = ldlt.solve(I0);
  } else {
    Eigen::FullPivLU<Mat> lu(Pi);
    if (!lu.isInvertible()) throw NumericalError("fuse: Pi is singular after regularization");
    Y = lu.solve(I0);
  }
  // S = I0^T Pi^{-1} I0; reusing Y^T I0 = S^T keeps sum(Omega) = I at solver
  // precision of the small r x r system.
  Mat S = symmetrize(I0.transpose() * Y);
  Eigen::LDLT<Mat> sldlt(S);
  if (sldlt.info() != Eigen::Success)
    throw NumericalError("fuse: fused information matrix not factorizable");
  const Mat OmegaFlat = sldlt.solve(Y.transpose());  // r x rL

  FusionResult out;
  out.Pi = Pi;
  out.P_fused = symmetrize(sldlt.solve(Mat::Identity(r, r)));
  out.Omega.reserve(L);
  out.x_fused = Vec::Zero(r);
  for (int i = 0; i < L; ++i) {
    out.Omega.push_back(OmegaFlat.block(0, i * r, r, r));
    out.x_fused += out.Omega.back() * x_locals[i];
  }
  return out;
}

CrossCovGrid::CrossCovGrid(const SystemModel& sys, int L, double alpha)
    : sys_(&sys), alpha_(alpha) {
  theta_.assign(L, std::vector<Mat>(L, sys.P0));
  sigma_.assign(L, std::vector<Mat>(L, sys.P0));
}

void CrossCovGrid::step(int t, const Mat& P, double w2,
                        const std::vector<SensorModel>& sensors,
                        const std::vector<FilterParams>& params) {
  if (t != t_)
    throw ConfigError("cross-covariance grid out of alignment: expected timestamp " +
                      std::to_string(t_) + ", got " + std::to_string(t));
  const int L = static_cast<int>(theta_.size());
  std::vector<std::vector<Mat>> ntheta(L, std::vector<Mat>(L));
  std::vector<std::vector<Mat>> nsigma(L, std::vector<Mat>(L));
  for (int i = 0; i < L; ++i)
    for (int j = 0; j < L; ++j) {
      CrossCov prev{i, j, theta_[i][j], sigma_[i][j]};
      CrossCov next = cross_cov_step(prev, P, w2, alpha_, *sys_, sensors[i], sensors[j],
                                     params[i], params[j]);
      ntheta[i][j] = next.Theta_ij;
      nsigma[i][j] = next.Sigma_ij;
    }
  // enforce transpose consistency against drift
  for (int i = 0; i < L; ++i)
    for (int j = 0; j <= i; ++j) {
      ntheta[i][j] = 0.5 * (ntheta[i][j] + ntheta[j][i].transpose());
      ntheta[j][i] = ntheta[i][j].transpose();
      nsigma[i][j] = 0.5 * (nsigma[i][j] + nsigma[j][i].transpose());
      nsigma[j][i] = nsigma[i][j].transpose();
    }
  theta_ = std::move(ntheta);
  sigma_ = std::move(nsigma);
  ++t_;
}

}  // namespace netfuse
