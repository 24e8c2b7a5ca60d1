#include "netfuse/estimator.hpp"

#include <cstdio>

namespace netfuse {

namespace {

/// Shared intermediates of the Theorem-3 formulas at one timestamp.
struct Work {
  Mat Minv_E;      // M^{-1} E_s          (p x r)
  Mat Mtinv_E;     // Mtilde^{-1} E_s     (p x r)
  Mat T;           // I + Sigma E^T M^{-1} E
  Mat TS;          // T * Sigma
  double w2 = 0.0;
};

Work make_work(const LocalFilterState& st, const SensorModel& sen, const SystemModel& sys,
               int t, const WCovModel& wcov) {
  if (t != st.t + 1)
    throw ConfigError("filter step out of order: expected timestamp " + std::to_string(st.t + 1) +
                      ", got " + std::to_string(t));
  const int p = sys.p();
  const Mat Ip = Mat::Identity(p, p);
  const Mat M = Ip / st.alpha - sen.E_s * st.sigma_bar * sen.E_s.transpose();
  const Mat Mt = Ip / st.alpha - sen.E_s * st.P * sen.E_s.transpose();
  double me = min_eigenvalue(M);
  if (me <= 0.0)
    throw NumericalError("alpha too large / bound blow-up: M not PD (min eigenvalue " +
                             std::to_string(me) + ")", me);
  me = min_eigenvalue(Mt);
  if (me <= 0.0)
    throw NumericalError("alpha too large / bound blow-up: M~ not PD (min eigenvalue " +
                             std::to_string(me) + ")", me);
  Work w;
  w.Minv_E = solve_sym(M, sen.E_s);
  w.Mtinv_E = solve_sym(Mt, sen.E_s);
  w.T = Mat::Identity(sys.r(), sys.r()) + st.sigma_bar * sen.E_s.transpose() * w.Minv_E;
  w.TS = w.T * st.sigma_bar;
  w.w2 = wcov.at(sys, t);
  return w;
}

/// Invert a (possibly ill-conditioned) m x m innovation matrix; Tikhonov
/// ridge with a warning when the factorization reports a problem.
Mat guarded_solve(const Mat& s, const Mat& rhs, const char* name) {
  Eigen::FullPivLU<Mat> lu(s);
  if (lu.isInvertible()) return lu.solve(rhs);
  const double ridge = 1e-10 * s.trace() / static_cast<double>(s.rows());
  NETFUSE_WARN_LIMITED(3, "singular %s, applying ridge %.3e\n", name, ridge);
  const Mat reg = s + std::max(ridge, 1e-300) * Mat::Identity(s.rows(), s.cols());
  return reg.fullPivLu().solve(rhs);
}

FilterParams params_from_work(const LocalFilterState& st, const SensorModel& sen,
                              const SystemModel& sys, const Work& w, bool measured) {
  FilterParams fp;
  fp.measured = measured;
  fp.C_hat = sen.C * w.T;
  fp.A_hat = sys.A * w.T;
  if (!measured) {
    fp.K = Mat::Zero(sys.r(), sen.m());
    fp.L = Mat::Zero(sys.r(), sen.m());
    return fp;
  }
  const Mat Lam = w.TS * sen.C.transpose();
  const Mat common = sen.B_s * w.w2 * sen.B_s.transpose() + sen.G_s * sys.R * sen.G_s.transpose() +
                     sen.Hcal * sen.Hcal.transpose() / st.alpha;
  const Mat Xi = sen.C * w.TS * sen.C.transpose() + common;
  fp.K = guarded_solve(Xi.transpose(), Lam.transpose(), "Xi").transpose();
  const Mat Delta = sys.A * w.TS * sen.C.transpose() +
                    sys.Fcal * sen.Hcal.transpose() / st.alpha +
                    sys.B * w.w2 * sen.B_s.transpose() + sys.G * sys.R * sen.G_s.transpose();
  const Mat Ttil_S = st.sigma_bar + st.sigma_bar * sen.E_s.transpose() * w.Mtinv_E * st.sigma_bar;
  const Mat Nabla = sen.C * Ttil_S * sen.C.transpose() + common;
  fp.L = guarded_solve(Nabla.transpose(), Delta.transpose(), "Nabla").transpose();
  return fp;
}

BoundTriple bounds_from_work(const LocalFilterState& st, const FilterParams& fp,
                             const SensorModel& sen, const SystemModel& sys, const Work& w) {
  BoundTriple out;
  // Filtering-error bound: inflation uses M~, the gain correction uses M.
  Mat theta = st.sigma_bar + st.sigma_bar * sen.E_s.transpose() * w.Mtinv_E * st.sigma_bar;
  if (fp.measured) {
    const Mat Lam = w.TS * sen.C.transpose();
    theta -= fp.K * Lam.transpose();
  }
  out.theta_bar = symmetrize(theta);

  Mat mult = Mat::Zero(sys.r(), sys.r());
  for (int i = 0; i < sys.hbar(); ++i)
    mult += sys.theta_upper[i] * sys.A_mult[i] * st.P * sys.A_mult[i].transpose();

  const Mat DeltaTil = sys.A * w.TS * sys.A.transpose() +
                       sys.Fcal * sys.Fcal.transpose() / st.alpha +
                       sys.B * w.w2 * sys.B.transpose() + sys.G * sys.R * sys.G.transpose() + mult;
  Mat sigma_next = DeltaTil;
  if (fp.measured) {
    const Mat NablaTil = sen.C * w.TS * sys.A.transpose() +
                         sen.Hcal * sys.Fcal.transpose() / st.alpha +
                         sen.B_s * w.w2 * sys.B.transpose() + sen.G_s * sys.R * sys.G.transpose();
    sigma_next -= fp.L * NablaTil;
  }
  out.sigma_bar = symmetrize(sigma_next);

  // State second-moment bound; the inflation here uses the system-side E.
  out.P = symmetrize(sys.A * inflate(st.P, sys.E, st.alpha) * sys.A.transpose() +
                     sys.Fcal * sys.Fcal.transpose() / st.alpha + mult +
                     sys.B * w.w2 * sys.B.transpose() + sys.G * sys.R * sys.G.transpose());

  for (const Mat* m : {&out.theta_bar, &out.sigma_bar, &out.P}) {
    const double me = min_eigenvalue(*m);
    if (me < -1e-9)
      throw NumericalError("bound recursion lost positive semidefiniteness (min eigenvalue " +
                               std::to_string(me) + ")", me);
  }
  return out;
}

}  // namespace

LocalFilterState initial_filter_state(const SystemModel& sys, int sensor_id, double alpha) {
  if (alpha <= 0.0) throw ConfigError("alpha must be > 0");
  LocalFilterState st;
  st.sensor_id = sensor_id;
  st.t = -1;
  st.xf = sys.mu0;
  st.xp = sys.mu0;
  st.sigma_bar = symmetrize(sys.P0);
  st.P = symmetrize(sys.mu0 * sys.mu0.transpose() + sys.P0);
  st.theta_bar = symmetrize(sys.P0);
  st.alpha = alpha;
  return st;
}

FilterParams filter_params(const LocalFilterState& state, const SensorModel& sensor,
                           const SystemModel& model, int t, const WCovModel& wcov) {
  const Work w = make_work(state, sensor, model, t, wcov);
  return params_from_work(state, sensor, model, w, true);
}

FilterParams prediction_only_params(const LocalFilterState& state, const SensorModel& sensor,
                                    const SystemModel& model, int t, const WCovModel& wcov) {
  const Work w = make_work(state, sensor, model, t, wcov);
  return params_from_work(state, sensor, model, w, false);
}

LocalFilterState update(const LocalFilterState& state, const FilterParams& params,
                        const std::optional<Vec>& y) {
  LocalFilterState next = state;
  next.t = state.t + 1;
  if (y.has_value()) {
    if (!params.measured) throw ConfigError("update: measurement given with prediction-only params");
    const Vec innov = *y - params.C_hat * state.xp;
    next.xf = state.xp + params.K * innov;
    next.xp = params.A_hat * state.xp + params.L * innov;
  } else {
    next.xf = state.xp;
    next.xp = params.A_hat * state.xp;
  }
  return next;
}

BoundTriple propagate_bounds(const LocalFilterState& state, const FilterParams& params,
                             const SensorModel& sensor, const SystemModel& model, int t,
                             const WCovModel& wcov) {
  const Work w = make_work(state, sensor, model, t, wcov);
  return bounds_from_work(state, params, sensor, model, w);
}

LocalFilterState step_filter(const LocalFilterState& state, const SensorModel& sensor,
                             const SystemModel& model, int t, const std::optional<Vec>& y,
                             const WCovModel& wcov, FilterParams* params_out) {
  const Work w = make_work(state, sensor, model, t, wcov);
  const FilterParams fp = params_from_work(state, sensor, model, w, y.has_value());
  const BoundTriple b = bounds_from_work(state, fp, sensor, model, w);
  LocalFilterState next = update(state, fp, y);
  next.theta_bar = b.theta_bar;
  next.sigma_bar = b.sigma_bar;
  next.P = b.P;
  if (params_out) *params_out = fp;
  return next;
}

AugmentedMatrices build_augmented(const SystemModel& model, const SensorModel& sensor,
                                  const FilterParams& params) {
  const int r = model.r();
  const Mat I = Mat::Identity(r, r);
  const Mat& C = sensor.C;
  const Mat& K = params.K;
  const Mat& L = params.L;
  const Mat dC = params.C_hat - C;

  AugmentedMatrices a;
  a.A_t1.resize(2 * r, 2 * r);
  a.A_t1 << I - K * C, K * dC,
            K * C, I - K * dC;
  a.H_t1.resize(2 * r, model.p());
  a.H_t1 << -K * sensor.Hcal, K * sensor.Hcal;
  a.E_t1.resize(model.p(), 2 * r);
  a.E_t1 << sensor.E_s, sensor.E_s;
  a.B_t1.resize(2 * r, 1);
  a.B_t1 << -K * sensor.B_s, K * sensor.B_s;
  a.G_t1.resize(2 * r, 1);
  a.G_t1 << -K * sensor.G_s, K * sensor.G_s;

  a.A_t2.resize(2 * r, 2 * r);
  a.A_t2 << model.A - L * C, model.A - params.A_hat + L * dC,
            L * C, params.A_hat - L * dC;
  a.H_t2.resize(2 * r, model.p());
  a.H_t2 << model.Fcal - L * sensor.Hcal, L * sensor.Hcal;
  a.E_t2 = a.E_t1;
  a.B_t2.resize(2 * r, 1);
  a.B_t2 << model.B - L * sensor.B_s, L * sensor.B_s;
  a.G_t2.resize(2 * r, 1);
  a.G_t2 << model.G - L * sensor.G_s, L * sensor.G_s;

  a.A_theta_t2.reserve(model.hbar());
  for (const Mat& av : model.A_mult) {
    Mat blk = Mat::Zero(2 * r, 2 * r);
    blk.topLeftCorner(r, r) = av;
    blk.topRightCorner(r, r) = av;
    a.A_theta_t2.push_back(std::move(blk));
  }
  return a;
}

Mat lemma3_bound(const Mat& A, const Mat& H, const Mat& E, double f_norm_bound,
                 const Mat& X, double alpha) {
  if (alpha <= 0.0) throw ConfigError("lemma3_bound: alpha must be > 0");
  const double f2 = f_norm_bound * f_norm_bound;
  return symmetrize(A * inflate(X, E, alpha) * A.transpose() +
                    (f2 / alpha) * H * H.transpose());
}

}  // namespace netfuse
