#include "doctest.h"

#include <random>

#include "netfuse/estimator.hpp"
#include "netfuse/scenario.hpp"
#include "oracles.hpp"

using namespace netfuse;

namespace {

/// Uncertainty-free system/sensor pair wrapping the oracle's random plant.
void wrap_plain(const oracles::Random2D& o, SystemModel* sys, SensorModel* sen) {
  const int r = static_cast<int>(o.A.rows());
  const int m = static_cast<int>(o.C.rows());
  sys->A = o.A;
  sys->Fcal = Mat::Zero(r, 1);
  sys->E = Mat::Zero(1, r);
  sys->B = Mat::Zero(r, 1);
  sys->G = o.G;
  sys->R = o.R;
  sys->mu0 = o.x0;
  sys->P0 = o.P0;
  sys->w_signal = Signal::zero();
  sys->f_signal = Signal::zero();
  sen->id = 0;
  sen->C = o.C;
  sen->Hcal = Mat::Zero(m, 1);
  sen->E_s = Mat::Zero(1, r);
  sen->B_s = Mat::Zero(m, 1);
  sen->G_s = o.D;
}

}  // namespace

TEST_CASE("zero gains degenerate the filtering stack") {
  Scenario sc = tracking3_scenario();
  const SensorModel& sen = sc.sensors[0];
  LocalFilterState st = initial_filter_state(sc.system, 0, sc.alpha);
  FilterParams fp = prediction_only_params(st, sen, sc.system, 0, sc.w_cov);
  const AugmentedMatrices a = build_augmented(sc.system, sen, fp);
  const int r = sc.system.r();
  CHECK((a.A_t1.topLeftCorner(r, r) - Mat::Identity(r, r)).norm() == 0.0);
  CHECK((a.A_t1.bottomRightCorner(r, r) - Mat::Identity(r, r)).norm() == 0.0);
  CHECK(a.B_t1.norm() == 0.0);
  CHECK(a.G_t1.norm() == 0.0);
  // shape case: r = 3, m = 3 sensors here
  CHECK(a.A_t2.rows() == 6);
  CHECK(a.A_t2.cols() == 6);
  CHECK(a.B_t2.rows() == 6);
  CHECK(a.B_t2.cols() == 1);
}

TEST_CASE("augmented blocks match an independent symbol-by-symbol derivation") {
  Scenario sc = tracking3_scenario();
  const SystemModel& sys = sc.system;
  const SensorModel& sen = sc.sensors[1];
  LocalFilterState st = initial_filter_state(sys, 1, sc.alpha);
  FilterParams fp = filter_params(st, sen, sys, 0, sc.w_cov);
  const AugmentedMatrices a = build_augmented(sys, sen, fp);

  const int r = sys.r();
  const Mat I = Mat::Identity(r, r);
  // Written out independently from the block definitions.
  Mat A_t1(2 * r, 2 * r);
  A_t1.block(0, 0, r, r) = I - fp.K * sen.C;
  A_t1.block(0, r, r, r) = fp.K * (fp.C_hat - sen.C);
  A_t1.block(r, 0, r, r) = fp.K * sen.C;
  A_t1.block(r, r, r, r) = I + fp.K * (sen.C - fp.C_hat);
  CHECK((a.A_t1 - A_t1).cwiseAbs().maxCoeff() < 1e-14);

  Mat A_t2(2 * r, 2 * r);
  A_t2.block(0, 0, r, r) = sys.A - fp.L * sen.C;
  A_t2.block(0, r, r, r) = sys.A - fp.A_hat + fp.L * (fp.C_hat - sen.C);
  A_t2.block(r, 0, r, r) = fp.L * sen.C;
  A_t2.block(r, r, r, r) = fp.A_hat + fp.L * (sen.C - fp.C_hat);
  CHECK((a.A_t2 - A_t2).cwiseAbs().maxCoeff() < 1e-14);

  Mat H_t2(2 * r, sys.p());
  H_t2.topRows(r) = sys.Fcal - fp.L * sen.Hcal;
  H_t2.bottomRows(r) = fp.L * sen.Hcal;
  CHECK((a.H_t2 - H_t2).cwiseAbs().maxCoeff() < 1e-14);

  Mat E12(sys.p(), 2 * r);
  E12 << sen.E_s, sen.E_s;
  CHECK((a.E_t1 - E12).norm() == 0.0);
  CHECK((a.E_t2 - E12).norm() == 0.0);

  REQUIRE(a.A_theta_t2.size() == 1);
  Mat Av = Mat::Zero(2 * r, 2 * r);
  Av.block(0, 0, r, r) = sys.A_mult[0];
  Av.block(0, r, r, r) = sys.A_mult[0];
  CHECK((a.A_theta_t2[0] - Av).norm() == 0.0);

  Mat B_t2(2 * r, 1);
  B_t2 << sys.B - fp.L * sen.B_s, fp.L * sen.B_s;
  CHECK((a.B_t2 - B_t2).cwiseAbs().maxCoeff() < 1e-14);
  Mat G_t1(2 * r, 1);
  G_t1 << -fp.K * sen.G_s, fp.K * sen.G_s;
  CHECK((a.G_t1 - G_t1).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("no measurement uncertainty collapses the corrected maps") {
  Scenario sc = tracking3_scenario();
  SystemModel sys = sc.system;
  SensorModel sen = sc.sensors[0];
  sen.E_s = Mat::Zero(sys.p(), sys.r());
  LocalFilterState st = initial_filter_state(sys, 0, sc.alpha);
  FilterParams fp = filter_params(st, sen, sys, 0, sc.w_cov);
  CHECK((fp.C_hat - sen.C).cwiseAbs().maxCoeff() < 1e-14);
  CHECK((fp.A_hat - sys.A).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("tracking sensor 1 gains stay finite and near-nominal at t = 0") {
  Scenario sc = tracking3_scenario();
  LocalFilterState st = initial_filter_state(sc.system, 0, sc.alpha);
  FilterParams fp = filter_params(st, sc.sensors[0], sc.system, 0, sc.w_cov);
  CHECK(fp.K.allFinite());
  CHECK(fp.L.allFinite());
  // E = 0.02 * ones is a small perturbation: C_hat within 1% of C
  CHECK((fp.C_hat - sc.sensors[0].C).cwiseAbs().maxCoeff() <
        0.01 * sc.sensors[0].C.cwiseAbs().maxCoeff());
}

TEST_CASE("filter reduces to the textbook Kalman filter without uncertainty") {
  for (std::uint64_t seed : {11u, 22u, 33u}) {
    const oracles::Random2D o = oracles::random_stable_system(seed);
    SystemModel sys;
    SensorModel sen;
    wrap_plain(o, &sys, &sen);
    const WCovModel wc = WCovModel::exact();

    oracles::Kalman kf{o.A, o.C, o.G, o.D, o.R};
    kf.init(o.x0, o.P0);
    LocalFilterState st = initial_filter_state(sys, 0, 3.0);

    const NoiseRealization noise = make_noise(sys, 50, seed, 0);
    Vec x = draw_initial_state(sys, seed, 0);
    for (int t = 0; t < 50; ++t) {
      const Vec z = measure(sen, x, t, sys, noise);
      FilterParams fp;
      st = step_filter(st, sen, sys, t, z, wc, &fp);
      kf.step(z);
      CHECK((fp.K - kf.Kf).cwiseAbs().maxCoeff() < 1e-10);
      CHECK((fp.L - kf.Lp).cwiseAbs().maxCoeff() < 1e-10);
      CHECK((st.xf - kf.xf).cwiseAbs().maxCoeff() < 1e-10);
      CHECK((st.xp - kf.xp).cwiseAbs().maxCoeff() < 1e-10);
      CHECK((st.theta_bar - kf.Theta).cwiseAbs().maxCoeff() < 1e-10);
      CHECK((st.sigma_bar - kf.Sigma).cwiseAbs().maxCoeff() < 1e-10);
      x = step_truth(x, t, sys, noise);
    }
  }
}

TEST_CASE("zero innovation leaves the estimates on the predicted path") {
  Scenario sc = tracking3_scenario();
  LocalFilterState st = initial_filter_state(sc.system, 0, sc.alpha);
  FilterParams fp = filter_params(st, sc.sensors[0], sc.system, 0, sc.w_cov);
  const Vec y = fp.C_hat * st.xp;
  LocalFilterState next = update(st, fp, y);
  CHECK((next.xf - st.xp).norm() < 1e-14);
  CHECK((next.xp - fp.A_hat * st.xp).norm() < 1e-14);

  // scalar identity-gain case: xf' = y exactly
  FilterParams idp;
  idp.C_hat = Mat::Identity(1, 1);
  idp.K = Mat::Identity(1, 1);
  idp.A_hat = Mat::Identity(1, 1);
  idp.L = Mat::Zero(1, 1);
  LocalFilterState s1;
  s1.t = -1;
  s1.xf = Vec::Zero(1);
  s1.xp = 2.0 * Vec::Ones(1);
  const Vec ny = 5.0 * Vec::Ones(1);
  CHECK(update(s1, idp, ny).xf(0) == doctest::Approx(5.0).epsilon(1e-15));
}

TEST_CASE("bound recursion drops to the noise-only moment map without plant terms") {
  // A_mult = 0, Fcal = 0, B = 0  =>  P' = A P A^T + G R G^T
  Scenario sc = tracking3_scenario();
  SystemModel sys = sc.system;
  sys.A_mult.clear();
  sys.theta_lower.clear();
  sys.theta_upper.clear();
  sys.Fcal = Mat::Zero(3, 1);
  sys.E = Mat::Zero(1, 3);
  sys.B = Mat::Zero(3, 1);
  sys.w_signal = Signal::zero();
  SensorModel sen = sc.sensors[0];
  sen.E_s = Mat::Zero(1, 3);
  sen.Hcal = Mat::Zero(3, 1);
  sen.B_s = Mat::Zero(3, 1);

  LocalFilterState st = initial_filter_state(sys, 0, sc.alpha);
  FilterParams fp = filter_params(st, sen, sys, 0, WCovModel::exact());
  const BoundTriple b = propagate_bounds(st, fp, sen, sys, 0, WCovModel::exact());
  const Mat expect = sys.A * st.P * sys.A.transpose() + sys.G * sys.R * sys.G.transpose();
  CHECK((b.P - expect).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("tracking bound traces settle below the documented ceiling") {
  Scenario sc = tracking3_scenario();
  for (int i = 0; i < 3; ++i) {
    LocalFilterState st = initial_filter_state(sc.system, i, sc.alpha);
    std::vector<double> traces;
    for (int t = 0; t < 300; ++t) {
      st = step_filter(st, sc.sensors[i], sc.system, t, Vec::Zero(3), sc.w_cov);
      traces.push_back(st.theta_bar.trace());
      CHECK((st.theta_bar - st.theta_bar.transpose()).cwiseAbs().maxCoeff() < 1e-12);
      CHECK(min_eigenvalue(st.theta_bar) > -1e-9);
      CHECK(min_eigenvalue(st.sigma_bar) > -1e-9);
      // the filtering bound never exceeds the prediction bound by more than slack
      CHECK(st.theta_bar.trace() < st.sigma_bar.trace() + st.P.trace() * 1e-6 + 1e-9);
    }
    for (int t = 200; t < 300; ++t) CHECK(traces[t] < 0.14);
  }
}

TEST_CASE("bound recursion equals the Riccati recursion without uncertainty") {
  const oracles::Random2D o = oracles::random_stable_system(7);
  SystemModel sys;
  SensorModel sen;
  wrap_plain(o, &sys, &sen);
  oracles::Kalman kf{o.A, o.C, o.G, o.D, o.R};
  kf.init(o.x0, o.P0);
  LocalFilterState st = initial_filter_state(sys, 0, 2.0);
  for (int t = 0; t < 40; ++t) {
    st = step_filter(st, sen, sys, t, Vec::Zero(sen.m()), WCovModel::exact());
    kf.step(Vec::Zero(sen.m()));
    CHECK((st.sigma_bar - kf.Sigma).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("uncertainty quadratic bound dominates every admissible contraction") {
  SUBCASE("degenerate inputs return the plain quadratic") {
    Mat A(2, 2);
    A << 1.0, 0.5, 0.0, 1.0;
    Mat X = 2.0 * Mat::Identity(2, 2);
    const Mat b = lemma3_bound(A, Mat::Zero(2, 1), Mat::Zero(1, 2), 1.0, X, 0.7);
    CHECK((b - A * X * A.transpose()).cwiseAbs().maxCoeff() < 1e-12);
  }
  SUBCASE("scalar case against a brute-force sweep") {
    const Mat A = Mat::Ones(1, 1), H = Mat::Ones(1, 1), E = Mat::Ones(1, 1);
    const Mat X = Mat::Ones(1, 1);
    const Mat b = lemma3_bound(A, H, E, 1.0, X, 0.5);
    CHECK(b(0, 0) == doctest::Approx(4.0).epsilon(1e-12));
    for (double f = -1.0; f <= 1.0; f += 0.01) {
      const double quad = (1.0 + f) * (1.0 + f);
      CHECK(quad <= b(0, 0) + 1e-12);
    }
  }
  SUBCASE("random 3x3 instances") {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      std::mt19937_64 eng(seed);
      std::normal_distribution<double> g;
      Mat A(3, 3), H(3, 2), E(2, 3), root(3, 3);
      for (int i = 0; i < 9; ++i) A(i / 3, i % 3) = g(eng);
      for (int i = 0; i < 6; ++i) H(i / 2, i % 2) = 0.5 * g(eng);
      for (int i = 0; i < 6; ++i) E(i / 3, i % 3) = 0.3 * g(eng);
      for (int i = 0; i < 9; ++i) root(i / 3, i % 3) = 0.5 * g(eng);
      const Mat X = root * root.transpose() + 0.1 * Mat::Identity(3, 3);
      const double alpha = 0.5 / max_eigenvalue(E * X * E.transpose());
      const Mat bound = lemma3_bound(A, H, E, 1.0, X, alpha);
      for (int draw = 0; draw < 1000; ++draw) {
        const Mat F = oracles::random_contraction(seed * 1000 + draw, 2);
        const Mat q = (A + H * F * E) * X * (A + H * F * E).transpose();
        CHECK(min_eigenvalue(bound - q) > -1e-9);
      }
    }
  }
}

TEST_CASE("alpha blow-up raises the documented numerical error") {
  Scenario sc = tracking3_scenario();
  LocalFilterState st = initial_filter_state(sc.system, 0, 1e7);
  st.sigma_bar = Mat::Identity(3, 3);
  SensorModel sen = sc.sensors[0];
  sen.E_s = Mat::Ones(1, 3);
  CHECK_THROWS_AS(filter_params(st, sen, sc.system, 0, sc.w_cov), NumericalError);
  try {
    filter_params(st, sen, sc.system, 0, sc.w_cov);
  } catch (const NumericalError& e) {
    CHECK(e.offending_eigenvalue < 0.0);
    CHECK(std::string(e.what()).find("alpha too large") != std::string::npos);
  }
}

TEST_CASE("out-of-order filter steps are rejected") {
  Scenario sc = tracking3_scenario();
  LocalFilterState st = initial_filter_state(sc.system, 0, sc.alpha);
  CHECK_THROWS_AS(filter_params(st, sc.sensors[0], sc.system, 5, sc.w_cov), ConfigError);
}
