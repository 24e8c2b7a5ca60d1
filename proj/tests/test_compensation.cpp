#include "doctest.h"

#include "netfuse/compensation.hpp"
#include "netfuse/scenario.hpp"

using namespace netfuse;

TEST_CASE("compensation factor spans [1/N, 1]") {
  const int N = 5;
  Vec xp(3);
  xp << 1.0, -2.0, 4.0;
  CHECK((compensate(xp, 1, N) - xp).norm() == 0.0);            // tau = 1: factor 1
  CHECK((compensate(xp, N, N) - 0.2 * xp).norm() < 1e-15);     // tau = N: factor 1/N
  for (int tau = 1; tau <= N; ++tau) {
    const double f = compensation_factor(tau, N);
    CHECK(f >= 1.0 / N - 1e-15);
    CHECK(f <= 1.0);
    CHECK(compensate(xp, tau, N).norm() <= xp.norm() + 1e-15);
  }
  CHECK_THROWS_AS(compensate(xp, N + 1, N), ConfigError);
  CHECK_THROWS_AS(compensate(xp, 0, N), ConfigError);
}

TEST_CASE("a delay-free packet bypasses the compensation entirely") {
  Scenario sc = tracking3_scenario();
  LocalFilterState st = initial_filter_state(sc.system, 0, sc.alpha);
  st = step_filter(st, sc.sensors[0], sc.system, 0, Vec::Ones(3), sc.w_cov);
  CHECK((current_estimate(st, 0, sc.N) - st.xf).norm() == 0.0);
  CHECK((current_estimate(st, 3, sc.N) - compensate(st.xp, 3, sc.N)).norm() == 0.0);
}

TEST_CASE("fill-in count equals the gap length") {
  Scenario sc = tracking3_scenario();
  const SensorModel& sen = sc.sensors[0];

  SUBCASE("no gap, no fill") {
    LocalFilterState st = initial_filter_state(sc.system, 0, sc.alpha);
    st = step_filter(st, sen, sc.system, 0, Vec::Ones(3), sc.w_cov);
    auto fills = fill_missing(st, 1, sen, sc.system, sc.w_cov);
    CHECK(fills.empty());
    CHECK(st.t == 0);
  }
  SUBCASE("two missing timestamps before the packet at s = t + 3") {
    LocalFilterState st = initial_filter_state(sc.system, 0, sc.alpha);
    st = step_filter(st, sen, sc.system, 0, Vec::Ones(3), sc.w_cov);
    auto fills = fill_missing(st, 3, sen, sc.system, sc.w_cov);
    CHECK(fills.size() == 2);  // hand trace: timestamps 1 and 2 predicted
    CHECK(st.t == 2);
    CHECK(fills[0].t == 1);
    CHECK(fills[1].t == 2);
    // ready for the measurement update at s = 3
    CHECK_NOTHROW(step_filter(st, sen, sc.system, 3, Vec::Ones(3), sc.w_cov));
  }
  SUBCASE("stale packets are rejected") {
    LocalFilterState st = initial_filter_state(sc.system, 0, sc.alpha);
    st = step_filter(st, sen, sc.system, 0, Vec::Ones(3), sc.w_cov);
    CHECK_THROWS_AS(fill_missing(st, 0, sen, sc.system, sc.w_cov), ConfigError);
  }
}

TEST_CASE("fill-ins preserve the PSD bound invariants") {
  Scenario sc = tracking3_scenario();
  LocalFilterState st = initial_filter_state(sc.system, 1, sc.alpha);
  st = step_filter(st, sc.sensors[1], sc.system, 0, Vec::Ones(3), sc.w_cov);
  auto fills = fill_missing(st, 6, sc.sensors[1], sc.system, sc.w_cov);
  CHECK(fills.size() == 5);
  for (const LocalFilterState& f : fills) {
    CHECK(min_eigenvalue(f.theta_bar) > -1e-9);
    CHECK(min_eigenvalue(f.sigma_bar) > -1e-9);
    CHECK(min_eigenvalue(f.P) > -1e-9);
  }
}
