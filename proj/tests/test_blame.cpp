#include <cmath>
#include <random>

#include "doctest.h"

#include "acrl/blame.hpp"

using namespace acrl;

namespace {

EstimatorConfig default_cfg() {
  EstimatorConfig cfg;
  cfg.alpha = 0.05;
  cfg.eta = 0.0;
  cfg.prior_mean = 10.0;
  cfg.prior_var = 10.0;
  return cfg;
}

}  // namespace

TEST_CASE("unvisited pairs answer with the prior") {
  const EventEstimator est(2, 2, default_cfg());
  CHECK(est.time_estimate(0, 0, 0.0) == doctest::Approx(10.0));
  CHECK(est.time_estimate(1, 1, 1.0) == doctest::Approx(10.0 + std::sqrt(10.0)));
  CHECK(est.occurrence_prob(0, 0) == 0.0);
}

TEST_CASE("certain occurrence drives the estimate to zero") {
  EventEstimator est(1, 1, default_cfg());
  for (int i = 0; i < 2000; ++i) est.update(0, 0, true, 0, 0, false);
  CHECK(est.occurrence_prob(0, 0) == doctest::Approx(1.0));
  CHECK(est.time_estimate(0, 0, 0.0) == doctest::Approx(0.0).epsilon(1e-6));
}

TEST_CASE("single recurrent state with p = 0.5 converges to the closed form") {
  EventEstimator est(1, 1, default_cfg());
  std::mt19937_64 rng(4400);
  std::bernoulli_distribution occur(0.5);
  for (int i = 0; i < 100000; ++i) est.update(0, 0, occur(rng), 0, 0, false);
  // m1* = (1-p)/p = 1, m2* solves m2 = (1-p)(1 + m2 + 2 m1) = 3.
  CHECK(est.m1(0, 0) == doctest::Approx(1.0).epsilon(0.02));
  CHECK(est.m2(0, 0) == doctest::Approx(3.0).epsilon(0.05));
  CHECK(est.time_estimate(0, 0, 0.0) == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("postpone_time is the max over actions") {
  EventEstimator est(1, 3, default_cfg());
  est.set_entry(0, 0, 0.0, 3.0, 9.0, 10);
  est.set_entry(0, 1, 0.0, 7.0, 49.0, 10);
  est.set_entry(0, 2, 0.0, 7.0, 49.0, 10);
  CHECK(est.postpone_time(0, 0.0) == doctest::Approx(7.0));

  // All actions identical: the max is that shared value.
  est.set_entry(0, 0, 0.0, 7.0, 49.0, 10);
  CHECK(est.postpone_time(0, 0.0) == doctest::Approx(7.0));
}

TEST_CASE("terminal updates bootstrap from the prior") {
  EventEstimator est(1, 1, default_cfg());
  // One terminal, non-occurring transition: target m1 = (1-p)(1 + 10) = 11.
  est.update(0, 0, false, 0, 0, true);
  const double expected = 10.0 + 0.05 * (11.0 - 10.0);
  CHECK(est.m1(0, 0) == doctest::Approx(expected));
}

TEST_CASE("moment identity: the m2 target matches the matched-normal form") {
  // (1-p)(1 + m2' + 2 m1') == (1-p)(sigma'^2 + (1 + m1')^2) when
  // m2' = m1'^2 + sigma'^2.
  std::mt19937_64 rng(4401);
  std::uniform_real_distribution<double> um(0.0, 50.0);
  std::uniform_real_distribution<double> us(0.0, 20.0);
  std::uniform_real_distribution<double> up(0.0, 1.0);
  for (int i = 0; i < 10000; ++i) {
    const double m1 = um(rng), sigma = us(rng), p = up(rng);
    const double m2 = m1 * m1 + sigma * sigma;
    const double lhs = (1.0 - p) * (1.0 + m2 + 2.0 * m1);
    const double rhs = (1.0 - p) * (sigma * sigma + (1.0 + m1) * (1.0 + m1));
    CHECK(std::abs(lhs - rhs) <=
          1e-10 * std::max(1.0, std::max(std::abs(lhs), std::abs(rhs))));
  }
}

TEST_CASE("t_plus recursion") {
  BlameTracker tracker(default_cfg());
  tracker.start_episode();

  SUBCASE("base case takes the first postponement value") {
    tracker.advance(12.0, 0);
    CHECK(tracker.t_plus() == doctest::Approx(12.0));
  }
  SUBCASE("decays by one against a smaller value") {
    tracker.advance(12.0, 0);
    tracker.advance(5.0, 1);
    CHECK(tracker.t_plus() == doctest::Approx(11.0));
  }
  SUBCASE("resets upward after reaching safety") {
    tracker.advance(3.0, 0);
    tracker.advance(9.0, 1);
    CHECK(tracker.t_plus() == doctest::Approx(9.0));
  }
  SUBCASE("out-of-order steps are rejected") {
    tracker.advance(3.0, 0);
    CHECK_THROWS_AS(tracker.advance(3.0, 2), std::logic_error);
  }
  SUBCASE("never drops by more than one per step") {
    std::mt19937_64 rng(4402);
    std::uniform_real_distribution<double> u(0.0, 30.0);
    tracker.start_episode();
    double prev = 0.0;
    for (int t = 0; t < 500; ++t) {
      tracker.advance(u(rng), t);
      if (t > 0) CHECK(tracker.t_plus() >= prev - 1.0);
      prev = tracker.t_plus();
    }
  }
}

TEST_CASE("observe_state runs the denominator track at -eta") {
  EstimatorConfig cfg = default_cfg();
  cfg.eta = 0.5;
  EventEstimator est(1, 2, cfg);
  est.set_entry(0, 0, 0.0, 4.0, 16.0 + 9.0, 5);  // sigma = 3
  est.set_entry(0, 1, 0.0, 2.0, 4.0, 5);         // sigma = 0
  BlameTracker tracker(cfg);
  tracker.start_episode();
  tracker.observe_state(est, 0, 0);
  // postpone at -eta: max(4 - 0.5*3, 2 - 0) = 2.5
  CHECK(tracker.t_plus() == doctest::Approx(2.5));
}

TEST_CASE("blame") {
  EstimatorConfig cfg = default_cfg();
  EventEstimator est(1, 2, cfg);
  BlameTracker tracker(cfg);
  tracker.start_episode();

  SUBCASE("no hastening, no blame") {
    est.set_entry(0, 0, 0.0, 10.0, 110.0, 5);
    est.set_entry(0, 1, 0.0, 10.0, 110.0, 5);
    tracker.observe_state(est, 0, 0);
    CHECK(tracker.blame(est, 0, 0) == doctest::Approx(0.0));
  }
  SUBCASE("halving the time gives blame one half") {
    est.set_entry(0, 0, 0.0, 5.0, 25.0, 5);
    est.set_entry(0, 1, 0.0, 10.0, 100.0, 5);
    tracker.observe_state(est, 0, 0);
    CHECK(tracker.blame(est, 0, 0) == doctest::Approx(0.5));
    CHECK(tracker.blame(est, 0, 1) == doctest::Approx(0.0));
  }
  SUBCASE("tiny denominator yields zero blame") {
    est.set_entry(0, 0, 1.0, 0.0, 0.0, 5);
    est.set_entry(0, 1, 1.0, 0.0, 0.0, 5);
    tracker.observe_state(est, 0, 0);
    CHECK(tracker.t_plus() <= cfg.denominator_floor);
    CHECK(tracker.blame(est, 0, 0) == doctest::Approx(0.0));
  }
  SUBCASE("clamped to [0, 1] even when the estimate exceeds the maximum") {
    est.set_entry(0, 0, 0.0, 30.0, 900.0, 5);
    est.set_entry(0, 1, 0.0, 10.0, 100.0, 5);
    tracker.observe_state(est, 0, 0);
    const double b = tracker.blame(est, 0, 0);
    CHECK(b >= 0.0);
    CHECK(b <= 1.0);
    CHECK(b == doctest::Approx(0.0));
  }
}

TEST_CASE("bounds hold along random update streams") {
  std::mt19937_64 rng(4403);
  std::uniform_int_distribution<int> state(0, 2), action(0, 2);
  std::bernoulli_distribution occur(0.2), terminal(0.1);
  EventEstimator est(3, 3, default_cfg());
  BlameTracker tracker(default_cfg());
  tracker.start_episode();
  int t = 0;
  for (int i = 0; i < 20000; ++i) {
    const int s = state(rng), a = action(rng);
    const bool term = terminal(rng);
    est.update(s, a, occur(rng), state(rng), action(rng), term);
    tracker.observe_state(est, s, t++);
    const double b = tracker.blame(est, s, a);
    CHECK(b >= 0.0);
    CHECK(b <= 1.0);
    CHECK(est.occurrence_prob(s, a) >= 0.0);
    CHECK(est.occurrence_prob(s, a) <= 1.0);
    CHECK(est.m1(s, a) >= 0.0);
    if (term) {
      tracker.start_episode();
      t = 0;
    }
  }
}

TEST_CASE("earlier hastening stays blamed through the t_plus memory") {
  // Three-step chain; only the step-0 action hastens the event. With the
  // plain per-state denominator the occurrence step would carry no blame;
  // the decayed maximum keeps the early action on the hook.
  EstimatorConfig cfg = default_cfg();
  EventEstimator est(3, 2, cfg);
  // State 0: waiting holds the event off for ~10 steps, the bad action cuts
  // that to ~2. States 1 and 2: the damage is done, both actions alike.
  est.set_entry(0, 0, 0.0, 10.0, 100.0, 20);
  est.set_entry(0, 1, 0.1, 2.0, 4.0, 20);
  est.set_entry(1, 0, 0.2, 2.0, 4.0, 20);
  est.set_entry(1, 1, 0.2, 2.0, 4.0, 20);
  est.set_entry(2, 0, 0.9, 1.0, 1.0, 20);
  est.set_entry(2, 1, 0.9, 1.0, 1.0, 20);

  BlameTracker tracker(cfg);
  tracker.start_episode();
  tracker.observe_state(est, 0, 0);  // t_plus = 10
  tracker.observe_state(est, 1, 1);  // max(9, 2) = 9
  tracker.observe_state(est, 2, 2);  // max(8, 1) = 8
  const double tracked = tracker.blame(est, 2, 0);   // 1 - 1/8
  const double naive = 1.0 - est.time_estimate(2, 0, 0.0) / est.postpone_time(2, 0.0);
  CHECK(tracked == doctest::Approx(0.875));
  CHECK(naive == doctest::Approx(0.0));
  CHECK(tracked >= naive);
}

TEST_CASE("estimator validation") {
  CHECK_THROWS_AS(EventEstimator(0, 1, default_cfg()), std::invalid_argument);
  EstimatorConfig bad = default_cfg();
  bad.alpha = 0.0;
  CHECK_THROWS_AS(EventEstimator(1, 1, bad), std::invalid_argument);
  bad = default_cfg();
  bad.denominator_floor = 0.0;
  CHECK_THROWS_AS(EventEstimator(1, 1, bad), std::invalid_argument);
  EventEstimator est(1, 1, default_cfg());
  CHECK_THROWS_AS((void)est.time_estimate(5, 0, 0.0), std::out_of_range);
}
