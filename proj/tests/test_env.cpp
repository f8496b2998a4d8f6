#include <random>

#include "doctest.h"
#include "support.hpp"

#include "acrl/env_camping.hpp"
#include "acrl/temporal.hpp"

using namespace acrl;

TEST_CASE("reset is plain and deterministic") {
  CampingEnv env(CampConfig{});
  CHECK(env.reset() == CampingEnv::kNone);
  CHECK(env.steps_taken() == 0);
  CHECK_FALSE(env.forest_burned());
  // Reset consumes no randomness and is identical regardless of rng state.
  CHECK(env.reset() == CampingEnv::kNone);
}

TEST_CASE("deterministic unsafe camp burns everything in one step") {
  CampConfig cfg;
  cfg.p_a = 1.0;
  CampingEnv env(cfg);
  std::mt19937_64 rng(1);
  env.reset();
  const StepResult r = env.step(CampingEnv::kCampUnsafe, rng);
  CHECK(r.reward == doctest::Approx(-80.0));  // +20 camp, -100 fire
  CHECK(r.terminal);
  CHECK_FALSE(r.truncated);
  CHECK(r.exo_observation == std::vector<int>{2, 0});  // pyromaniac never got a turn
}

TEST_CASE("safe camp then eventual fire returns -90") {
  CampConfig cfg;
  cfg.p_a = 1.0;
  cfg.p_pyro = 0.0;  // hold the pyromaniac back for the first step
  CampingEnv env(cfg);
  std::mt19937_64 rng(2);
  env.reset();
  StepResult r = env.step(CampingEnv::kCampSafe, rng);
  CHECK(r.reward == doctest::Approx(10.0));
  CHECK_FALSE(r.terminal);
  CHECK(r.exo_observation == std::vector<int>{1, 0});

  // With a certain pyromaniac the whole episode fits into one step: the camp
  // resolves first (+10), then the forest goes up (-100).
  CampConfig certain = cfg;
  certain.p_pyro = 1.0;
  CampingEnv env2(certain);
  env2.reset();
  r = env2.step(CampingEnv::kCampSafe, rng);
  CHECK(r.terminal);
  CHECK(r.reward == doctest::Approx(-90.0));
  CHECK(r.exo_observation == std::vector<int>{1, 1});
}

TEST_CASE("failed camping is a no-op") {
  CampConfig cfg;
  cfg.p_a = 0.0;
  cfg.p_pyro = 0.0;
  CampingEnv env(cfg);
  std::mt19937_64 rng(3);
  env.reset();
  const StepResult r = env.step(CampingEnv::kCampUnsafe, rng);
  CHECK(r.reward == doctest::Approx(0.0));
  CHECK(r.next_state == CampingEnv::kNone);
  CHECK(r.exo_observation == std::vector<int>{0, 0});
  CHECK_FALSE(r.terminal);
}

TEST_CASE("camping is irreversible") {
  CampConfig cfg;
  cfg.p_a = 1.0;
  cfg.p_pyro = 0.0;
  CampingEnv env(cfg);
  std::mt19937_64 rng(4);
  env.reset();
  (void)env.step(CampingEnv::kCampSafe, rng);
  const StepResult r = env.step(CampingEnv::kCampUnsafe, rng);
  CHECK(r.reward == doctest::Approx(0.0));  // no second camp, no burn
  CHECK(r.next_state == CampingEnv::kSafe);
}

TEST_CASE("stepping a finished episode throws") {
  CampConfig cfg;
  cfg.p_a = 1.0;
  CampingEnv env(cfg);
  std::mt19937_64 rng(5);
  env.reset();
  (void)env.step(CampingEnv::kCampUnsafe, rng);
  CHECK_THROWS_AS((void)env.step(CampingEnv::kWait, rng), std::logic_error);
}

TEST_CASE("step cap truncates without extra reward") {
  CampConfig cfg;
  cfg.p_pyro = 0.0;
  cfg.max_steps = 5;
  CampingEnv env(cfg);
  std::mt19937_64 rng(6);
  env.reset();
  StepResult r;
  for (int t = 0; t < 5; ++t) r = env.step(CampingEnv::kWait, rng);
  CHECK(r.terminal);
  CHECK(r.truncated);
  CHECK(r.reward == doctest::Approx(0.0));
}

TEST_CASE("same seed, same trajectory") {
  CampConfig cfg;
  cfg.p_a = 0.7;
  for (int episode = 0; episode < 5; ++episode) {
    CampingEnv env_a(cfg), env_b(cfg);
    std::mt19937_64 rng_a(900 + episode), rng_b(900 + episode);
    std::mt19937_64 actions(17 + episode);
    std::uniform_int_distribution<int> pick(0, 2);
    env_a.reset();
    env_b.reset();
    bool done = false;
    while (!done) {
      const int a = pick(actions);
      const StepResult ra = env_a.step(a, rng_a);
      const StepResult rb = env_b.step(a, rng_b);
      CHECK(ra.next_state == rb.next_state);
      CHECK(ra.reward == rb.reward);
      CHECK(ra.terminal == rb.terminal);
      CHECK(ra.exo_observation == rb.exo_observation);
      done = ra.terminal;
    }
  }
}

TEST_CASE("returns decompose into the three vignette outcomes") {
  CampConfig cfg;
  cfg.p_a = 0.7;
  CampingEnv env(cfg);
  std::mt19937_64 rng(7);
  std::mt19937_64 actions(8);
  std::uniform_int_distribution<int> pick(0, 2);
  for (int episode = 0; episode < 2000; ++episode) {
    env.reset();
    double ret = 0.0;
    bool done = false, truncated = false;
    while (!done) {
      const StepResult r = env.step(pick(actions), rng);
      ret += r.reward;
      done = r.terminal;
      truncated = r.truncated;
    }
    if (!truncated)
      CHECK((ret == doctest::Approx(-100.0) || ret == doctest::Approx(-90.0) ||
             ret == doctest::Approx(-80.0)));
  }
}

TEST_CASE("fire time under pure waiting is geometric with mean 1/p_pyro") {
  CampConfig cfg;
  cfg.p_pyro = 0.1;
  CampingEnv env(cfg);
  std::mt19937_64 rng(9);
  double total_steps = 0.0;
  const int episodes = 100000;
  for (int e = 0; e < episodes; ++e) {
    env.reset();
    bool done = false;
    int steps = 0;
    while (!done) {
      done = env.step(CampingEnv::kWait, rng).terminal;
      ++steps;
    }
    total_steps += steps;
  }
  CHECK(total_steps / episodes == doctest::Approx(10.0).epsilon(0.05));
}

TEST_CASE("absorbed context reproduces the terminal fire verdict") {
  const CausalModel m = acrl::testing::load_camping_model();
  CampConfig cfg;
  cfg.p_a = 0.7;
  cfg.max_steps = 50;
  CampingEnv env(cfg);
  std::mt19937_64 rng(10);
  std::mt19937_64 actions(11);
  std::uniform_int_distribution<int> pick(0, 2);
  for (int episode = 0; episode < 500; ++episode) {
    env.reset();
    ExoTrace trace(m, default_context_values(m));
    bool done = false;
    while (!done) {
      const StepResult r = env.step(pick(actions), rng);
      trace.absorb(r.exo_observation);
      done = r.terminal;
    }
    const int fire = m.evaluate(trace.snapshot())[m.var_index("F")];
    CHECK((fire == 1) == env.forest_burned());
  }
}
