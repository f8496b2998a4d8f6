#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "support.hpp"

#include "acrl/experiments.hpp"

using namespace acrl;
using acrl::testing::read_text;
using acrl::testing::source_path;

namespace {

std::string write_temp_config(const std::string& name, const std::string& extra = "") {
  const auto dir = std::filesystem::temp_directory_path() / "acrl_tests";
  std::filesystem::create_directories(dir);
  const std::string path = (dir / name).string();
  std::ofstream out(path);
  out << "[model]\n"
      << "path = " << source_path("models/camping.scm") << "\n"
      << "outcome = F\n"
      << "reward.1 = -100\n"
      << "[abstraction]\n"
      << "U_A = camp_result\n"
      << "U_P = pyro_fired\n"
      << "[environment]\n"
      << "p_pyro = 0.1\np_a = 1.0\nreward_safe = 10\nreward_unsafe = 20\n"
      << "reward_fire = -100\nmax_steps = 2000\n"
      << "[agent]\nalpha = 0.05\nepsilon = 0.1\ngamma = 0.99\n"
      << "[blame]\nalpha = 0.05\neta = 0\nprior_mean = 10\nprior_var = 10\n"
      << "denominator_floor = 1e-6\n"
      << "[experiment]\nrestarts = 2\ntrain_episodes = 120\neval_episodes = 20\n"
      << "eval_epsilon = 0\nbase_seed = 7\nblame_window = 40\nthreads = 2\n"
      << "max_conjuncts = 1\n"
      << extra;
  return path;
}

}  // namespace

TEST_CASE("config loads with expected fields") {
  const ExperimentConfig cfg = load_experiment_config(write_temp_config("ok.cfg"));
  CHECK(cfg.outcome_variable == "F");
  CHECK(cfg.env.p_pyro == doctest::Approx(0.1));
  CHECK(cfg.agent.alpha == doctest::Approx(0.05));
  CHECK(cfg.estimator.prior_mean == doctest::Approx(10.0));
  CHECK(cfg.restarts == 2);
  CHECK(cfg.base_seed == 7);
  CHECK(cfg.outcome_rewards.size() == 1);
  CHECK(cfg.outcome_rewards[0].first == 1);
  CHECK(cfg.outcome_rewards[0].second == doctest::Approx(-100.0));
}

TEST_CASE("config schema violations are rejected up front") {
  CHECK_THROWS_AS((void)load_experiment_config("/nonexistent/path.cfg"), ConfigError);
  CHECK_THROWS_AS(
      (void)load_experiment_config(write_temp_config("bad1.cfg", "[experiment]\nbogus = 1\n")),
      ConfigError);
  CHECK_THROWS_AS(
      (void)load_experiment_config(write_temp_config("bad2.cfg", "[nosuch]\nx = 1\n")),
      ConfigError);
  CHECK_THROWS_AS(
      (void)load_experiment_config(
          write_temp_config("bad3.cfg", "[agent]\nepsilon = 1.5\n")),
      ConfigError);
  CHECK_THROWS_AS(
      (void)load_experiment_config(
          write_temp_config("bad4.cfg", "[experiment]\nrestarts = 0\n")),
      ConfigError);
}

TEST_CASE("config round-trips through its serialization") {
  const ExperimentConfig cfg = load_experiment_config(write_temp_config("rt.cfg"));
  const auto dir = std::filesystem::temp_directory_path() / "acrl_tests";
  const std::string again = (dir / "rt2.cfg").string();
  {
    std::ofstream out(again);
    out << serialize_experiment_config(cfg);
  }
  const ExperimentConfig cfg2 = load_experiment_config(again);
  CHECK(serialize_experiment_config(cfg) == serialize_experiment_config(cfg2));
}

TEST_CASE("materials loading validates the coupling") {
  ExperimentConfig cfg = load_experiment_config(write_temp_config("mat.cfg"));
  const Materials m = load_materials(cfg);
  CHECK(m.coupling.channel_of_exo == std::vector<int>{0, 1});
  CHECK(m.coupling.exo_defaults == std::vector<int>{0, 0});
  CHECK(m.coupling.reward_model.outcome_var == m.model.var_index("F"));

  SUBCASE("unknown channel") {
    cfg.abstraction["U_A"] = "nope";
    CHECK_THROWS_AS((void)load_materials(cfg), ConfigError);
  }
  SUBCASE("missing exogenous variable") {
    cfg.abstraction.erase("U_P");
    CHECK_THROWS_AS((void)load_materials(cfg), ConfigError);
  }
  SUBCASE("outcome must be endogenous") {
    cfg.outcome_variable = "U_A";
    CHECK_THROWS_AS((void)load_materials(cfg), ConfigError);
  }
  SUBCASE("fire penalty and r(1) must agree") {
    cfg.env.reward_fire = -50;
    CHECK_THROWS_AS((void)load_materials(cfg), ConfigError);
  }
}

TEST_CASE("SEM matches the hand-checked three-value sample") {
  // {1, 2, 4}: mean 7/3, sample sd sqrt(7/3), SEM sqrt(7/3)/sqrt(3).
  const Summary s = summarize({1.0, 2.0, 4.0});
  CHECK(s.n == 3);
  CHECK(s.mean == doctest::Approx(7.0 / 3.0).epsilon(1e-12));
  CHECK(s.sem == doctest::Approx(std::sqrt(7.0 / 3.0) / std::sqrt(3.0)).epsilon(1e-12));
}

TEST_CASE("reproduction outputs are byte-identical across runs") {
  const ExperimentConfig cfg = load_experiment_config(write_temp_config("repro.cfg"));
  const auto base = std::filesystem::temp_directory_path() / "acrl_tests";
  const std::string out_a = (base / "repro_a").string();
  const std::string out_b = (base / "repro_b").string();

  const ReproductionResult ra = run_reproduction(cfg, false);
  write_reproduction_outputs(ra, out_a, false);
  const ReproductionResult rb = run_reproduction(cfg, false);
  write_reproduction_outputs(rb, out_b, false);

  for (const char* name : {"table1.csv", "table2.csv", "trace.csv"}) {
    const std::string a = read_text(out_a + "/" + name);
    const std::string b = read_text(out_b + "/" + name);
    CHECK(a == b);
    CHECK_FALSE(a.empty());
  }
  CHECK(ra.monitor.blame_in_bounds);
  CHECK(ra.monitor.tplus_recursion_ok);
  CHECK(ra.monitor.absorption_ok);
  CHECK(ra.monitor.outcome_consistent);
}

TEST_CASE("training artifacts land on disk and reload") {
  const ExperimentConfig cfg = load_experiment_config(write_temp_config("train.cfg"));
  const Materials materials = load_materials(cfg);
  const auto base = std::filesystem::temp_directory_path() / "acrl_tests";
  const std::string out = (base / "train_run").string();
  std::filesystem::remove_all(out);

  const QTable q = run_training(cfg, materials, AgentKind::Ac, 11, out, false);
  for (const char* name :
       {"manifest.cfg", "episodes.csv", "blames.csv", "qtable.csv", "estimators.csv"})
    CHECK(std::filesystem::exists(std::filesystem::path(out) / name));

  const QTable loaded = load_qtable_csv(out + "/qtable.csv");
  REQUIRE(loaded.num_states() == q.num_states());
  REQUIRE(loaded.num_actions() == q.num_actions());
  for (int s = 0; s < q.num_states(); ++s)
    for (int a = 0; a < q.num_actions(); ++a)
      CHECK(loaded.get(s, a) == doctest::Approx(q.get(s, a)).epsilon(1e-6));

  // The manifest is itself a loadable config that reproduces the run setup.
  const ExperimentConfig manifest = load_experiment_config(out + "/manifest.cfg");
  CHECK(manifest.run_agent == "ac");
  CHECK(manifest.run_seed == 11);
  CHECK(manifest.env.p_a == doctest::Approx(cfg.env.p_a));
  CHECK(manifest.train_episodes == cfg.train_episodes);
}
