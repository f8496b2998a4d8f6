#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "acrl/agents.hpp"
#include "acrl/blame.hpp"
#include "acrl/env_camping.hpp"

namespace acrl {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Everything needed for a full experiment run. Loaded from the sectioned
/// key = value format described in the README; unknown sections or keys are
/// rejected before anything runs.
struct ExperimentConfig {
  // [model]
  std::string model_path;
  std::string outcome_variable = "F";
  std::vector<std::pair<int, double>> outcome_rewards;  // reward.<value> = r

  // [abstraction] exogenous variable -> environment channel
  std::map<std::string, std::string> abstraction;

  // [defaults] optional per-variable default override
  std::map<std::string, int> exo_defaults;

  // [environment]
  CampConfig env;

  // [agent]
  AgentConfig agent;

  // [blame]
  EstimatorConfig estimator;

  // [experiment]
  int restarts = 50;
  int train_episodes = 1000;
  int eval_episodes = 100;
  double eval_epsilon = 0.0;
  std::uint64_t base_seed = 1;
  int blame_window = 100;
  int threads = 0;  // 0 = hardware concurrency
  int max_conjuncts = 1;

  // [run] present only in manifests written by the trainer
  std::string run_agent;
  std::uint64_t run_seed = 0;
  bool has_run_section = false;
};

/// Parses and validates; relative model paths resolve against the config
/// file's directory. Throws ConfigError with file/line context.
ExperimentConfig load_experiment_config(const std::string& path);

/// Same format back out; load(serialize(c)) reproduces c.
std::string serialize_experiment_config(const ExperimentConfig& config);

}  // namespace acrl
