#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "acrl/agents.hpp"
#include "acrl/config.hpp"
#include "acrl/parser.hpp"

namespace acrl {

enum class AgentKind { Ac, Q };
const char* to_string(AgentKind k);

struct Summary {
  double mean = 0.0;
  double sem = 0.0;  // sample standard deviation / sqrt(n)
  int n = 0;
};
Summary summarize(const std::vector<double>& values);

/// Model plus resolved coupling, shared by every restart of a run.
struct Materials {
  CausalModel model;
  CausalCoupling coupling;
};

/// Loads the model file and resolves the abstraction/outcome sections against
/// it and the environment's channels. Throws ConfigError on any mismatch.
Materials load_materials(const ExperimentConfig& config);

struct RestartOutcome {
  std::vector<double> train_raw_returns;       // per episode
  std::vector<double> train_modified_returns;  // per episode
  double eval_mean = 0.0;
  // Per cause label, mean of per-episode blame over the last blame_window
  // training episodes in which the event was an actual cause of the outcome.
  std::vector<std::pair<std::string, double>> blame_factors;
  InvariantMonitor monitor;
};

RestartOutcome run_restart(const ExperimentConfig& config, const Materials& materials,
                           AgentKind agent, std::uint64_t seed);

/// The two environment conditions of the bundled study.
inline constexpr std::array<double, 2> kReproduceConditions = {1.0, 0.7};

struct TableRow {
  std::string condition;
  std::string label;  // agent or event
  Summary summary;
};

struct ReproductionResult {
  std::vector<TableRow> table1;  // eval returns per condition x agent
  std::vector<TableRow> table2;  // blame factors per condition x event
  // trace[condition][agent][episode]
  std::vector<std::vector<std::vector<Summary>>> trace;
  std::vector<std::string> condition_labels;
  InvariantMonitor monitor;
  std::string manifest;  // serialized config; every table entry derives from it
};

/// Both agents on both conditions, `restarts` seeded replicas each, run on a
/// worker pool and aggregated in restart order so results are reproducible.
ReproductionResult run_reproduction(const ExperimentConfig& config, bool verbose);

/// table1.csv, table2.csv, trace.csv and optionally trace.svg under out_dir.
void write_reproduction_outputs(const ReproductionResult& result, const std::string& out_dir,
                                bool plot);

/// Artifacts of a single training run: manifest.cfg, episodes.csv, blames.csv,
/// qtable.csv and estimators.csv under out_dir. Returns the final Q-table.
QTable run_training(const ExperimentConfig& config, const Materials& materials,
                    AgentKind agent, std::uint64_t seed, const std::string& out_dir,
                    bool verbose);

/// Mean raw return of frozen-policy episodes with the given exploration rate.
Summary evaluate_policy(const ExperimentConfig& config, const QTable& q, double epsilon,
                        int episodes, std::uint64_t seed);

QTable load_qtable_csv(const std::string& path);

}  // namespace acrl
