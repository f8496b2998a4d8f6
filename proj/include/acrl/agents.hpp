#pragma once

#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <utility>
#include <vector>

#include "acrl/actual_cause.hpp"
#include "acrl/blame.hpp"
#include "acrl/env.hpp"
#include "acrl/scm.hpp"
#include "acrl/temporal.hpp"

namespace acrl {

struct AgentConfig {
  double alpha = 0.05;
  double epsilon = 0.1;
  double gamma = 0.99;
};

class QTable {
 public:
  QTable(int num_states, int num_actions);

  int num_states() const { return num_states_; }
  int num_actions() const { return num_actions_; }
  double get(int s, int a) const { return values_[index(s, a)]; }
  void set(int s, int a, double v) { values_[index(s, a)] = v; }
  int greedy_action(int s) const;  // ties break to the lowest action index
  double max_value(int s) const;
  const std::vector<double>& raw() const { return values_; }

 private:
  size_t index(int s, int a) const;
  int num_states_, num_actions_;
  std::vector<double> values_;
};

/// Epsilon-greedy draw; greedy ties break to the lowest action index.
int select_action(const QTable& q, int s, double epsilon, std::mt19937_64& rng);

void q_update(QTable& q, int s, int a, double reward, int s_next, bool terminal,
              const AgentConfig& config);

/// Outcome variable and its terminal reward contribution r(value).
/// The no-event value contributes nothing.
struct RewardModel {
  int outcome_var = -1;  // endogenous, global index
  int no_event_value = 0;
  std::vector<std::pair<int, double>> rewards;

  double reward(int outcome_value) const;
};

/// max over causes of blame, times r(outcome): the terminal contribution once
/// blame replaces the raw penalty. Throws ModelError when the outcome occurred
/// yet no cause was identified, which means model and environment disagree.
double modified_terminal_reward(const std::vector<std::pair<PrimitiveEvent, double>>& cause_blames,
                                int outcome_value, const RewardModel& reward_model);

/// One entry of the growing cause list L.
struct TrackedCause {
  PrimitiveEvent event;
  EventEstimator estimator;
  BlameTracker tracker;
  // Per-episode scratch:
  bool pre_existing = false;  // already true under the all-default context
  bool occurred = false;
  std::optional<int> first_step;
  double episode_blame = 0.0;

  TrackedCause(PrimitiveEvent e, int num_states, int num_actions, EstimatorConfig cfg)
      : event(e), estimator(num_states, num_actions, cfg), tracker(cfg) {}
};

/// Insertion-ordered, duplicate-free list of potential actual causes.
class CauseRegistry {
 public:
  bool contains(const PrimitiveEvent& e) const;
  TrackedCause* find(const PrimitiveEvent& e);
  TrackedCause& add(PrimitiveEvent e, int num_states, int num_actions, EstimatorConfig cfg);
  std::vector<TrackedCause>& entries() { return entries_; }
  const std::vector<TrackedCause>& entries() const { return entries_; }
  size_t size() const { return entries_.size(); }

 private:
  std::vector<TrackedCause> entries_;
};

struct EpisodeLog {
  double raw_return = 0.0;       // undiscounted sum of environment rewards
  double modified_return = 0.0;  // sum of the rewards the learner saw
  int length = 0;
  int outcome_value = 0;
  bool truncated = false;
  std::vector<std::pair<PrimitiveEvent, double>> cause_blames;  // at termination
};

/// Always-cheap runtime checks accumulated across training; a false flag
/// means the corresponding invariant was violated at least once.
struct InvariantMonitor {
  long blame_samples = 0;
  double min_blame = std::numeric_limits<double>::infinity();
  double max_blame = -std::numeric_limits<double>::infinity();
  bool blame_in_bounds = true;
  long tplus_checks = 0;
  bool tplus_recursion_ok = true;
  bool absorption_ok = true;
  long outcome_checks = 0;
  bool outcome_consistent = true;  // event-terminal iff outcome variable non-default

  void merge(const InvariantMonitor& other);
};

/// Couples the MDP to the causal model: which environment channel feeds each
/// exogenous variable, the default context, and the outcome reward map.
struct CausalCoupling {
  std::vector<int> channel_of_exo;  // per model exogenous variable
  std::vector<int> exo_defaults;
  RewardModel reward_model;
  int max_conjuncts = 1;
};

/// Models with more endogenous variables than this are refused for in-loop
/// cause queries; the exhaustive search is exponential.
inline constexpr int kOnlineEndogenousLimit = 12;

/// The blame-shaped learner: tabular Q-learning whose terminal penalty is
/// replaced by the blame-weighted contribution, with the cause list, the
/// per-cause estimators and the postponement maxima maintained online.
class AcTrainer {
 public:
  AcTrainer(const CausalModel& model, CausalCoupling coupling, AgentConfig agent_config,
            EstimatorConfig estimator_config, int num_states, int num_actions);

  EpisodeLog train_episode(TabularEnv& env, std::mt19937_64& rng);

  const QTable& q() const { return q_; }
  QTable& q() { return q_; }
  const CauseRegistry& registry() const { return registry_; }
  CauseRegistry& registry() { return registry_; }

  InvariantMonitor* monitor = nullptr;

 private:
  const std::vector<EnumeratedCause>& causes_for(const Context& context, int outcome_value);

  const CausalModel* model_;
  CausalCoupling coupling_;
  AgentConfig agent_config_;
  EstimatorConfig estimator_config_;
  int num_states_, num_actions_;
  QTable q_;
  CauseRegistry registry_;
  // Cause enumeration is a pure function of the absorbed context and outcome
  // value for a fixed model, so per-trainer memoization is sound.
  std::map<std::pair<std::vector<int>, int>, std::vector<EnumeratedCause>> cause_cache_;
};

/// Plain tabular Q-learning on raw rewards.
class QTrainer {
 public:
  QTrainer(AgentConfig config, int num_states, int num_actions);

  EpisodeLog train_episode(TabularEnv& env, std::mt19937_64& rng);

  const QTable& q() const { return q_; }
  QTable& q() { return q_; }

 private:
  AgentConfig config_;
  QTable q_;
};

/// One frozen-policy episode; returns the raw return.
double eval_episode(TabularEnv& env, const QTable& q, double epsilon, std::mt19937_64& rng);

}  // namespace acrl
