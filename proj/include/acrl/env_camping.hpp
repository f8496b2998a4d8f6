#pragma once

#include "acrl/env.hpp"

namespace acrl {

struct CampConfig {
  double p_pyro = 0.1;        // per-step chance the pyromaniac lights the forest
  double p_a = 1.0;           // chance a camping action takes effect
  double reward_safe = 10.0;
  double reward_unsafe = 20.0;
  double reward_fire = -100.0;
  int max_steps = 2000;
};

/// Stochastic camping MDP. The agent may set up camp once, safely or unsafely;
/// a successful unsafe camp burns the forest at once. While the forest stands,
/// the pyromaniac lights it with probability p_pyro per step. Fire ends the
/// episode. Within a step the agent resolves before the pyromaniac.
///
/// Observation channels: camp_result (0 none, 1 safe, 2 unsafe, reporting a
/// camp established this step) and pyro_fired (0/1, this step).
class CampingEnv final : public TabularEnv {
 public:
  enum Status { kNone = 0, kSafe = 1, kUnsafe = 2 };
  enum Action { kWait = 0, kCampSafe = 1, kCampUnsafe = 2 };

  explicit CampingEnv(CampConfig config);

  int num_states() const override { return 3; }
  int num_actions() const override { return 3; }
  const std::vector<std::string>& exo_channels() const override { return channels_; }
  std::string state_name(int s) const override;
  std::string action_name(int a) const override;

  int reset() override;
  StepResult step(int action, std::mt19937_64& rng) override;

  const CampConfig& config() const { return config_; }
  bool forest_burned() const { return burned_; }
  int steps_taken() const { return steps_; }

 private:
  CampConfig config_;
  std::vector<std::string> channels_;
  int status_ = kNone;
  bool burned_ = false;
  bool done_ = true;
  int steps_ = 0;
};

}  // namespace acrl
