#pragma once

#include <random>
#include <string>
#include <vector>

namespace acrl {

struct StepResult {
  int next_state = 0;
  double reward = 0.0;
  bool terminal = false;
  bool truncated = false;  // terminal due to the step cap, not an event
  std::vector<int> exo_observation;  // per channel, env channel order
};

/// Episodic MDP with small discrete state/action spaces. Alongside the usual
/// transition it reports named observation channels that an exogenous-variable
/// abstraction can absorb.
class TabularEnv {
 public:
  virtual ~TabularEnv() = default;

  virtual int num_states() const = 0;
  virtual int num_actions() const = 0;
  virtual const std::vector<std::string>& exo_channels() const = 0;
  virtual std::string state_name(int s) const = 0;
  virtual std::string action_name(int a) const = 0;

  virtual int reset() = 0;
  virtual StepResult step(int action, std::mt19937_64& rng) = 0;
};

}  // namespace acrl
