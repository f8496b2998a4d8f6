#include "acrl/env_camping.hpp"

#include <stdexcept>

namespace acrl {

CampingEnv::CampingEnv(CampConfig config)
    : config_(config), channels_{"camp_result", "pyro_fired"} {
  if (config.p_pyro < 0.0 || config.p_pyro > 1.0)
    throw std::invalid_argument("p_pyro must lie in [0, 1]");
  if (config.p_a < 0.0 || config.p_a > 1.0)
    throw std::invalid_argument("p_a must lie in [0, 1]");
  if (config.max_steps < 1) throw std::invalid_argument("max_steps must be >= 1");
}

std::string CampingEnv::state_name(int s) const {
  switch (s) {
    case kNone: return "none";
    case kSafe: return "safe";
    case kUnsafe: return "unsafe";
  }
  return "?";
}

std::string CampingEnv::action_name(int a) const {
  switch (a) {
    case kWait: return "wait";
    case kCampSafe: return "camp_safe";
    case kCampUnsafe: return "camp_unsafe";
  }
  return "?";
}

int CampingEnv::reset() {
  status_ = kNone;
  burned_ = false;
  done_ = false;
  steps_ = 0;
  return status_;
}

StepResult CampingEnv::step(int action, std::mt19937_64& rng) {
  if (done_) throw std::logic_error("step() on a finished episode");
  if (action < 0 || action >= num_actions()) throw std::invalid_argument("bad action");

  std::uniform_real_distribution<double> u01(0.0, 1.0);
  StepResult r;
  r.exo_observation = {0, 0};

  // Camping resolves first; it is a one-shot decision.
  if (status_ == kNone && (action == kCampSafe || action == kCampUnsafe)) {
    if (u01(rng) < config_.p_a) {
      status_ = action == kCampSafe ? kSafe : kUnsafe;
      r.exo_observation[0] = status_;
      r.reward += action == kCampSafe ? config_.reward_safe : config_.reward_unsafe;
      if (status_ == kUnsafe) burned_ = true;
    }
  }

  // Then the pyromaniac gets his chance at a still-standing forest.
  if (!burned_ && u01(rng) < config_.p_pyro) {
    burned_ = true;
    r.exo_observation[1] = 1;
  }

  if (burned_) {
    r.reward += config_.reward_fire;
    done_ = true;
  }

  ++steps_;
  if (!done_ && steps_ >= config_.max_steps) {
    done_ = true;
    r.truncated = true;
  }
  r.terminal = done_;
  r.next_state = status_;
  return r;
}

}  // namespace acrl
