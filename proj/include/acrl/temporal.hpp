#pragma once

#include <optional>
#include <span>
#include <vector>

#include "acrl/scm.hpp"

namespace acrl {

/// Per-episode absorbing record of exogenous observations: each variable
/// starts at its default and keeps the first non-default value it is ever
/// observed with. Owned by a single episode loop.
class ExoTrace {
 public:
  ExoTrace(const CausalModel& model, std::vector<int> defaults);

  /// -1 before the first absorb call.
  int step() const { return step_; }

  /// Feed one observed value per exogenous variable (model exogenous order).
  /// Variables still at their default take the observation; deviated ones are
  /// left alone. Throws EvaluationError on out-of-range observations.
  void absorb(std::span<const int> observed);

  Context snapshot() const { return Context{current_}; }
  bool deviated(int exo_pos) const { return current_[exo_pos] != defaults_[exo_pos]; }
  int change_count(int exo_pos) const { return changes_[exo_pos]; }
  const std::vector<int>& defaults() const { return defaults_; }

 private:
  const CausalModel* model_;
  std::vector<int> defaults_;
  std::vector<int> current_;
  std::vector<int> changes_;
  int step_ = -1;
};

/// First value of each exogenous range, in declaration order. The bundled
/// models put the quiescent value first, so this is the natural default.
std::vector<int> default_context_values(const CausalModel& model);

struct EventStatus {
  PrimitiveEvent event;
  bool occurred = false;
  std::optional<int> first_step;  // -1 means already true at episode start
};

/// Flags events satisfied by `after` but not by `before` (valuations from two
/// consecutive absorbed snapshots of one episode).
std::vector<bool> detect_events(const Valuation& before, const Valuation& after,
                                std::span<const PrimitiveEvent> watchlist);

std::vector<bool> detect_events(const CausalModel& model, const Context& before,
                                const Context& after,
                                std::span<const PrimitiveEvent> watchlist);

}  // namespace acrl
