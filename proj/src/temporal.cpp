#include "acrl/temporal.hpp"

namespace acrl {

ExoTrace::ExoTrace(const CausalModel& model, std::vector<int> defaults)
    : model_(&model), defaults_(std::move(defaults)) {
  const auto& exo = model.exogenous();
  if (defaults_.size() != exo.size())
    throw EvaluationError("defaults size does not match exogenous variable count");
  for (size_t k = 0; k < exo.size(); ++k)
    if (!model.variables()[exo[k]].admits(defaults_[k]))
      throw EvaluationError("default value " + std::to_string(defaults_[k]) +
                            " outside range of '" + model.variables()[exo[k]].name + "'");
  current_ = defaults_;
  changes_.assign(exo.size(), 0);
}

void ExoTrace::absorb(std::span<const int> observed) {
  const auto& exo = model_->exogenous();
  if (observed.size() != exo.size())
    throw EvaluationError("observation size does not match exogenous variable count");
  for (size_t k = 0; k < exo.size(); ++k) {
    if (current_[k] != defaults_[k]) continue;  // absorbed already
    const int v = observed[k];
    if (!model_->variables()[exo[k]].admits(v))
      throw EvaluationError("observed value " + std::to_string(v) + " outside range of '" +
                            model_->variables()[exo[k]].name + "'");
    if (v != defaults_[k]) {
      current_[k] = v;
      ++changes_[k];
    }
  }
  ++step_;
}

std::vector<int> default_context_values(const CausalModel& model) {
  std::vector<int> out;
  out.reserve(model.exogenous().size());
  for (int var : model.exogenous()) out.push_back(model.variables()[var].range.front());
  return out;
}

std::vector<bool> detect_events(const Valuation& before, const Valuation& after,
                                std::span<const PrimitiveEvent> watchlist) {
  std::vector<bool> out(watchlist.size());
  for (size_t k = 0; k < watchlist.size(); ++k)
    out[k] = event_holds(after, watchlist[k]) && !event_holds(before, watchlist[k]);
  return out;
}

std::vector<bool> detect_events(const CausalModel& model, const Context& before,
                                const Context& after,
                                std::span<const PrimitiveEvent> watchlist) {
  return detect_events(model.evaluate(before), model.evaluate(after), watchlist);
}

}  // namespace acrl
