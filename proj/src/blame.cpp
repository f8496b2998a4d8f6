#include "acrl/blame.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace acrl {

EventEstimator::EventEstimator(int num_states, int num_actions, EstimatorConfig config)
    : num_states_(num_states), num_actions_(num_actions), config_(config) {
  if (num_states < 1 || num_actions < 1)
    throw std::invalid_argument("estimator needs at least one state and action");
  if (!(config.alpha > 0.0 && config.alpha <= 1.0))
    throw std::invalid_argument("estimator alpha must lie in (0, 1]");
  if (config.prior_var < 0.0) throw std::invalid_argument("prior variance must be >= 0");
  if (!(config.denominator_floor > 0.0))
    throw std::invalid_argument("denominator floor must be positive");
  const size_t n = static_cast<size_t>(num_states) * static_cast<size_t>(num_actions);
  prior_m2_ = config.prior_var + config.prior_mean * config.prior_mean;
  visits_.assign(n, 0);
  occurrences_.assign(n, 0);
  m1_.assign(n, config.prior_mean);
  m2_.assign(n, prior_m2_);
}

size_t EventEstimator::index(int s, int a) const {
  if (s < 0 || s >= num_states_ || a < 0 || a >= num_actions_)
    throw std::out_of_range("estimator index out of range");
  return static_cast<size_t>(s) * static_cast<size_t>(num_actions_) + static_cast<size_t>(a);
}

double EventEstimator::occurrence_prob(int s, int a) const {
  const size_t i = index(s, a);
  if (visits_[i] == 0) return 0.0;
  return static_cast<double>(occurrences_[i]) / static_cast<double>(visits_[i]);
}

double EventEstimator::sigma(int s, int a) const {
  const size_t i = index(s, a);
  return std::sqrt(std::max(m2_[i] - m1_[i] * m1_[i], 0.0));
}

double EventEstimator::time_estimate(int s, int a, double eta) const {
  const size_t i = index(s, a);
  return std::max(m1_[i] + eta * sigma(s, a), 0.0);
}

double EventEstimator::postpone_time(int s, double eta) const {
  double best = time_estimate(s, 0, eta);
  for (int a = 1; a < num_actions_; ++a) best = std::max(best, time_estimate(s, a, eta));
  return best;
}

void EventEstimator::update(int s, int a, bool occurred, int s_next, int a_next,
                            bool terminal) {
  const size_t i = index(s, a);
  ++visits_[i];
  if (occurred) ++occurrences_[i];
  const double p = static_cast<double>(occurrences_[i]) / static_cast<double>(visits_[i]);

  double next_m1, next_m2;
  if (terminal) {
    next_m1 = config_.prior_mean;
    next_m2 = prior_m2_;
  } else {
    const size_t j = index(s_next, a_next);
    next_m1 = m1_[j];
    next_m2 = m2_[j];
  }
  const double target_m1 = (1.0 - p) * (1.0 + next_m1);
  const double target_m2 = (1.0 - p) * (1.0 + next_m2 + 2.0 * next_m1);
  m1_[i] += config_.alpha * (target_m1 - m1_[i]);
  m2_[i] += config_.alpha * (target_m2 - m2_[i]);
}

void EventEstimator::set_entry(int s, int a, double p, double m1, double m2, long visits) {
  const size_t i = index(s, a);
  if (visits < 0 || p < 0.0 || p > 1.0) throw std::invalid_argument("bad estimator entry");
  visits_[i] = visits;
  occurrences_[i] = static_cast<long>(std::lround(p * static_cast<double>(visits)));
  m1_[i] = m1;
  m2_[i] = m2;
}

void BlameTracker::start_episode() {
  t_plus_ = 0.0;
  step_ = -1;
}

void BlameTracker::advance(double postpone_minus_eta, int step) {
  if (step != step_ + 1)
    throw std::logic_error("blame tracker advanced out of order: step " +
                           std::to_string(step) + " after " + std::to_string(step_));
  if (step == 0)
    t_plus_ = postpone_minus_eta;
  else
    t_plus_ = std::max(t_plus_ - 1.0, postpone_minus_eta);
  step_ = step;
}

void BlameTracker::observe_state(const EventEstimator& estimator, int s, int step) {
  advance(estimator.postpone_time(s, -config_.eta), step);
}

double BlameTracker::blame(const EventEstimator& estimator, int s, int a) const {
  if (t_plus_ <= config_.denominator_floor) return 0.0;
  const double ratio = estimator.time_estimate(s, a, config_.eta) / t_plus_;
  return std::clamp(1.0 - ratio, 0.0, 1.0);
}

}  // namespace acrl
