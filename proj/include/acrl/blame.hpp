#pragma once

#include <vector>

#include "acrl/scm.hpp"

namespace acrl {

struct EstimatorConfig {
  double alpha = 0.05;             // soft-update step size for the moments
  double eta = 0.0;                // percentile offset; 0 = plain mean
  double prior_mean = 10.0;        // expected occurrence time past termination
  double prior_var = 10.0;
  double denominator_floor = 1e-6; // below this, blame is defined as 0
};

/// Online estimate of the number of steps until one candidate event occurs,
/// tracked per (state, action) under a normal approximation. The occurrence
/// probability p is an exact running sample average; the first and second
/// moments are alpha-soft bootstrapped:
///
///   m1(s,a) <- (1 - p(s,a)) (1 + m1(s',a'))
///   m2(s,a) <- (1 - p(s,a)) (1 + m2(s',a') + 2 m1(s',a'))
///
/// Terminal transitions bootstrap from the dispersed prior instead of the
/// next pair. Tables start at the prior, so unvisited pairs answer with it.
class EventEstimator {
 public:
  EventEstimator(int num_states, int num_actions, EstimatorConfig config);

  int num_states() const { return num_states_; }
  int num_actions() const { return num_actions_; }
  const EstimatorConfig& config() const { return config_; }

  double occurrence_prob(int s, int a) const;  // 0 for unvisited pairs
  double m1(int s, int a) const { return m1_[index(s, a)]; }
  double m2(int s, int a) const { return m2_[index(s, a)]; }
  long visits(int s, int a) const { return visits_[index(s, a)]; }

  /// sqrt(max(m2 - m1^2, 0)); soft updates can transiently push m2 below
  /// m1^2, so the clamp keeps sigma real.
  double sigma(int s, int a) const;

  /// T{eta}(s, a) = m1 + eta * sigma, floored at 0.
  double time_estimate(int s, int a, double eta) const;

  /// max over actions of time_estimate: the best-known postponement from s.
  double postpone_time(int s, double eta) const;

  /// One transition (s, a) -> (s_next, a_next) on which the event had not yet
  /// occurred this episode. `occurred` is the same-step occurrence indicator;
  /// `terminal` switches the bootstrap to the prior and ignores a_next.
  void update(int s, int a, bool occurred, int s_next, int a_next, bool terminal);

  /// Direct table access for inspection tooling and tests.
  void set_entry(int s, int a, double p, double m1, double m2, long visits);

 private:
  size_t index(int s, int a) const;

  int num_states_, num_actions_;
  EstimatorConfig config_;
  double prior_m2_;  // second moment of the prior: var + mean^2
  std::vector<long> visits_;
  std::vector<long> occurrences_;
  std::vector<double> m1_;
  std::vector<double> m2_;
};

/// Running maximum of postponement time, decayed by one per step:
///
///   t_plus(0) = postpone(s_0)
///   t_plus(t) = max(t_plus(t-1) - 1, postpone(s_t))
///
/// The recursion runs on the -eta percentile, which is the denominator
/// convention of the blame ratio. Blame for taking `a` in `s` at the current
/// step is 1 - T{+eta}(s, a) / t_plus, clamped to [0, 1].
class BlameTracker {
 public:
  explicit BlameTracker(EstimatorConfig config) : config_(config) {}

  void start_episode();

  /// Raw recursion step; `step` must increase by exactly one per call.
  void advance(double postpone_minus_eta, int step);

  /// advance() fed from the estimator at state s.
  void observe_state(const EventEstimator& estimator, int s, int step);

  double t_plus() const { return t_plus_; }
  int step() const { return step_; }

  double blame(const EventEstimator& estimator, int s, int a) const;

 private:
  EstimatorConfig config_;
  double t_plus_ = 0.0;
  int step_ = -1;
};

}  // namespace acrl
