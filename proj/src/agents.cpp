#include "acrl/agents.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace acrl {

QTable::QTable(int num_states, int num_actions)
    : num_states_(num_states), num_actions_(num_actions) {
  if (num_states < 1 || num_actions < 1)
    throw std::invalid_argument("Q-table needs at least one state and action");
  values_.assign(static_cast<size_t>(num_states) * static_cast<size_t>(num_actions), 0.0);
}

size_t QTable::index(int s, int a) const {
  if (s < 0 || s >= num_states_ || a < 0 || a >= num_actions_)
    throw std::out_of_range("Q-table index out of range");
  return static_cast<size_t>(s) * static_cast<size_t>(num_actions_) + static_cast<size_t>(a);
}

int QTable::greedy_action(int s) const {
  int best = 0;
  double best_value = get(s, 0);
  for (int a = 1; a < num_actions_; ++a) {
    const double v = get(s, a);
    if (v > best_value) {
      best = a;
      best_value = v;
    }
  }
  return best;
}

double QTable::max_value(int s) const { return get(s, greedy_action(s)); }

int select_action(const QTable& q, int s, double epsilon, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  if (u01(rng) < epsilon) {
    std::uniform_int_distribution<int> pick(0, q.num_actions() - 1);
    return pick(rng);
  }
  return q.greedy_action(s);
}

void q_update(QTable& q, int s, int a, double reward, int s_next, bool terminal,
              const AgentConfig& config) {
  const double bootstrap = terminal ? 0.0 : config.gamma * q.max_value(s_next);
  const double current = q.get(s, a);
  q.set(s, a, current + config.alpha * (reward + bootstrap - current));
}

double RewardModel::reward(int outcome_value) const {
  for (const auto& [value, r] : rewards)
    if (value == outcome_value) return r;
  return 0.0;
}

double modified_terminal_reward(
    const std::vector<std::pair<PrimitiveEvent, double>>& cause_blames, int outcome_value,
    const RewardModel& reward_model) {
  if (outcome_value == reward_model.no_event_value) return 0.0;
  if (cause_blames.empty())
    throw ModelError("outcome value " + std::to_string(outcome_value) +
                     " occurred but no actual cause was found; the model does not "
                     "explain the environment's terminal event");
  double max_blame = 0.0;
  for (const auto& [event, blame] : cause_blames) {
    if (blame < 0.0 || blame > 1.0)
      throw std::invalid_argument("blame outside [0, 1]");
    max_blame = std::max(max_blame, blame);
  }
  return max_blame * reward_model.reward(outcome_value);
}

bool CauseRegistry::contains(const PrimitiveEvent& e) const {
  for (const auto& tc : entries_)
    if (tc.event == e) return true;
  return false;
}

TrackedCause* CauseRegistry::find(const PrimitiveEvent& e) {
  for (auto& tc : entries_)
    if (tc.event == e) return &tc;
  return nullptr;
}

TrackedCause& CauseRegistry::add(PrimitiveEvent e, int num_states, int num_actions,
                                 EstimatorConfig cfg) {
  if (contains(e)) throw std::invalid_argument("cause already registered");
  entries_.emplace_back(e, num_states, num_actions, cfg);
  return entries_.back();
}

void InvariantMonitor::merge(const InvariantMonitor& other) {
  blame_samples += other.blame_samples;
  min_blame = std::min(min_blame, other.min_blame);
  max_blame = std::max(max_blame, other.max_blame);
  blame_in_bounds = blame_in_bounds && other.blame_in_bounds;
  tplus_checks += other.tplus_checks;
  tplus_recursion_ok = tplus_recursion_ok && other.tplus_recursion_ok;
  absorption_ok = absorption_ok && other.absorption_ok;
  outcome_checks += other.outcome_checks;
  outcome_consistent = outcome_consistent && other.outcome_consistent;
}

AcTrainer::AcTrainer(const CausalModel& model, CausalCoupling coupling,
                     AgentConfig agent_config, EstimatorConfig estimator_config,
                     int num_states, int num_actions)
    : model_(&model),
      coupling_(std::move(coupling)),
      agent_config_(agent_config),
      estimator_config_(estimator_config),
      num_states_(num_states),
      num_actions_(num_actions),
      q_(num_states, num_actions) {
  if (static_cast<int>(model.endogenous().size()) > kOnlineEndogenousLimit)
    throw ModelError("model has " + std::to_string(model.endogenous().size()) +
                     " endogenous variables; online cause queries are limited to " +
                     std::to_string(kOnlineEndogenousLimit));
  if (coupling_.channel_of_exo.size() != model.exogenous().size() ||
      coupling_.exo_defaults.size() != model.exogenous().size())
    throw ModelError("coupling does not cover every exogenous variable");
  if (coupling_.reward_model.outcome_var < 0 ||
      model.endo_position(coupling_.reward_model.outcome_var) < 0)
    throw ModelError("outcome variable must be endogenous");
}

const std::vector<EnumeratedCause>& AcTrainer::causes_for(const Context& context,
                                                          int outcome_value) {
  const auto key = std::make_pair(context.values, outcome_value);
  auto it = cause_cache_.find(key);
  if (it != cause_cache_.end()) return it->second;
  const Formula phi =
      Formula::event(PrimitiveEvent{coupling_.reward_model.outcome_var, outcome_value});
  auto causes = enumerate_actual_causes(*model_, context, phi, coupling_.max_conjuncts);
  return cause_cache_.emplace(key, std::move(causes)).first->second;
}

EpisodeLog AcTrainer::train_episode(TabularEnv& env, std::mt19937_64& rng) {
  EpisodeLog log;
  int s = env.reset();
  ExoTrace trace(*model_, coupling_.exo_defaults);
  Valuation before = model_->evaluate(trace.snapshot());

  for (auto& tc : registry_.entries()) {
    tc.occurred = false;
    tc.first_step.reset();
    tc.episode_blame = 0.0;
    tc.pre_existing = event_holds(before, tc.event);
    if (tc.pre_existing) {
      // Nothing this episode's actions can hasten; excluded from updates.
      tc.occurred = true;
      tc.first_step = -1;
    }
    tc.tracker.start_episode();
  }

  int a = select_action(q_, s, agent_config_.epsilon, rng);
  bool terminal = false;
  int t = 0;
  std::vector<int> observed(model_->exogenous().size(), 0);

  while (!terminal) {
    for (auto& tc : registry_.entries()) {
      if (tc.occurred) continue;
      const double prev = tc.tracker.t_plus();
      tc.tracker.observe_state(tc.estimator, s, t);
      if (monitor && t > 0) {
        ++monitor->tplus_checks;
        if (tc.tracker.t_plus() < prev - 1.0) monitor->tplus_recursion_ok = false;
      }
    }

    StepResult sr = env.step(a, rng);
    terminal = sr.terminal;
    for (size_t k = 0; k < observed.size(); ++k)
      observed[k] = sr.exo_observation.at(coupling_.channel_of_exo[k]);
    trace.absorb(observed);
    const Context ctx_after = trace.snapshot();
    const Valuation after = model_->evaluate(ctx_after);

    const int a_next = terminal ? -1 : select_action(q_, sr.next_state, agent_config_.epsilon, rng);

    for (auto& tc : registry_.entries()) {
      if (tc.occurred) continue;
      const bool occurred_now = event_holds(after, tc.event) && !event_holds(before, tc.event);
      tc.estimator.update(s, a, occurred_now, sr.next_state, a_next, terminal);
      if (occurred_now) {
        tc.occurred = true;
        tc.first_step = t;
        tc.episode_blame = tc.tracker.blame(tc.estimator, s, a);
        if (monitor) {
          ++monitor->blame_samples;
          monitor->min_blame = std::min(monitor->min_blame, tc.episode_blame);
          monitor->max_blame = std::max(monitor->max_blame, tc.episode_blame);
          if (tc.episode_blame < 0.0 || tc.episode_blame > 1.0)
            monitor->blame_in_bounds = false;
        }
      }
    }

    double r_train = sr.reward;
    if (terminal) {
      log.outcome_value = after[coupling_.reward_model.outcome_var];
      log.truncated = sr.truncated;
      if (log.outcome_value != coupling_.reward_model.no_event_value) {
        const auto& causes = causes_for(ctx_after, log.outcome_value);
        std::vector<std::pair<PrimitiveEvent, double>> blames;
        blames.reserve(causes.size());
        for (const auto& ec : causes) {
          for (const auto& conjunct : ec.cause.conjuncts) {
            TrackedCause* tc = registry_.find(conjunct);
            // First sighting of a cause carries full blame; its estimator
            // takes over from the next episode on.
            const double b = tc ? tc->episode_blame : 1.0;
            blames.emplace_back(conjunct, b);
          }
        }
        r_train = sr.reward - coupling_.reward_model.reward(log.outcome_value) +
                  modified_terminal_reward(blames, log.outcome_value, coupling_.reward_model);
        log.cause_blames = blames;
        for (const auto& [event, b] : blames)
          if (!registry_.contains(event))
            registry_.add(event, num_states_, num_actions_, estimator_config_);
      }
    }

    q_update(q_, s, a, r_train, sr.next_state, terminal, agent_config_);
    log.raw_return += sr.reward;
    log.modified_return += r_train;
    ++log.length;

    before = after;
    s = sr.next_state;
    a = a_next;
    ++t;
  }

  if (monitor) {
    for (size_t k = 0; k < model_->exogenous().size(); ++k)
      if (trace.change_count(static_cast<int>(k)) > 1) monitor->absorption_ok = false;
    ++monitor->outcome_checks;
    const bool event_terminal = log.outcome_value != coupling_.reward_model.no_event_value;
    if (event_terminal == log.truncated) monitor->outcome_consistent = false;
  }
  return log;
}

QTrainer::QTrainer(AgentConfig config, int num_states, int num_actions)
    : config_(config), q_(num_states, num_actions) {}

EpisodeLog QTrainer::train_episode(TabularEnv& env, std::mt19937_64& rng) {
  EpisodeLog log;
  int s = env.reset();
  bool terminal = false;
  while (!terminal) {
    const int a = select_action(q_, s, config_.epsilon, rng);
    const StepResult sr = env.step(a, rng);
    terminal = sr.terminal;
    q_update(q_, s, a, sr.reward, sr.next_state, terminal, config_);
    log.raw_return += sr.reward;
    log.modified_return += sr.reward;
    ++log.length;
    log.truncated = sr.truncated;
    s = sr.next_state;
  }
  return log;
}

double eval_episode(TabularEnv& env, const QTable& q, double epsilon, std::mt19937_64& rng) {
  double ret = 0.0;
  int s = env.reset();
  bool terminal = false;
  while (!terminal) {
    const int a = select_action(q, s, epsilon, rng);
    const StepResult sr = env.step(a, rng);
    terminal = sr.terminal;
    ret += sr.reward;
    s = sr.next_state;
  }
  return ret;
}

}  // namespace acrl
