#include "acrl/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace acrl {

namespace {

std::string trim(const std::string& s) {
  size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

[[noreturn]] void fail(const std::string& path, int line, const std::string& msg) {
  throw ConfigError(path + ":" + std::to_string(line) + ": " + msg);
}

double parse_double(const std::string& path, int line, const std::string& key,
                    const std::string& value) {
  try {
    size_t used = 0;
    const double d = std::stod(value, &used);
    if (used != value.size()) throw std::invalid_argument("");
    return d;
  } catch (const std::exception&) {
    fail(path, line, "value for '" + key + "' is not a number: '" + value + "'");
  }
}

long long parse_int(const std::string& path, int line, const std::string& key,
                    const std::string& value) {
  try {
    size_t used = 0;
    const long long v = std::stoll(value, &used);
    if (used != value.size()) throw std::invalid_argument("");
    return v;
  } catch (const std::exception&) {
    fail(path, line, "value for '" + key + "' is not an integer: '" + value + "'");
  }
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

}  // namespace

ExperimentConfig load_experiment_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");

  ExperimentConfig cfg;
  std::string section;
  std::string line;
  int lineno = 0;
  bool saw_reward_key = false;

  while (std::getline(in, line)) {
    ++lineno;
    const size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string text = trim(line);
    if (text.empty()) continue;

    if (text.front() == '[') {
      if (text.back() != ']') fail(path, lineno, "unterminated section header");
      section = trim(text.substr(1, text.size() - 2));
      static const char* known[] = {"model", "abstraction", "defaults", "environment",
                                    "agent", "blame", "experiment", "run"};
      if (std::find_if(std::begin(known), std::end(known),
                       [&](const char* s) { return section == s; }) == std::end(known))
        fail(path, lineno, "unknown section [" + section + "]");
      if (section == "run") cfg.has_run_section = true;
      continue;
    }

    const size_t eq = text.find('=');
    if (eq == std::string::npos) fail(path, lineno, "expected 'key = value'");
    const std::string key = trim(text.substr(0, eq));
    const std::string value = trim(text.substr(eq + 1));
    if (key.empty()) fail(path, lineno, "empty key");
    if (section.empty()) fail(path, lineno, "key outside any section");

    if (section == "model") {
      if (key == "path") {
        cfg.model_path = value;
      } else if (key == "outcome") {
        cfg.outcome_variable = value;
      } else if (key.rfind("reward.", 0) == 0) {
        const std::string tail = key.substr(7);
        const long long v = parse_int(path, lineno, key, tail);
        const double r = parse_double(path, lineno, key, value);
        cfg.outcome_rewards.emplace_back(static_cast<int>(v), r);
        saw_reward_key = true;
      } else {
        fail(path, lineno, "unknown key '" + key + "' in [model]");
      }
    } else if (section == "abstraction") {
      cfg.abstraction[key] = value;
    } else if (section == "defaults") {
      cfg.exo_defaults[key] = static_cast<int>(parse_int(path, lineno, key, value));
    } else if (section == "environment") {
      if (key == "p_pyro") cfg.env.p_pyro = parse_double(path, lineno, key, value);
      else if (key == "p_a") cfg.env.p_a = parse_double(path, lineno, key, value);
      else if (key == "reward_safe") cfg.env.reward_safe = parse_double(path, lineno, key, value);
      else if (key == "reward_unsafe") cfg.env.reward_unsafe = parse_double(path, lineno, key, value);
      else if (key == "reward_fire") cfg.env.reward_fire = parse_double(path, lineno, key, value);
      else if (key == "max_steps") cfg.env.max_steps = static_cast<int>(parse_int(path, lineno, key, value));
      else fail(path, lineno, "unknown key '" + key + "' in [environment]");
    } else if (section == "agent") {
      if (key == "alpha") cfg.agent.alpha = parse_double(path, lineno, key, value);
      else if (key == "epsilon") cfg.agent.epsilon = parse_double(path, lineno, key, value);
      else if (key == "gamma") cfg.agent.gamma = parse_double(path, lineno, key, value);
      else fail(path, lineno, "unknown key '" + key + "' in [agent]");
    } else if (section == "blame") {
      if (key == "alpha") cfg.estimator.alpha = parse_double(path, lineno, key, value);
      else if (key == "eta") cfg.estimator.eta = parse_double(path, lineno, key, value);
      else if (key == "prior_mean") cfg.estimator.prior_mean = parse_double(path, lineno, key, value);
      else if (key == "prior_var") cfg.estimator.prior_var = parse_double(path, lineno, key, value);
      else if (key == "denominator_floor") cfg.estimator.denominator_floor = parse_double(path, lineno, key, value);
      else fail(path, lineno, "unknown key '" + key + "' in [blame]");
    } else if (section == "experiment") {
      if (key == "restarts") cfg.restarts = static_cast<int>(parse_int(path, lineno, key, value));
      else if (key == "train_episodes") cfg.train_episodes = static_cast<int>(parse_int(path, lineno, key, value));
      else if (key == "eval_episodes") cfg.eval_episodes = static_cast<int>(parse_int(path, lineno, key, value));
      else if (key == "eval_epsilon") cfg.eval_epsilon = parse_double(path, lineno, key, value);
      else if (key == "base_seed") cfg.base_seed = static_cast<std::uint64_t>(parse_int(path, lineno, key, value));
      else if (key == "blame_window") cfg.blame_window = static_cast<int>(parse_int(path, lineno, key, value));
      else if (key == "threads") cfg.threads = static_cast<int>(parse_int(path, lineno, key, value));
      else if (key == "max_conjuncts") cfg.max_conjuncts = static_cast<int>(parse_int(path, lineno, key, value));
      else fail(path, lineno, "unknown key '" + key + "' in [experiment]");
    } else if (section == "run") {
      if (key == "agent") cfg.run_agent = value;
      else if (key == "seed") cfg.run_seed = static_cast<std::uint64_t>(parse_int(path, lineno, key, value));
      else fail(path, lineno, "unknown key '" + key + "' in [run]");
    }
  }

  if (cfg.model_path.empty()) throw ConfigError(path + ": [model] path is required");
  const std::filesystem::path model(cfg.model_path);
  if (model.is_relative())
    cfg.model_path = (std::filesystem::path(path).parent_path() / model).string();

  auto check = [&](bool ok, const std::string& msg) {
    if (!ok) throw ConfigError(path + ": " + msg);
  };
  check(cfg.env.p_pyro >= 0.0 && cfg.env.p_pyro <= 1.0, "p_pyro must lie in [0, 1]");
  check(cfg.env.p_a >= 0.0 && cfg.env.p_a <= 1.0, "p_a must lie in [0, 1]");
  check(cfg.env.max_steps >= 1, "max_steps must be >= 1");
  check(cfg.agent.alpha > 0.0 && cfg.agent.alpha <= 1.0, "agent alpha must lie in (0, 1]");
  check(cfg.agent.epsilon >= 0.0 && cfg.agent.epsilon <= 1.0, "epsilon must lie in [0, 1]");
  check(cfg.agent.gamma > 0.0 && cfg.agent.gamma <= 1.0, "gamma must lie in (0, 1]");
  check(cfg.estimator.alpha > 0.0 && cfg.estimator.alpha <= 1.0,
        "blame alpha must lie in (0, 1]");
  check(cfg.estimator.prior_var >= 0.0, "prior_var must be >= 0");
  check(cfg.estimator.denominator_floor > 0.0, "denominator_floor must be positive");
  check(cfg.restarts >= 1, "restarts must be >= 1");
  check(cfg.train_episodes >= 1, "train_episodes must be >= 1");
  check(cfg.eval_episodes >= 1, "eval_episodes must be >= 1");
  check(cfg.eval_epsilon >= 0.0 && cfg.eval_epsilon <= 1.0, "eval_epsilon must lie in [0, 1]");
  check(cfg.blame_window >= 1, "blame_window must be >= 1");
  check(cfg.threads >= 0, "threads must be >= 0");
  check(cfg.max_conjuncts >= 1, "max_conjuncts must be >= 1");
  if (saw_reward_key)
    for (const auto& [v, r] : cfg.outcome_rewards)
      check(v != 0 || r == 0.0, "reward.0 must be 0 (no-event value carries no reward)");
  return cfg;
}

std::string serialize_experiment_config(const ExperimentConfig& cfg) {
  std::ostringstream out;
  out << "[model]\n";
  out << "path = " << cfg.model_path << "\n";
  out << "outcome = " << cfg.outcome_variable << "\n";
  for (const auto& [v, r] : cfg.outcome_rewards)
    out << "reward." << v << " = " << format_double(r) << "\n";
  out << "\n[abstraction]\n";
  for (const auto& [k, v] : cfg.abstraction) out << k << " = " << v << "\n";
  if (!cfg.exo_defaults.empty()) {
    out << "\n[defaults]\n";
    for (const auto& [k, v] : cfg.exo_defaults) out << k << " = " << v << "\n";
  }
  out << "\n[environment]\n";
  out << "p_pyro = " << format_double(cfg.env.p_pyro) << "\n";
  out << "p_a = " << format_double(cfg.env.p_a) << "\n";
  out << "reward_safe = " << format_double(cfg.env.reward_safe) << "\n";
  out << "reward_unsafe = " << format_double(cfg.env.reward_unsafe) << "\n";
  out << "reward_fire = " << format_double(cfg.env.reward_fire) << "\n";
  out << "max_steps = " << cfg.env.max_steps << "\n";
  out << "\n[agent]\n";
  out << "alpha = " << format_double(cfg.agent.alpha) << "\n";
  out << "epsilon = " << format_double(cfg.agent.epsilon) << "\n";
  out << "gamma = " << format_double(cfg.agent.gamma) << "\n";
  out << "\n[blame]\n";
  out << "alpha = " << format_double(cfg.estimator.alpha) << "\n";
  out << "eta = " << format_double(cfg.estimator.eta) << "\n";
  out << "prior_mean = " << format_double(cfg.estimator.prior_mean) << "\n";
  out << "prior_var = " << format_double(cfg.estimator.prior_var) << "\n";
  out << "denominator_floor = " << format_double(cfg.estimator.denominator_floor) << "\n";
  out << "\n[experiment]\n";
  out << "restarts = " << cfg.restarts << "\n";
  out << "train_episodes = " << cfg.train_episodes << "\n";
  out << "eval_episodes = " << cfg.eval_episodes << "\n";
  out << "eval_epsilon = " << format_double(cfg.eval_epsilon) << "\n";
  out << "base_seed = " << cfg.base_seed << "\n";
  out << "blame_window = " << cfg.blame_window << "\n";
  out << "threads = " << cfg.threads << "\n";
  out << "max_conjuncts = " << cfg.max_conjuncts << "\n";
  if (cfg.has_run_section) {
    out << "\n[run]\n";
    if (!cfg.run_agent.empty()) out << "agent = " << cfg.run_agent << "\n";
    out << "seed = " << cfg.run_seed << "\n";
  }
  return out.str();
}

}  // namespace acrl
