#include "acrl/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <thread>

namespace acrl {

namespace {

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

std::string condition_label(double p_a) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "pA=%g", p_a);
  return buf;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write '" + path + "'");
  out << content;
}

}  // namespace

const char* to_string(AgentKind k) { return k == AgentKind::Ac ? "ac" : "q"; }

Summary summarize(const std::vector<double>& values) {
  Summary s;
  s.n = static_cast<int>(values.size());
  if (values.empty()) return s;
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / static_cast<double>(s.n);
  if (s.n < 2) return s;
  double ss = 0.0;
  for (double v : values) ss += (v - s.mean) * (v - s.mean);
  const double sd = std::sqrt(ss / static_cast<double>(s.n - 1));
  s.sem = sd / std::sqrt(static_cast<double>(s.n));
  return s;
}

Materials load_materials(const ExperimentConfig& config) {
  std::ifstream in(config.model_path);
  if (!in) throw ConfigError("cannot open model file '" + config.model_path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  auto parsed = parse_model(buffer.str());
  if (!parsed.ok()) {
    std::string msg;
    for (const auto& d : parsed.diagnostics) {
      if (!msg.empty()) msg += "\n";
      msg += format_diagnostic(config.model_path, d);
    }
    throw ConfigError(msg);
  }

  Materials m{std::move(*parsed.value), {}};
  const CausalModel& model = m.model;

  const CampingEnv probe(config.env);
  const auto& channels = probe.exo_channels();
  auto channel_index = [&](const std::string& name) {
    for (size_t i = 0; i < channels.size(); ++i)
      if (channels[i] == name) return static_cast<int>(i);
    throw ConfigError("abstraction names unknown channel '" + name +
                      "'; environment provides: camp_result, pyro_fired");
  };

  m.coupling.exo_defaults = default_context_values(model);
  for (size_t k = 0; k < model.exogenous().size(); ++k) {
    const std::string& var_name = model.variables()[model.exogenous()[k]].name;
    auto it = config.abstraction.find(var_name);
    if (it == config.abstraction.end())
      throw ConfigError("[abstraction] is missing exogenous variable '" + var_name + "'");
    m.coupling.channel_of_exo.push_back(channel_index(it->second));
    auto dv = config.exo_defaults.find(var_name);
    if (dv != config.exo_defaults.end()) {
      if (!model.variables()[model.exogenous()[k]].admits(dv->second))
        throw ConfigError("default for '" + var_name + "' outside its range");
      m.coupling.exo_defaults[k] = dv->second;
    }
  }
  for (const auto& [name, channel] : config.abstraction)
    if (model.var_index(name) < 0 || model.exo_position(model.var_index(name)) < 0)
      throw ConfigError("[abstraction] names '" + name + "', which is not an exogenous "
                        "variable of the model");

  const int outcome = model.var_index(config.outcome_variable);
  if (outcome < 0 || model.endo_position(outcome) < 0)
    throw ConfigError("outcome variable '" + config.outcome_variable +
                      "' is not an endogenous variable of the model");
  m.coupling.reward_model.outcome_var = outcome;
  m.coupling.reward_model.no_event_value = 0;
  m.coupling.reward_model.rewards = config.outcome_rewards;
  for (const auto& [value, reward] : config.outcome_rewards)
    if (!model.variables()[outcome].admits(value))
      throw ConfigError("reward." + std::to_string(value) + " is outside the range of '" +
                        config.outcome_variable + "'");
  // The raw fire penalty and r(1) describe the same terminal event; keeping
  // them equal is what makes "replace the penalty with the blame-weighted
  // contribution" well defined.
  if (m.coupling.reward_model.reward(1) != config.env.reward_fire)
    throw ConfigError("reward.1 (" + std::to_string(m.coupling.reward_model.reward(1)) +
                      ") must equal [environment] reward_fire (" +
                      std::to_string(config.env.reward_fire) + ")");
  m.coupling.max_conjuncts = config.max_conjuncts;
  return m;
}

RestartOutcome run_restart(const ExperimentConfig& config, const Materials& materials,
                           AgentKind agent, std::uint64_t seed) {
  RestartOutcome out;
  CampingEnv env(config.env);
  std::mt19937_64 rng(seed);

  out.train_raw_returns.reserve(config.train_episodes);
  out.train_modified_returns.reserve(config.train_episodes);

  if (agent == AgentKind::Q) {
    QTrainer trainer(config.agent, env.num_states(), env.num_actions());
    for (int ep = 0; ep < config.train_episodes; ++ep) {
      const EpisodeLog log = trainer.train_episode(env, rng);
      out.train_raw_returns.push_back(log.raw_return);
      out.train_modified_returns.push_back(log.modified_return);
    }
    std::vector<double> evals;
    evals.reserve(config.eval_episodes);
    for (int ep = 0; ep < config.eval_episodes; ++ep)
      evals.push_back(eval_episode(env, trainer.q(), config.eval_epsilon, rng));
    out.eval_mean = summarize(evals).mean;
    return out;
  }

  AcTrainer trainer(materials.model, materials.coupling, config.agent, config.estimator,
                    env.num_states(), env.num_actions());
  trainer.monitor = &out.monitor;
  std::vector<EpisodeLog> logs;
  logs.reserve(config.train_episodes);
  for (int ep = 0; ep < config.train_episodes; ++ep) {
    logs.push_back(trainer.train_episode(env, rng));
    out.train_raw_returns.push_back(logs.back().raw_return);
    out.train_modified_returns.push_back(logs.back().modified_return);
  }

  std::vector<double> evals;
  evals.reserve(config.eval_episodes);
  for (int ep = 0; ep < config.eval_episodes; ++ep)
    evals.push_back(eval_episode(env, trainer.q(), config.eval_epsilon, rng));
  out.eval_mean = summarize(evals).mean;

  // Blame factor per cause: average of the episode blames over the trailing
  // window of episodes in which the event was an actual cause.
  const int window_start = std::max(0, config.train_episodes - config.blame_window);
  for (const auto& tc : trainer.registry().entries()) {
    std::vector<double> samples;
    double last_seen = 0.0;
    bool seen_any = false;
    for (int ep = 0; ep < config.train_episodes; ++ep) {
      for (const auto& [event, blame] : logs[ep].cause_blames) {
        if (event == tc.event) {
          last_seen = blame;
          seen_any = true;
          if (ep >= window_start) samples.push_back(blame);
        }
      }
    }
    if (!seen_any) continue;
    const double factor = samples.empty() ? last_seen : summarize(samples).mean;
    out.blame_factors.emplace_back(materials.model.label(tc.event), factor);
  }
  return out;
}

ReproductionResult run_reproduction(const ExperimentConfig& config, bool verbose) {
  const Materials materials = load_materials(config);

  struct Job {
    int condition;
    AgentKind agent;
    int restart;
  };
  std::vector<Job> jobs;
  for (int c = 0; c < static_cast<int>(kReproduceConditions.size()); ++c)
    for (AgentKind agent : {AgentKind::Ac, AgentKind::Q})
      for (int r = 0; r < config.restarts; ++r) jobs.push_back({c, agent, r});

  std::vector<RestartOutcome> outcomes(jobs.size());
  std::vector<std::string> job_errors(jobs.size());
  std::vector<ExperimentConfig> condition_configs;
  for (double p_a : kReproduceConditions) {
    ExperimentConfig cc = config;
    cc.env.p_a = p_a;
    condition_configs.push_back(std::move(cc));
  }

  std::atomic<size_t> next{0};
  std::atomic<size_t> done{0};
  auto worker = [&] {
    while (true) {
      const size_t i = next.fetch_add(1);
      if (i >= jobs.size()) return;
      const Job& job = jobs[i];
      try {
        outcomes[i] = run_restart(condition_configs[job.condition], materials, job.agent,
                                  config.base_seed + static_cast<std::uint64_t>(job.restart));
      } catch (const std::exception& e) {
        job_errors[i] = e.what();
      }
      done.fetch_add(1);
    }
  };
  int n_threads = config.threads > 0 ? config.threads
                                     : static_cast<int>(std::thread::hardware_concurrency());
  if (n_threads < 1) n_threads = 1;
  n_threads = std::min<int>(n_threads, static_cast<int>(jobs.size()));
  std::vector<std::thread> pool;
  for (int i = 0; i < n_threads; ++i) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  for (size_t i = 0; i < jobs.size(); ++i)
    if (!job_errors[i].empty())
      throw ConfigError("restart " + std::to_string(jobs[i].restart) + " (" +
                        to_string(jobs[i].agent) + ", " +
                        condition_label(kReproduceConditions[jobs[i].condition]) +
                        ") failed: " + job_errors[i]);
  if (verbose)
    std::cout << "completed " << done.load() << " restarts ("
              << kReproduceConditions.size() << " conditions x 2 agents x "
              << config.restarts << ")\n";

  ReproductionResult result;
  result.manifest = serialize_experiment_config(config);
  for (double p_a : kReproduceConditions)
    result.condition_labels.push_back(condition_label(p_a));

  auto slot = [&](int c, AgentKind agent, int r) {
    const size_t per_condition = 2 * static_cast<size_t>(config.restarts);
    const size_t agent_offset = agent == AgentKind::Ac ? 0 : static_cast<size_t>(config.restarts);
    return static_cast<size_t>(c) * per_condition + agent_offset + static_cast<size_t>(r);
  };

  result.trace.resize(kReproduceConditions.size());
  for (int c = 0; c < static_cast<int>(kReproduceConditions.size()); ++c) {
    result.trace[c].resize(2);
    for (AgentKind agent : {AgentKind::Ac, AgentKind::Q}) {
      const int a = agent == AgentKind::Ac ? 0 : 1;
      std::vector<double> evals;
      for (int r = 0; r < config.restarts; ++r)
        evals.push_back(outcomes[slot(c, agent, r)].eval_mean);
      result.table1.push_back({result.condition_labels[c], to_string(agent), summarize(evals)});

      result.trace[c][a].resize(config.train_episodes);
      std::vector<double> column(config.restarts);
      for (int ep = 0; ep < config.train_episodes; ++ep) {
        for (int r = 0; r < config.restarts; ++r)
          column[r] = outcomes[slot(c, agent, r)].train_raw_returns[ep];
        result.trace[c][a][ep] = summarize(column);
      }
    }

    // Blame factors come from the AC agent's registry, in first-seen order.
    std::vector<std::string> labels;
    for (int r = 0; r < config.restarts; ++r)
      for (const auto& [label, factor] : outcomes[slot(c, AgentKind::Ac, r)].blame_factors)
        if (std::find(labels.begin(), labels.end(), label) == labels.end())
          labels.push_back(label);
    for (const auto& label : labels) {
      std::vector<double> factors;
      for (int r = 0; r < config.restarts; ++r)
        for (const auto& [l, f] : outcomes[slot(c, AgentKind::Ac, r)].blame_factors)
          if (l == label) factors.push_back(f);
      result.table2.push_back({result.condition_labels[c], label, summarize(factors)});
    }

    for (int r = 0; r < config.restarts; ++r) {
      result.monitor.merge(outcomes[slot(c, AgentKind::Ac, r)].monitor);
      result.monitor.merge(outcomes[slot(c, AgentKind::Q, r)].monitor);
    }
  }
  return result;
}

namespace {

std::string trace_svg(const ReproductionResult& result) {
  const int width = 860, height = 520;
  const int left = 70, right = 30, top = 30, bottom = 50;
  const double plot_w = width - left - right;
  const double plot_h = height - top - bottom;

  double ymin = 0.0, ymax = -1e300;
  size_t episodes = 0;
  for (const auto& per_agent : result.trace)
    for (const auto& series : per_agent) {
      episodes = std::max(episodes, series.size());
      for (const auto& s : series) {
        ymin = std::min(ymin, s.mean);
        ymax = std::max(ymax, s.mean);
      }
    }
  if (episodes == 0) return "<svg xmlns=\"http://www.w3.org/2000/svg\"/>\n";
  ymax = std::max(ymax + 5.0, ymin + 1.0);
  ymin -= 5.0;

  auto x_of = [&](size_t ep) {
    return left + plot_w * static_cast<double>(ep) / static_cast<double>(episodes - 1);
  };
  auto y_of = [&](double v) { return top + plot_h * (ymax - v) / (ymax - ymin); };

  const char* colors[4] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e"};
  const char* agent_names[2] = {"ac", "q"};

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
      << height << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
  svg << "<rect width=\"" << width << "\" height=\"" << height << "\" fill=\"white\"/>\n";
  // Axes and a few y gridlines.
  for (int g = 0; g <= 5; ++g) {
    const double v = ymin + (ymax - ymin) * g / 5.0;
    const double y = y_of(v);
    svg << "<line x1=\"" << left << "\" y1=\"" << y << "\" x2=\"" << (width - right)
        << "\" y2=\"" << y << "\" stroke=\"#dddddd\"/>\n";
    svg << "<text x=\"" << (left - 8) << "\" y=\"" << (y + 4)
        << "\" text-anchor=\"end\" font-size=\"12\">" << fmt(v) << "</text>\n";
  }
  svg << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\""
      << (height - bottom) << "\" stroke=\"black\"/>\n";
  svg << "<line x1=\"" << left << "\" y1=\"" << (height - bottom) << "\" x2=\""
      << (width - right) << "\" y2=\"" << (height - bottom) << "\" stroke=\"black\"/>\n";
  svg << "<text x=\"" << (left + plot_w / 2) << "\" y=\"" << (height - 12)
      << "\" text-anchor=\"middle\" font-size=\"13\">episode</text>\n";
  svg << "<text x=\"18\" y=\"" << (top + plot_h / 2)
      << "\" text-anchor=\"middle\" font-size=\"13\" transform=\"rotate(-90 18 "
      << (top + plot_h / 2) << ")\">mean raw return</text>\n";

  int series_index = 0;
  for (size_t c = 0; c < result.trace.size(); ++c) {
    for (size_t a = 0; a < result.trace[c].size(); ++a, ++series_index) {
      const auto& series = result.trace[c][a];
      // SEM band.
      std::ostringstream band;
      for (size_t ep = 0; ep < series.size(); ++ep)
        band << (ep ? " " : "") << x_of(ep) << "," << y_of(series[ep].mean + series[ep].sem);
      for (size_t ep = series.size(); ep-- > 0;)
        band << " " << x_of(ep) << "," << y_of(series[ep].mean - series[ep].sem);
      svg << "<polygon points=\"" << band.str() << "\" fill=\"" << colors[series_index % 4]
          << "\" opacity=\"0.15\"/>\n";
      std::ostringstream line;
      for (size_t ep = 0; ep < series.size(); ++ep)
        line << (ep ? " " : "") << x_of(ep) << "," << y_of(series[ep].mean);
      svg << "<polyline points=\"" << line.str() << "\" fill=\"none\" stroke=\""
          << colors[series_index % 4] << "\" stroke-width=\"1.5\"/>\n";
      const double ly = top + 18.0 * (series_index + 1);
      svg << "<line x1=\"" << (width - right - 150) << "\" y1=\"" << ly << "\" x2=\""
          << (width - right - 120) << "\" y2=\"" << ly << "\" stroke=\""
          << colors[series_index % 4] << "\" stroke-width=\"2\"/>\n";
      svg << "<text x=\"" << (width - right - 112) << "\" y=\"" << (ly + 4)
          << "\" font-size=\"12\">" << agent_names[a] << " " << result.condition_labels[c]
          << "</text>\n";
    }
  }
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace

void write_reproduction_outputs(const ReproductionResult& result, const std::string& out_dir,
                                bool plot) {
  std::filesystem::create_directories(out_dir);
  const std::filesystem::path dir(out_dir);

  std::string t1 = "condition,agent,mean_return,sem,n\n";
  for (const auto& row : result.table1)
    t1 += row.condition + "," + row.label + "," + fmt(row.summary.mean) + "," +
          fmt(row.summary.sem) + "," + std::to_string(row.summary.n) + "\n";
  write_file((dir / "table1.csv").string(), t1);

  std::string t2 = "condition,event,mean_blame,sem,n\n";
  for (const auto& row : result.table2)
    t2 += row.condition + "," + row.label + "," + fmt(row.summary.mean) + "," +
          fmt(row.summary.sem) + "," + std::to_string(row.summary.n) + "\n";
  write_file((dir / "table2.csv").string(), t2);

  std::string tr = "condition,agent,episode,mean_raw_return,sem\n";
  const char* agent_names[2] = {"ac", "q"};
  for (size_t c = 0; c < result.trace.size(); ++c)
    for (size_t a = 0; a < result.trace[c].size(); ++a)
      for (size_t ep = 0; ep < result.trace[c][a].size(); ++ep)
        tr += result.condition_labels[c] + "," + agent_names[a] + "," + std::to_string(ep) +
              "," + fmt(result.trace[c][a][ep].mean) + "," + fmt(result.trace[c][a][ep].sem) +
              "\n";
  write_file((dir / "trace.csv").string(), tr);

  if (!result.manifest.empty()) write_file((dir / "manifest.cfg").string(), result.manifest);
  if (plot) write_file((dir / "trace.svg").string(), trace_svg(result));
}

QTable run_training(const ExperimentConfig& config, const Materials& materials,
                    AgentKind agent, std::uint64_t seed, const std::string& out_dir,
                    bool verbose) {
  std::filesystem::create_directories(out_dir);
  const std::filesystem::path dir(out_dir);
  CampingEnv env(config.env);
  std::mt19937_64 rng(seed);

  std::string episodes_csv = "episode,raw_return,modified_return,length,outcome\n";
  std::string blames_csv = "episode,event,blame\n";

  QTable q(env.num_states(), env.num_actions());
  const CauseRegistry* registry = nullptr;

  std::optional<AcTrainer> ac;
  std::optional<QTrainer> qt;
  if (agent == AgentKind::Ac)
    ac.emplace(materials.model, materials.coupling, config.agent, config.estimator,
               env.num_states(), env.num_actions());
  else
    qt.emplace(config.agent, env.num_states(), env.num_actions());

  double tail_sum = 0.0;
  int tail_count = 0;
  for (int ep = 0; ep < config.train_episodes; ++ep) {
    const EpisodeLog log =
        ac ? ac->train_episode(env, rng) : qt->train_episode(env, rng);
    episodes_csv += std::to_string(ep) + "," + fmt(log.raw_return) + "," +
                    fmt(log.modified_return) + "," + std::to_string(log.length) + "," +
                    std::to_string(log.outcome_value) + "\n";
    for (const auto& [event, blame] : log.cause_blames)
      blames_csv += std::to_string(ep) + "," + materials.model.label(event) + "," +
                    fmt(blame) + "\n";
    if (ep >= config.train_episodes - 100) {
      tail_sum += log.raw_return;
      ++tail_count;
    }
  }
  q = ac ? ac->q() : qt->q();
  if (ac) registry = &ac->registry();

  write_file((dir / "episodes.csv").string(), episodes_csv);
  write_file((dir / "blames.csv").string(), blames_csv);

  std::string qcsv = "state,state_name,action,action_name,q\n";
  for (int s = 0; s < q.num_states(); ++s)
    for (int a = 0; a < q.num_actions(); ++a)
      qcsv += std::to_string(s) + "," + env.state_name(s) + "," + std::to_string(a) + "," +
              env.action_name(a) + "," + fmt(q.get(s, a)) + "\n";
  write_file((dir / "qtable.csv").string(), qcsv);

  std::string ecsv = "event,state,state_name,action,action_name,p,m1,m2,visits\n";
  if (registry) {
    for (const auto& tc : registry->entries()) {
      const std::string label = materials.model.label(tc.event);
      for (int s = 0; s < env.num_states(); ++s)
        for (int a = 0; a < env.num_actions(); ++a)
          ecsv += label + "," + std::to_string(s) + "," + env.state_name(s) + "," +
                  std::to_string(a) + "," + env.action_name(a) + "," +
                  fmt(tc.estimator.occurrence_prob(s, a)) + "," + fmt(tc.estimator.m1(s, a)) +
                  "," + fmt(tc.estimator.m2(s, a)) + "," +
                  std::to_string(tc.estimator.visits(s, a)) + "\n";
    }
  }
  write_file((dir / "estimators.csv").string(), ecsv);

  ExperimentConfig manifest = config;
  manifest.has_run_section = true;
  manifest.run_agent = to_string(agent);
  manifest.run_seed = seed;
  write_file((dir / "manifest.cfg").string(), serialize_experiment_config(manifest));

  if (verbose)
    std::cout << "trained " << to_string(agent) << " agent for " << config.train_episodes
              << " episodes; mean raw return over the last " << tail_count
              << " episodes: " << fmt(tail_sum / std::max(1, tail_count)) << "\n";
  return q;
}

Summary evaluate_policy(const ExperimentConfig& config, const QTable& q, double epsilon,
                        int episodes, std::uint64_t seed) {
  CampingEnv env(config.env);
  std::mt19937_64 rng(seed);
  std::vector<double> returns;
  returns.reserve(episodes);
  for (int ep = 0; ep < episodes; ++ep)
    returns.push_back(eval_episode(env, q, epsilon, rng));
  return summarize(returns);
}

QTable load_qtable_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  std::string line;
  std::getline(in, line);  // header
  struct Row {
    int s, a;
    double q;
  };
  std::vector<Row> rows;
  int max_s = -1, max_a = -1;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string field;
    Row row{};
    std::getline(ss, field, ',');
    row.s = std::stoi(field);
    std::getline(ss, field, ',');  // state_name
    std::getline(ss, field, ',');
    row.a = std::stoi(field);
    std::getline(ss, field, ',');  // action_name
    std::getline(ss, field, ',');
    row.q = std::stod(field);
    max_s = std::max(max_s, row.s);
    max_a = std::max(max_a, row.a);
    rows.push_back(row);
  }
  if (rows.empty()) throw ConfigError("'" + path + "' holds no Q-table rows");
  QTable q(max_s + 1, max_a + 1);
  for (const auto& row : rows) q.set(row.s, row.a, row.q);
  return q;
}

}  // namespace acrl
