#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "acrl/actual_cause.hpp"
#include "acrl/experiments.hpp"
#include "acrl/parser.hpp"

namespace {

using namespace acrl;

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

int print_diagnostics(const std::string& source, const std::vector<ParseDiagnostic>& diags) {
  for (const auto& d : diags) std::cerr << format_diagnostic(source, d) << "\n";
  return 2;
}

std::optional<std::string> read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) return std::nullopt;
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string witness_text(const CausalModel& model, const CandidateCause& cause,
                         const Witness& witness) {
  std::string w = "W={";
  for (size_t k = 0; k < witness.contingency.size(); ++k) {
    if (k) w += ", ";
    w += model.label({witness.contingency[k].var, witness.contingency[k].value});
  }
  w += "}; alt: ";
  for (size_t c = 0; c < cause.conjuncts.size(); ++c) {
    if (c) w += ", ";
    w += model.variables()[cause.conjuncts[c].var].name + "<-" +
         std::to_string(witness.alternative[c]);
  }
  return w;
}

int cmd_causes(const std::string& model_path, const std::string& context_str,
               const std::string& phi_str, int max_conjuncts, bool csv) {
  const auto text = read_file(model_path);
  if (!text) {
    std::cerr << "error: cannot open model file '" << model_path << "'\n";
    return 2;
  }
  auto parsed = parse_model(*text);
  if (!parsed.ok()) return print_diagnostics(model_path, parsed.diagnostics);
  const CausalModel& model = *parsed.value;

  auto ctx = parse_context(context_str, model);
  if (!ctx.ok()) return print_diagnostics("<context>", ctx.diagnostics);
  auto phi = parse_formula(phi_str, model);
  if (!phi.ok()) return print_diagnostics("<phi>", phi.diagnostics);
  if (!phi.value->interventions.empty()) {
    std::cerr << "error: the cause query formula must not carry interventions\n";
    return 2;
  }

  if (!model.satisfies(*ctx.value, *phi.value)) {
    std::cerr << "phi does not hold in the given context; nothing to explain\n";
    return 1;
  }
  const auto causes =
      enumerate_actual_causes(model, *ctx.value, phi.value->body, max_conjuncts);
  if (causes.empty()) {
    std::cerr << "phi holds but no actual cause of size <= " << max_conjuncts
              << " was found\n";
    return 1;
  }
  if (csv) {
    std::cout << "cause,contingency,alternative\n";
    for (const auto& ec : causes) {
      std::string label, cont, alt;
      for (size_t c = 0; c < ec.cause.conjuncts.size(); ++c) {
        if (c) label += ";";
        label += model.label(ec.cause.conjuncts[c]);
        if (c) alt += ";";
        alt += model.variables()[ec.cause.conjuncts[c].var].name + "<-" +
               std::to_string(ec.witness.alternative[c]);
      }
      for (size_t k = 0; k < ec.witness.contingency.size(); ++k) {
        if (k) cont += ";";
        cont += model.label({ec.witness.contingency[k].var, ec.witness.contingency[k].value});
      }
      std::cout << label << "," << cont << "," << alt << "\n";
    }
  } else {
    for (const auto& ec : causes) {
      std::string label;
      for (size_t c = 0; c < ec.cause.conjuncts.size(); ++c) {
        if (c) label += " & ";
        label += model.label(ec.cause.conjuncts[c]);
      }
      std::cout << label << "    (" << witness_text(model, ec.cause, ec.witness) << ")\n";
    }
  }
  return 0;
}

int cmd_train(const std::string& config_path, const std::string& agent_name,
              std::uint64_t seed, bool seed_given, const std::string& out_dir) {
  const ExperimentConfig config = load_experiment_config(config_path);
  const Materials materials = load_materials(config);
  const AgentKind agent = agent_name == "ac" ? AgentKind::Ac : AgentKind::Q;
  const std::uint64_t use_seed = seed_given ? seed : config.base_seed;
  std::string dir = out_dir;
  if (dir.empty()) dir = "runs/" + agent_name + "-seed" + std::to_string(use_seed);
  const QTable q = run_training(config, materials, agent, use_seed, dir, true);
  const Summary eval = evaluate_policy(config, q, config.eval_epsilon, config.eval_episodes,
                                       use_seed + 1);
  std::cout << "eval mean raw return: " << fmt(eval.mean) << " +- " << fmt(eval.sem) << " ("
            << eval.n << " episodes, epsilon=" << config.eval_epsilon << ")\n";
  std::cout << "artifacts written to " << dir << "\n";
  return 0;
}

int cmd_eval(const std::string& run_dir, int episodes, double eval_epsilon, bool eps_given,
             std::uint64_t seed, bool seed_given) {
  const std::filesystem::path dir(run_dir);
  const std::string manifest = (dir / "manifest.cfg").string();
  if (!std::filesystem::exists(manifest)) {
    std::cerr << "error: missing artifact '" << manifest << "'\n";
    return 1;
  }
  const ExperimentConfig config = load_experiment_config(manifest);
  const QTable q = load_qtable_csv((dir / "qtable.csv").string());
  const int n = episodes > 0 ? episodes : config.eval_episodes;
  const double eps = eps_given ? eval_epsilon : config.eval_epsilon;
  const std::uint64_t use_seed = seed_given ? seed : config.run_seed + 1;
  const Summary s = evaluate_policy(config, q, eps, n, use_seed);
  std::cout << "eval mean raw return: " << fmt(s.mean) << " +- " << fmt(s.sem) << " (" << n
            << " episodes, epsilon=" << eps << ")\n";
  return 0;
}

int cmd_reproduce(const std::string& config_path, const std::string& out_dir,
                  std::uint64_t seed, bool seed_given, bool plot, int threads) {
  ExperimentConfig config = load_experiment_config(config_path);
  if (seed_given) config.base_seed = seed;
  if (threads > 0) config.threads = threads;
  const ReproductionResult result = run_reproduction(config, true);
  write_reproduction_outputs(result, out_dir, plot);

  std::cout << "\ntable1 (mean eval return per condition and agent):\n";
  for (const auto& row : result.table1)
    std::cout << "  " << row.condition << "  " << row.label << "  " << fmt(row.summary.mean)
              << " +- " << fmt(row.summary.sem) << "\n";
  std::cout << "table2 (mean blame factor per condition and cause):\n";
  for (const auto& row : result.table2)
    std::cout << "  " << row.condition << "  " << row.label << "  " << fmt(row.summary.mean)
              << " +- " << fmt(row.summary.sem) << "\n";
  std::cout << "outputs written to " << out_dir << "\n";
  return 0;
}

int cmd_inspect(const std::string& run_dir) {
  const std::filesystem::path dir(run_dir);
  for (const char* name : {"manifest.cfg", "qtable.csv", "estimators.csv"}) {
    if (!std::filesystem::exists(dir / name)) {
      std::cerr << "error: missing artifact '" << (dir / name).string() << "'\n";
      return 1;
    }
  }
  const QTable q = load_qtable_csv((dir / "qtable.csv").string());

  // Re-read the q table csv for the names.
  std::ifstream qin((dir / "qtable.csv").string());
  std::string line;
  std::getline(qin, line);
  std::vector<std::string> state_names(q.num_states());
  std::vector<std::string> action_names(q.num_actions());
  while (std::getline(qin, line)) {
    std::stringstream ss(line);
    std::string s, sname, a, aname;
    std::getline(ss, s, ',');
    std::getline(ss, sname, ',');
    std::getline(ss, a, ',');
    std::getline(ss, aname, ',');
    state_names[std::stoi(s)] = sname;
    action_names[std::stoi(a)] = aname;
  }

  std::cout << "greedy policy:\n";
  for (int s = 0; s < q.num_states(); ++s) {
    const int a = q.greedy_action(s);
    std::cout << "  " << state_names[s] << " -> " << action_names[a] << "  (q=";
    for (int k = 0; k < q.num_actions(); ++k)
      std::cout << (k ? ", " : "") << fmt(q.get(s, k));
    std::cout << ")\n";
  }

  std::ifstream ein((dir / "estimators.csv").string());
  std::getline(ein, line);
  std::cout << "estimators (event, state, action: p, m1, sigma):\n";
  while (std::getline(ein, line)) {
    std::stringstream ss(line);
    std::string event, s, sname, a, aname, p, m1, m2, visits;
    std::getline(ss, event, ',');
    std::getline(ss, s, ',');
    std::getline(ss, sname, ',');
    std::getline(ss, a, ',');
    std::getline(ss, aname, ',');
    std::getline(ss, p, ',');
    std::getline(ss, m1, ',');
    std::getline(ss, m2, ',');
    std::getline(ss, visits, ',');
    const double m1v = std::stod(m1), m2v = std::stod(m2);
    const double sigma = std::sqrt(std::max(m2v - m1v * m1v, 0.0));
    std::cout << "  " << event << "  " << sname << "/" << aname << ": p=" << p
              << " m1=" << fmt(m1v) << " sigma=" << fmt(sigma) << " visits=" << visits
              << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"structural-causal-model toolkit: actual-cause queries and "
               "blame-shaped tabular reinforcement learning"};
  app.require_subcommand(1);

  std::string model_path, context_str, phi_str;
  int max_conjuncts = 1;
  bool csv = false;
  auto* causes = app.add_subcommand("causes", "enumerate actual causes of a formula");
  causes->add_option("--model", model_path, ".scm model file")->required();
  causes->add_option("--context", context_str, "exogenous assignment, e.g. \"U_A=2,U_P=1\"")
      ->required();
  causes->add_option("--phi", phi_str, "effect formula, e.g. \"F = 1\"")->required();
  causes->add_option("--max-conjuncts", max_conjuncts, "largest candidate size (default 1)")
      ->check(CLI::PositiveNumber);
  causes->add_flag("--csv", csv, "machine-readable output");

  std::string config_path, agent_name = "ac", out_dir;
  std::uint64_t seed = 0;
  auto* train = app.add_subcommand("train", "train one agent and write run artifacts");
  train->add_option("--config", config_path, "experiment config file")->required();
  train->add_option("--agent", agent_name, "ac or q")
      ->check(CLI::IsMember({"ac", "q"}));
  auto* train_seed = train->add_option("--seed", seed, "restart seed (default: base_seed)");
  train->add_option("--out", out_dir, "output directory");

  std::string run_dir;
  int eval_episodes = 0;
  double eval_epsilon = 0.0;
  auto* eval = app.add_subcommand("eval", "evaluate a trained run directory");
  eval->add_option("--run", run_dir, "run directory written by train")->required();
  eval->add_option("--episodes", eval_episodes, "number of evaluation episodes");
  auto* eval_eps_opt =
      eval->add_option("--eval-epsilon", eval_epsilon, "exploration rate during evaluation");
  auto* eval_seed_opt = eval->add_option("--seed", seed, "evaluation seed");

  std::string repro_config, repro_out = "repro_out";
  bool plot = false;
  int threads = 0;
  auto* repro = app.add_subcommand(
      "reproduce", "run both agents on both conditions and emit tables and traces");
  repro->add_option("--config", repro_config, "experiment config file")->required();
  repro->add_option("--out", repro_out, "output directory (default repro_out)");
  auto* repro_seed = repro->add_option("--seed", seed, "override base seed");
  repro->add_flag("--plot", plot, "also write trace.svg");
  repro->add_option("--threads", threads, "worker threads (default: hardware)");

  std::string inspect_dir;
  auto* inspect = app.add_subcommand("inspect", "print estimator tables and greedy policy");
  inspect->add_option("--run", inspect_dir, "run directory written by train")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (causes->parsed())
      return cmd_causes(model_path, context_str, phi_str, max_conjuncts, csv);
    if (train->parsed())
      return cmd_train(config_path, agent_name, seed, train_seed->count() > 0, out_dir);
    if (eval->parsed())
      return cmd_eval(run_dir, eval_episodes, eval_epsilon, eval_eps_opt->count() > 0, seed,
                      eval_seed_opt->count() > 0);
    if (repro->parsed())
      return cmd_reproduce(repro_config, repro_out, seed, repro_seed->count() > 0, plot,
                           threads);
    if (inspect->parsed()) return cmd_inspect(inspect_dir);
  } catch (const acrl::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
