#pragma once

#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "acrl/parser.hpp"
#include "acrl/scm.hpp"

namespace acrl::testing {

inline std::string source_path(const std::string& relative) {
  return std::string(ACRL_SOURCE_DIR) + "/" + relative;
}

inline std::string read_text(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline CausalModel load_camping_model() {
  auto parsed = parse_model(read_text(source_path("models/camping.scm")));
  if (!parsed.ok()) throw std::runtime_error("camping.scm failed to parse");
  return std::move(*parsed.value);
}

// Random acyclic model over binary endogenous variables. Equation bodies are
// truth tables rendered as or-of-and rows so the expression evaluator gets
// exercised along the way.
inline CausalModel random_binary_model(std::mt19937_64& rng, int max_endo = 4,
                                       int max_exo = 2) {
  std::uniform_int_distribution<int> endo_count(2, max_endo);
  std::uniform_int_distribution<int> exo_count(1, max_exo);
  std::uniform_int_distribution<int> coin(0, 1);

  const int n_exo = exo_count(rng);
  const int n_endo = endo_count(rng);

  std::vector<Variable> vars;
  for (int k = 0; k < n_exo; ++k)
    vars.push_back({"U" + std::to_string(k), VarKind::Exogenous, {0, 1}});
  for (int k = 0; k < n_endo; ++k)
    vars.push_back({"X" + std::to_string(k), VarKind::Endogenous, {0, 1}});

  std::vector<StructuralEquation> eqs;
  for (int k = 0; k < n_endo; ++k) {
    const int target = n_exo + k;
    // Parents come from the exogenous variables and earlier endogenous ones.
    std::vector<int> parents;
    for (int p = 0; p < n_exo + k; ++p)
      if (coin(rng) && parents.size() < 3) parents.push_back(p);
    if (parents.empty() && n_exo + k > 0) {
      std::uniform_int_distribution<int> pick(0, n_exo + k - 1);
      parents.push_back(pick(rng));
    }

    const size_t rows = size_t{1} << parents.size();
    ExprPtr body;
    for (size_t row = 0; row < rows; ++row) {
      if (!coin(rng)) continue;  // this input combination maps to 0
      ExprPtr term;
      for (size_t p = 0; p < parents.size(); ++p) {
        const int bit = (row >> p) & 1;
        ExprPtr eq = Expr::binary(BinOp::Eq, Expr::var(parents[p], vars[parents[p]].name),
                                  Expr::constant(bit));
        term = term ? Expr::binary(BinOp::And, term, eq) : eq;
      }
      if (!term) term = Expr::constant(1);  // no parents: constant row
      body = body ? Expr::binary(BinOp::Or, body, term) : term;
    }
    if (!body) body = Expr::constant(0);
    eqs.push_back({target, {}, body});
  }
  return CausalModel::build(std::move(vars), std::move(eqs));
}

inline Context random_context(const CausalModel& model, std::mt19937_64& rng) {
  Context ctx;
  for (int var : model.exogenous()) {
    const auto& range = model.variables()[var].range;
    std::uniform_int_distribution<size_t> pick(0, range.size() - 1);
    ctx.values.push_back(range[pick(rng)]);
  }
  return ctx;
}

}  // namespace acrl::testing
