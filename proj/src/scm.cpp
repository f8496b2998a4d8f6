#include "acrl/scm.hpp"

#include <algorithm>
#include <cassert>
#include <deque>

namespace acrl {

bool Variable::admits(int v) const {
  return std::find(range.begin(), range.end(), v) != range.end();
}

Formula Formula::event(PrimitiveEvent e) {
  Formula f;
  f.kind_ = Kind::Event;
  f.event_ = e;
  return f;
}

Formula Formula::negation(Formula inner) {
  Formula f;
  f.kind_ = Kind::Not;
  f.children_.push_back(std::move(inner));
  return f;
}

Formula Formula::conjunction(Formula lhs, Formula rhs) {
  Formula f;
  f.kind_ = Kind::And;
  f.children_.push_back(std::move(lhs));
  f.children_.push_back(std::move(rhs));
  return f;
}

Formula Formula::disjunction(Formula lhs, Formula rhs) {
  Formula f;
  f.kind_ = Kind::Or;
  f.children_.push_back(std::move(lhs));
  f.children_.push_back(std::move(rhs));
  return f;
}

bool Formula::eval(const Valuation& values) const {
  switch (kind_) {
    case Kind::Event:
      return event_holds(values, event_);
    case Kind::Not:
      return !children_[0].eval(values);
    case Kind::And:
      for (const auto& c : children_)
        if (!c.eval(values)) return false;
      return true;
    case Kind::Or:
      for (const auto& c : children_)
        if (c.eval(values)) return true;
      return false;
  }
  return false;
}

void Formula::collect_vars(std::vector<int>& out) const {
  if (kind_ == Kind::Event) {
    if (std::find(out.begin(), out.end(), event_.var) == out.end())
      out.push_back(event_.var);
    return;
  }
  for (const auto& c : children_) c.collect_vars(out);
}

CausalModel CausalModel::build(std::vector<Variable> vars,
                               std::vector<StructuralEquation> equations) {
  CausalModel m;
  m.vars_ = std::move(vars);

  const int n = static_cast<int>(m.vars_.size());
  m.exo_pos_.assign(n, -1);
  m.endo_pos_.assign(n, -1);
  for (int i = 0; i < n; ++i) {
    const Variable& v = m.vars_[i];
    if (v.name.empty()) throw ModelError("variable with empty name");
    if (v.range.empty()) throw ModelError("variable '" + v.name + "' has an empty range");
    for (size_t a = 0; a < v.range.size(); ++a)
      for (size_t b = a + 1; b < v.range.size(); ++b)
        if (v.range[a] == v.range[b])
          throw ModelError("variable '" + v.name + "' has duplicate range value " +
                           std::to_string(v.range[a]));
    for (int j = 0; j < i; ++j)
      if (m.vars_[j].name == v.name)
        throw ModelError("duplicate variable name '" + v.name + "'");
    if (v.kind == VarKind::Exogenous) {
      m.exo_pos_[i] = static_cast<int>(m.exo_.size());
      m.exo_.push_back(i);
    } else {
      m.endo_pos_[i] = static_cast<int>(m.endo_.size());
      m.endo_.push_back(i);
    }
  }

  m.equations_.resize(m.endo_.size());
  std::vector<bool> have(m.endo_.size(), false);
  for (auto& eq : equations) {
    if (eq.target < 0 || eq.target >= n)
      throw ModelError("equation for unknown variable index " + std::to_string(eq.target));
    const Variable& tv = m.vars_[eq.target];
    if (tv.kind != VarKind::Endogenous)
      throw ModelError("equation targets exogenous variable '" + tv.name + "'");
    const int pos = m.endo_pos_[eq.target];
    if (have[pos]) throw ModelError("duplicate equation for variable '" + tv.name + "'");
    if (!eq.body) throw ModelError("equation for '" + tv.name + "' has no body");
    std::vector<int> refs;
    eq.body->collect_vars(refs);
    for (int r : refs)
      if (r < 0 || r >= n)
        throw ModelError("equation for '" + tv.name + "' references unknown variable");
    eq.inputs = std::move(refs);
    have[pos] = true;
    m.equations_[pos] = std::move(eq);
  }
  for (size_t p = 0; p < have.size(); ++p)
    if (!have[p])
      throw ModelError("endogenous variable '" + m.vars_[m.endo_[p]].name +
                       "' has no structural equation");

  // Kahn's algorithm over endogenous dependencies.
  std::vector<int> indeg(m.endo_.size(), 0);
  std::vector<std::vector<int>> dependents(m.endo_.size());
  for (size_t p = 0; p < m.equations_.size(); ++p) {
    for (int input : m.equations_[p].inputs) {
      const int ip = m.endo_pos_[input];
      if (ip >= 0) {
        dependents[ip].push_back(static_cast<int>(p));
        ++indeg[p];
      }
    }
  }
  std::deque<int> ready;
  for (size_t p = 0; p < indeg.size(); ++p)
    if (indeg[p] == 0) ready.push_back(static_cast<int>(p));
  while (!ready.empty()) {
    const int p = ready.front();
    ready.pop_front();
    m.topo_.push_back(m.endo_[p]);
    for (int d : dependents[p])
      if (--indeg[d] == 0) ready.push_back(d);
  }
  if (m.topo_.size() != m.endo_.size()) {
    std::vector<std::string> cycle;
    for (size_t p = 0; p < indeg.size(); ++p)
      if (indeg[p] > 0) cycle.push_back(m.vars_[m.endo_[p]].name);
    std::string msg = "cyclic dependency among:";
    for (const auto& nme : cycle) msg += " " + nme;
    throw ModelCycleError(msg, std::move(cycle));
  }
  return m;
}

int CausalModel::var_index(std::string_view name) const {
  for (size_t i = 0; i < vars_.size(); ++i)
    if (vars_[i].name == name) return static_cast<int>(i);
  return -1;
}

const StructuralEquation& CausalModel::equation_for(int endo_var) const {
  const int p = endo_pos_.at(endo_var);
  if (p < 0) throw ModelError("variable '" + vars_[endo_var].name + "' is not endogenous");
  return equations_[p];
}

int CausalModel::exo_position(int var) const { return exo_pos_.at(var); }
int CausalModel::endo_position(int var) const { return endo_pos_.at(var); }

Valuation CausalModel::evaluate(const Context& context) const {
  if (context.values.size() != exo_.size())
    throw EvaluationError("context assigns " + std::to_string(context.values.size()) +
                          " exogenous variables, model has " + std::to_string(exo_.size()));
  Valuation values(vars_.size(), 0);
  for (size_t k = 0; k < exo_.size(); ++k) {
    const Variable& v = vars_[exo_[k]];
    if (!v.admits(context.values[k]))
      throw EvaluationError("context value " + std::to_string(context.values[k]) +
                            " outside range of '" + v.name + "'");
    values[exo_[k]] = context.values[k];
  }
  for (int var : topo_) {
    const StructuralEquation& eq = equations_[endo_pos_[var]];
    const int out = eq.body->eval(values);
    if (!vars_[var].admits(out))
      throw EvaluationError("equation for '" + vars_[var].name + "' produced " +
                            std::to_string(out) + ", outside its range");
    values[var] = out;
  }
  return values;
}

CausalModel CausalModel::intervene(std::span<const Intervention> interventions) const {
  CausalModel m = *this;
  std::vector<int> seen;
  for (const Intervention& iv : interventions) {
    if (iv.var < 0 || iv.var >= static_cast<int>(vars_.size()))
      throw ModelError("intervention on unknown variable index " + std::to_string(iv.var));
    const Variable& v = vars_[iv.var];
    if (v.kind != VarKind::Endogenous)
      throw ModelError("cannot intervene on exogenous variable '" + v.name + "'");
    if (!v.admits(iv.value))
      throw ModelError("intervention value " + std::to_string(iv.value) +
                       " outside range of '" + v.name + "'");
    if (std::find(seen.begin(), seen.end(), iv.var) != seen.end())
      throw ModelError("duplicate intervention on '" + v.name + "'");
    seen.push_back(iv.var);
    StructuralEquation& eq = m.equations_[endo_pos_[iv.var]];
    eq.body = Expr::constant(iv.value);
    eq.inputs.clear();
  }
  // Interventions only remove dependency edges, so the stored order stays valid.
  return m;
}

bool CausalModel::satisfies(const Context& context, const CausalFormula& cf) const {
  if (cf.interventions.empty()) return cf.body.eval(evaluate(context));
  return cf.body.eval(intervene(cf.interventions).evaluate(context));
}

Context CausalModel::make_context(
    std::initializer_list<std::pair<std::string_view, int>> values) const {
  Context ctx;
  ctx.values.assign(exo_.size(), 0);
  std::vector<bool> set(exo_.size(), false);
  for (const auto& [name, value] : values) {
    const int idx = var_index(name);
    if (idx < 0) throw ModelError("unknown variable '" + std::string(name) + "'");
    const int pos = exo_pos_[idx];
    if (pos < 0) throw ModelError("variable '" + std::string(name) + "' is not exogenous");
    ctx.values[pos] = value;
    set[pos] = true;
  }
  for (size_t k = 0; k < set.size(); ++k)
    if (!set[k])
      throw ModelError("context missing value for '" + vars_[exo_[k]].name + "'");
  return ctx;
}

std::string CausalModel::label(const PrimitiveEvent& e) const {
  return vars_.at(e.var).name + "=" + std::to_string(e.value);
}

std::vector<Context> enumerate_contexts(const CausalModel& model) {
  const auto& exo = model.exogenous();
  std::vector<Context> out;
  std::vector<size_t> odo(exo.size(), 0);
  while (true) {
    Context ctx;
    ctx.values.reserve(exo.size());
    for (size_t k = 0; k < exo.size(); ++k)
      ctx.values.push_back(model.variables()[exo[k]].range[odo[k]]);
    out.push_back(std::move(ctx));
    size_t k = 0;
    for (; k < exo.size(); ++k) {
      if (++odo[k] < model.variables()[exo[k]].range.size()) break;
      odo[k] = 0;
    }
    if (k == exo.size()) break;
  }
  return out;
}

}  // namespace acrl
