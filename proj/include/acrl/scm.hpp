#pragma once

#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "acrl/expr.hpp"

namespace acrl {

struct ModelError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Thrown when equation dependencies form a cycle; carries the variables involved.
struct ModelCycleError : ModelError {
  ModelCycleError(std::string msg, std::vector<std::string> vars)
      : ModelError(std::move(msg)), cycle_vars(std::move(vars)) {}
  std::vector<std::string> cycle_vars;
};

struct EvaluationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class VarKind { Exogenous, Endogenous };

struct Variable {
  std::string name;
  VarKind kind;
  std::vector<int> range;  // finite, ordered, no duplicates

  bool admits(int v) const;
};

/// One value per variable, indexed like CausalModel::variables().
using Valuation = std::vector<int>;

/// Total assignment to the exogenous variables, in model exogenous order.
struct Context {
  std::vector<int> values;
};

struct Intervention {
  int var;  // global index of an endogenous variable
  int value;
};

struct PrimitiveEvent {
  int var;  // global index of an endogenous variable
  int value;
  bool operator==(const PrimitiveEvent&) const = default;
};

/// Boolean combination of primitive events over endogenous variables.
class Formula {
 public:
  enum class Kind { Event, Not, And, Or };

  static Formula event(PrimitiveEvent e);
  static Formula negation(Formula f);
  static Formula conjunction(Formula lhs, Formula rhs);
  static Formula disjunction(Formula lhs, Formula rhs);

  Kind kind() const { return kind_; }
  const PrimitiveEvent& leaf() const { return event_; }
  const std::vector<Formula>& children() const { return children_; }

  bool eval(const Valuation& values) const;
  void collect_vars(std::vector<int>& out) const;  // first appearance, deduped

 private:
  Kind kind_ = Kind::Event;
  PrimitiveEvent event_{-1, 0};
  std::vector<Formula> children_;
};

/// [Y1 <- y1, ...] phi. Interventions may be empty.
struct CausalFormula {
  std::vector<Intervention> interventions;
  Formula body;
};

struct StructuralEquation {
  int target;               // endogenous variable (global index)
  std::vector<int> inputs;  // variables referenced by body, first-appearance order
  ExprPtr body;
};

/// Acyclic structural causal model: a signature of exogenous/endogenous
/// variables with finite integer ranges, plus one equation per endogenous
/// variable. Immutable after construction; evaluation order is fixed once.
class CausalModel {
 public:
  /// Validates names, ranges, equation coverage and acyclicity; computes the
  /// topological evaluation order. Throws ModelError / ModelCycleError.
  static CausalModel build(std::vector<Variable> vars,
                           std::vector<StructuralEquation> equations);

  const std::vector<Variable>& variables() const { return vars_; }
  const std::vector<int>& exogenous() const { return exo_; }
  const std::vector<int>& endogenous() const { return endo_; }
  const std::vector<StructuralEquation>& equations() const { return equations_; }
  const std::vector<int>& topo_order() const { return topo_; }

  int var_index(std::string_view name) const;  // -1 if absent
  const StructuralEquation& equation_for(int endo_var) const;
  int exo_position(int var) const;   // position within exogenous(), -1 otherwise
  int endo_position(int var) const;  // position within endogenous(), -1 otherwise

  /// Unique endogenous values implied by the context; exogenous slots are
  /// copied through. Throws EvaluationError if an equation leaves its range.
  Valuation evaluate(const Context& context) const;

  /// New model with each intervened equation replaced by a constant.
  CausalModel intervene(std::span<const Intervention> interventions) const;

  bool satisfies(const Context& context, const CausalFormula& cf) const;

  Context make_context(std::initializer_list<std::pair<std::string_view, int>> values) const;
  std::string label(const PrimitiveEvent& e) const;  // "A=2"

 private:
  CausalModel() = default;

  std::vector<Variable> vars_;
  std::vector<int> exo_;
  std::vector<int> endo_;
  std::vector<int> exo_pos_;   // per variable, -1 for endogenous
  std::vector<int> endo_pos_;  // per variable, -1 for exogenous
  std::vector<StructuralEquation> equations_;  // aligned with endo_
  std::vector<int> topo_;                      // endogenous vars, evaluation order
};

inline bool event_holds(const Valuation& values, const PrimitiveEvent& e) {
  return values[e.var] == e.value;
}

/// All contexts of a model, odometer order over exogenous ranges.
/// Exponential in the number of exogenous variables; meant for small models.
std::vector<Context> enumerate_contexts(const CausalModel& model);

}  // namespace acrl
