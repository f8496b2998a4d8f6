#pragma once

#include <optional>
#include <string>
#include <vector>

#include "acrl/scm.hpp"

namespace acrl {

struct ParseDiagnostic {
  enum class Severity { Error };
  Severity severity = Severity::Error;
  std::string message;
  int line = 1;    // 1-based
  int column = 1;  // 1-based
  int length = 1;  // characters covered, >= 1
};

template <typename T>
struct ParseResult {
  std::optional<T> value;
  std::vector<ParseDiagnostic> diagnostics;

  bool ok() const { return value.has_value(); }
};

/// "file.scm:3:7: error: message"
std::string format_diagnostic(const std::string& source_name, const ParseDiagnostic& d);

/// Model description:
///   exo NAME in {v, ...};
///   endo NAME in {v, ...};
///   NAME := expression;
/// '#' starts a comment. Expressions use +, -, *, ==, !=, <, <=, and, or,
/// not, max(a,b), min(a,b), indicator(cond), if(cond, a, b) with C-like
/// precedence. Never throws on bad input; failures come back as diagnostics.
ParseResult<CausalModel> parse_model(const std::string& text);

/// Query string over a parsed model:
///   [A <- 0, P <- 1](F = 1 & !(C = 2) | A = 0)
/// The intervention prefix is optional.
ParseResult<CausalFormula> parse_formula(const std::string& text, const CausalModel& model);

/// "U_A=2,U_P=1" -> total context over the model's exogenous variables.
ParseResult<Context> parse_context(const std::string& text, const CausalModel& model);

/// Inverse of parse_model up to formatting: the reparse evaluates identically
/// on every context.
std::string serialize_model(const CausalModel& model);

}  // namespace acrl
