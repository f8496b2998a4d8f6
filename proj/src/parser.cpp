#include "acrl/parser.hpp"

#include <algorithm>
#include <cctype>
#include <map>

namespace acrl {

namespace {

enum class Tok {
  End, Ident, Int,
  KwExo, KwEndo, KwIn, KwNot, KwAnd, KwOr, KwMax, KwMin, KwIndicator, KwIf,
  LBrace, RBrace, LParen, RParen, LBracket, RBracket,
  Comma, Semi, Assign,   // :=
  Arrow,                 // <-
  Eq,                    // =
  EqEq, Ne, Lt, Le, Plus, Minus, Star, Amp, Pipe, Bang,
  Error,
};

struct Token {
  Tok kind = Tok::End;
  std::string text;
  long value = 0;  // Int
  int line = 1, column = 1, length = 1;
};

const std::map<std::string, Tok, std::less<>> kKeywords = {
    {"exo", Tok::KwExo},   {"endo", Tok::KwEndo},           {"in", Tok::KwIn},
    {"not", Tok::KwNot},   {"and", Tok::KwAnd},             {"or", Tok::KwOr},
    {"max", Tok::KwMax},   {"min", Tok::KwMin},             {"indicator", Tok::KwIndicator},
    {"if", Tok::KwIf},
};

std::vector<Token> lex(const std::string& text, std::vector<ParseDiagnostic>& diags) {
  std::vector<Token> out;
  int line = 1, col = 1;
  size_t i = 0;
  const size_t n = text.size();
  auto advance = [&](size_t count) {
    for (size_t k = 0; k < count && i < n; ++k, ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };
  auto push = [&](Tok kind, int tl, int tc, size_t len, std::string s = {}) {
    Token t;
    t.kind = kind;
    t.text = std::move(s);
    t.line = tl;
    t.column = tc;
    t.length = static_cast<int>(len);
    out.push_back(std::move(t));
  };

  while (i < n) {
    const char c = text[i];
    if (c == '\r' || c == '\n' || c == ' ' || c == '\t') {
      advance(1);
      continue;
    }
    if (c == '#') {
      while (i < n && text[i] != '\n') advance(1);
      continue;
    }
    const int tl = line, tc = col;
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      size_t j = i;
      while (j < n && (std::isalnum(static_cast<unsigned char>(text[j])) || text[j] == '_')) ++j;
      std::string word = text.substr(i, j - i);
      advance(j - i);
      auto kw = kKeywords.find(word);
      if (kw != kKeywords.end())
        push(kw->second, tl, tc, word.size(), word);
      else
        push(Tok::Ident, tl, tc, word.size(), word);
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      size_t j = i;
      while (j < n && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
      std::string digits = text.substr(i, j - i);
      advance(j - i);
      Token t;
      t.kind = Tok::Int;
      t.text = digits;
      t.line = tl;
      t.column = tc;
      t.length = static_cast<int>(digits.size());
      try {
        t.value = std::stol(digits);
      } catch (const std::exception&) {
        diags.push_back({ParseDiagnostic::Severity::Error, "integer literal out of range",
                         tl, tc, t.length});
        t.kind = Tok::Error;
      }
      out.push_back(std::move(t));
      continue;
    }
    auto two = [&](char second) { return i + 1 < n && text[i + 1] == second; };
    switch (c) {
      case '{': push(Tok::LBrace, tl, tc, 1); advance(1); continue;
      case '}': push(Tok::RBrace, tl, tc, 1); advance(1); continue;
      case '(': push(Tok::LParen, tl, tc, 1); advance(1); continue;
      case ')': push(Tok::RParen, tl, tc, 1); advance(1); continue;
      case '[': push(Tok::LBracket, tl, tc, 1); advance(1); continue;
      case ']': push(Tok::RBracket, tl, tc, 1); advance(1); continue;
      case ',': push(Tok::Comma, tl, tc, 1); advance(1); continue;
      case ';': push(Tok::Semi, tl, tc, 1); advance(1); continue;
      case '+': push(Tok::Plus, tl, tc, 1); advance(1); continue;
      case '-': push(Tok::Minus, tl, tc, 1); advance(1); continue;
      case '*': push(Tok::Star, tl, tc, 1); advance(1); continue;
      case '&': push(Tok::Amp, tl, tc, 1); advance(1); continue;
      case '|': push(Tok::Pipe, tl, tc, 1); advance(1); continue;
      case ':':
        if (two('=')) {
          push(Tok::Assign, tl, tc, 2);
          advance(2);
        } else {
          diags.push_back({ParseDiagnostic::Severity::Error, "expected ':=' after ':'", tl, tc, 1});
          push(Tok::Error, tl, tc, 1);
          advance(1);
        }
        continue;
      case '<':
        if (two('-')) {
          push(Tok::Arrow, tl, tc, 2);
          advance(2);
        } else if (two('=')) {
          push(Tok::Le, tl, tc, 2);
          advance(2);
        } else {
          push(Tok::Lt, tl, tc, 1);
          advance(1);
        }
        continue;
      case '=':
        if (two('=')) {
          push(Tok::EqEq, tl, tc, 2);
          advance(2);
        } else {
          push(Tok::Eq, tl, tc, 1);
          advance(1);
        }
        continue;
      case '!':
        if (two('=')) {
          push(Tok::Ne, tl, tc, 2);
          advance(2);
        } else {
          push(Tok::Bang, tl, tc, 1);
          advance(1);
        }
        continue;
      default:
        diags.push_back({ParseDiagnostic::Severity::Error,
                         std::string("unexpected character '") + c + "'", tl, tc, 1});
        push(Tok::Error, tl, tc, 1);
        advance(1);
        continue;
    }
  }
  Token end;
  end.kind = Tok::End;
  end.line = line;
  end.column = col;
  out.push_back(end);
  return out;
}

ParseDiagnostic error_at(const Token& t, std::string msg) {
  return {ParseDiagnostic::Severity::Error, std::move(msg), t.line, t.column,
          std::max(1, t.length)};
}

// Recursive-descent expression parser over a token window. Variable names are
// resolved against `names` (name -> global index); unknown names produce a
// diagnostic and a poisoned (null) subtree.
class ExprParser {
 public:
  ExprParser(const std::vector<Token>& toks, size_t begin, size_t end,
             const std::map<std::string, int, std::less<>>& names,
             std::vector<ParseDiagnostic>& diags)
      : toks_(toks), pos_(begin), end_(end), names_(names), diags_(diags) {}

  ExprPtr parse() {
    ExprPtr e = parse_or();
    if (!failed_ && pos_ != end_)
      fail(cur(), "unexpected token '" + describe(cur()) + "' in expression");
    return failed_ ? nullptr : e;
  }

 private:
  const Token& cur() const { return toks_[std::min(pos_, end_)]; }
  bool at(Tok k) const { return pos_ < end_ && toks_[pos_].kind == k; }
  const Token& take() { return toks_[pos_++]; }
  void fail(const Token& t, std::string msg) {
    if (!failed_) diags_.push_back(error_at(t, std::move(msg)));
    failed_ = true;
  }
  bool expect(Tok k, const char* what) {
    if (at(k)) {
      ++pos_;
      return true;
    }
    fail(cur(), std::string("expected ") + what);
    return false;
  }

  ExprPtr parse_or() {
    ExprPtr lhs = parse_and();
    while (at(Tok::KwOr)) {
      take();
      lhs = Expr::binary(BinOp::Or, lhs, parse_and());
    }
    return lhs;
  }
  ExprPtr parse_and() {
    ExprPtr lhs = parse_equality();
    while (at(Tok::KwAnd)) {
      take();
      lhs = Expr::binary(BinOp::And, lhs, parse_equality());
    }
    return lhs;
  }
  ExprPtr parse_equality() {
    ExprPtr lhs = parse_relational();
    while (at(Tok::EqEq) || at(Tok::Ne)) {
      const BinOp op = take().kind == Tok::EqEq ? BinOp::Eq : BinOp::Ne;
      lhs = Expr::binary(op, lhs, parse_relational());
    }
    return lhs;
  }
  ExprPtr parse_relational() {
    ExprPtr lhs = parse_additive();
    while (at(Tok::Lt) || at(Tok::Le)) {
      const BinOp op = take().kind == Tok::Lt ? BinOp::Lt : BinOp::Le;
      lhs = Expr::binary(op, lhs, parse_additive());
    }
    return lhs;
  }
  ExprPtr parse_additive() {
    ExprPtr lhs = parse_multiplicative();
    while (at(Tok::Plus) || at(Tok::Minus)) {
      const BinOp op = take().kind == Tok::Plus ? BinOp::Add : BinOp::Sub;
      lhs = Expr::binary(op, lhs, parse_multiplicative());
    }
    return lhs;
  }
  ExprPtr parse_multiplicative() {
    ExprPtr lhs = parse_unary();
    while (at(Tok::Star)) {
      take();
      lhs = Expr::binary(BinOp::Mul, lhs, parse_unary());
    }
    return lhs;
  }
  ExprPtr parse_unary() {
    if (at(Tok::KwNot)) {
      take();
      return Expr::logical_not(parse_unary());
    }
    if (at(Tok::Minus)) {
      // Negative literals only; general unary minus is not part of the grammar.
      const Token& minus = take();
      if (at(Tok::Int)) {
        const Token& t = take();
        return Expr::constant(static_cast<int>(-t.value));
      }
      fail(minus, "'-' must be followed by an integer literal");
      return nullptr;
    }
    return parse_primary();
  }
  ExprPtr parse_primary() {
    if (at(Tok::Int)) {
      const Token& t = take();
      return Expr::constant(static_cast<int>(t.value));
    }
    if (at(Tok::Ident)) {
      const Token& t = take();
      auto it = names_.find(t.text);
      if (it == names_.end()) {
        fail(t, "unknown variable '" + t.text + "'");
        return nullptr;
      }
      return Expr::var(it->second, t.text);
    }
    if (at(Tok::LParen)) {
      take();
      ExprPtr e = parse_or();
      expect(Tok::RParen, "')'");
      return e;
    }
    if (at(Tok::KwMax) || at(Tok::KwMin)) {
      const bool is_max = take().kind == Tok::KwMax;
      expect(Tok::LParen, "'('");
      ExprPtr a = parse_or();
      expect(Tok::Comma, "','");
      ExprPtr b = parse_or();
      expect(Tok::RParen, "')'");
      return is_max ? Expr::max2(a, b) : Expr::min2(a, b);
    }
    if (at(Tok::KwIndicator)) {
      take();
      expect(Tok::LParen, "'('");
      ExprPtr a = parse_or();
      expect(Tok::RParen, "')'");
      return Expr::indicator(a);
    }
    if (at(Tok::KwIf)) {
      take();
      expect(Tok::LParen, "'('");
      ExprPtr a = parse_or();
      expect(Tok::Comma, "','");
      ExprPtr b = parse_or();
      expect(Tok::Comma, "','");
      ExprPtr c = parse_or();
      expect(Tok::RParen, "')'");
      return Expr::if_else(a, b, c);
    }
    fail(cur(), pos_ >= end_ ? "unexpected end of expression"
                             : "unexpected token '" + describe(cur()) + "'");
    return nullptr;
  }

  static std::string describe(const Token& t) {
    return t.text.empty() ? "?" : t.text;
  }

  const std::vector<Token>& toks_;
  size_t pos_, end_;
  const std::map<std::string, int, std::less<>>& names_;
  std::vector<ParseDiagnostic>& diags_;
  bool failed_ = false;
};

struct PendingEquation {
  Token target;
  size_t expr_begin = 0, expr_end = 0;  // token window, exclusive of ';'
};

}  // namespace

std::string format_diagnostic(const std::string& source_name, const ParseDiagnostic& d) {
  return source_name + ":" + std::to_string(d.line) + ":" + std::to_string(d.column) +
         ": error: " + d.message;
}

ParseResult<CausalModel> parse_model(const std::string& text) {
  ParseResult<CausalModel> result;
  auto& diags = result.diagnostics;
  const std::vector<Token> toks = lex(text, diags);

  std::vector<Variable> vars;
  std::map<std::string, int, std::less<>> names;
  std::map<std::string, Token, std::less<>> decl_tokens;
  std::vector<PendingEquation> pending;

  size_t i = 0;
  auto skip_statement = [&] {
    while (toks[i].kind != Tok::Semi && toks[i].kind != Tok::End) ++i;
    if (toks[i].kind == Tok::Semi) ++i;
  };

  // Pass 1: declarations are resolved immediately; equation bodies are kept
  // as token windows so variables declared later in the file still resolve.
  while (toks[i].kind != Tok::End) {
    if (toks[i].kind == Tok::KwExo || toks[i].kind == Tok::KwEndo) {
      const VarKind kind = toks[i].kind == Tok::KwExo ? VarKind::Exogenous : VarKind::Endogenous;
      ++i;
      if (toks[i].kind != Tok::Ident) {
        diags.push_back(error_at(toks[i], "expected variable name"));
        skip_statement();
        continue;
      }
      const Token name_tok = toks[i++];
      if (toks[i].kind != Tok::KwIn) {
        diags.push_back(error_at(toks[i], "expected 'in' after variable name"));
        skip_statement();
        continue;
      }
      ++i;
      if (toks[i].kind != Tok::LBrace) {
        diags.push_back(error_at(toks[i], "expected '{' to open the range"));
        skip_statement();
        continue;
      }
      ++i;
      std::vector<int> range;
      bool range_ok = true;
      while (true) {
        int sign = 1;
        if (toks[i].kind == Tok::Minus) {
          sign = -1;
          ++i;
        }
        if (toks[i].kind != Tok::Int) {
          diags.push_back(error_at(toks[i], "expected integer range value"));
          range_ok = false;
          break;
        }
        range.push_back(sign * static_cast<int>(toks[i].value));
        ++i;
        if (toks[i].kind == Tok::Comma) {
          ++i;
          continue;
        }
        break;
      }
      if (!range_ok) {
        skip_statement();
        continue;
      }
      if (toks[i].kind != Tok::RBrace) {
        diags.push_back(error_at(toks[i], "expected '}' to close the range"));
        skip_statement();
        continue;
      }
      ++i;
      if (toks[i].kind != Tok::Semi) {
        diags.push_back(error_at(toks[i], "expected ';' after declaration"));
        skip_statement();
        continue;
      }
      ++i;
      if (names.count(name_tok.text)) {
        diags.push_back(error_at(name_tok, "duplicate variable '" + name_tok.text + "'"));
        continue;
      }
      for (size_t a = 0; a < range.size(); ++a)
        for (size_t b = a + 1; b < range.size(); ++b)
          if (range[a] == range[b]) {
            diags.push_back(error_at(name_tok, "duplicate range value " +
                                                   std::to_string(range[a]) + " for '" +
                                                   name_tok.text + "'"));
            range.erase(range.begin() + static_cast<long>(b));
            --b;
          }
      names[name_tok.text] = static_cast<int>(vars.size());
      decl_tokens.emplace(name_tok.text, name_tok);
      vars.push_back(Variable{name_tok.text, kind, std::move(range)});
      continue;
    }
    if (toks[i].kind == Tok::Ident) {
      const Token target = toks[i++];
      if (toks[i].kind != Tok::Assign) {
        diags.push_back(error_at(toks[i], "expected ':=' after '" + target.text + "'"));
        skip_statement();
        continue;
      }
      ++i;
      const size_t begin = i;
      while (toks[i].kind != Tok::Semi && toks[i].kind != Tok::End) ++i;
      const size_t end = i;
      if (toks[i].kind != Tok::Semi) {
        diags.push_back(error_at(toks[i], "expected ';' after equation"));
      } else {
        ++i;
      }
      if (end == begin) {
        diags.push_back(error_at(target, "empty equation body for '" + target.text + "'"));
        continue;
      }
      pending.push_back({target, begin, end});
      continue;
    }
    diags.push_back(error_at(toks[i], "expected a declaration or an equation"));
    skip_statement();
  }

  // Pass 2: resolve equations now that the whole signature is known.
  std::vector<StructuralEquation> equations;
  std::map<std::string, bool, std::less<>> has_equation;
  for (const auto& pe : pending) {
    auto it = names.find(pe.target.text);
    if (it == names.end()) {
      diags.push_back(error_at(pe.target, "equation for undeclared variable '" +
                                              pe.target.text + "'"));
      continue;
    }
    if (vars[it->second].kind == VarKind::Exogenous) {
      diags.push_back(error_at(pe.target, "equation for exogenous variable '" +
                                              pe.target.text + "'"));
      continue;
    }
    if (has_equation[pe.target.text]) {
      diags.push_back(error_at(pe.target, "duplicate equation for '" + pe.target.text + "'"));
      continue;
    }
    ExprParser ep(toks, pe.expr_begin, pe.expr_end, names, diags);
    ExprPtr body = ep.parse();
    if (!body) continue;
    has_equation[pe.target.text] = true;
    equations.push_back(StructuralEquation{it->second, {}, std::move(body)});
  }
  for (size_t v = 0; v < vars.size(); ++v) {
    if (vars[v].kind == VarKind::Endogenous && !has_equation[vars[v].name]) {
      // Only report a missing equation when the body didn't already fail.
      bool attempted = false;
      for (const auto& pe : pending)
        if (pe.target.text == vars[v].name) attempted = true;
      if (!attempted)
        diags.push_back(error_at(decl_tokens.at(vars[v].name),
                                 "endogenous variable '" + vars[v].name +
                                     "' has no structural equation"));
    }
  }

  if (!diags.empty()) return result;

  try {
    result.value = CausalModel::build(std::move(vars), std::move(equations));
  } catch (const ModelCycleError& e) {
    // Anchor the diagnostic at the first equation involved in the cycle.
    ParseDiagnostic d{ParseDiagnostic::Severity::Error, e.what(), 1, 1, 1};
    for (const auto& pe : pending) {
      if (std::find(e.cycle_vars.begin(), e.cycle_vars.end(), pe.target.text) !=
          e.cycle_vars.end()) {
        d = error_at(pe.target, e.what());
        break;
      }
    }
    diags.push_back(std::move(d));
  } catch (const ModelError& e) {
    diags.push_back({ParseDiagnostic::Severity::Error, e.what(), 1, 1, 1});
  }
  return result;
}

namespace {

// Shared primitive-event reader for formulas: NAME = INT (== tolerated).
std::optional<PrimitiveEvent> parse_event(const std::vector<Token>& toks, size_t& i,
                                          const CausalModel& model,
                                          std::vector<ParseDiagnostic>& diags) {
  if (toks[i].kind != Tok::Ident) {
    diags.push_back(error_at(toks[i], "expected variable name"));
    return std::nullopt;
  }
  const Token name = toks[i++];
  const int idx = model.var_index(name.text);
  if (idx < 0) {
    diags.push_back(error_at(name, "unknown variable '" + name.text + "'"));
    return std::nullopt;
  }
  if (model.variables()[idx].kind != VarKind::Endogenous) {
    diags.push_back(error_at(name, "'" + name.text + "' is exogenous; events range over "
                                   "endogenous variables"));
    return std::nullopt;
  }
  if (toks[i].kind != Tok::Eq && toks[i].kind != Tok::EqEq) {
    diags.push_back(error_at(toks[i], "expected '=' after '" + name.text + "'"));
    return std::nullopt;
  }
  ++i;
  int sign = 1;
  if (toks[i].kind == Tok::Minus) {
    sign = -1;
    ++i;
  }
  if (toks[i].kind != Tok::Int) {
    diags.push_back(error_at(toks[i], "expected integer value"));
    return std::nullopt;
  }
  const int value = sign * static_cast<int>(toks[i].value);
  if (!model.variables()[idx].admits(value)) {
    diags.push_back(error_at(toks[i], "value " + std::to_string(value) +
                                          " outside range of '" + name.text + "'"));
    ++i;
    return std::nullopt;
  }
  ++i;
  return PrimitiveEvent{idx, value};
}

class FormulaParser {
 public:
  FormulaParser(const std::vector<Token>& toks, const CausalModel& model,
                std::vector<ParseDiagnostic>& diags)
      : toks_(toks), model_(model), diags_(diags) {}

  std::optional<Formula> parse(size_t& i) {
    auto f = parse_or(i);
    return f;
  }

 private:
  std::optional<Formula> parse_or(size_t& i) {
    auto lhs = parse_and(i);
    if (!lhs) return std::nullopt;
    while (toks_[i].kind == Tok::Pipe) {
      ++i;
      auto rhs = parse_and(i);
      if (!rhs) return std::nullopt;
      lhs = Formula::disjunction(std::move(*lhs), std::move(*rhs));
    }
    return lhs;
  }
  std::optional<Formula> parse_and(size_t& i) {
    auto lhs = parse_not(i);
    if (!lhs) return std::nullopt;
    while (toks_[i].kind == Tok::Amp) {
      ++i;
      auto rhs = parse_not(i);
      if (!rhs) return std::nullopt;
      lhs = Formula::conjunction(std::move(*lhs), std::move(*rhs));
    }
    return lhs;
  }
  std::optional<Formula> parse_not(size_t& i) {
    if (toks_[i].kind == Tok::Bang) {
      ++i;
      auto inner = parse_not(i);
      if (!inner) return std::nullopt;
      return Formula::negation(std::move(*inner));
    }
    if (toks_[i].kind == Tok::LParen) {
      ++i;
      auto inner = parse_or(i);
      if (!inner) return std::nullopt;
      if (toks_[i].kind != Tok::RParen) {
        diags_.push_back(error_at(toks_[i], "expected ')'"));
        return std::nullopt;
      }
      ++i;
      return inner;
    }
    auto ev = parse_event(toks_, i, model_, diags_);
    if (!ev) return std::nullopt;
    return Formula::event(*ev);
  }

  const std::vector<Token>& toks_;
  const CausalModel& model_;
  std::vector<ParseDiagnostic>& diags_;
};

}  // namespace

ParseResult<CausalFormula> parse_formula(const std::string& text, const CausalModel& model) {
  ParseResult<CausalFormula> result;
  auto& diags = result.diagnostics;
  const std::vector<Token> toks = lex(text, diags);
  if (!diags.empty()) return result;

  CausalFormula cf;
  size_t i = 0;
  if (toks[i].kind == Tok::LBracket) {
    ++i;
    while (true) {
      if (toks[i].kind != Tok::Ident) {
        diags.push_back(error_at(toks[i], "expected variable name in intervention"));
        return result;
      }
      const Token name = toks[i++];
      const int idx = model.var_index(name.text);
      if (idx < 0) {
        diags.push_back(error_at(name, "unknown variable '" + name.text + "'"));
        return result;
      }
      if (model.variables()[idx].kind != VarKind::Endogenous) {
        diags.push_back(error_at(name, "cannot intervene on exogenous variable '" +
                                           name.text + "'"));
        return result;
      }
      if (toks[i].kind != Tok::Arrow) {
        diags.push_back(error_at(toks[i], "expected '<-' in intervention"));
        return result;
      }
      ++i;
      int sign = 1;
      if (toks[i].kind == Tok::Minus) {
        sign = -1;
        ++i;
      }
      if (toks[i].kind != Tok::Int) {
        diags.push_back(error_at(toks[i], "expected integer value in intervention"));
        return result;
      }
      const int value = sign * static_cast<int>(toks[i].value);
      if (!model.variables()[idx].admits(value)) {
        diags.push_back(error_at(toks[i], "value " + std::to_string(value) +
                                              " outside range of '" + name.text + "'"));
        return result;
      }
      ++i;
      for (const auto& iv : cf.interventions)
        if (iv.var == idx) {
          diags.push_back(error_at(name, "duplicate intervention on '" + name.text + "'"));
          return result;
        }
      cf.interventions.push_back({idx, value});
      if (toks[i].kind == Tok::Comma) {
        ++i;
        continue;
      }
      break;
    }
    if (toks[i].kind != Tok::RBracket) {
      diags.push_back(error_at(toks[i], "expected ']' after interventions"));
      return result;
    }
    ++i;
  }

  FormulaParser fp(toks, model, diags);
  auto body = fp.parse(i);
  if (!body) return result;
  if (toks[i].kind != Tok::End) {
    diags.push_back(error_at(toks[i], "unexpected trailing input"));
    return result;
  }
  cf.body = std::move(*body);
  result.value = std::move(cf);
  return result;
}

ParseResult<Context> parse_context(const std::string& text, const CausalModel& model) {
  ParseResult<Context> result;
  auto& diags = result.diagnostics;
  const std::vector<Token> toks = lex(text, diags);
  if (!diags.empty()) return result;

  Context ctx;
  ctx.values.assign(model.exogenous().size(), 0);
  std::vector<bool> set(model.exogenous().size(), false);
  size_t i = 0;
  while (toks[i].kind != Tok::End) {
    if (toks[i].kind != Tok::Ident) {
      diags.push_back(error_at(toks[i], "expected exogenous variable name"));
      return result;
    }
    const Token name = toks[i++];
    const int idx = model.var_index(name.text);
    if (idx < 0) {
      diags.push_back(error_at(name, "unknown variable '" + name.text + "'"));
      return result;
    }
    const int pos = model.exo_position(idx);
    if (pos < 0) {
      diags.push_back(error_at(name, "'" + name.text + "' is not exogenous"));
      return result;
    }
    if (toks[i].kind != Tok::Eq && toks[i].kind != Tok::EqEq) {
      diags.push_back(error_at(toks[i], "expected '=' after '" + name.text + "'"));
      return result;
    }
    ++i;
    int sign = 1;
    if (toks[i].kind == Tok::Minus) {
      sign = -1;
      ++i;
    }
    if (toks[i].kind != Tok::Int) {
      diags.push_back(error_at(toks[i], "expected integer value"));
      return result;
    }
    const int value = sign * static_cast<int>(toks[i].value);
    if (!model.variables()[idx].admits(value)) {
      diags.push_back(error_at(toks[i], "value " + std::to_string(value) +
                                            " outside range of '" + name.text + "'"));
      return result;
    }
    ++i;
    if (set[pos]) {
      diags.push_back(error_at(name, "'" + name.text + "' assigned twice"));
      return result;
    }
    ctx.values[pos] = value;
    set[pos] = true;
    if (toks[i].kind == Tok::Comma) {
      ++i;
      continue;
    }
  }
  for (size_t k = 0; k < set.size(); ++k) {
    if (!set[k]) {
      diags.push_back({ParseDiagnostic::Severity::Error,
                       "context missing value for '" +
                           model.variables()[model.exogenous()[k]].name + "'",
                       1, 1, 1});
      return result;
    }
  }
  result.value = std::move(ctx);
  return result;
}

std::string serialize_model(const CausalModel& model) {
  std::string out;
  for (const Variable& v : model.variables()) {
    out += v.kind == VarKind::Exogenous ? "exo " : "endo ";
    out += v.name + " in {";
    for (size_t k = 0; k < v.range.size(); ++k) {
      if (k) out += ", ";
      out += std::to_string(v.range[k]);
    }
    out += "};\n";
  }
  if (!model.endogenous().empty()) out += "\n";
  for (int var : model.endogenous()) {
    const StructuralEquation& eq = model.equation_for(var);
    out += model.variables()[var].name + " := " + eq.body->to_string() + ";\n";
  }
  return out;
}

}  // namespace acrl
