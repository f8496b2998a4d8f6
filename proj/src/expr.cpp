#include "acrl/expr.hpp"

#include <algorithm>
#include <cassert>

namespace acrl {

namespace {

// Larger value binds tighter. Mirrors the parser's precedence levels.
int precedence(const Expr& e) {
  switch (e.kind()) {
    case Expr::Kind::Binary:
      switch (e.op()) {
        case BinOp::Or: return 1;
        case BinOp::And: return 2;
        case BinOp::Eq:
        case BinOp::Ne: return 3;
        case BinOp::Lt:
        case BinOp::Le: return 4;
        case BinOp::Add:
        case BinOp::Sub: return 5;
        case BinOp::Mul: return 6;
      }
      return 0;
    case Expr::Kind::Not: return 7;
    default: return 8;
  }
}

const char* op_token(BinOp op) {
  switch (op) {
    case BinOp::Add: return "+";
    case BinOp::Sub: return "-";
    case BinOp::Mul: return "*";
    case BinOp::Eq: return "==";
    case BinOp::Ne: return "!=";
    case BinOp::Lt: return "<";
    case BinOp::Le: return "<=";
    case BinOp::And: return "and";
    case BinOp::Or: return "or";
  }
  return "?";
}

std::string child_str(const Expr& child, int parent_prec, bool right_side) {
  const int cp = precedence(child);
  const bool parens = right_side ? cp <= parent_prec : cp < parent_prec;
  std::string s = child.to_string();
  return parens ? "(" + s + ")" : s;
}

}  // namespace

ExprPtr Expr::constant(int value) {
  std::shared_ptr<Expr> e(new Expr());
  e->kind_ = Kind::Const;
  e->value_ = value;
  return e;
}

ExprPtr Expr::var(int index, std::string name) {
  std::shared_ptr<Expr> e(new Expr());
  e->kind_ = Kind::Var;
  e->var_ = index;
  e->name_ = std::move(name);
  return e;
}

ExprPtr Expr::binary(BinOp op, ExprPtr lhs, ExprPtr rhs) {
  std::shared_ptr<Expr> e(new Expr());
  e->kind_ = Kind::Binary;
  e->op_ = op;
  e->a_ = std::move(lhs);
  e->b_ = std::move(rhs);
  return e;
}

ExprPtr Expr::logical_not(ExprPtr operand) {
  std::shared_ptr<Expr> e(new Expr());
  e->kind_ = Kind::Not;
  e->a_ = std::move(operand);
  return e;
}

ExprPtr Expr::max2(ExprPtr a, ExprPtr b) {
  std::shared_ptr<Expr> e(new Expr());
  e->kind_ = Kind::Max;
  e->a_ = std::move(a);
  e->b_ = std::move(b);
  return e;
}

ExprPtr Expr::min2(ExprPtr a, ExprPtr b) {
  std::shared_ptr<Expr> e(new Expr());
  e->kind_ = Kind::Min;
  e->a_ = std::move(a);
  e->b_ = std::move(b);
  return e;
}

ExprPtr Expr::indicator(ExprPtr condition) {
  std::shared_ptr<Expr> e(new Expr());
  e->kind_ = Kind::Indicator;
  e->a_ = std::move(condition);
  return e;
}

ExprPtr Expr::if_else(ExprPtr condition, ExprPtr when_true, ExprPtr when_false) {
  std::shared_ptr<Expr> e(new Expr());
  e->kind_ = Kind::If;
  e->a_ = std::move(condition);
  e->b_ = std::move(when_true);
  e->c_ = std::move(when_false);
  return e;
}

int Expr::eval(std::span<const int> values) const {
  switch (kind_) {
    case Kind::Const:
      return value_;
    case Kind::Var:
      assert(var_ >= 0 && var_ < static_cast<int>(values.size()));
      return values[var_];
    case Kind::Binary: {
      const int l = a_->eval(values);
      const int r = b_->eval(values);
      switch (op_) {
        case BinOp::Add: return l + r;
        case BinOp::Sub: return l - r;
        case BinOp::Mul: return l * r;
        case BinOp::Eq: return l == r ? 1 : 0;
        case BinOp::Ne: return l != r ? 1 : 0;
        case BinOp::Lt: return l < r ? 1 : 0;
        case BinOp::Le: return l <= r ? 1 : 0;
        case BinOp::And: return (l != 0 && r != 0) ? 1 : 0;
        case BinOp::Or: return (l != 0 || r != 0) ? 1 : 0;
      }
      return 0;
    }
    case Kind::Not:
      return a_->eval(values) == 0 ? 1 : 0;
    case Kind::Max:
      return std::max(a_->eval(values), b_->eval(values));
    case Kind::Min:
      return std::min(a_->eval(values), b_->eval(values));
    case Kind::Indicator:
      return a_->eval(values) != 0 ? 1 : 0;
    case Kind::If:
      return a_->eval(values) != 0 ? b_->eval(values) : c_->eval(values);
  }
  return 0;
}

void Expr::collect_vars(std::vector<int>& out) const {
  switch (kind_) {
    case Kind::Const:
      return;
    case Kind::Var:
      if (std::find(out.begin(), out.end(), var_) == out.end()) out.push_back(var_);
      return;
    default:
      if (a_) a_->collect_vars(out);
      if (b_) b_->collect_vars(out);
      if (c_) c_->collect_vars(out);
      return;
  }
}

std::string Expr::to_string() const {
  switch (kind_) {
    case Kind::Const:
      return std::to_string(value_);
    case Kind::Var:
      return name_;
    case Kind::Binary: {
      const int p = precedence(*this);
      return child_str(*a_, p, false) + " " + op_token(op_) + " " + child_str(*b_, p, true);
    }
    case Kind::Not: {
      const int cp = precedence(*a_);
      std::string s = a_->to_string();
      return "not " + (cp < 7 ? "(" + s + ")" : s);
    }
    case Kind::Max:
      return "max(" + a_->to_string() + ", " + b_->to_string() + ")";
    case Kind::Min:
      return "min(" + a_->to_string() + ", " + b_->to_string() + ")";
    case Kind::Indicator:
      return "indicator(" + a_->to_string() + ")";
    case Kind::If:
      return "if(" + a_->to_string() + ", " + b_->to_string() + ", " + c_->to_string() + ")";
  }
  return "";
}

}  // namespace acrl
