#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

namespace acrl {

enum class BinOp { Add, Sub, Mul, Eq, Ne, Lt, Le, And, Or };

class Expr;
using ExprPtr = std::shared_ptr<const Expr>;

/// Integer expression tree used as structural-equation bodies.
/// Comparisons and logical connectives evaluate to 0/1; everything else is
/// plain integer arithmetic, so expressions are total over any input.
class Expr {
 public:
  enum class Kind { Const, Var, Binary, Not, Max, Min, Indicator, If };

  static ExprPtr constant(int value);
  static ExprPtr var(int index, std::string name);
  static ExprPtr binary(BinOp op, ExprPtr lhs, ExprPtr rhs);
  static ExprPtr logical_not(ExprPtr operand);
  static ExprPtr max2(ExprPtr a, ExprPtr b);
  static ExprPtr min2(ExprPtr a, ExprPtr b);
  static ExprPtr indicator(ExprPtr condition);
  static ExprPtr if_else(ExprPtr condition, ExprPtr when_true, ExprPtr when_false);

  Kind kind() const { return kind_; }
  int value() const { return value_; }
  int var_index() const { return var_; }
  const std::string& var_name() const { return name_; }
  BinOp op() const { return op_; }
  const ExprPtr& a() const { return a_; }
  const ExprPtr& b() const { return b_; }
  const ExprPtr& c() const { return c_; }

  /// Evaluate against a valuation indexed by global variable index.
  int eval(std::span<const int> values) const;

  /// Appends referenced variable indices in first-appearance order, deduped.
  void collect_vars(std::vector<int>& out) const;

  std::string to_string() const;

 private:
  Expr() = default;

  Kind kind_ = Kind::Const;
  int value_ = 0;
  int var_ = -1;
  std::string name_;
  BinOp op_ = BinOp::Add;
  ExprPtr a_, b_, c_;
};

}  // namespace acrl
