#pragma once

#include <memory>
#include <string>
#include <string_view>

#include "cmc/jet.hpp"

namespace cmc::expr {

enum class Op { kNumber, kVariable, kNeg, kAdd, kSub, kMul, kDiv, kPow, kCall };
enum class Var { kT, kX };
enum class Func { kSin, kCos, kTan, kExp, kLog, kSqrt };

struct Node {
  Op op = Op::kNumber;
  double number = 0.0;
  Var var = Var::kT;
  Func func = Func::kSin;
  std::shared_ptr<const Node> lhs;
  std::shared_ptr<const Node> rhs;
  std::size_t offset = 0;
  bool constant = true;  // subtree free of variables
};

/// Immutable scalar expression in the chart variables t and x.
///
/// Grammar (highest precedence first): `^` (right associative), unary `-`,
/// `*` `/`, `+` `-` (left associative). Functions: sin cos tan exp log sqrt,
/// each of arity one. Constants: pi, e.
///
/// Evaluation is total on the declared domain: log of a non-positive value,
/// division by zero, a non-integer power of a non-positive base, or any
/// non-finite intermediate raises EvalError naming the subexpression.
class Expr {
 public:
  static Expr parse(std::string_view src);

  double eval(double t, double x) const;
  /// Value with ∂t, ∂x, ∂tt, ∂tx, ∂xx (variable 0 is t, variable 1 is x).
  Jet2 eval_jet(double t, double x) const;

  template <typename Scalar>
  Scalar evaluate(const Scalar& t, const Scalar& x) const;

  /// Fully parenthesized rendering that reparses to the same tree.
  std::string to_string() const;
  const std::string& source() const { return source_; }
  const Node& root() const { return *root_; }

 private:
  Expr(std::shared_ptr<const Node> root, std::string source);

  std::shared_ptr<const Node> root_;
  std::string source_;
};

std::string to_string(const Node& node);

}  // namespace cmc::expr
