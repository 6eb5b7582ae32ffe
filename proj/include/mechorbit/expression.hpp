#pragma once

#include "mechorbit/jet.hpp"

#include <Eigen/Dense>

#include <string>
#include <string_view>
#include <vector>

namespace mechorbit {

/// Arithmetic expression over chart coordinates q1..qn.
///
/// Grammar: binary + - * / ^ (right associative, binds tighter than unary
/// minus), unary functions exp log sin cos tan tanh sqrt, numeric literals,
/// constants pi and e. Integer exponents are evaluated as repeated products so
/// negative bases are allowed. Evaluation is either plain or as a second-order
/// jet, which gives exact gradients and Hessians.
class Expression {
 public:
  Expression() = default;

  /// Throws GeometryError with the character offset on malformed input or an
  /// out-of-range variable.
  static Expression parse(std::string_view text, int dimension);

  double operator()(const Eigen::Ref<const Eigen::VectorXd>& q) const;
  Jet jet(const Eigen::Ref<const Eigen::VectorXd>& q) const;

  const std::string& text() const { return text_; }
  int dimension() const { return dimension_; }
  bool empty() const { return nodes_.empty(); }

 private:
  enum class Op { kConst, kVar, kAdd, kSub, kMul, kDiv, kPow, kIntPow, kNeg, kExp, kLog, kSin, kCos, kTan, kTanh, kSqrt };
  struct Node {
    Op op;
    double value = 0.0;
    int index = 0;  // variable index, or integer exponent for kIntPow
    int lhs = -1;
    int rhs = -1;
  };
  template <class T, class MakeConst>
  T eval(int node, const std::vector<T>& vars, const MakeConst& make_const) const;

  friend class ExpressionParser;
  std::string text_;
  int dimension_ = 0;
  std::vector<Node> nodes_;
  int root_ = -1;
};

}  // namespace mechorbit
