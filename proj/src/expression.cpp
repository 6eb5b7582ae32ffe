#include "mechorbit/expression.hpp"

#include "mechorbit/errors.hpp"

#include <cctype>
#include <cmath>
#include <numbers>
#include <string>

namespace mechorbit {

class ExpressionParser {
 public:
  ExpressionParser(std::string_view text, int dimension, Expression& out)
      : text_(text), dim_(dimension), out_(out) {}

  void run() {
    out_.root_ = parse_sum();
    skip_space();
    if (pos_ != text_.size()) fail("unexpected character '" + std::string(1, text_[pos_]) + "'");
  }

 private:
  using Op = Expression::Op;
  using Node = Expression::Node;

  [[noreturn]] void fail(const std::string& what) const {
    throw GeometryError("expression \"" + std::string(text_) + "\" at offset " + std::to_string(pos_) + ": " + what);
  }
  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }
  bool accept(char c) {
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  int push(Node n) {
    out_.nodes_.push_back(n);
    return static_cast<int>(out_.nodes_.size()) - 1;
  }
  int binary(Op op, int l, int r) { return push(Node{op, 0.0, 0, l, r}); }

  int parse_sum() {
    int lhs = parse_product();
    for (;;) {
      if (accept('+')) lhs = binary(Op::kAdd, lhs, parse_product());
      else if (accept('-')) lhs = binary(Op::kSub, lhs, parse_product());
      else return lhs;
    }
  }
  int parse_product() {
    int lhs = parse_unary();
    for (;;) {
      if (accept('*')) lhs = binary(Op::kMul, lhs, parse_unary());
      else if (accept('/')) lhs = binary(Op::kDiv, lhs, parse_unary());
      else return lhs;
    }
  }
  int parse_unary() {
    if (accept('-')) return push(Node{Op::kNeg, 0.0, 0, parse_unary(), -1});
    if (accept('+')) return parse_unary();
    return parse_power();
  }
  int parse_power() {
    const int base = parse_primary();
    if (!accept('^')) return base;
    const int exponent = parse_unary();
    const Node& e = out_.nodes_[exponent];
    if (e.op == Op::kConst && e.value == std::round(e.value) && std::abs(e.value) <= 64) {
      return push(Node{Op::kIntPow, 0.0, static_cast<int>(e.value), base, -1});
    }
    return binary(Op::kPow, base, exponent);
  }
  int parse_primary() {
    skip_space();
    if (pos_ >= text_.size()) fail("unexpected end of input");
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      const int inner = parse_sum();
      if (!accept(')')) fail("expected ')'");
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c))) return parse_identifier();
    fail("unexpected character '" + std::string(1, c) + "'");
  }
  int parse_number() {
    const std::string rest(text_.substr(pos_));
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(rest, &used);
    } catch (const std::exception&) {
      fail("malformed number");
    }
    pos_ += used;
    return push(Node{Op::kConst, v, 0, -1, -1});
  }
  int parse_identifier() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) ++pos_;
    const std::string name(text_.substr(start, pos_ - start));
    if (name == "pi") return push(Node{Op::kConst, std::numbers::pi, 0, -1, -1});
    if (name == "e") return push(Node{Op::kConst, std::numbers::e, 0, -1, -1});
    if (name.size() >= 2 && name[0] == 'q' &&
        name.find_first_not_of("0123456789", 1) == std::string::npos) {
      const int index = std::stoi(name.substr(1));
      if (index < 1 || index > dim_) {
        pos_ = start;
        fail("variable " + name + " outside dimension " + std::to_string(dim_));
      }
      return push(Node{Op::kVar, 0.0, index - 1, -1, -1});
    }
    Op op;
    if (name == "exp") op = Op::kExp;
    else if (name == "log") op = Op::kLog;
    else if (name == "sin") op = Op::kSin;
    else if (name == "cos") op = Op::kCos;
    else if (name == "tan") op = Op::kTan;
    else if (name == "tanh") op = Op::kTanh;
    else if (name == "sqrt") op = Op::kSqrt;
    else {
      pos_ = start;
      fail("unknown identifier '" + name + "'");
    }
    if (!accept('(')) fail("expected '(' after " + name);
    const int arg = parse_sum();
    if (!accept(')')) fail("expected ')'");
    return push(Node{op, 0.0, 0, arg, -1});
  }

  std::string_view text_;
  int dim_;
  Expression& out_;
  std::size_t pos_ = 0;
};

Expression Expression::parse(std::string_view text, int dimension) {
  if (dimension < 1) throw GeometryError("expression dimension must be >= 1");
  Expression e;
  e.text_ = std::string(text);
  e.dimension_ = dimension;
  ExpressionParser(text, dimension, e).run();
  return e;
}

template <class T, class MakeConst>
T Expression::eval(int idx, const std::vector<T>& vars, const MakeConst& make_const) const {
  using std::cos;
  using std::exp;
  using std::log;
  using std::pow;
  using std::sin;
  using std::sqrt;
  using std::tan;
  using std::tanh;
  const Node& n = nodes_[idx];
  switch (n.op) {
    case Op::kConst: return make_const(n.value);
    case Op::kVar: return vars[n.index];
    case Op::kAdd: return eval(n.lhs, vars, make_const) + eval(n.rhs, vars, make_const);
    case Op::kSub: return eval(n.lhs, vars, make_const) - eval(n.rhs, vars, make_const);
    case Op::kMul: return eval(n.lhs, vars, make_const) * eval(n.rhs, vars, make_const);
    case Op::kDiv: return eval(n.lhs, vars, make_const) / eval(n.rhs, vars, make_const);
    case Op::kPow: return pow(eval(n.lhs, vars, make_const), eval(n.rhs, vars, make_const));
    case Op::kIntPow: return ipow(eval(n.lhs, vars, make_const), n.index);
    case Op::kNeg: return -eval(n.lhs, vars, make_const);
    case Op::kExp: return exp(eval(n.lhs, vars, make_const));
    case Op::kLog: return log(eval(n.lhs, vars, make_const));
    case Op::kSin: return sin(eval(n.lhs, vars, make_const));
    case Op::kCos: return cos(eval(n.lhs, vars, make_const));
    case Op::kTan: return tan(eval(n.lhs, vars, make_const));
    case Op::kTanh: return tanh(eval(n.lhs, vars, make_const));
    case Op::kSqrt: return sqrt(eval(n.lhs, vars, make_const));
  }
  return make_const(0.0);
}

double Expression::operator()(const Eigen::Ref<const Eigen::VectorXd>& q) const {
  std::vector<double> vars(q.data(), q.data() + q.size());
  return eval(root_, vars, [](double c) { return c; });
}

Jet Expression::jet(const Eigen::Ref<const Eigen::VectorXd>& q) const {
  const int n = static_cast<int>(q.size());
  if (n > kMaxJetDim) throw GeometryError("jet evaluation limited to dimension " + std::to_string(kMaxJetDim));
  std::vector<Jet> vars;
  vars.reserve(n);
  for (int i = 0; i < n; ++i) vars.push_back(Jet::variable(q(i), i, n));
  return eval(root_, vars, [n](double c) { return Jet::constant(c, n); });
}

}  // namespace mechorbit
