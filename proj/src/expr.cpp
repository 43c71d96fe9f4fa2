#include "cmc/expr.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "cmc/errors.hpp"

namespace cmc::expr {
namespace {

using NodePtr = std::shared_ptr<const Node>;

NodePtr make_number(double value, std::size_t offset) {
  auto n = std::make_shared<Node>();
  n->op = Op::kNumber;
  n->number = value;
  n->offset = offset;
  return n;
}

NodePtr make_unary(Op op, NodePtr arg, std::size_t offset) {
  auto n = std::make_shared<Node>();
  n->op = op;
  n->constant = arg->constant;
  n->lhs = std::move(arg);
  n->offset = offset;
  return n;
}

NodePtr make_binary(Op op, NodePtr lhs, NodePtr rhs, std::size_t offset) {
  auto n = std::make_shared<Node>();
  n->op = op;
  n->constant = lhs->constant && rhs->constant;
  n->lhs = std::move(lhs);
  n->rhs = std::move(rhs);
  n->offset = offset;
  return n;
}

class Parser {
 public:
  explicit Parser(std::string_view src) : src_(src) {}

  NodePtr parse() {
    NodePtr e = parse_sum();
    skip_space();
    if (pos_ != src_.size()) fail("unexpected '" + std::string(1, src_[pos_]) + "'");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError("syntax error at offset " + std::to_string(pos_) + ": " + msg, pos_);
  }

  void skip_space() {
    while (pos_ < src_.size() && (src_[pos_] == ' ' || src_[pos_] == '\t' || src_[pos_] == '\n')) ++pos_;
  }

  bool accept(char c) {
    skip_space();
    if (pos_ < src_.size() && src_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) fail(std::string("expected '") + c + "'");
  }

  NodePtr parse_sum() {
    NodePtr lhs = parse_product();
    for (;;) {
      skip_space();
      const std::size_t at = pos_;
      if (accept('+')) {
        lhs = make_binary(Op::kAdd, lhs, parse_product(), at);
      } else if (accept('-')) {
        lhs = make_binary(Op::kSub, lhs, parse_product(), at);
      } else {
        return lhs;
      }
    }
  }

  NodePtr parse_product() {
    NodePtr lhs = parse_unary();
    for (;;) {
      skip_space();
      const std::size_t at = pos_;
      if (accept('*')) {
        lhs = make_binary(Op::kMul, lhs, parse_unary(), at);
      } else if (accept('/')) {
        lhs = make_binary(Op::kDiv, lhs, parse_unary(), at);
      } else {
        return lhs;
      }
    }
  }

  NodePtr parse_unary() {
    skip_space();
    const std::size_t at = pos_;
    if (accept('-')) return make_unary(Op::kNeg, parse_unary(), at);
    if (accept('+')) return parse_unary();
    return parse_power();
  }

  NodePtr parse_power() {
    NodePtr base = parse_primary();
    skip_space();
    const std::size_t at = pos_;
    if (accept('^')) return make_binary(Op::kPow, base, parse_unary(), at);
    return base;
  }

  NodePtr parse_primary() {
    skip_space();
    if (pos_ >= src_.size()) fail("unexpected end of input");
    const std::size_t at = pos_;
    const char c = src_[pos_];
    if (c == '(') {
      ++pos_;
      NodePtr e = parse_sum();
      expect(')');
      return e;
    }
    if ((c >= '0' && c <= '9') || c == '.') return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t end = pos_;
      while (end < src_.size() &&
             (std::isalnum(static_cast<unsigned char>(src_[end])) || src_[end] == '_'))
        ++end;
      const std::string name(src_.substr(pos_, end - pos_));
      pos_ = end;
      return parse_identifier(name, at);
    }
    fail("unexpected '" + std::string(1, c) + "'");
  }

  NodePtr parse_number() {
    const std::size_t start = pos_;
    std::size_t end = pos_;
    while (end < src_.size() && std::isdigit(static_cast<unsigned char>(src_[end]))) ++end;
    if (end < src_.size() && src_[end] == '.') {
      ++end;
      while (end < src_.size() && std::isdigit(static_cast<unsigned char>(src_[end]))) ++end;
    }
    if (end < src_.size() && (src_[end] == 'e' || src_[end] == 'E')) {
      std::size_t e = end + 1;
      if (e < src_.size() && (src_[e] == '+' || src_[e] == '-')) ++e;
      if (e < src_.size() && std::isdigit(static_cast<unsigned char>(src_[e]))) {
        while (e < src_.size() && std::isdigit(static_cast<unsigned char>(src_[e]))) ++e;
        end = e;
      }
    }
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(src_.data() + start, src_.data() + end, value);
    if (ec != std::errc() || ptr != src_.data() + end) fail("malformed number");
    pos_ = end;
    return make_number(value, start);
  }

  NodePtr parse_identifier(const std::string& name, std::size_t at) {
    if (name == "t" || name == "x") {
      auto n = std::make_shared<Node>();
      n->op = Op::kVariable;
      n->var = name == "t" ? Var::kT : Var::kX;
      n->constant = false;
      n->offset = at;
      return n;
    }
    if (name == "pi") return make_number(std::numbers::pi, at);
    if (name == "e") return make_number(std::numbers::e, at);

    Func fn{};
    if (name == "sin") fn = Func::kSin;
    else if (name == "cos") fn = Func::kCos;
    else if (name == "tan") fn = Func::kTan;
    else if (name == "exp") fn = Func::kExp;
    else if (name == "log") fn = Func::kLog;
    else if (name == "sqrt") fn = Func::kSqrt;
    else throw ParseError("unknown identifier '" + name + "' at offset " + std::to_string(at), at);

    expect('(');
    NodePtr arg = parse_sum();
    skip_space();
    if (pos_ < src_.size() && src_[pos_] == ',')
      throw ParseError("arity mismatch: '" + name + "' takes one argument (offset " +
                           std::to_string(pos_) + ")",
                       pos_);
    expect(')');
    auto n = std::make_shared<Node>();
    n->op = Op::kCall;
    n->func = fn;
    n->constant = arg->constant;
    n->lhs = std::move(arg);
    n->offset = at;
    return n;
  }

  std::string_view src_;
  std::size_t pos_ = 0;
};

const char* func_name(Func f) {
  switch (f) {
    case Func::kSin: return "sin";
    case Func::kCos: return "cos";
    case Func::kTan: return "tan";
    case Func::kExp: return "exp";
    case Func::kLog: return "log";
    case Func::kSqrt: return "sqrt";
  }
  return "?";
}

double value_of(double v) { return v; }
double value_of(const Jet2& j) { return j.value; }

bool finite(double v) { return std::isfinite(v); }
bool finite(const Jet2& j) { return std::isfinite(j.value) && j.grad.allFinite() && j.hess.allFinite(); }

double lift(double c, double) { return c; }
Jet2 lift(double c, const Jet2&) { return Jet2::constant(c); }

double apply(Func f, double a) {
  switch (f) {
    case Func::kSin: return std::sin(a);
    case Func::kCos: return std::cos(a);
    case Func::kTan: return std::tan(a);
    case Func::kExp: return std::exp(a);
    case Func::kLog: return std::log(a);
    case Func::kSqrt: return std::sqrt(a);
  }
  return 0.0;
}

Jet2 apply(Func f, const Jet2& a) {
  switch (f) {
    case Func::kSin: return sin(a);
    case Func::kCos: return cos(a);
    case Func::kTan: return tan(a);
    case Func::kExp: return exp(a);
    case Func::kLog: return log(a);
    case Func::kSqrt: return sqrt(a);
  }
  return a;
}

double power_int(double a, int k) { return std::pow(a, k); }
Jet2 power_int(const Jet2& a, int k) { return powi(a, k); }
double power_real(double a, double b) { return std::pow(a, b); }
Jet2 power_real(const Jet2& a, const Jet2& b) { return pow(a, b); }

[[noreturn]] void domain_fail(const Node& n, const std::string& why) {
  throw EvalError("domain violation in '" + to_string(n) + "': " + why);
}

template <typename Scalar>
Scalar eval_node(const Node& n, const Scalar& t, const Scalar& x) {
  Scalar out{};
  switch (n.op) {
    case Op::kNumber:
      return lift(n.number, t);
    case Op::kVariable:
      return n.var == Var::kT ? t : x;
    case Op::kNeg:
      out = -eval_node(*n.lhs, t, x);
      break;
    case Op::kAdd:
      out = eval_node(*n.lhs, t, x) + eval_node(*n.rhs, t, x);
      break;
    case Op::kSub:
      out = eval_node(*n.lhs, t, x) - eval_node(*n.rhs, t, x);
      break;
    case Op::kMul:
      out = eval_node(*n.lhs, t, x) * eval_node(*n.rhs, t, x);
      break;
    case Op::kDiv: {
      const Scalar den = eval_node(*n.rhs, t, x);
      if (value_of(den) == 0.0) domain_fail(n, "division by zero");
      out = eval_node(*n.lhs, t, x) / den;
      break;
    }
    case Op::kPow: {
      const Scalar base = eval_node(*n.lhs, t, x);
      const Scalar ex = eval_node(*n.rhs, t, x);
      const double k = value_of(ex);
      if (n.rhs->constant && std::nearbyint(k) == k && std::abs(k) < 1e6) {
        if (value_of(base) == 0.0 && k < 0) domain_fail(n, "zero raised to a negative power");
        out = power_int(base, static_cast<int>(k));
      } else {
        if (!(value_of(base) > 0.0)) domain_fail(n, "non-integer power of a non-positive base");
        out = power_real(base, ex);
      }
      break;
    }
    case Op::kCall: {
      const Scalar a = eval_node(*n.lhs, t, x);
      const double av = value_of(a);
      if (n.func == Func::kLog && !(av > 0.0)) domain_fail(n, "log of a non-positive value");
      if (n.func == Func::kSqrt && av < 0.0) domain_fail(n, "sqrt of a negative value");
      out = apply(n.func, a);
      break;
    }
  }
  if (!finite(out)) domain_fail(n, "non-finite result");
  return out;
}

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::string to_string(const Node& n) {
  switch (n.op) {
    case Op::kNumber: return format_number(n.number);
    case Op::kVariable: return n.var == Var::kT ? "t" : "x";
    case Op::kNeg: return "(-" + to_string(*n.lhs) + ")";
    case Op::kAdd: return "(" + to_string(*n.lhs) + "+" + to_string(*n.rhs) + ")";
    case Op::kSub: return "(" + to_string(*n.lhs) + "-" + to_string(*n.rhs) + ")";
    case Op::kMul: return "(" + to_string(*n.lhs) + "*" + to_string(*n.rhs) + ")";
    case Op::kDiv: return "(" + to_string(*n.lhs) + "/" + to_string(*n.rhs) + ")";
    case Op::kPow: return "(" + to_string(*n.lhs) + "^" + to_string(*n.rhs) + ")";
    case Op::kCall: return std::string(func_name(n.func)) + "(" + to_string(*n.lhs) + ")";
  }
  return "";
}

Expr::Expr(std::shared_ptr<const Node> root, std::string source)
    : root_(std::move(root)), source_(std::move(source)) {}

Expr Expr::parse(std::string_view src) { return Expr(Parser(src).parse(), std::string(src)); }

template <typename Scalar>
Scalar Expr::evaluate(const Scalar& t, const Scalar& x) const {
  return eval_node(*root_, t, x);
}

template double Expr::evaluate<double>(const double&, const double&) const;
template Jet2 Expr::evaluate<Jet2>(const Jet2&, const Jet2&) const;

double Expr::eval(double t, double x) const { return evaluate(t, x); }

Jet2 Expr::eval_jet(double t, double x) const {
  return evaluate(Jet2::variable(t, 0), Jet2::variable(x, 1));
}

std::string Expr::to_string() const { return cmc::expr::to_string(*root_); }

}  // namespace cmc::expr
