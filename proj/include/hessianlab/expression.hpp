#pragma once

#include <cctype>
#include <cmath>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "hessianlab/scalar_field.hpp"

namespace hessianlab {

/// Parsed arithmetic expression over the variables x1..xn.
///
/// Grammar (usual precedence, ^ tightest and right-associative):
///   sum     := product (('+' | '-') product)*
///   product := unary (('*' | '/') unary)*
///   unary   := '-' unary | power
///   power   := primary ('^' unary)?
///   primary := number | x<digits> | abs(sum) | max(sum, sum, ...) | (sum)
class Expression {
 public:
  double eval(const Vec& x) const {
    switch (op_) {
      case Op::kConst:
        return value_;
      case Op::kVar:
        return x[var_];
      case Op::kNeg:
        return -kids_[0]->eval(x);
      case Op::kAdd:
        return kids_[0]->eval(x) + kids_[1]->eval(x);
      case Op::kSub:
        return kids_[0]->eval(x) - kids_[1]->eval(x);
      case Op::kMul:
        return kids_[0]->eval(x) * kids_[1]->eval(x);
      case Op::kDiv:
        return kids_[0]->eval(x) / kids_[1]->eval(x);
      case Op::kPow:
        return std::pow(kids_[0]->eval(x), kids_[1]->eval(x));
      case Op::kAbs:
        return std::abs(kids_[0]->eval(x));
      case Op::kMax: {
        double best = kids_[0]->eval(x);
        for (std::size_t i = 1; i < kids_.size(); ++i) best = std::max(best, kids_[i]->eval(x));
        return best;
      }
    }
    return 0.0;  // unreachable
  }

 private:
  enum class Op { kConst, kVar, kNeg, kAdd, kSub, kMul, kDiv, kPow, kAbs, kMax };
  using Ptr = std::shared_ptr<const Expression>;

  Expression(Op op, std::vector<Ptr> kids) : op_(op), kids_(std::move(kids)) {}
  explicit Expression(double v) : op_(Op::kConst), value_(v) {}
  explicit Expression(int var) : op_(Op::kVar), var_(var) {}

  Op op_;
  double value_ = 0.0;
  int var_ = 0;
  std::vector<Ptr> kids_;

  friend class ExpressionParser;
};

using ExpressionPtr = std::shared_ptr<const Expression>;

class ExpressionParser {
 public:
  ExpressionParser(std::string src, int dim) : src_(std::move(src)), dim_(dim) {}

  ExpressionPtr parse() {
    ExpressionPtr e = sum();
    skip_ws();
    if (pos_ != src_.size()) fail("trailing input");
    return e;
  }

 private:
  using Ptr = ExpressionPtr;

  [[noreturn]] void fail(const std::string& what) const {
    throw std::invalid_argument("expression: " + what + " at position " + std::to_string(pos_) +
                                " in \"" + src_ + "\"");
  }

  void skip_ws() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }

  bool eat(char c) {
    skip_ws();
    if (pos_ < src_.size() && src_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  char peek() {
    skip_ws();
    return pos_ < src_.size() ? src_[pos_] : '\0';
  }

  Ptr sum() {
    Ptr e = product();
    while (true) {
      if (eat('+'))
        e = node(Expression::Op::kAdd, {e, product()});
      else if (eat('-'))
        e = node(Expression::Op::kSub, {e, product()});
      else
        return e;
    }
  }

  Ptr product() {
    Ptr e = unary();
    while (true) {
      if (eat('*'))
        e = node(Expression::Op::kMul, {e, unary()});
      else if (eat('/'))
        e = node(Expression::Op::kDiv, {e, unary()});
      else
        return e;
    }
  }

  Ptr unary() {
    if (eat('-')) return node(Expression::Op::kNeg, {unary()});
    return power();
  }

  Ptr power() {
    Ptr base = primary();
    if (eat('^')) return node(Expression::Op::kPow, {base, unary()});
    return base;
  }

  Ptr primary() {
    const char c = peek();
    if (c == '(') {
      ++pos_;
      Ptr e = sum();
      if (!eat(')')) fail("expected ')'");
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c))) return word();
    fail("expected a number, variable, or function");
  }

  Ptr number() {
    skip_ws();
    std::size_t used = 0;
    double v;
    try {
      v = std::stod(src_.substr(pos_), &used);
    } catch (const std::exception&) {
      fail("malformed number");
    }
    pos_ += used;
    return Ptr(new Expression(v));
  }

  Ptr word() {
    skip_ws();
    std::size_t end = pos_;
    while (end < src_.size() && std::isalnum(static_cast<unsigned char>(src_[end]))) ++end;
    const std::string name = src_.substr(pos_, end - pos_);
    if (name.size() >= 2 && name[0] == 'x' &&
        std::isdigit(static_cast<unsigned char>(name[1]))) {
      int idx = 0;
      for (std::size_t i = 1; i < name.size(); ++i) {
        if (!std::isdigit(static_cast<unsigned char>(name[i]))) fail("malformed variable");
        idx = idx * 10 + (name[i] - '0');
      }
      if (idx < 1 || idx > dim_)
        fail("variable " + name + " out of range for dimension " + std::to_string(dim_));
      pos_ = end;
      return Ptr(new Expression(idx - 1));
    }
    pos_ = end;
    if (name == "abs") {
      if (!eat('(')) fail("expected '(' after abs");
      Ptr e = sum();
      if (!eat(')')) fail("expected ')'");
      return node(Expression::Op::kAbs, {e});
    }
    if (name == "max") {
      if (!eat('(')) fail("expected '(' after max");
      std::vector<Ptr> args = {sum()};
      while (eat(',')) args.push_back(sum());
      if (!eat(')')) fail("expected ')'");
      if (args.size() < 2) fail("max needs at least two arguments");
      return Ptr(new Expression(Expression::Op::kMax, std::move(args)));
    }
    fail("unknown name '" + name + "'");
  }

  Ptr node(Expression::Op op, std::vector<Ptr> kids) {
    return Ptr(new Expression(op, std::move(kids)));
  }

  std::string src_;
  int dim_;
  std::size_t pos_ = 0;
};

inline ExpressionPtr parse_expression(const std::string& src, int dim) {
  if (dim < 1) throw std::invalid_argument("parse_expression: dimension must be positive");
  return ExpressionParser(src, dim).parse();
}

/// Wraps a parsed expression as a scalar field over R^dim.
inline FieldPtr expression_field(const std::string& src, int dim) {
  ExpressionPtr e = parse_expression(src, dim);
  return std::make_shared<const CallableField>(dim, [e](const Vec& x) { return e->eval(x); });
}

}  // namespace hessianlab
