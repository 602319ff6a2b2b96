#pragma once

// Expression language for map components and warp functions.
//
//   expr    := term (('+' | '-') term)*
//   term    := unary (('*' | '/') unary)*
//   unary   := '-' unary | power
//   power   := primary ('^' int)*        int := ['-'] digits | '(' ['-'] digits ')'
//   primary := number | 'pi' | x<i> | x_<i> | param | func '(' expr ')' | '(' expr ')'
//   func    := sin | cos | tan | exp | log | sqrt | abs
//
// Variables are 1-based. Parameters are named bindings supplied at parse time
// and resolved at evaluation (or folded in with Expr::bind).

#include <cmath>
#include <cstddef>
#include <map>
#include <memory>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "subcheck/dual.hpp"
#include "subcheck/jet2.hpp"

namespace subcheck {

using ParamMap = std::map<std::string, double>;

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t offset)
      : std::runtime_error(what + " at offset " + std::to_string(offset)), offset_(offset) {}
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

class EvalError : public std::runtime_error {
 public:
  EvalError(const std::string& what, std::size_t offset)
      : std::runtime_error(what + " (expression offset " + std::to_string(offset) + ")"),
        offset_(offset) {}
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

enum class Func { Sin, Cos, Tan, Exp, Log, Sqrt, Abs };

struct ExprNode {
  enum class Kind { Number, Variable, Param, Add, Sub, Mul, Div, Pow, Neg, Call };
  Kind kind = Kind::Number;
  double number = 0.0;
  int var = 0;       // 0-based
  int exponent = 0;  // Pow only
  Func func = Func::Sin;
  std::string name;  // Param name
  std::size_t offset = 0;
  std::shared_ptr<const ExprNode> lhs;
  std::shared_ptr<const ExprNode> rhs;
};

class Expr {
 public:
  Expr() = default;
  explicit Expr(std::shared_ptr<const ExprNode> root, int n_vars)
      : root_(std::move(root)), n_vars_(n_vars) {}

  int n_vars() const { return n_vars_; }
  const ExprNode& root() const { return *root_; }
  bool empty() const { return root_ == nullptr; }

  /// Parameter names referenced anywhere in the tree.
  std::set<std::string> params() const;
  /// Largest 1-based variable index referenced, 0 if none.
  int max_variable() const;
  /// Replaces parameter references with literals.
  Expr bind(const ParamMap& params) const;

  template <class S>
  S eval(const Eigen::Matrix<S, Eigen::Dynamic, 1>& x, const ParamMap& params = {}) const {
    return eval_node<S>(*root_, x, params);
  }
  double eval(const std::vector<double>& x, const ParamMap& params = {}) const;

 private:
  template <class S>
  static S eval_node(const ExprNode& n, const Eigen::Matrix<S, Eigen::Dynamic, 1>& x,
                     const ParamMap& params);

  std::shared_ptr<const ExprNode> root_;
  int n_vars_ = 0;
};

/// Parses `text` over `n_vars` variables. Identifiers in `param_names` are
/// accepted as parameters; any other unknown identifier is an error.
Expr parse(std::string_view text, int n_vars, const std::set<std::string>& param_names = {});

/// Canonical text form; parse(print(e)) evaluates identically to e.
std::string print(const Expr& e);

/// Value, gradient and Hessian at `point`.
Jet2 eval_jet2(const Expr& e, const std::vector<double>& point, const ParamMap& params = {});

const char* func_name(Func f);

template <class S>
S Expr::eval_node(const ExprNode& n, const Eigen::Matrix<S, Eigen::Dynamic, 1>& x,
                  const ParamMap& params) {
  using std::cos;
  using std::exp;
  using std::log;
  using std::sin;
  using std::sqrt;
  using std::tan;
  using K = ExprNode::Kind;
  switch (n.kind) {
    case K::Number:
      return S(n.number);
    case K::Variable:
      if (n.var >= x.size()) throw EvalError("variable x" + std::to_string(n.var + 1) + " out of range", n.offset);
      return x[n.var];
    case K::Param: {
      auto it = params.find(n.name);
      if (it == params.end()) throw EvalError("unbound parameter '" + n.name + "'", n.offset);
      return S(it->second);
    }
    case K::Add:
      return eval_node<S>(*n.lhs, x, params) + eval_node<S>(*n.rhs, x, params);
    case K::Sub:
      return eval_node<S>(*n.lhs, x, params) - eval_node<S>(*n.rhs, x, params);
    case K::Mul:
      return eval_node<S>(*n.lhs, x, params) * eval_node<S>(*n.rhs, x, params);
    case K::Div: {
      S den = eval_node<S>(*n.rhs, x, params);
      if (value_of(den) == 0.0) throw EvalError("division by zero", n.offset);
      return eval_node<S>(*n.lhs, x, params) / den;
    }
    case K::Pow: {
      S base = eval_node<S>(*n.lhs, x, params);
      if (n.exponent < 0 && value_of(base) == 0.0) throw EvalError("zero to a negative power", n.offset);
      return ipow(base, n.exponent);
    }
    case K::Neg:
      return -eval_node<S>(*n.lhs, x, params);
    case K::Call: {
      S a = eval_node<S>(*n.lhs, x, params);
      switch (n.func) {
        case Func::Sin: return sin(a);
        case Func::Cos: return cos(a);
        case Func::Tan:
          if (std::cos(value_of(a)) == 0.0) throw EvalError("tan pole", n.offset);
          return tan(a);
        case Func::Exp: return exp(a);
        case Func::Log:
          if (value_of(a) <= 0.0) throw EvalError("log of non-positive value", n.offset);
          return log(a);
        case Func::Sqrt:
          if (value_of(a) < 0.0) throw EvalError("sqrt of negative value", n.offset);
          return sqrt(a);
        case Func::Abs: {
          using std::abs;
          return abs(a);
        }
      }
    }
  }
  throw EvalError("corrupt expression node", n.offset);
}

}  // namespace subcheck
