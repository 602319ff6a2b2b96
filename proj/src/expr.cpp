#include "subcheck/expr.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <numbers>
#include <optional>

namespace subcheck {

namespace {

using Node = ExprNode;
using NodePtr = std::shared_ptr<const ExprNode>;

NodePtr make_number(double v, std::size_t offset) {
  auto n = std::make_shared<Node>();
  n->kind = Node::Kind::Number;
  n->number = v;
  n->offset = offset;
  return n;
}

NodePtr make_binary(Node::Kind k, NodePtr l, NodePtr r, std::size_t offset) {
  auto n = std::make_shared<Node>();
  n->kind = k;
  n->lhs = std::move(l);
  n->rhs = std::move(r);
  n->offset = offset;
  return n;
}

struct FuncEntry {
  const char* name;
  Func func;
};
constexpr FuncEntry kFuncs[] = {{"sin", Func::Sin}, {"cos", Func::Cos},   {"tan", Func::Tan},
                                {"exp", Func::Exp}, {"log", Func::Log},   {"sqrt", Func::Sqrt},
                                {"abs", Func::Abs}};

class Parser {
 public:
  Parser(std::string_view text, int n_vars, const std::set<std::string>& params)
      : text_(text), n_vars_(n_vars), params_(params) {}

  NodePtr parse_all() {
    skip_ws();
    if (pos_ >= text_.size()) throw ParseError("empty expression", pos_);
    NodePtr e = parse_expr();
    skip_ws();
    if (pos_ < text_.size()) throw ParseError(std::string("unexpected '") + text_[pos_] + "'", pos_);
    return e;
  }

 private:
  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) {
      if (pos_ >= text_.size()) throw ParseError(std::string("expected '") + c + "' before end of input", pos_);
      throw ParseError(std::string("expected '") + c + "'", pos_);
    }
  }

  NodePtr parse_expr() {
    NodePtr lhs = parse_term();
    for (;;) {
      skip_ws();
      const std::size_t at = pos_;
      if (accept('+')) {
        lhs = make_binary(Node::Kind::Add, lhs, parse_term(), at);
      } else if (accept('-')) {
        lhs = make_binary(Node::Kind::Sub, lhs, parse_term(), at);
      } else {
        return lhs;
      }
    }
  }

  NodePtr parse_term() {
    NodePtr lhs = parse_unary();
    for (;;) {
      skip_ws();
      const std::size_t at = pos_;
      if (accept('*')) {
        lhs = make_binary(Node::Kind::Mul, lhs, parse_unary(), at);
      } else if (accept('/')) {
        lhs = make_binary(Node::Kind::Div, lhs, parse_unary(), at);
      } else {
        return lhs;
      }
    }
  }

  NodePtr parse_unary() {
    skip_ws();
    const std::size_t at = pos_;
    if (accept('-')) {
      auto n = std::make_shared<Node>();
      n->kind = Node::Kind::Neg;
      n->lhs = parse_unary();
      n->offset = at;
      return n;
    }
    return parse_power();
  }

  int parse_int_exponent() {
    skip_ws();
    const bool paren = accept('(');
    skip_ws();
    const std::size_t start = pos_;
    bool neg = false;
    if (accept('-')) neg = true;
    skip_ws();
    const std::size_t digits = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (digits == pos_) throw ParseError("exponent must be an integer literal", start);
    if (pos_ < text_.size() && (text_[pos_] == '.' || text_[pos_] == 'e' || text_[pos_] == 'E'))
      throw ParseError("exponent must be an integer literal", start);
    int value = 0;
    auto [ptr, ec] = std::from_chars(text_.data() + digits, text_.data() + pos_, value);
    if (ec != std::errc()) throw ParseError("exponent out of range", start);
    if (paren) expect(')');
    return neg ? -value : value;
  }

  NodePtr parse_power() {
    NodePtr base = parse_primary();
    for (;;) {
      skip_ws();
      const std::size_t at = pos_;
      if (!accept('^')) return base;
      auto n = std::make_shared<Node>();
      n->kind = Node::Kind::Pow;
      n->lhs = base;
      n->exponent = parse_int_exponent();
      n->offset = at;
      base = n;
    }
  }

  NodePtr parse_number() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() && (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.')) ++pos_;
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      std::size_t save = pos_++;
      if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) ++pos_;
      if (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      } else {
        pos_ = save;
      }
    }
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(text_.data() + start, text_.data() + pos_, v);
    if (ec != std::errc() || ptr != text_.data() + pos_) throw ParseError("malformed number", start);
    return make_number(v, start);
  }

  NodePtr parse_primary() {
    skip_ws();
    if (pos_ >= text_.size()) throw ParseError("unexpected end of input", pos_);
    const std::size_t start = pos_;
    const char c = text_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
    if (accept('(')) {
      NodePtr e = parse_expr();
      expect(')');
      return e;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      while (pos_ < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
        ++pos_;
      const std::string ident(text_.substr(start, pos_ - start));
      return resolve_identifier(ident, start);
    }
    throw ParseError(std::string("unexpected '") + c + "'", start);
  }

  NodePtr resolve_identifier(const std::string& ident, std::size_t start) {
    for (const auto& f : kFuncs) {
      if (ident == f.name) {
        expect('(');
        auto n = std::make_shared<Node>();
        n->kind = Node::Kind::Call;
        n->func = f.func;
        n->lhs = parse_expr();
        n->offset = start;
        expect(')');
        return n;
      }
    }
    if (params_.contains(ident)) {
      auto n = std::make_shared<Node>();
      n->kind = Node::Kind::Param;
      n->name = ident;
      n->offset = start;
      return n;
    }
    if (ident == "pi") return make_number(std::numbers::pi, start);
    if (auto var = variable_index(ident)) {
      if (*var < 1 || *var > n_vars_)
        throw ParseError("variable " + ident + " out of range (1.." + std::to_string(n_vars_) + ")", start);
      auto n = std::make_shared<Node>();
      n->kind = Node::Kind::Variable;
      n->var = *var - 1;
      n->offset = start;
      return n;
    }
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == '(') throw ParseError("unknown function '" + ident + "'", start);
    throw ParseError("unknown identifier '" + ident + "'", start);
  }

  static std::optional<int> variable_index(const std::string& ident) {
    if (ident.size() < 2 || ident[0] != 'x') return std::nullopt;
    std::size_t i = 1;
    if (ident[i] == '_') ++i;
    if (i >= ident.size()) return std::nullopt;
    int v = 0;
    auto [ptr, ec] = std::from_chars(ident.data() + i, ident.data() + ident.size(), v);
    if (ec != std::errc() || ptr != ident.data() + ident.size()) return std::nullopt;
    return v;
  }

  std::string_view text_;
  int n_vars_;
  const std::set<std::string>& params_;
  std::size_t pos_ = 0;
};

// Precedence levels used by the printer: higher binds tighter.
int precedence(const Node& n) {
  switch (n.kind) {
    case Node::Kind::Add:
    case Node::Kind::Sub: return 1;
    case Node::Kind::Mul:
    case Node::Kind::Div: return 2;
    case Node::Kind::Neg: return 3;
    case Node::Kind::Pow: return 4;
    case Node::Kind::Number: return n.number < 0.0 ? 3 : 5;
    default: return 5;
  }
}

std::string format_number(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  std::string s(buf, ptr);
  if (s == "inf" || s == "-inf" || s == "nan") throw std::runtime_error("cannot print non-finite literal");
  return s;
}

void print_node(const Node& n, std::string& out);

void print_child(const Node& child, int min_prec, std::string& out) {
  if (precedence(child) < min_prec) {
    out += '(';
    print_node(child, out);
    out += ')';
  } else {
    print_node(child, out);
  }
}

void print_node(const Node& n, std::string& out) {
  switch (n.kind) {
    case Node::Kind::Number: out += format_number(n.number); return;
    case Node::Kind::Variable: out += "x" + std::to_string(n.var + 1); return;
    case Node::Kind::Param: out += n.name; return;
    case Node::Kind::Add:
    case Node::Kind::Sub:
    case Node::Kind::Mul:
    case Node::Kind::Div: {
      const int p = precedence(n);
      const char op = n.kind == Node::Kind::Add ? '+' : n.kind == Node::Kind::Sub ? '-' : n.kind == Node::Kind::Mul ? '*' : '/';
      print_child(*n.lhs, p, out);
      out += ' ';
      out += op;
      out += ' ';
      // Left associativity: an equal-precedence right child needs parentheses.
      print_child(*n.rhs, p + 1, out);
      return;
    }
    case Node::Kind::Neg:
      out += '-';
      print_child(*n.lhs, 3, out);
      return;
    case Node::Kind::Pow:
      print_child(*n.lhs, 5, out);
      out += '^';
      if (n.exponent < 0) out += "(" + std::to_string(n.exponent) + ")";
      else out += std::to_string(n.exponent);
      return;
    case Node::Kind::Call:
      out += func_name(n.func);
      out += '(';
      print_node(*n.lhs, out);
      out += ')';
      return;
  }
}

void collect_params(const Node& n, std::set<std::string>& out) {
  if (n.kind == Node::Kind::Param) out.insert(n.name);
  if (n.lhs) collect_params(*n.lhs, out);
  if (n.rhs) collect_params(*n.rhs, out);
}

int max_var(const Node& n) {
  int m = n.kind == Node::Kind::Variable ? n.var + 1 : 0;
  if (n.lhs) m = std::max(m, max_var(*n.lhs));
  if (n.rhs) m = std::max(m, max_var(*n.rhs));
  return m;
}

NodePtr bind_node(const NodePtr& n, const ParamMap& params) {
  if (n->kind == Node::Kind::Param) {
    auto it = params.find(n->name);
    if (it == params.end()) return n;
    return make_number(it->second, n->offset);
  }
  if (!n->lhs && !n->rhs) return n;
  auto copy = std::make_shared<Node>(*n);
  if (n->lhs) copy->lhs = bind_node(n->lhs, params);
  if (n->rhs) copy->rhs = bind_node(n->rhs, params);
  return copy;
}

}  // namespace

const char* func_name(Func f) {
  for (const auto& e : kFuncs)
    if (e.func == f) return e.name;
  return "?";
}

Expr parse(std::string_view text, int n_vars, const std::set<std::string>& param_names) {
  if (n_vars < 0) throw std::invalid_argument("n_vars must be non-negative");
  Parser p(text, n_vars, param_names);
  return Expr(p.parse_all(), n_vars);
}

std::string print(const Expr& e) {
  std::string out;
  print_node(e.root(), out);
  return out;
}

std::set<std::string> Expr::params() const {
  std::set<std::string> out;
  collect_params(*root_, out);
  return out;
}

int Expr::max_variable() const { return max_var(*root_); }

Expr Expr::bind(const ParamMap& params) const { return Expr(bind_node(root_, params), n_vars_); }

double Expr::eval(const std::vector<double>& x, const ParamMap& params) const {
  const Eigen::VectorXd v = Eigen::Map<const Eigen::VectorXd>(x.data(), static_cast<Eigen::Index>(x.size()));
  return eval<double>(v, params);
}

Jet2 eval_jet2(const Expr& e, const std::vector<double>& point, const ParamMap& params) {
  const auto n = static_cast<Eigen::Index>(point.size());
  if (n != e.n_vars()) throw std::invalid_argument("point dimension does not match expression");
  Eigen::Matrix<Jet2, Eigen::Dynamic, 1> x(n);
  for (Eigen::Index i = 0; i < n; ++i) x[i] = Jet2::variable(point[static_cast<std::size_t>(i)], i, n);
  Jet2 out = e.eval<Jet2>(x, params);
  if (out.is_constant()) {
    out.gradient = Eigen::VectorXd::Zero(n);
    out.hessian = Eigen::MatrixXd::Zero(n, n);
  }
  return out;
}

}  // namespace subcheck
