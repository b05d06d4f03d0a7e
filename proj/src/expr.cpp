#include "algebrokit/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <utility>

namespace algebrokit {

namespace detail {

enum class Op { add, sub, mul, div };
enum class Func { sin, cos, exp, log, sqrt, tanh };

struct ExprNode {
  enum class Kind { number, variable, unary_minus, binary, power, call } kind;
  double value = 0.0;                     // number
  std::size_t var = 0;                    // variable
  Op op = Op::add;                        // binary
  long exponent = 0;                      // power
  Func func = Func::sin;                  // call
  std::shared_ptr<const ExprNode> lhs, rhs;
};

using NodePtr = std::shared_ptr<const ExprNode>;

namespace {

NodePtr make_number(double v) {
  auto n = std::make_shared<ExprNode>();
  n->kind = ExprNode::Kind::number;
  n->value = v;
  return n;
}

NodePtr make_variable(std::size_t i) {
  auto n = std::make_shared<ExprNode>();
  n->kind = ExprNode::Kind::variable;
  n->var = i;
  return n;
}

NodePtr make_unary(NodePtr x) {
  auto n = std::make_shared<ExprNode>();
  n->kind = ExprNode::Kind::unary_minus;
  n->lhs = std::move(x);
  return n;
}

NodePtr make_binary(Op op, NodePtr l, NodePtr r) {
  auto n = std::make_shared<ExprNode>();
  n->kind = ExprNode::Kind::binary;
  n->op = op;
  n->lhs = std::move(l);
  n->rhs = std::move(r);
  return n;
}

NodePtr make_power(NodePtr base, long k) {
  auto n = std::make_shared<ExprNode>();
  n->kind = ExprNode::Kind::power;
  n->lhs = std::move(base);
  n->exponent = k;
  return n;
}

NodePtr make_call(Func f, NodePtr arg) {
  auto n = std::make_shared<ExprNode>();
  n->kind = ExprNode::Kind::call;
  n->func = f;
  n->lhs = std::move(arg);
  return n;
}

double int_pow(double x, long k) {
  if (k < 0) {
    if (x == 0.0) throw EvalError("zero raised to a negative power");
    return 1.0 / int_pow(x, -k);
  }
  double result = 1.0, base = x;
  for (long e = k; e > 0; e >>= 1) {
    if (e & 1) result *= base;
    base *= base;
  }
  return result;
}

double eval_node(const ExprNode& n, std::span<const double> p) {
  switch (n.kind) {
    case ExprNode::Kind::number:
      return n.value;
    case ExprNode::Kind::variable:
      return p[n.var];
    case ExprNode::Kind::unary_minus:
      return -eval_node(*n.lhs, p);
    case ExprNode::Kind::binary: {
      const double l = eval_node(*n.lhs, p);
      const double r = eval_node(*n.rhs, p);
      switch (n.op) {
        case Op::add: return l + r;
        case Op::sub: return l - r;
        case Op::mul: return l * r;
        case Op::div:
          if (r == 0.0) throw EvalError("division by zero");
          return l / r;
      }
      break;
    }
    case ExprNode::Kind::power:
      return int_pow(eval_node(*n.lhs, p), n.exponent);
    case ExprNode::Kind::call: {
      const double x = eval_node(*n.lhs, p);
      switch (n.func) {
        case Func::sin: return std::sin(x);
        case Func::cos: return std::cos(x);
        case Func::exp: return std::exp(x);
        case Func::log:
          if (x <= 0.0) throw EvalError("log of a nonpositive number");
          return std::log(x);
        case Func::sqrt:
          if (x < 0.0) throw EvalError("sqrt of a negative number");
          return std::sqrt(x);
        case Func::tanh: return std::tanh(x);
      }
      break;
    }
  }
  throw EvalError("corrupt expression node");
}

const char* func_name(Func f) {
  switch (f) {
    case Func::sin: return "sin";
    case Func::cos: return "cos";
    case Func::exp: return "exp";
    case Func::log: return "log";
    case Func::sqrt: return "sqrt";
    case Func::tanh: return "tanh";
  }
  return "?";
}

void print_node(const ExprNode& n, const std::vector<std::string>& vars, std::string& out) {
  switch (n.kind) {
    case ExprNode::Kind::number: {
      char buf[40];
      std::snprintf(buf, sizeof buf, "%.17g", n.value);
      out += buf;
      return;
    }
    case ExprNode::Kind::variable:
      out += vars[n.var];
      return;
    case ExprNode::Kind::unary_minus:
      out += "(-";
      print_node(*n.lhs, vars, out);
      out += ")";
      return;
    case ExprNode::Kind::binary: {
      const char* op = n.op == Op::add ? " + " : n.op == Op::sub ? " - "
                       : n.op == Op::mul ? "*" : "/";
      out += "(";
      print_node(*n.lhs, vars, out);
      out += op;
      print_node(*n.rhs, vars, out);
      out += ")";
      return;
    }
    case ExprNode::Kind::power:
      out += "(";
      print_node(*n.lhs, vars, out);
      out += "^";
      out += std::to_string(n.exponent);
      out += ")";
      return;
    case ExprNode::Kind::call:
      out += func_name(n.func);
      out += "(";
      print_node(*n.lhs, vars, out);
      out += ")";
      return;
  }
}

// Variable substitution/remapping.  map[i] is the new index of old variable i,
// or kDropToZero to substitute the constant 0.
constexpr std::size_t kDropToZero = static_cast<std::size_t>(-1);

NodePtr transform_vars(const NodePtr& n, const std::vector<std::size_t>& map) {
  switch (n->kind) {
    case ExprNode::Kind::number:
      return n;
    case ExprNode::Kind::variable:
      if (map[n->var] == kDropToZero) return make_number(0.0);
      if (map[n->var] == n->var) return n;
      return make_variable(map[n->var]);
    case ExprNode::Kind::unary_minus:
      return make_unary(transform_vars(n->lhs, map));
    case ExprNode::Kind::binary:
      return make_binary(n->op, transform_vars(n->lhs, map), transform_vars(n->rhs, map));
    case ExprNode::Kind::power:
      return make_power(transform_vars(n->lhs, map), n->exponent);
    case ExprNode::Kind::call:
      return make_call(n->func, transform_vars(n->lhs, map));
  }
  return n;
}

struct Token {
  enum class Kind { number, identifier, plus, minus, star, slash, caret, lparen, rparen, end } kind;
  double number = 0.0;
  std::string text;
  std::size_t pos = 0;
};

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) { advance(); }

  const Token& peek() const { return tok_; }
  Token take() {
    Token t = tok_;
    advance();
    return t;
  }

 private:
  void advance() {
    while (i_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[i_]))) ++i_;
    tok_.pos = i_;
    if (i_ >= src_.size()) {
      tok_.kind = Token::Kind::end;
      return;
    }
    const char c = src_[i_];
    switch (c) {
      case '+': tok_.kind = Token::Kind::plus; ++i_; return;
      case '-': tok_.kind = Token::Kind::minus; ++i_; return;
      case '*': tok_.kind = Token::Kind::star; ++i_; return;
      case '/': tok_.kind = Token::Kind::slash; ++i_; return;
      case '^': tok_.kind = Token::Kind::caret; ++i_; return;
      case '(': tok_.kind = Token::Kind::lparen; ++i_; return;
      case ')': tok_.kind = Token::Kind::rparen; ++i_; return;
      default: break;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      std::size_t start = i_;
      while (i_ < src_.size() &&
             (std::isdigit(static_cast<unsigned char>(src_[i_])) || src_[i_] == '.'))
        ++i_;
      if (i_ < src_.size() && (src_[i_] == 'e' || src_[i_] == 'E')) {
        std::size_t save = i_;
        ++i_;
        if (i_ < src_.size() && (src_[i_] == '+' || src_[i_] == '-')) ++i_;
        if (i_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[i_]))) {
          while (i_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[i_]))) ++i_;
        } else {
          i_ = save;  // 'e' belongs to an identifier, not this number
        }
      }
      tok_.kind = Token::Kind::number;
      tok_.text = std::string(src_.substr(start, i_ - start));
      try {
        tok_.number = std::stod(tok_.text);
      } catch (const std::exception&) {
        throw ParseError("malformed number '" + tok_.text + "'", start);
      }
      return;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t start = i_;
      while (i_ < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[i_])) || src_[i_] == '_'))
        ++i_;
      tok_.kind = Token::Kind::identifier;
      tok_.text = std::string(src_.substr(start, i_ - start));
      return;
    }
    throw ParseError(std::string("unexpected character '") + c + "'", i_);
  }

  std::string_view src_;
  std::size_t i_ = 0;
  Token tok_;
};

class Parser {
 public:
  Parser(std::string_view src, const std::vector<std::string>& vars)
      : lex_(src), vars_(vars) {}

  NodePtr parse() {
    NodePtr e = expression();
    const Token& t = lex_.peek();
    if (t.kind != Token::Kind::end)
      throw ParseError("unexpected token after expression", t.pos);
    return e;
  }

 private:
  NodePtr expression() {
    NodePtr left = term();
    for (;;) {
      const Token& t = lex_.peek();
      if (t.kind == Token::Kind::plus) {
        lex_.take();
        left = make_binary(Op::add, left, term());
      } else if (t.kind == Token::Kind::minus) {
        lex_.take();
        left = make_binary(Op::sub, left, term());
      } else {
        return left;
      }
    }
  }

  NodePtr term() {
    NodePtr left = factor();
    for (;;) {
      const Token& t = lex_.peek();
      if (t.kind == Token::Kind::star) {
        lex_.take();
        left = make_binary(Op::mul, left, factor());
      } else if (t.kind == Token::Kind::slash) {
        lex_.take();
        left = make_binary(Op::div, left, factor());
      } else {
        return left;
      }
    }
  }

  NodePtr factor() {
    if (lex_.peek().kind == Token::Kind::minus) {
      lex_.take();
      return make_unary(factor());
    }
    return power();
  }

  NodePtr power() {
    NodePtr base = atom();
    if (lex_.peek().kind == Token::Kind::caret) {
      lex_.take();
      bool neg = false;
      if (lex_.peek().kind == Token::Kind::minus) {
        lex_.take();
        neg = true;
      }
      Token t = lex_.take();
      if (t.kind != Token::Kind::number || t.text.find_first_of(".eE") != std::string::npos)
        throw ParseError("exponent must be a literal integer", t.pos);
      long k = std::stol(t.text);
      return make_power(base, neg ? -k : k);
    }
    return base;
  }

  NodePtr atom() {
    Token t = lex_.take();
    switch (t.kind) {
      case Token::Kind::number:
        return make_number(t.number);
      case Token::Kind::lparen: {
        NodePtr e = expression();
        Token close = lex_.take();
        if (close.kind != Token::Kind::rparen)
          throw ParseError("expected ')'", close.pos);
        return e;
      }
      case Token::Kind::identifier: {
        if (lex_.peek().kind == Token::Kind::lparen) {
          Func f;
          if (t.text == "sin") f = Func::sin;
          else if (t.text == "cos") f = Func::cos;
          else if (t.text == "exp") f = Func::exp;
          else if (t.text == "log") f = Func::log;
          else if (t.text == "sqrt") f = Func::sqrt;
          else if (t.text == "tanh") f = Func::tanh;
          else throw ParseError("unknown function '" + t.text + "'", t.pos);
          lex_.take();  // '('
          NodePtr arg = expression();
          Token close = lex_.take();
          if (close.kind == Token::Kind::end)
            throw ParseError("missing ')' in call to " + t.text, close.pos);
          if (close.kind != Token::Kind::rparen)
            throw ParseError(t.text + " takes exactly one argument", close.pos);
          return make_call(f, arg);
        }
        for (std::size_t i = 0; i < vars_.size(); ++i)
          if (vars_[i] == t.text) return make_variable(i);
        throw ParseError("reference to undeclared variable '" + t.text + "'", t.pos);
      }
      default:
        throw ParseError("unexpected token", t.pos);
    }
  }

  Lexer lex_;
  const std::vector<std::string>& vars_;
};

}  // namespace
}  // namespace detail

double ScalarField::eval(std::span<const double> point) const {
  if (point.size() != vars_.size())
    throw Error("point dimension " + std::to_string(point.size()) +
                " does not match field arity " + std::to_string(vars_.size()));
  if (ast_) return detail::eval_node(*ast_, point);
  if (fn_) return fn_(point);
  throw Error("empty ScalarField");
}

std::string ScalarField::pretty() const {
  if (!ast_) throw Error("pretty(): field is not a parsed expression");
  std::string out;
  detail::print_node(*ast_, vars_, out);
  return out;
}

ScalarField parse_expr(std::string_view source, std::vector<std::string> variables) {
  if (variables.empty()) throw Error("parse_expr: variable list is empty");
  for (std::size_t i = 0; i < variables.size(); ++i)
    for (std::size_t j = i + 1; j < variables.size(); ++j)
      if (variables[i] == variables[j])
        throw Error("parse_expr: duplicate variable name '" + variables[i] + "'");
  detail::Parser parser(source, variables);
  ScalarField f;
  f.ast_ = parser.parse();
  f.vars_ = std::move(variables);
  f.source_ = std::string(source);
  return f;
}

ScalarField constant_field(double value, std::vector<std::string> variables) {
  ScalarField f;
  f.ast_ = detail::make_number(value);
  f.vars_ = std::move(variables);
  f.source_ = f.pretty();
  return f;
}

ScalarField coordinate_field(std::size_t index, std::vector<std::string> variables) {
  if (index >= variables.size()) throw Error("coordinate_field: index out of range");
  ScalarField f;
  f.ast_ = detail::make_variable(index);
  f.vars_ = std::move(variables);
  f.source_ = f.vars_[index];
  return f;
}

ScalarField derived_field(std::string label, std::vector<std::string> variables,
                          ScalarField::Fn fn) {
  ScalarField f;
  f.fn_ = std::move(fn);
  f.vars_ = std::move(variables);
  f.source_ = std::move(label);
  return f;
}

ScalarField remap_variables(const ScalarField& f, std::vector<std::string> new_variables,
                            const std::vector<std::size_t>& index_map) {
  if (index_map.size() != f.arity())
    throw Error("remap_variables: index map size mismatch");
  for (std::size_t m : index_map)
    if (m >= new_variables.size()) throw Error("remap_variables: index out of range");
  ScalarField out;
  if (f.ast_) {
    out.ast_ = detail::transform_vars(f.ast_, index_map);
    out.vars_ = std::move(new_variables);
    out.source_ = out.pretty();
    return out;
  }
  auto inner = f;
  auto map = index_map;
  out.fn_ = [inner, map](std::span<const double> p) {
    std::vector<double> q(map.size());
    for (std::size_t i = 0; i < map.size(); ++i) q[i] = p[map[i]];
    return inner.eval(q);
  };
  out.vars_ = std::move(new_variables);
  out.source_ = f.source_;
  return out;
}

ScalarField restrict_tail(const ScalarField& f, std::size_t keep) {
  if (keep > f.arity()) throw Error("restrict_tail: keep exceeds arity");
  std::vector<std::string> new_vars(f.variables().begin(), f.variables().begin() + keep);
  ScalarField out;
  if (f.ast_) {
    std::vector<std::size_t> map(f.arity(), detail::kDropToZero);
    for (std::size_t i = 0; i < keep; ++i) map[i] = i;
    out.ast_ = detail::transform_vars(f.ast_, map);
    out.vars_ = std::move(new_vars);
    out.source_ = out.pretty();
    return out;
  }
  auto inner = f;
  const std::size_t full = f.arity();
  out.fn_ = [inner, full, keep](std::span<const double> p) {
    std::vector<double> q(full, 0.0);
    for (std::size_t i = 0; i < keep; ++i) q[i] = p[i];
    return inner.eval(q);
  };
  out.vars_ = std::move(new_vars);
  out.source_ = f.source_ + " |C";
  return out;
}

namespace {

// Closure-backed fallback used when either operand is not a parsed expression.
ScalarField combine(const ScalarField& a, const ScalarField& b, detail::Op op,
                    const char* opname) {
  if (a.variables() != b.variables())
    throw Error(std::string("field ") + opname + ": variable lists differ");
  auto fa = a, fb = b;
  return derived_field("(" + a.source() + opname + b.source() + ")", a.variables(),
                       [fa, fb, op](std::span<const double> p) {
                         const double l = fa.eval(p), r = fb.eval(p);
                         switch (op) {
                           case detail::Op::add: return l + r;
                           case detail::Op::sub: return l - r;
                           case detail::Op::mul: return l * r;
                           case detail::Op::div:
                             if (r == 0.0) throw EvalError("division by zero");
                             return l / r;
                         }
                         return 0.0;
                       });
}

}  // namespace

ScalarField operator+(const ScalarField& a, const ScalarField& b) {
  if (a.is_parsed() && b.is_parsed() && a.variables() == b.variables()) {
    ScalarField out;
    out.ast_ = detail::make_binary(detail::Op::add, a.ast_, b.ast_);
    out.vars_ = a.vars_;
    out.source_ = out.pretty();
    return out;
  }
  return combine(a, b, detail::Op::add, " + ");
}

ScalarField operator-(const ScalarField& a, const ScalarField& b) {
  if (a.is_parsed() && b.is_parsed() && a.variables() == b.variables()) {
    ScalarField out;
    out.ast_ = detail::make_binary(detail::Op::sub, a.ast_, b.ast_);
    out.vars_ = a.vars_;
    out.source_ = out.pretty();
    return out;
  }
  return combine(a, b, detail::Op::sub, " - ");
}

ScalarField operator*(const ScalarField& a, const ScalarField& b) {
  if (a.is_parsed() && b.is_parsed() && a.variables() == b.variables()) {
    ScalarField out;
    out.ast_ = detail::make_binary(detail::Op::mul, a.ast_, b.ast_);
    out.vars_ = a.vars_;
    out.source_ = out.pretty();
    return out;
  }
  return combine(a, b, detail::Op::mul, "*");
}

ScalarField operator*(double c, const ScalarField& b) {
  return constant_field(c, b.variables()) * b;
}

double partial(const ScalarField& f, std::size_t index, std::span<const double> point,
               double step) {
  if (index >= f.arity()) throw Error("partial: coordinate index out of range");
  if (!(step > 0.0)) throw Error("partial: step must be positive");
  std::vector<double> q(point.begin(), point.end());
  const double x = q[index];
  q[index] = x - 2 * step;
  const double fm2 = f.eval(q);
  q[index] = x - step;
  const double fm1 = f.eval(q);
  q[index] = x + step;
  const double fp1 = f.eval(q);
  q[index] = x + 2 * step;
  const double fp2 = f.eval(q);
  return (fm2 - 8 * fm1 + 8 * fp1 - fp2) / (12 * step);
}

}  // namespace algebrokit
