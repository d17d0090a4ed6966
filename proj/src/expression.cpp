#include "qes/expression.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <algorithm>
#include <utility>

namespace qes::expr {

namespace {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

// ---------------------------------------------------------------------------
// Node factories

NodePtr Node::constant(double v) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Constant;
  n->value = v;
  return n;
}

NodePtr Node::variable(int slot, std::string name) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Variable;
  n->slot = slot;
  n->name = std::move(name);
  return n;
}

NodePtr Node::unary(UnaryOp op, NodePtr child) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Unary;
  n->uop = op;
  n->a = std::move(child);
  return n;
}

NodePtr Node::binary(BinaryOp op, NodePtr lhs, NodePtr rhs) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Binary;
  n->bop = op;
  n->a = std::move(lhs);
  n->b = std::move(rhs);
  return n;
}

NodePtr Node::int_pow(NodePtr base, int exponent) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::IntPow;
  n->exponent = exponent;
  n->a = std::move(base);
  return n;
}

// ---------------------------------------------------------------------------
// Printing

namespace {

// Precedence levels for the canonical printer. Negative constants print
// with the precedence of unary minus so (-2)^2 keeps its parentheses.
int print_prec(const Node& n) {
  switch (n.kind) {
    case Node::Kind::Constant:
      return std::signbit(n.value) ? 3 : 5;
    case Node::Kind::Variable:
      return 5;
    case Node::Kind::Unary:
      return n.uop == UnaryOp::Negate ? 3 : 5;
    case Node::Kind::Binary:
      return (n.bop == BinaryOp::Add || n.bop == BinaryOp::Sub) ? 1 : 2;
    case Node::Kind::IntPow:
      return 4;
  }
  return 5;
}

void print_node(const Node& n, int min_prec, std::string& out) {
  const int prec = print_prec(n);
  const bool parens = prec < min_prec;
  if (parens) out += '(';
  switch (n.kind) {
    case Node::Kind::Constant:
      out += format_double(n.value);
      break;
    case Node::Kind::Variable:
      out += n.name;
      break;
    case Node::Kind::Unary:
      switch (n.uop) {
        case UnaryOp::Negate:
          out += '-';
          print_node(*n.a, 4, out);
          break;
        case UnaryOp::Exp: out += "exp("; print_node(*n.a, 0, out); out += ')'; break;
        case UnaryOp::Ln: out += "ln("; print_node(*n.a, 0, out); out += ')'; break;
        case UnaryOp::Sin: out += "sin("; print_node(*n.a, 0, out); out += ')'; break;
        case UnaryOp::Cos: out += "cos("; print_node(*n.a, 0, out); out += ')'; break;
        case UnaryOp::Sqrt: out += "sqrt("; print_node(*n.a, 0, out); out += ')'; break;
      }
      break;
    case Node::Kind::Binary: {
      const char* op = nullptr;
      switch (n.bop) {
        case BinaryOp::Add: op = " + "; break;
        case BinaryOp::Sub: op = " - "; break;
        case BinaryOp::Mul: op = "*"; break;
        case BinaryOp::Div: op = "/"; break;
      }
      // Right operand always gets prec+1 so reparsing preserves the exact
      // association (and hence the bitwise value).
      print_node(*n.a, prec, out);
      out += op;
      print_node(*n.b, prec + 1, out);
      break;
    }
    case Node::Kind::IntPow:
      print_node(*n.a, 5, out);
      out += '^';
      out += std::to_string(n.exponent);
      break;
  }
  if (parens) out += ')';
}

}  // namespace

std::string Expression::str() const {
  std::string out;
  print_node(*root_, 0, out);
  return out;
}

// ---------------------------------------------------------------------------
// Evaluation

namespace {

[[noreturn]] void domain_error(const Node& n, const std::string& what) {
  std::string sub;
  print_node(n, 0, sub);
  throw Error(ErrorKind::DomainError, what + " in subexpression '" + sub + "'");
}

double integer_power(double base, int exponent, const Node& n) {
  if (exponent == 0) return 1.0;
  unsigned long e =
      exponent < 0 ? -static_cast<long>(exponent) : static_cast<long>(exponent);
  double r = 1.0, p = base;
  while (e != 0) {
    if (e & 1u) r *= p;
    p *= p;
    e >>= 1;
  }
  if (exponent < 0) {
    if (r == 0.0) domain_error(n, "zero raised to a negative power");
    return 1.0 / r;
  }
  return r;
}

double eval_node(const Node& n, std::span<const double> values) {
  switch (n.kind) {
    case Node::Kind::Constant:
      return n.value;
    case Node::Kind::Variable:
      return values[static_cast<size_t>(n.slot)];
    case Node::Kind::Unary: {
      const double a = eval_node(*n.a, values);
      switch (n.uop) {
        case UnaryOp::Negate: return -a;
        case UnaryOp::Exp: return std::exp(a);
        case UnaryOp::Ln:
          if (!(a > 0.0)) domain_error(n, "ln of non-positive argument");
          return std::log(a);
        case UnaryOp::Sin: return std::sin(a);
        case UnaryOp::Cos: return std::cos(a);
        case UnaryOp::Sqrt:
          if (a < 0.0) domain_error(n, "sqrt of negative argument");
          return std::sqrt(a);
      }
      break;
    }
    case Node::Kind::Binary: {
      const double a = eval_node(*n.a, values);
      const double b = eval_node(*n.b, values);
      switch (n.bop) {
        case BinaryOp::Add: return a + b;
        case BinaryOp::Sub: return a - b;
        case BinaryOp::Mul: return a * b;
        case BinaryOp::Div:
          if (b == 0.0) domain_error(n, "division by zero");
          return a / b;
      }
      break;
    }
    case Node::Kind::IntPow:
      return integer_power(eval_node(*n.a, values), n.exponent, n);
  }
  return 0.0;  // unreachable
}

}  // namespace

double Expression::evaluate(std::span<const double> values) const {
  if (values.size() != vars_->size())
    fail(ErrorKind::DimensionMismatch,
         "expected " + std::to_string(vars_->size()) + " values, got " +
             std::to_string(values.size()));
  return eval_node(*root_, values);
}

double Expression::evaluate(
    const std::unordered_map<std::string, double>& point) const {
  std::vector<double> values(vars_->size());
  for (size_t i = 0; i < vars_->size(); ++i) {
    auto it = point.find((*vars_)[i]);
    if (it == point.end())
      fail(ErrorKind::DomainError, "unbound variable '" + (*vars_)[i] + "'");
    values[i] = it->second;
  }
  return eval_node(*root_, values);
}

// ---------------------------------------------------------------------------
// Differentiation

namespace {

NodePtr diff_node(const NodePtr& n, int slot);

NodePtr c0() { return Node::constant(0.0); }
NodePtr c1() { return Node::constant(1.0); }

NodePtr diff_node(const NodePtr& n, int slot) {
  using K = Node::Kind;
  switch (n->kind) {
    case K::Constant:
      return c0();
    case K::Variable:
      return n->slot == slot ? c1() : c0();
    case K::Unary: {
      NodePtr da = diff_node(n->a, slot);
      switch (n->uop) {
        case UnaryOp::Negate:
          return Node::unary(UnaryOp::Negate, da);
        case UnaryOp::Exp:
          return Node::binary(BinaryOp::Mul, Node::unary(UnaryOp::Exp, n->a), da);
        case UnaryOp::Ln:
          return Node::binary(BinaryOp::Div, da, n->a);
        case UnaryOp::Sin:
          return Node::binary(BinaryOp::Mul, Node::unary(UnaryOp::Cos, n->a), da);
        case UnaryOp::Cos:
          return Node::unary(
              UnaryOp::Negate,
              Node::binary(BinaryOp::Mul, Node::unary(UnaryOp::Sin, n->a), da));
        case UnaryOp::Sqrt:
          return Node::binary(
              BinaryOp::Div, da,
              Node::binary(BinaryOp::Mul, Node::constant(2.0),
                           Node::unary(UnaryOp::Sqrt, n->a)));
      }
      break;
    }
    case K::Binary: {
      NodePtr da = diff_node(n->a, slot);
      NodePtr db = diff_node(n->b, slot);
      switch (n->bop) {
        case BinaryOp::Add:
          return Node::binary(BinaryOp::Add, da, db);
        case BinaryOp::Sub:
          return Node::binary(BinaryOp::Sub, da, db);
        case BinaryOp::Mul:
          return Node::binary(BinaryOp::Add,
                              Node::binary(BinaryOp::Mul, da, n->b),
                              Node::binary(BinaryOp::Mul, n->a, db));
        case BinaryOp::Div:
          return Node::binary(
              BinaryOp::Div,
              Node::binary(BinaryOp::Sub,
                           Node::binary(BinaryOp::Mul, da, n->b),
                           Node::binary(BinaryOp::Mul, n->a, db)),
              Node::int_pow(n->b, 2));
      }
      break;
    }
    case K::IntPow: {
      NodePtr da = diff_node(n->a, slot);
      NodePtr rule = Node::binary(BinaryOp::Mul,
                                  Node::constant(static_cast<double>(n->exponent)),
                                  Node::int_pow(n->a, n->exponent - 1));
      return Node::binary(BinaryOp::Mul, rule, da);
    }
  }
  return c0();  // unreachable
}

}  // namespace

Expression Expression::differentiate(int slot) const {
  if (slot < 0 || static_cast<size_t>(slot) >= vars_->size())
    fail(ErrorKind::UnknownIdentifier, "derivative slot out of range");
  return Expression(diff_node(root_, slot), vars_).simplified();
}

Expression Expression::differentiate(const std::string& var) const {
  int slot = slot_of(var);
  if (slot < 0)
    fail(ErrorKind::UnknownIdentifier,
         "'" + var + "' is not a declared variable");
  return differentiate(slot);
}

// ---------------------------------------------------------------------------
// Simplification

namespace {

bool is_const(const NodePtr& n, double v) {
  return n->kind == Node::Kind::Constant && n->value == v;
}

NodePtr simplify_node(const NodePtr& n) {
  using K = Node::Kind;
  switch (n->kind) {
    case K::Constant:
    case K::Variable:
      return n;
    case K::Unary: {
      NodePtr a = simplify_node(n->a);
      if (n->uop == UnaryOp::Negate) {
        if (a->kind == K::Constant) return Node::constant(-a->value);
        if (a->kind == K::Unary && a->uop == UnaryOp::Negate) return a->a;
      }
      NodePtr out = Node::unary(n->uop, a);
      if (a->kind == K::Constant) {
        try {
          return Node::constant(eval_node(*out, {}));
        } catch (const Error&) {
          // keep symbolic; evaluation will report the domain error
        }
      }
      return out;
    }
    case K::Binary: {
      NodePtr a = simplify_node(n->a);
      NodePtr b = simplify_node(n->b);
      switch (n->bop) {
        case BinaryOp::Add:
          if (is_const(a, 0.0)) return b;
          if (is_const(b, 0.0)) return a;
          break;
        case BinaryOp::Sub:
          if (is_const(b, 0.0)) return a;
          if (is_const(a, 0.0)) return simplify_node(Node::unary(UnaryOp::Negate, b));
          break;
        case BinaryOp::Mul:
          if (is_const(a, 0.0) || is_const(b, 0.0)) return Node::constant(0.0);
          if (is_const(a, 1.0)) return b;
          if (is_const(b, 1.0)) return a;
          break;
        case BinaryOp::Div:
          if (is_const(b, 1.0)) return a;
          break;
      }
      NodePtr out = Node::binary(n->bop, a, b);
      if (a->kind == K::Constant && b->kind == K::Constant) {
        try {
          return Node::constant(eval_node(*out, {}));
        } catch (const Error&) {
        }
      }
      return out;
    }
    case K::IntPow: {
      NodePtr a = simplify_node(n->a);
      if (n->exponent == 0) return Node::constant(1.0);
      if (n->exponent == 1) return a;
      NodePtr out = Node::int_pow(a, n->exponent);
      if (a->kind == K::Constant) {
        try {
          return Node::constant(eval_node(*out, {}));
        } catch (const Error&) {
        }
      }
      return out;
    }
  }
  return n;
}

}  // namespace

Expression Expression::simplified() const {
  return Expression(simplify_node(root_), vars_);
}

// ---------------------------------------------------------------------------
// Parsing

namespace {

struct Token {
  enum class Kind { Number, Ident, Op, End };
  Kind kind;
  char op = 0;          // for Kind::Op: one of + - * / ^ ( )
  double value = 0.0;   // for Kind::Number
  std::string text;     // for Kind::Ident
  long offset = 0;
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
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_])))
      ++pos_;
    tok_.offset = static_cast<long>(pos_);
    if (pos_ >= src_.size()) {
      tok_.kind = Token::Kind::End;
      return;
    }
    const char c = src_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      const char* begin = src_.data() + pos_;
      char* end = nullptr;
      tok_.value = std::strtod(begin, &end);
      if (end == begin)
        throw Error(ErrorKind::SyntaxError,
                    "malformed number at offset " + std::to_string(pos_))
            .with_offset(static_cast<long>(pos_));
      pos_ += static_cast<size_t>(end - begin);
      tok_.kind = Token::Kind::Number;
      return;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      size_t start = pos_;
      while (pos_ < src_.size() &&
             (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
        ++pos_;
      tok_.kind = Token::Kind::Ident;
      tok_.text = std::string(src_.substr(start, pos_ - start));
      return;
    }
    if (c == '+' || c == '-' || c == '*' || c == '/' || c == '^' || c == '(' ||
        c == ')') {
      tok_.kind = Token::Kind::Op;
      tok_.op = c;
      ++pos_;
      return;
    }
    throw Error(ErrorKind::SyntaxError,
                std::string("unexpected character '") + c + "' at offset " +
                    std::to_string(pos_))
        .with_offset(static_cast<long>(pos_));
  }

  std::string_view src_;
  size_t pos_ = 0;
  Token tok_;
};

class Parser {
public:
  Parser(std::string_view src, const std::vector<std::string>& vars)
      : lex_(src), vars_(vars) {}

  NodePtr parse() {
    NodePtr e = parse_sum();
    const Token& t = lex_.peek();
    if (t.kind != Token::Kind::End)
      throw Error(ErrorKind::SyntaxError,
                  "unexpected input at offset " + std::to_string(t.offset))
          .with_offset(t.offset);
    return e;
  }

private:
  bool at_op(char c) const {
    return lex_.peek().kind == Token::Kind::Op && lex_.peek().op == c;
  }

  NodePtr parse_sum() {
    NodePtr e = parse_term();
    while (at_op('+') || at_op('-')) {
      char op = lex_.take().op;
      NodePtr rhs = parse_term();
      e = Node::binary(op == '+' ? BinaryOp::Add : BinaryOp::Sub, e, rhs);
    }
    return e;
  }

  NodePtr parse_term() {
    NodePtr e = parse_factor();
    while (at_op('*') || at_op('/')) {
      char op = lex_.take().op;
      NodePtr rhs = parse_factor();
      e = Node::binary(op == '*' ? BinaryOp::Mul : BinaryOp::Div, e, rhs);
    }
    return e;
  }

  NodePtr parse_factor() {
    if (at_op('-')) {
      lex_.take();
      return Node::unary(UnaryOp::Negate, parse_factor());
    }
    if (at_op('+')) {
      lex_.take();
      return parse_factor();
    }
    NodePtr base = parse_primary();
    if (at_op('^')) {
      long off = lex_.peek().offset;
      lex_.take();
      base = Node::int_pow(base, parse_exponent(off));
      if (at_op('^'))
        throw Error(ErrorKind::SyntaxError,
                    "chained '^' requires parentheses (offset " +
                        std::to_string(lex_.peek().offset) + ")")
            .with_offset(lex_.peek().offset);
    }
    return base;
  }

  int parse_exponent(long caret_offset) {
    int sign = 1;
    if (at_op('-')) {
      lex_.take();
      sign = -1;
    } else if (at_op('+')) {
      lex_.take();
    }
    const Token& t = lex_.peek();
    if (t.kind != Token::Kind::Number)
      throw Error(ErrorKind::SyntaxError,
                  "expected integer exponent after '^' at offset " +
                      std::to_string(t.offset))
          .with_offset(t.offset);
    Token num = lex_.take();
    double v = num.value;
    if (v != std::floor(v) || std::abs(v) > 64.0)
      throw Error(ErrorKind::SyntaxError,
                  "exponent must be an integer with |k| <= 64 at offset " +
                      std::to_string(num.offset))
          .with_offset(num.offset);
    (void)caret_offset;
    return sign * static_cast<int>(v);
  }

  NodePtr parse_primary() {
    const Token& t = lex_.peek();
    switch (t.kind) {
      case Token::Kind::Number:
        return Node::constant(lex_.take().value);
      case Token::Kind::Ident: {
        Token id = lex_.take();
        static const std::unordered_map<std::string, UnaryOp> kFunctions = {
            {"exp", UnaryOp::Exp}, {"ln", UnaryOp::Ln},   {"sin", UnaryOp::Sin},
            {"cos", UnaryOp::Cos}, {"sqrt", UnaryOp::Sqrt}};
        auto fn = kFunctions.find(id.text);
        if (fn != kFunctions.end()) {
          if (!at_op('('))
            throw Error(ErrorKind::SyntaxError,
                        "expected '(' after function '" + id.text +
                            "' at offset " + std::to_string(lex_.peek().offset))
                .with_offset(lex_.peek().offset);
          lex_.take();
          NodePtr arg = parse_sum();
          expect(')');
          return Node::unary(fn->second, arg);
        }
        for (size_t i = 0; i < vars_.size(); ++i)
          if (vars_[i] == id.text)
            return Node::variable(static_cast<int>(i), id.text);
        throw Error(ErrorKind::UnknownIdentifier,
                    "unknown identifier '" + id.text + "' at offset " +
                        std::to_string(id.offset))
            .with_offset(id.offset);
      }
      case Token::Kind::Op:
        if (t.op == '(') {
          lex_.take();
          NodePtr e = parse_sum();
          expect(')');
          return e;
        }
        throw Error(ErrorKind::SyntaxError,
                    "expected operand at offset " + std::to_string(t.offset))
            .with_offset(t.offset);
      case Token::Kind::End:
        throw Error(ErrorKind::SyntaxError,
                    "expected operand at offset " + std::to_string(t.offset))
            .with_offset(t.offset);
    }
    throw Error(ErrorKind::SyntaxError, "unreachable");
  }

  void expect(char c) {
    if (!at_op(c))
      throw Error(ErrorKind::SyntaxError,
                  std::string("expected '") + c + "' at offset " +
                      std::to_string(lex_.peek().offset))
          .with_offset(lex_.peek().offset);
    lex_.take();
  }

  Lexer lex_;
  const std::vector<std::string>& vars_;
};

}  // namespace

Expression::Expression(NodePtr root, VarList vars)
    : root_(std::move(root)), vars_(std::move(vars)) {}

Expression Expression::parse(std::string_view source,
                             const std::vector<std::string>& variables) {
  if (variables.empty())
    fail(ErrorKind::ConfigError, "variable list must be nonempty");
  for (size_t i = 0; i < variables.size(); ++i)
    for (size_t j = i + 1; j < variables.size(); ++j)
      if (variables[i] == variables[j])
        fail(ErrorKind::ConfigError, "duplicate variable '" + variables[i] + "'");
  Parser p(source, variables);
  return Expression(p.parse(), make_variable_list(variables));
}

Expression Expression::constant(double v, VarList vars) {
  return Expression(Node::constant(v), std::move(vars));
}

Expression Expression::variable(const std::string& name, VarList vars) {
  for (size_t i = 0; i < vars->size(); ++i)
    if ((*vars)[i] == name)
      return Expression(Node::variable(static_cast<int>(i), name), vars);
  fail(ErrorKind::UnknownIdentifier, "'" + name + "' is not a declared variable");
}

int Expression::slot_of(const std::string& var) const {
  for (size_t i = 0; i < vars_->size(); ++i)
    if ((*vars_)[i] == var) return static_cast<int>(i);
  return -1;
}

namespace {

bool node_depends_on(const Node& n, int slot) {
  switch (n.kind) {
    case Node::Kind::Constant: return false;
    case Node::Kind::Variable: return n.slot == slot;
    case Node::Kind::Unary:
    case Node::Kind::IntPow: return node_depends_on(*n.a, slot);
    case Node::Kind::Binary:
      return node_depends_on(*n.a, slot) || node_depends_on(*n.b, slot);
  }
  return false;
}

}  // namespace

bool Expression::depends_on(int slot) const { return node_depends_on(*root_, slot); }

bool Expression::is_constant_value(double v) const {
  return root_->kind == Node::Kind::Constant && root_->value == v;
}

// ---------------------------------------------------------------------------
// Builders

namespace {

VarList require_same_universe(const Expression& a, const Expression& b) {
  if (a.variable_list() == b.variable_list() ||
      a.variables() == b.variables())
    return a.variable_list();
  throw std::logic_error("expression operands use different variable lists");
}

}  // namespace

Expression operator+(const Expression& a, const Expression& b) {
  return Expression(Node::binary(BinaryOp::Add, a.root(), b.root()),
                    require_same_universe(a, b));
}
Expression operator-(const Expression& a, const Expression& b) {
  return Expression(Node::binary(BinaryOp::Sub, a.root(), b.root()),
                    require_same_universe(a, b));
}
Expression operator*(const Expression& a, const Expression& b) {
  return Expression(Node::binary(BinaryOp::Mul, a.root(), b.root()),
                    require_same_universe(a, b));
}
Expression operator/(const Expression& a, const Expression& b) {
  return Expression(Node::binary(BinaryOp::Div, a.root(), b.root()),
                    require_same_universe(a, b));
}
Expression operator-(const Expression& a) {
  return Expression(Node::unary(UnaryOp::Negate, a.root()), a.variable_list());
}
Expression int_pow(const Expression& base, int exponent) {
  return Expression(Node::int_pow(base.root(), exponent), base.variable_list());
}
Expression apply(UnaryOp op, const Expression& a) {
  return Expression(Node::unary(op, a.root()), a.variable_list());
}

VarList make_variable_list(std::vector<std::string> names) {
  return std::make_shared<const std::vector<std::string>>(std::move(names));
}

bool is_identically_zero(const Expression& e) {
  if (e.is_constant_value(0.0)) return true;
  if (e.root()->kind == Node::Kind::Constant) return false;
  // Deterministic low-discrepancy-ish sample on [-2.3, 2.7]^n.
  const size_t n = e.variables().size();
  std::vector<double> point(n);
  for (int s = 0; s < 24; ++s) {
    for (size_t i = 0; i < n; ++i) {
      double t = std::fmod(0.13 + 0.61803398874989484 * (s + 1) * (i + 1), 1.0);
      point[i] = -2.3 + 5.0 * t;
    }
    try {
      if (std::abs(e.evaluate(point)) > 1e-13) return false;
    } catch (const Error&) {
      // singular sample; inconclusive, try the next one
    }
  }
  return true;
}

double central_difference(const Expression& e, int slot,
                          std::span<const double> point, double h) {
  std::vector<double> p(point.begin(), point.end());
  p[static_cast<size_t>(slot)] = point[static_cast<size_t>(slot)] + h;
  const double fp = e.evaluate(p);
  p[static_cast<size_t>(slot)] = point[static_cast<size_t>(slot)] - h;
  const double fm = e.evaluate(p);
  return (fp - fm) / (2.0 * h);
}

}  // namespace qes::expr
