#pragma once

#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "qes/error.hpp"

namespace qes::expr {

enum class UnaryOp { Negate, Exp, Ln, Sin, Cos, Sqrt };
enum class BinaryOp { Add, Sub, Mul, Div };

class Node;
using NodePtr = std::shared_ptr<const Node>;
using VarList = std::shared_ptr<const std::vector<std::string>>;

/// Immutable AST node. Shared freely between expressions; never mutated
/// after construction.
class Node {
public:
  enum class Kind { Constant, Variable, Unary, Binary, IntPow };

  Kind kind;
  double value = 0.0;       // Constant
  int slot = -1;            // Variable: index into the variable list
  std::string name;         // Variable
  UnaryOp uop{};            // Unary
  BinaryOp bop{};           // Binary
  int exponent = 0;         // IntPow
  NodePtr a, b;             // children (a only for Unary/IntPow)

  static NodePtr constant(double v);
  static NodePtr variable(int slot, std::string name);
  static NodePtr unary(UnaryOp op, NodePtr child);
  static NodePtr binary(BinaryOp op, NodePtr lhs, NodePtr rhs);
  static NodePtr int_pow(NodePtr base, int exponent);
};

/// Symbolic expression of one or several real variables. Supports exact
/// differentiation, pointwise IEEE-double evaluation, light simplification
/// (constant folding + identity elimination) and a canonical printer whose
/// output reparses to a value-identical expression.
///
/// Expressions are immutable; copies share structure and are safe for
/// concurrent reads.
class Expression {
public:
  /// Parse `source` over the declared variable list. Grammar: infix with
  /// the usual precedence, `^` takes an integer-literal exponent, functions
  /// exp/ln/sin/cos/sqrt, no implicit multiplication.
  static Expression parse(std::string_view source,
                          const std::vector<std::string>& variables);

  static Expression constant(double v, VarList vars);
  static Expression variable(const std::string& name, VarList vars);

  /// Exact symbolic derivative with respect to a declared variable.
  Expression differentiate(const std::string& var) const;
  Expression differentiate(int slot) const;

  /// Value-preserving simplification (constant folding, x+0, x*1, x*0,
  /// x^0, x^1, double negation). No rational or like-term rewriting.
  Expression simplified() const;

  /// Evaluate at a point given as name -> value. Every variable of the
  /// expression universe must be bound.
  double evaluate(const std::unordered_map<std::string, double>& point) const;

  /// Fast path: values indexed by variable slot.
  double evaluate(std::span<const double> values) const;

  /// Canonical printer; parse(str()) evaluates identically.
  std::string str() const;

  const std::vector<std::string>& variables() const { return *vars_; }
  VarList variable_list() const { return vars_; }
  int slot_of(const std::string& var) const;  // -1 if not declared

  bool depends_on(int slot) const;
  bool is_constant_value(double v) const;

  const NodePtr& root() const { return root_; }

  Expression(NodePtr root, VarList vars);

private:
  NodePtr root_;
  VarList vars_;
};

// Arithmetic builders. Operands must share the same variable universe.
Expression operator+(const Expression& a, const Expression& b);
Expression operator-(const Expression& a, const Expression& b);
Expression operator*(const Expression& a, const Expression& b);
Expression operator/(const Expression& a, const Expression& b);
Expression operator-(const Expression& a);
Expression int_pow(const Expression& base, int exponent);
Expression apply(UnaryOp op, const Expression& a);

/// Shared variable list helper.
VarList make_variable_list(std::vector<std::string> names);

/// True when the expression evaluates to ~0 at a deterministic sample of
/// points (and structurally for plain constants). Used to detect
/// degenerate derivatives; heuristic by design.
bool is_identically_zero(const Expression& e);

/// Central finite difference (d/d slot) with step h; test oracle helper.
double central_difference(const Expression& e, int slot,
                          std::span<const double> point, double h);

}  // namespace qes::expr
