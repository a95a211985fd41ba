#pragma once

// Scalar coordinate expressions with second-order forward-mode derivatives.
//
// Grammar accepted by parse_expr (whitespace is insignificant):
//
//   expr     := term (('+' | '-') term)*
//   term     := factor (('*' | '/') factor)*
//   factor   := '-' factor | power
//   power    := primary ('^' exponent)?
//   exponent := '-' exponent | primary
//   primary  := number | symbol | func '(' expr ')' | '(' expr ')'
//   func     := exp | log | sin | cos | tan | sinh | cosh | sqrt
//
// Unary minus binds looser than '^', so "-x^2" is -(x^2).

#include <cstddef>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace fman {

class ExprError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public ExprError {
 public:
  ParseError(const std::string& message, std::size_t position);
  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

class UnknownSymbolError : public ParseError {
 public:
  UnknownSymbolError(std::string symbol, std::size_t position);
  const std::string& symbol() const noexcept { return symbol_; }

 private:
  std::string symbol_;
};

/// Raised when an evaluation produces a non-finite or undefined intermediate.
class DomainError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Value, gradient and Hessian of a scalar at a point of an m-dimensional chart.
struct Jet2 {
  double value = 0.0;
  Eigen::VectorXd gradient;
  Eigen::MatrixXd hessian;

  static Jet2 constant(std::size_t dim, double value);
  static Jet2 variable(std::size_t dim, std::size_t index, double value);
  std::size_t dim() const noexcept { return static_cast<std::size_t>(gradient.size()); }
};

enum class ExprKind {
  constant,
  symbol,
  add,
  sub,
  mul,
  div,
  neg,
  pow,
  exp,
  log,
  sin,
  cos,
  tan,
  sinh,
  cosh,
  sqrt,
};

struct ExprNode;

/// Immutable expression tree. Copies share structure; evaluation is pure and
/// thread-safe.
class Expr {
 public:
  Expr();  // constant 0
  Expr(double value);  // NOLINT(google-explicit-constructor): numeric literals read naturally

  static Expr symbol(std::size_t index, std::string name);

  ExprKind kind() const noexcept;
  double constant_value() const;  // only for ExprKind::constant
  std::size_t symbol_index() const;
  const std::string& symbol_name() const;
  const Expr& lhs() const;  // operand of unary nodes, left operand of binary nodes
  const Expr& rhs() const;

  bool is_constant() const noexcept { return kind() == ExprKind::constant; }
  bool is_constant(double v) const noexcept;

  double evaluate(const Eigen::VectorXd& point) const;
  Jet2 evaluate_jet(const Eigen::VectorXd& point) const;

  /// Text in the parse_expr grammar; parse(to_string()) reproduces this tree.
  std::string to_string() const;

  /// Sorted, de-duplicated symbol indices.
  std::vector<std::size_t> symbols() const;

  /// Re-targets every symbol to the coordinate of the same name in `coordinates`.
  Expr rebind(std::span<const std::string> coordinates) const;

  friend bool operator==(const Expr& a, const Expr& b);

  friend Expr operator+(const Expr& a, const Expr& b);
  friend Expr operator-(const Expr& a, const Expr& b);
  friend Expr operator*(const Expr& a, const Expr& b);
  friend Expr operator/(const Expr& a, const Expr& b);
  friend Expr operator-(const Expr& a);

  // Raw node construction with no folding; used by the parser.
  static Expr make_unary(ExprKind kind, Expr operand);
  static Expr make_binary(ExprKind kind, Expr lhs, Expr rhs);

 private:
  explicit Expr(std::shared_ptr<const ExprNode> node) : node_(std::move(node)) {}
  std::shared_ptr<const ExprNode> node_;
};

struct ExprNode {
  ExprKind kind = ExprKind::constant;
  double value = 0.0;
  std::size_t index = 0;
  std::string name;
  Expr lhs;
  Expr rhs;
};

Expr pow(const Expr& base, const Expr& exponent);
Expr exp(const Expr& x);
Expr log(const Expr& x);
Expr sin(const Expr& x);
Expr cos(const Expr& x);
Expr tan(const Expr& x);
Expr sinh(const Expr& x);
Expr cosh(const Expr& x);
Expr sqrt(const Expr& x);

Expr parse_expr(std::string_view text, std::span<const std::string> coordinates);

}  // namespace fman
