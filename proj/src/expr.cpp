#include "fman/expr.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <limits>
#include <optional>
#include <system_error>

namespace fman {

ParseError::ParseError(const std::string& message, std::size_t position)
    : ExprError(message + " at position " + std::to_string(position)), position_(position) {}

UnknownSymbolError::UnknownSymbolError(std::string symbol, std::size_t position)
    : ParseError("unknown symbol '" + symbol + "'", position), symbol_(std::move(symbol)) {}

Jet2 Jet2::constant(std::size_t dim, double value) {
  Jet2 j;
  j.value = value;
  j.gradient = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dim));
  j.hessian = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  return j;
}

Jet2 Jet2::variable(std::size_t dim, std::size_t index, double value) {
  Jet2 j = constant(dim, value);
  j.gradient(static_cast<Eigen::Index>(index)) = 1.0;
  return j;
}

namespace {

constexpr double kTinyDivisor = 1e-300;

const char* kind_name(ExprKind k) {
  switch (k) {
    case ExprKind::exp: return "exp";
    case ExprKind::log: return "log";
    case ExprKind::sin: return "sin";
    case ExprKind::cos: return "cos";
    case ExprKind::tan: return "tan";
    case ExprKind::sinh: return "sinh";
    case ExprKind::cosh: return "cosh";
    case ExprKind::sqrt: return "sqrt";
    default: return "";
  }
}

std::optional<ExprKind> function_kind(std::string_view name) {
  static constexpr std::pair<std::string_view, ExprKind> table[] = {
      {"exp", ExprKind::exp},   {"log", ExprKind::log},   {"sin", ExprKind::sin},
      {"cos", ExprKind::cos},   {"tan", ExprKind::tan},   {"sinh", ExprKind::sinh},
      {"cosh", ExprKind::cosh}, {"sqrt", ExprKind::sqrt},
  };
  for (const auto& [n, k] : table) {
    if (n == name) return k;
  }
  return std::nullopt;
}

// Exponent that is applied exactly by repeated multiplication.
std::optional<int> integer_exponent(const Expr& e) {
  if (!e.is_constant()) return std::nullopt;
  const double v = e.constant_value();
  if (std::abs(v) > 1e6 || v != std::round(v)) return std::nullopt;
  return static_cast<int>(v);
}

void require_finite(double v, const char* what) {
  if (!std::isfinite(v)) throw DomainError(std::string("non-finite result in ") + what);
}

void require_finite(const Jet2& j, const char* what) {
  require_finite(j.value, what);
  if (!j.gradient.allFinite() || !j.hessian.allFinite()) {
    throw DomainError(std::string("non-finite derivative in ") + what);
  }
}

// Chain rule for y = phi(x) given phi, phi', phi'' at x.
Jet2 chain(const Jet2& x, double f0, double f1, double f2) {
  Jet2 r;
  r.value = f0;
  r.gradient = f1 * x.gradient;
  r.hessian = f1 * x.hessian + f2 * (x.gradient * x.gradient.transpose());
  return r;
}

Jet2 add(const Jet2& a, const Jet2& b) {
  return Jet2{a.value + b.value, a.gradient + b.gradient, a.hessian + b.hessian};
}

Jet2 sub(const Jet2& a, const Jet2& b) {
  return Jet2{a.value - b.value, a.gradient - b.gradient, a.hessian - b.hessian};
}

Jet2 mul(const Jet2& a, const Jet2& b) {
  Jet2 r;
  r.value = a.value * b.value;
  r.gradient = a.value * b.gradient + b.value * a.gradient;
  const Eigen::MatrixXd cross = a.gradient * b.gradient.transpose();
  r.hessian = a.value * b.hessian + b.value * a.hessian + cross + cross.transpose();
  return r;
}

Jet2 reciprocal(const Jet2& x) {
  if (std::abs(x.value) < kTinyDivisor) throw DomainError("division by zero");
  const double inv = 1.0 / x.value;
  return chain(x, inv, -inv * inv, 2.0 * inv * inv * inv);
}

Jet2 log_jet(const Jet2& x) {
  if (!(x.value > 0.0)) throw DomainError("log of non-positive value");
  return chain(x, std::log(x.value), 1.0 / x.value, -1.0 / (x.value * x.value));
}

Jet2 exp_jet(const Jet2& x) {
  const double e = std::exp(x.value);
  return chain(x, e, e, e);
}

Jet2 int_pow(const Jet2& x, int n) {
  if (n == 0) return Jet2::constant(x.dim(), 1.0);
  if (n < 0 && std::abs(x.value) < kTinyDivisor) throw DomainError("division by zero in pow");
  const double v = x.value;
  const double f0 = std::pow(v, n);
  const double f1 = n * std::pow(v, n - 1);
  const double f2 = (n == 1) ? 0.0 : static_cast<double>(n) * (n - 1) * std::pow(v, n - 2);
  return chain(x, f0, f1, f2);
}

Jet2 eval_jet(const Expr& e, const Eigen::VectorXd& p) {
  const std::size_t dim = static_cast<std::size_t>(p.size());
  Jet2 r;
  switch (e.kind()) {
    case ExprKind::constant:
      return Jet2::constant(dim, e.constant_value());
    case ExprKind::symbol: {
      const std::size_t i = e.symbol_index();
      if (i >= dim) throw DomainError("symbol '" + e.symbol_name() + "' outside point dimension");
      return Jet2::variable(dim, i, p(static_cast<Eigen::Index>(i)));
    }
    case ExprKind::add: r = add(eval_jet(e.lhs(), p), eval_jet(e.rhs(), p)); break;
    case ExprKind::sub: r = sub(eval_jet(e.lhs(), p), eval_jet(e.rhs(), p)); break;
    case ExprKind::mul: r = mul(eval_jet(e.lhs(), p), eval_jet(e.rhs(), p)); break;
    case ExprKind::div: r = mul(eval_jet(e.lhs(), p), reciprocal(eval_jet(e.rhs(), p))); break;
    case ExprKind::neg: {
      Jet2 a = eval_jet(e.lhs(), p);
      r = Jet2{-a.value, -a.gradient, -a.hessian};
      break;
    }
    case ExprKind::pow: {
      Jet2 base = eval_jet(e.lhs(), p);
      if (auto n = integer_exponent(e.rhs())) {
        r = int_pow(base, *n);
      } else {
        if (!(base.value > 0.0)) throw DomainError("real power of non-positive base");
        r = exp_jet(mul(eval_jet(e.rhs(), p), log_jet(base)));
      }
      break;
    }
    case ExprKind::exp: r = exp_jet(eval_jet(e.lhs(), p)); break;
    case ExprKind::log: r = log_jet(eval_jet(e.lhs(), p)); break;
    case ExprKind::sin: {
      Jet2 a = eval_jet(e.lhs(), p);
      const double s = std::sin(a.value), c = std::cos(a.value);
      r = chain(a, s, c, -s);
      break;
    }
    case ExprKind::cos: {
      Jet2 a = eval_jet(e.lhs(), p);
      const double s = std::sin(a.value), c = std::cos(a.value);
      r = chain(a, c, -s, -c);
      break;
    }
    case ExprKind::tan: {
      Jet2 a = eval_jet(e.lhs(), p);
      const double c = std::cos(a.value);
      if (std::abs(c) < kTinyDivisor) throw DomainError("tan at a pole");
      const double t = std::tan(a.value);
      const double sec2 = 1.0 + t * t;
      r = chain(a, t, sec2, 2.0 * t * sec2);
      break;
    }
    case ExprKind::sinh: {
      Jet2 a = eval_jet(e.lhs(), p);
      const double s = std::sinh(a.value), c = std::cosh(a.value);
      r = chain(a, s, c, s);
      break;
    }
    case ExprKind::cosh: {
      Jet2 a = eval_jet(e.lhs(), p);
      const double s = std::sinh(a.value), c = std::cosh(a.value);
      r = chain(a, c, s, c);
      break;
    }
    case ExprKind::sqrt: {
      Jet2 a = eval_jet(e.lhs(), p);
      if (!(a.value > 0.0)) throw DomainError("sqrt of non-positive value");
      const double s = std::sqrt(a.value);
      r = chain(a, s, 0.5 / s, -0.25 / (s * a.value));
      break;
    }
  }
  require_finite(r, "expression evaluation");
  return r;
}

double eval_value(const Expr& e, const Eigen::VectorXd& p) {
  double r = 0.0;
  switch (e.kind()) {
    case ExprKind::constant: return e.constant_value();
    case ExprKind::symbol: {
      const std::size_t i = e.symbol_index();
      if (i >= static_cast<std::size_t>(p.size())) {
        throw DomainError("symbol '" + e.symbol_name() + "' outside point dimension");
      }
      return p(static_cast<Eigen::Index>(i));
    }
    case ExprKind::add: r = eval_value(e.lhs(), p) + eval_value(e.rhs(), p); break;
    case ExprKind::sub: r = eval_value(e.lhs(), p) - eval_value(e.rhs(), p); break;
    case ExprKind::mul: r = eval_value(e.lhs(), p) * eval_value(e.rhs(), p); break;
    case ExprKind::div: {
      const double d = eval_value(e.rhs(), p);
      if (std::abs(d) < kTinyDivisor) throw DomainError("division by zero");
      r = eval_value(e.lhs(), p) / d;
      break;
    }
    case ExprKind::neg: r = -eval_value(e.lhs(), p); break;
    case ExprKind::pow: {
      const double b = eval_value(e.lhs(), p);
      if (auto n = integer_exponent(e.rhs())) {
        if (*n < 0 && std::abs(b) < kTinyDivisor) throw DomainError("division by zero in pow");
        r = std::pow(b, *n);
      } else {
        if (!(b > 0.0)) throw DomainError("real power of non-positive base");
        r = std::pow(b, eval_value(e.rhs(), p));
      }
      break;
    }
    case ExprKind::exp: r = std::exp(eval_value(e.lhs(), p)); break;
    case ExprKind::log: {
      const double a = eval_value(e.lhs(), p);
      if (!(a > 0.0)) throw DomainError("log of non-positive value");
      r = std::log(a);
      break;
    }
    case ExprKind::sin: r = std::sin(eval_value(e.lhs(), p)); break;
    case ExprKind::cos: r = std::cos(eval_value(e.lhs(), p)); break;
    case ExprKind::tan: {
      const double a = eval_value(e.lhs(), p);
      if (std::abs(std::cos(a)) < kTinyDivisor) throw DomainError("tan at a pole");
      r = std::tan(a);
      break;
    }
    case ExprKind::sinh: r = std::sinh(eval_value(e.lhs(), p)); break;
    case ExprKind::cosh: r = std::cosh(eval_value(e.lhs(), p)); break;
    case ExprKind::sqrt: {
      const double a = eval_value(e.lhs(), p);
      if (!(a > 0.0)) throw DomainError("sqrt of non-positive value");
      r = std::sqrt(a);
      break;
    }
  }
  require_finite(r, "expression evaluation");
  return r;
}

// ---------------------------------------------------------------------------
// Printing

std::string format_number(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

// Binding strength of the printed form; children weaker than the context get parens.
int precedence(const Expr& e) {
  switch (e.kind()) {
    case ExprKind::add:
    case ExprKind::sub: return 1;
    case ExprKind::mul:
    case ExprKind::div: return 2;
    case ExprKind::neg: return 3;
    case ExprKind::constant: return e.constant_value() < 0.0 ? 3 : 5;
    case ExprKind::pow: return 4;
    default: return 5;
  }
}

void print(const Expr& e, std::string& out);

void print_child(const Expr& e, int context, std::string& out) {
  if (precedence(e) < context) {
    out += '(';
    print(e, out);
    out += ')';
  } else {
    print(e, out);
  }
}

void print(const Expr& e, std::string& out) {
  switch (e.kind()) {
    case ExprKind::constant: {
      const double v = e.constant_value();
      if (v < 0.0) {
        out += '-';
        out += format_number(-v);
      } else {
        out += format_number(v);
      }
      return;
    }
    case ExprKind::symbol: out += e.symbol_name(); return;
    case ExprKind::add:
    case ExprKind::sub:
      print_child(e.lhs(), 1, out);
      out += e.kind() == ExprKind::add ? " + " : " - ";
      print_child(e.rhs(), 2, out);
      return;
    case ExprKind::mul:
    case ExprKind::div:
      print_child(e.lhs(), 2, out);
      out += e.kind() == ExprKind::mul ? "*" : "/";
      print_child(e.rhs(), 3, out);
      return;
    case ExprKind::neg:
      out += '-';
      print_child(e.lhs(), 3, out);
      return;
    case ExprKind::pow: {
      print_child(e.lhs(), 5, out);
      out += '^';
      // exponent := '-' exponent | primary
      const Expr* x = &e.rhs();
      while (x->kind() == ExprKind::neg) {
        out += '-';
        x = &x->lhs();
      }
      if (x->is_constant() && x->constant_value() < 0.0) {
        out += '-';
        out += format_number(-x->constant_value());
      } else {
        print_child(*x, 5, out);
      }
      return;
    }
    default:
      out += kind_name(e.kind());
      out += '(';
      print(e.lhs(), out);
      out += ')';
      return;
  }
}

// ---------------------------------------------------------------------------
// Parsing

class Parser {
 public:
  Parser(std::string_view text, std::span<const std::string> coordinates)
      : text_(text), coordinates_(coordinates) {}

  Expr parse() {
    Expr e = expr();
    skip_ws();
    if (pos_ != text_.size()) throw ParseError("unexpected '" + std::string(1, text_[pos_]) + "'", pos_);
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
      if (pos_ >= text_.size()) throw ParseError(std::string("expected '") + c + "' but reached end", pos_);
      throw ParseError(std::string("expected '") + c + "'", pos_);
    }
  }

  Expr expr() {
    Expr e = term();
    for (;;) {
      if (accept('+')) {
        e = Expr::make_binary(ExprKind::add, e, term());
      } else if (accept('-')) {
        e = Expr::make_binary(ExprKind::sub, e, term());
      } else {
        return e;
      }
    }
  }

  Expr term() {
    Expr e = factor();
    for (;;) {
      if (accept('*')) {
        e = Expr::make_binary(ExprKind::mul, e, factor());
      } else if (accept('/')) {
        e = Expr::make_binary(ExprKind::div, e, factor());
      } else {
        return e;
      }
    }
  }

  static Expr negate(const Expr& e) {
    if (e.is_constant()) return Expr(-e.constant_value());
    return Expr::make_unary(ExprKind::neg, e);
  }

  Expr factor() {
    if (accept('-')) return negate(factor());
    return power();
  }

  Expr power() {
    Expr base = primary();
    if (accept('^')) return Expr::make_binary(ExprKind::pow, base, exponent());
    return base;
  }

  Expr exponent() {
    if (accept('-')) return negate(exponent());
    return primary();
  }

  Expr primary() {
    skip_ws();
    if (pos_ >= text_.size()) throw ParseError("unexpected end of expression", pos_);
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      Expr e = expr();
      expect(')');
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
    throw ParseError("unexpected '" + std::string(1, c) + "'", pos_);
  }

  Expr number() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (pos_ < text_.size() && text_[pos_] == '.') {
      ++pos_;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      std::size_t q = pos_ + 1;
      if (q < text_.size() && (text_[q] == '+' || text_[q] == '-')) ++q;
      if (q < text_.size() && std::isdigit(static_cast<unsigned char>(text_[q]))) {
        pos_ = q;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      }
    }
    double v = 0.0;
    const auto res = std::from_chars(text_.data() + start, text_.data() + pos_, v);
    if (res.ec != std::errc() || res.ptr != text_.data() + pos_) {
      throw ParseError("malformed number '" + std::string(text_.substr(start, pos_ - start)) + "'", start);
    }
    return Expr(v);
  }

  Expr identifier() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
      ++pos_;
    }
    const std::string_view name = text_.substr(start, pos_ - start);
    skip_ws();
    const bool call = pos_ < text_.size() && text_[pos_] == '(';
    if (call) {
      if (auto k = function_kind(name)) {
        ++pos_;
        Expr arg = expr();
        expect(')');
        return Expr::make_unary(*k, arg);
      }
    }
    for (std::size_t i = 0; i < coordinates_.size(); ++i) {
      if (coordinates_[i] == name) return Expr::symbol(i, std::string(name));
    }
    throw UnknownSymbolError(std::string(name), start);
  }

  std::string_view text_;
  std::span<const std::string> coordinates_;
  std::size_t pos_ = 0;
};

Expr fold_unary(ExprKind k, const Expr& x, double (*fn)(double)) {
  if (x.is_constant()) {
    const double v = fn(x.constant_value());
    if (std::isfinite(v)) return Expr(v);
  }
  return Expr::make_unary(k, x);
}

}  // namespace

// ---------------------------------------------------------------------------
// Expr

Expr::Expr() = default;

Expr::Expr(double value) {
  if (value != 0.0) {
    auto n = std::make_shared<ExprNode>();
    n->kind = ExprKind::constant;
    n->value = value;
    node_ = std::move(n);
  }
}

Expr Expr::symbol(std::size_t index, std::string name) {
  auto n = std::make_shared<ExprNode>();
  n->kind = ExprKind::symbol;
  n->index = index;
  n->name = std::move(name);
  return Expr(std::shared_ptr<const ExprNode>(std::move(n)));
}

ExprKind Expr::kind() const noexcept { return node_ ? node_->kind : ExprKind::constant; }

double Expr::constant_value() const {
  if (kind() != ExprKind::constant) throw ExprError("constant_value() on a non-constant expression");
  return node_ ? node_->value : 0.0;
}

std::size_t Expr::symbol_index() const {
  if (kind() != ExprKind::symbol) throw ExprError("symbol_index() on a non-symbol expression");
  return node_->index;
}

const std::string& Expr::symbol_name() const {
  if (kind() != ExprKind::symbol) throw ExprError("symbol_name() on a non-symbol expression");
  return node_->name;
}

const Expr& Expr::lhs() const {
  if (!node_ || kind() == ExprKind::constant || kind() == ExprKind::symbol) {
    throw ExprError("lhs() on a leaf expression");
  }
  return node_->lhs;
}

const Expr& Expr::rhs() const {
  switch (kind()) {
    case ExprKind::add:
    case ExprKind::sub:
    case ExprKind::mul:
    case ExprKind::div:
    case ExprKind::pow: return node_->rhs;
    default: throw ExprError("rhs() on a non-binary expression");
  }
}

bool Expr::is_constant(double v) const noexcept {
  return is_constant() && (node_ ? node_->value : 0.0) == v;
}

double Expr::evaluate(const Eigen::VectorXd& point) const { return eval_value(*this, point); }

Jet2 Expr::evaluate_jet(const Eigen::VectorXd& point) const { return eval_jet(*this, point); }

std::string Expr::to_string() const {
  std::string out;
  print(*this, out);
  return out;
}

std::vector<std::size_t> Expr::symbols() const {
  std::vector<std::size_t> out;
  std::vector<const Expr*> stack{this};
  while (!stack.empty()) {
    const Expr* e = stack.back();
    stack.pop_back();
    switch (e->kind()) {
      case ExprKind::constant: break;
      case ExprKind::symbol: out.push_back(e->symbol_index()); break;
      case ExprKind::add:
      case ExprKind::sub:
      case ExprKind::mul:
      case ExprKind::div:
      case ExprKind::pow:
        stack.push_back(&e->lhs());
        stack.push_back(&e->rhs());
        break;
      default: stack.push_back(&e->lhs()); break;
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

Expr Expr::rebind(std::span<const std::string> coordinates) const {
  switch (kind()) {
    case ExprKind::constant: return *this;
    case ExprKind::symbol: {
      for (std::size_t i = 0; i < coordinates.size(); ++i) {
        if (coordinates[i] == symbol_name()) return symbol(i, symbol_name());
      }
      throw UnknownSymbolError(symbol_name(), 0);
    }
    case ExprKind::add:
    case ExprKind::sub:
    case ExprKind::mul:
    case ExprKind::div:
    case ExprKind::pow:
      return make_binary(kind(), lhs().rebind(coordinates), rhs().rebind(coordinates));
    default: return make_unary(kind(), lhs().rebind(coordinates));
  }
}

bool operator==(const Expr& a, const Expr& b) {
  if (a.node_ == b.node_) return true;
  if (a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case ExprKind::constant: return a.constant_value() == b.constant_value();
    case ExprKind::symbol: return a.symbol_index() == b.symbol_index() && a.symbol_name() == b.symbol_name();
    case ExprKind::add:
    case ExprKind::sub:
    case ExprKind::mul:
    case ExprKind::div:
    case ExprKind::pow: return a.lhs() == b.lhs() && a.rhs() == b.rhs();
    default: return a.lhs() == b.lhs();
  }
}

Expr Expr::make_unary(ExprKind kind, Expr operand) {
  auto n = std::make_shared<ExprNode>();
  n->kind = kind;
  n->lhs = std::move(operand);
  return Expr(std::shared_ptr<const ExprNode>(std::move(n)));
}

Expr Expr::make_binary(ExprKind kind, Expr lhs, Expr rhs) {
  auto n = std::make_shared<ExprNode>();
  n->kind = kind;
  n->lhs = std::move(lhs);
  n->rhs = std::move(rhs);
  return Expr(std::shared_ptr<const ExprNode>(std::move(n)));
}

// Builders fold numeric constants and neutral elements so constructed
// structures print compactly. Parsed trees are never folded.
Expr operator+(const Expr& a, const Expr& b) {
  if (a.is_constant() && b.is_constant()) return Expr(a.constant_value() + b.constant_value());
  if (a.is_constant(0.0)) return b;
  if (b.is_constant(0.0)) return a;
  if (b.is_constant() && b.constant_value() < 0.0) return Expr::make_binary(ExprKind::sub, a, Expr(-b.constant_value()));
  return Expr::make_binary(ExprKind::add, a, b);
}

Expr operator-(const Expr& a, const Expr& b) {
  if (a.is_constant() && b.is_constant()) return Expr(a.constant_value() - b.constant_value());
  if (b.is_constant(0.0)) return a;
  if (a.is_constant(0.0)) return -b;
  return Expr::make_binary(ExprKind::sub, a, b);
}

Expr operator*(const Expr& a, const Expr& b) {
  if (a.is_constant() && b.is_constant()) return Expr(a.constant_value() * b.constant_value());
  if (a.is_constant(0.0) || b.is_constant(0.0)) return Expr(0.0);
  if (a.is_constant(1.0)) return b;
  if (b.is_constant(1.0)) return a;
  if (a.is_constant(-1.0)) return -b;
  if (b.is_constant(-1.0)) return -a;
  return Expr::make_binary(ExprKind::mul, a, b);
}

Expr operator/(const Expr& a, const Expr& b) {
  if (a.is_constant() && b.is_constant() && b.constant_value() != 0.0) {
    return Expr(a.constant_value() / b.constant_value());
  }
  if (a.is_constant(0.0) && !b.is_constant(0.0)) return Expr(0.0);
  if (b.is_constant(1.0)) return a;
  return Expr::make_binary(ExprKind::div, a, b);
}

Expr operator-(const Expr& a) {
  if (a.is_constant()) return Expr(-a.constant_value());
  if (a.kind() == ExprKind::neg) return a.lhs();
  return Expr::make_unary(ExprKind::neg, a);
}

Expr pow(const Expr& base, const Expr& exponent) {
  if (exponent.is_constant(1.0)) return base;
  if (exponent.is_constant(0.0)) return Expr(1.0);
  if (base.is_constant() && exponent.is_constant()) {
    const double v = std::pow(base.constant_value(), exponent.constant_value());
    if (std::isfinite(v)) return Expr(v);
  }
  return Expr::make_binary(ExprKind::pow, base, exponent);
}

Expr exp(const Expr& x) { return fold_unary(ExprKind::exp, x, [](double v) { return std::exp(v); }); }
Expr log(const Expr& x) {
  if (x.is_constant() && x.constant_value() <= 0.0) return Expr::make_unary(ExprKind::log, x);
  return fold_unary(ExprKind::log, x, [](double v) { return std::log(v); });
}
Expr sin(const Expr& x) { return fold_unary(ExprKind::sin, x, [](double v) { return std::sin(v); }); }
Expr cos(const Expr& x) { return fold_unary(ExprKind::cos, x, [](double v) { return std::cos(v); }); }
Expr tan(const Expr& x) { return fold_unary(ExprKind::tan, x, [](double v) { return std::tan(v); }); }
Expr sinh(const Expr& x) { return fold_unary(ExprKind::sinh, x, [](double v) { return std::sinh(v); }); }
Expr cosh(const Expr& x) { return fold_unary(ExprKind::cosh, x, [](double v) { return std::cosh(v); }); }
Expr sqrt(const Expr& x) {
  if (x.is_constant() && x.constant_value() <= 0.0) return Expr::make_unary(ExprKind::sqrt, x);
  return fold_unary(ExprKind::sqrt, x, [](double v) { return std::sqrt(v); });
}

Expr parse_expr(std::string_view text, std::span<const std::string> coordinates) {
  return Parser(text, coordinates).parse();
}

}  // namespace fman
