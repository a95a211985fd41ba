#pragma once

// Pointwise tensor calculus on a single coordinate chart.
//
// Index conventions: vectors carry an upper index, 1-forms a lower index and
// (1,1)-tensors store f(k, j) = f^k_j, so (fX)^k = f^k_j X^j. Exterior
// derivatives follow the alternation convention in which
//   dη(X,Y)   = ½ {Xη(Y) − Yη(X) − η([X,Y])}
//   dω(X,Y,Z) = ⅓ {Xω(Y,Z) − Yω(X,Z) + Zω(X,Y) − ω([X,Y],Z) + ω([X,Z],Y) − ω([Y,Z],X)}
// and (ω∧θ)(X,Y,Z) = ⅓ {ω(X,Y)θ(Z) + ω(Y,Z)θ(X) + ω(Z,X)θ(Y)}.
// ExteriorConvention::plain drops the ½ and ⅓ factors throughout.

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "fman/expr.hpp"

namespace fman {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Point = Eigen::VectorXd;

class GeometryError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

/// Coordinate system of dimension 2n+s with a closed sampling box.
class Chart {
 public:
  Chart() = default;
  Chart(int n, int s, std::vector<std::string> coordinates, std::vector<Interval> domain);

  int n() const noexcept { return n_; }
  int s() const noexcept { return s_; }
  int dim() const noexcept { return 2 * n_ + s_; }
  const std::vector<std::string>& coordinates() const noexcept { return coordinates_; }
  const std::vector<Interval>& domain() const noexcept { return domain_; }
  std::optional<std::size_t> index_of(const std::string& name) const;
  bool contains(const Point& p) const;

  Expr parse(std::string_view text) const { return parse_expr(text, coordinates_); }
  Expr coordinate(std::size_t i) const { return Expr::symbol(i, coordinates_.at(i)); }

 private:
  int n_ = 0;
  int s_ = 0;
  std::vector<std::string> coordinates_;
  std::vector<Interval> domain_;
};

/// Dense rank-3 array, used for Christoffel symbols and derivative tables.
class Tensor3 {
 public:
  Tensor3() = default;
  explicit Tensor3(int dim) : dim_(dim), data_(static_cast<std::size_t>(dim * dim * dim), 0.0) {}

  int dim() const noexcept { return dim_; }
  double& operator()(int i, int j, int k) { return data_[index(i, j, k)]; }
  double operator()(int i, int j, int k) const { return data_[index(i, j, k)]; }
  double max_abs() const;

 private:
  std::size_t index(int i, int j, int k) const {
    return static_cast<std::size_t>((i * dim_ + j) * dim_ + k);
  }
  int dim_ = 0;
  std::vector<double> data_;
};

// ---------------------------------------------------------------------------
// Component fields

struct MetricField {
  int dim = 0;
  std::vector<Expr> components;  // row-major g_ij

  explicit MetricField(int m = 0) : dim(m), components(static_cast<std::size_t>(m * m)) {}
  Expr& operator()(int i, int j) { return components[static_cast<std::size_t>(i * dim + j)]; }
  const Expr& operator()(int i, int j) const { return components[static_cast<std::size_t>(i * dim + j)]; }
};

struct Tensor11Field {
  int dim = 0;
  std::vector<Expr> components;  // row-major f^k_j, row = upper index

  explicit Tensor11Field(int m = 0) : dim(m), components(static_cast<std::size_t>(m * m)) {}
  Expr& operator()(int k, int j) { return components[static_cast<std::size_t>(k * dim + j)]; }
  const Expr& operator()(int k, int j) const { return components[static_cast<std::size_t>(k * dim + j)]; }
};

struct VectorField {
  std::vector<Expr> components;

  explicit VectorField(int m = 0) : components(static_cast<std::size_t>(m)) {}
  int dim() const noexcept { return static_cast<int>(components.size()); }
  Expr& operator[](int i) { return components[static_cast<std::size_t>(i)]; }
  const Expr& operator[](int i) const { return components[static_cast<std::size_t>(i)]; }
};

struct OneForm {
  std::vector<Expr> components;

  explicit OneForm(int m = 0) : components(static_cast<std::size_t>(m)) {}
  int dim() const noexcept { return static_cast<int>(components.size()); }
  Expr& operator[](int i) { return components[static_cast<std::size_t>(i)]; }
  const Expr& operator[](int i) const { return components[static_cast<std::size_t>(i)]; }
};

// ---------------------------------------------------------------------------
// Jets of fields at a point

struct VectorJet {
  Vector value;
  Matrix jacobian;  // (k, i) = ∂_i X^k
};

struct OneFormJet {
  Vector value;
  Matrix jacobian;  // (i, j) = ∂_i η_j
  Tensor3 second;   // (i, j, k) = ∂_i ∂_j η_k
};

struct Tensor11Jet {
  Matrix value;        // f^k_j
  Tensor3 derivative;  // (l, k, j) = ∂_l f^k_j
};

struct MetricJet {
  Matrix value;        // g_ij
  Tensor3 derivative;  // (k, i, j) = ∂_k g_ij
};

struct TwoFormJet {
  Matrix value;        // ω_ij
  Tensor3 derivative;  // (k, i, j) = ∂_k ω_ij
};

VectorJet evaluate(const VectorField& X, const Point& p);
OneFormJet evaluate(const OneForm& eta, const Point& p);
Tensor11Jet evaluate(const Tensor11Field& f, const Point& p);
MetricJet evaluate(const MetricField& g, const Point& p);

/// Constant-coefficient extension of a tangent vector.
VectorJet constant_extension(const Vector& v);

/// Jet of the vector field fX.
VectorJet apply(const Tensor11Jet& f, const VectorJet& X);

/// Jet of ω(X, Y) = g(X, fY), the 2-form lowered from f.
TwoFormJet lower(const MetricJet& g, const Tensor11Jet& f);

// ---------------------------------------------------------------------------
// Metric and connection

struct MetricAt {
  Matrix matrix;
  Matrix inverse;
};

/// Symmetric positive-definite check plus inverse. Throws GeometryError.
MetricAt metric_at(const Matrix& g);
MetricAt metric_at(const MetricField& g, const Point& p);

/// Γ(k, i, j) = Γ^k_{ij} of the Levi-Civita connection.
Tensor3 christoffel(const MetricJet& g, const Matrix& inverse);
Tensor3 christoffel(const MetricField& g, const Point& p);

/// Metric, inverse and Levi-Civita connection at one point.
struct LocalGeometry {
  MetricJet metric;
  Matrix inverse;
  Tensor3 gamma;

  int dim() const noexcept { return static_cast<int>(inverse.rows()); }
  double inner(const Vector& a, const Vector& b) const { return a.dot(metric.value * b); }
  double norm(const Vector& a) const;
};

LocalGeometry local_geometry(const MetricField& g, const Point& p);
LocalGeometry local_geometry(MetricJet g);

/// (∇_X Y)^k = X^i (∂_i Y^k + Γ^k_{ij} Y^j).
Vector covariant_derivative(const LocalGeometry& geom, const Vector& X, const VectorJet& Y);

/// (∇f)(i, k, j) = (∇_i f)^k_j.
Tensor3 covariant_derivative(const LocalGeometry& geom, const Tensor11Jet& f);

/// (∇_X f)^k_j.
Matrix covariant_derivative(const LocalGeometry& geom, const Tensor11Jet& f, const Vector& X);

/// (i, j) = (∇_i η)_j.
Matrix covariant_derivative(const LocalGeometry& geom, const OneFormJet& eta);

/// (k, i, j) = (∇_k ω)_{ij}.
Tensor3 covariant_derivative(const LocalGeometry& geom, const TwoFormJet& omega);

Vector covariant_derivative_vector(const MetricField& g, const VectorField& X, const VectorField& Y,
                                   const Point& p);
Matrix covariant_derivative_t11(const MetricField& g, const Tensor11Field& f, const Vector& X,
                                const Point& p);

// ---------------------------------------------------------------------------
// Lie and exterior calculus

Vector lie_bracket(const VectorJet& X, const VectorJet& Y);
Vector lie_bracket(const VectorField& X, const VectorField& Y, const Point& p);

/// (L_X g)_ij = X^k ∂_k g_ij + g_kj ∂_i X^k + g_ik ∂_j X^k.
Matrix lie_derivative_metric(const MetricJet& g, const VectorJet& X);
Matrix lie_derivative_metric(const MetricField& g, const VectorField& X, const Point& p);

enum class ExteriorConvention { blair, plain };

Matrix exterior_d(const OneFormJet& eta, ExteriorConvention c = ExteriorConvention::blair);
Tensor3 exterior_d(const TwoFormJet& omega, ExteriorConvention c = ExteriorConvention::blair);

/// Jet of dη (first derivatives only), for d∘d checks.
TwoFormJet exterior_d_jet(const OneFormJet& eta, ExteriorConvention c = ExteriorConvention::blair);

/// 2-form ∧ 1-form.
Tensor3 wedge(const Matrix& omega, const Vector& theta, ExteriorConvention c = ExteriorConvention::blair);

/// δω(X) = −Σ_a (∇_{e_a} ω)(e_a, X) over the columns of a g-orthonormal frame.
Vector codifferential(const LocalGeometry& geom, const TwoFormJet& omega, const Matrix& frame);
Vector codifferential(const LocalGeometry& geom, const TwoFormJet& omega);

/// δη = −Σ_a (∇_{e_a} η)(e_a).
double codifferential(const LocalGeometry& geom, const OneFormJet& eta, const Matrix& frame);
double codifferential(const LocalGeometry& geom, const OneFormJet& eta);

/// [f,f](X,Y) = f²[X,Y] + [fX,fY] − f[fX,Y] − f[X,fY], from the component formula.
Vector nijenhuis(const Tensor11Jet& f, const Vector& X, const Vector& Y);

/// Same tensor evaluated through Lie brackets of the given field extensions.
Vector nijenhuis(const Tensor11Jet& f, const VectorJet& X, const VectorJet& Y);

/// Gram–Schmidt on the coordinate basis in coordinate order; columns are g-orthonormal.
Matrix orthonormal_frame(const Matrix& g);

}  // namespace fman
