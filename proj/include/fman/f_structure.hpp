#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fman/report.hpp"
#include "fman/tensor.hpp"

namespace fman {

/// Symbolic characteristic functions attached to a manifold (assertion mode).
struct CharacteristicExprs {
  std::vector<Expr> alpha;
  std::vector<Expr> beta;
};

/// (f, ξ_1..ξ_s, η_1..η_s, g) on one chart of dimension 2n+s.
///
/// s = 0 is accepted and describes an almost Hermitian structure (J, G), which
/// is how warp fibers are supplied.
class MetricFManifold {
 public:
  MetricFManifold() = default;
  MetricFManifold(std::string name, Chart chart, Tensor11Field f, std::vector<VectorField> xi,
                  std::vector<OneForm> eta, MetricField g);

  const std::string& name() const noexcept { return name_; }
  const Chart& chart() const noexcept { return chart_; }
  const Tensor11Field& f() const noexcept { return f_; }
  const std::vector<VectorField>& xi() const noexcept { return xi_; }
  const std::vector<OneForm>& eta() const noexcept { return eta_; }
  const MetricField& g() const noexcept { return g_; }
  int n() const noexcept { return chart_.n(); }
  int s() const noexcept { return chart_.s(); }
  int dim() const noexcept { return chart_.dim(); }

  const std::optional<CharacteristicExprs>& declared() const noexcept { return declared_; }
  void set_declared(CharacteristicExprs cf);
  void set_name(std::string name) { name_ = std::move(name); }

  /// Free-form provenance notes carried into reports.
  const std::vector<std::string>& notes() const noexcept { return notes_; }
  void add_note(std::string note) { notes_.push_back(std::move(note)); }

 private:
  std::string name_;
  Chart chart_;
  Tensor11Field f_;
  std::vector<VectorField> xi_;
  std::vector<OneForm> eta_;
  MetricField g_;
  std::optional<CharacteristicExprs> declared_;
  std::vector<std::string> notes_;
};

/// Every structure tensor of a manifold, with first derivatives, at one point.
struct StructureAt {
  Point point;
  int n = 0;
  int s = 0;
  LocalGeometry geom;
  Tensor11Jet f;
  std::vector<VectorJet> xi;
  std::vector<OneFormJet> eta;
  TwoFormJet F;     // F(X,Y) = g(X, fY)
  Tensor3 nabla_f;  // (i, k, j) = (∇_i f)^k_j

  int dim() const noexcept { return 2 * n + s; }
  const Matrix& metric() const noexcept { return geom.metric.value; }
  double inner(const Vector& a, const Vector& b) const { return geom.inner(a, b); }
  double norm(const Vector& a) const { return geom.norm(a); }
  Vector apply_f(const Vector& X) const { return f.value * X; }
  double eta_of(int i, const Vector& X) const { return eta[static_cast<std::size_t>(i)].value.dot(X); }
  const Vector& xi_of(int i) const { return xi[static_cast<std::size_t>(i)].value; }
  /// (∇_X f) Y
  Vector nabla_f_applied(const Vector& X, const Vector& Y) const;
  /// ∇_X ξ_i
  Vector nabla_xi(int i, const Vector& X) const;
};

/// Throws GeometryError (bad metric) or DomainError (expression evaluation).
StructureAt evaluate_structure(const MetricFManifold& M, const Point& p);

namespace labels {
inline constexpr const char* metric_f_contact = "metric f-contact";
inline constexpr const char* normal = "normal";
inline constexpr const char* K = "K";
inline constexpr const char* S = "S";
inline constexpr const char* C = "C";
inline constexpr const char* almost_trans_s = "almost trans-S";
inline constexpr const char* trans_s = "trans-S";
}  // namespace labels

struct FStructureTolerances {
  double structural = 1e-8;
  double rank_threshold = 1e-8;   // relative to the largest singular value
  double principal_angle = 1e-6;  // ker f against span{ξ_i}
  double volume = 1e-10;          // |η_1∧…∧η_s∧F^n| proxy
};

/// Metric f-manifold axioms at every sample point; one entry per axiom.
VerificationReport check_axioms(const MetricFManifold& M, const std::vector<Point>& points,
                                const FStructureTolerances& tol = {});

/// F_ij = g_ik f^k_j.
Matrix fundamental_two_form(const MetricFManifold& M, const Point& p);

/// [f,f](X,Y) + 2 Σ dη_i(X,Y) ξ_i.
Vector normality_tensor(const StructureAt& st, const Vector& X, const Vector& Y);
Vector normality_tensor(const MetricFManifold& M, const Vector& X, const Vector& Y, const Point& p);

/// Largest g-norm of the normality tensor over pairs of a g-orthonormal frame.
double normality_defect(const StructureAt& st);

CheckResult check_normality(const MetricFManifold& M, const std::vector<Point>& points, double tol);

/// max ‖[ξ_i, ξ_j]‖ over all pairs.
CheckResult check_normal_bracket(const MetricFManifold& M, const std::vector<Point>& points, double tol);

/// Columns {X_1..X_n, fX_1..fX_n, ξ_1..ξ_s}, orthonormal for g(p). Throws
/// GeometryError when rank f < 2n at p.
Matrix build_f_basis(const StructureAt& st, double rank_threshold = 1e-8);
Matrix build_f_basis(const MetricFManifold& M, const Point& p);

/// Number of singular values above rel_threshold · σ_max.
int numerical_rank(const Matrix& a, double rel_threshold = 1e-8);

/// Components of a bilinear form / trilinear form in the given frame, max abs.
double frame_max_abs(const Matrix& bilinear, const Matrix& frame);
double frame_max_abs(const Tensor3& trilinear, const Matrix& frame);

struct ClassifyOptions {
  double tol = 1e-8;                       // structural identities
  double almost_trans_s_relative = 1e-6;   // best-fit residual / ‖∇f‖
};

/// Labels ⊆ {metric f-contact, normal, K, S, C, almost trans-S, trans-S}, with
/// one report entry per defining residual.
VerificationReport classify(const MetricFManifold& M, const std::vector<Point>& points,
                            const ClassifyOptions& options = {});

}  // namespace fman
