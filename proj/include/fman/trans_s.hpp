#pragma once

// (∇_X f)Y = Σ_i α_i {g(fX,fY)ξ_i + η_i(Y)f²X} + β_i {g(fX,Y)ξ_i − η_i(Y)fX}
// and everything derived from it: extraction of (α_i, β_i) and the identities
// that a trans-S structure has to satisfy.

#include <functional>
#include <vector>

#include "fman/f_structure.hpp"

namespace fman {

struct CharacteristicFunctions {
  std::vector<double> alpha;
  std::vector<double> beta;

  static CharacteristicFunctions zeros(int s) {
    return {std::vector<double>(static_cast<std::size_t>(s), 0.0), std::vector<double>(static_cast<std::size_t>(s), 0.0)};
  }
  /// max_i max(|Δα_i|, |Δβ_i|)
  double distance(const CharacteristicFunctions& other) const;
};

/// Where α and β come from at each point.
using CharacteristicSource = std::function<CharacteristicFunctions(const StructureAt&)>;

CharacteristicSource extracted_source();
CharacteristicSource constant_source(std::vector<double> alpha, std::vector<double> beta);
CharacteristicSource declared_source(CharacteristicExprs exprs);

/// Right side of the defining identity, without the (∇_X f)Y term.
Vector trans_s_model(const StructureAt& st, const CharacteristicFunctions& cf, const Vector& X, const Vector& Y);

/// (∇_X f)Y minus the model.
Vector trans_s_residual(const StructureAt& st, const CharacteristicFunctions& cf, const Vector& X, const Vector& Y);
Vector trans_s_residual(const MetricFManifold& M, const CharacteristicFunctions& cf, const Vector& X, const Vector& Y,
                        const Point& p);

/// max over f-basis pairs of ‖residual‖_g.
double trans_s_defect(const StructureAt& st, const CharacteristicFunctions& cf);

struct PointwiseFit {
  CharacteristicFunctions cf;
  double residual = 0.0;             // max over f-basis pairs of ‖residual‖_g
  double nabla_f_norm = 0.0;         // max over f-basis pairs of ‖(∇_X f)Y‖_g
  double normalized_residual = 0.0;  // residual / nabla_f_norm (0 when ∇f = 0)
  double condition_number = 1.0;
};

/// Least squares for the 2s unknowns over all f-basis pairs. Always returns the
/// best fit; throws GeometryError only when the design matrix is rank deficient.
PointwiseFit extract_pointwise(const StructureAt& st);
PointwiseFit extract_pointwise(const MetricFManifold& M, const Point& p);

/// α_i = (δF)(ξ_i) / 2n, β_i = −δη_i / 2n.
CharacteristicFunctions extract_via_codifferential(const StructureAt& st);
CharacteristicFunctions extract_via_codifferential(const MetricFManifold& M, const Point& p);

/// α_i = −(∇_X F)(X, ξ_i), β_i = (∇_X F)(ξ_i, fX), averaged over the unit vectors of the f-basis in L.
CharacteristicFunctions extract_via_nabla_f(const StructureAt& st);
CharacteristicFunctions extract_via_nabla_f(const MetricFManifold& M, const Point& p);

struct TransSOptions {
  double tol = 1e-8;
  double relative_tol = 1e-6;  // normalized best-fit residual for the almost trans-S verdict
};

bool almost_trans_s_verdict(const PointwiseFit& fit, const TransSOptions& options = {});

/// Defining identity with the given source of α, β.
CheckResult check_trans_s_identity(const MetricFManifold& M, const CharacteristicSource& source,
                                   const std::vector<Point>& points, double tol);

/// Best-fit verdict over all points (value = largest absolute residual).
struct AlmostTransSVerdict {
  bool holds = false;
  CheckResult absolute;    // best-fit residual
  CheckResult normalized;  // best-fit residual / ‖∇f‖
};
AlmostTransSVerdict almost_trans_s(const MetricFManifold& M, const std::vector<Point>& points,
                                   const TransSOptions& options = {});

/// One entry per i for ∇_X ξ_i = −α_i fX − β_i f²X, then one for η_k(∇_X ξ_i) = 0.
VerificationReport check_xi_derivative(const MetricFManifold& M, const CharacteristicSource& source,
                                       const std::vector<Point>& points, double tol);

/// [f,f](X,Y) + 2Σ dη_i(X,Y)ξ_i = Σ_{i,j} {η_j(∇_X ξ_i)η_j(Y) − η_j(∇_Y ξ_i)η_j(X)} ξ_i.
/// Skipped unless the manifold is almost trans-S at every sample.
CheckResult check_normality_defect_identity(const MetricFManifold& M, const std::vector<Point>& points,
                                            const TransSOptions& options = {});

/// dF = 2F∧Σβ_iη_i, dη_i = α_i F (one entry per i), (δF)∘f = 0.
VerificationReport check_exterior_identities(const MetricFManifold& M, const CharacteristicSource& source,
                                             const std::vector<Point>& points, double tol);

/// (∇_X η_i)Y = α_i g(X,fY) + β_i g(fX,fY), plus the unit-X forms
/// (∇_X η_i)fX = −α_i and (∇_X η_i)X = β_i.
VerificationReport check_nabla_eta(const MetricFManifold& M, const CharacteristicSource& source,
                                   const std::vector<Point>& points, double tol);

/// Three independently computed statements that must agree on a trans-S manifold.
struct KManifoldCriterion {
  bool beta_zero = false;        // all |β_i| <= tol
  bool normal_and_closed = false;  // normal and dF = 0
  bool codifferential_zero = false;  // all |δη_i| <= tol
  CheckResult entry;               // passes iff the three agree
};
KManifoldCriterion k_manifold_criterion(const MetricFManifold& M, const CharacteristicSource& source,
                                        const std::vector<Point>& points, double tol);

/// (L_{ξ_i} g)(X,Y) = 2β_i g(fX,fY), and whether ξ_i is Killing.
struct KillingResult {
  bool killing = false;    // max ‖L_{ξ_i} g‖ <= tol
  bool beta_zero = false;  // max |β_i| <= tol
  double max_lie_derivative = 0.0;
  CheckResult entry;       // residual of the identity
};
KillingResult killing_defect(const MetricFManifold& M, int i, const CharacteristicSource& source,
                             const std::vector<Point>& points, double tol);

/// Whether both sides of "(identity ∧ ξ-derivative formula) ⇔ (identity ∧ normal)"
/// evaluate to the same truth value.
struct NormalityCharacterization {
  bool almost_trans_s = false;
  bool xi_formula = false;
  bool normal = false;
  CheckResult entry;
};
NormalityCharacterization check_normality_characterization(const MetricFManifold& M,
                                                            const std::vector<Point>& points,
                                                            const TransSOptions& options = {});

/// Per-route extraction table at every point with the largest pairwise disagreement.
struct ExtractionTable {
  std::vector<Point> points;
  std::vector<PointwiseFit> fits;
  std::vector<CharacteristicFunctions> codifferential;
  std::vector<CharacteristicFunctions> nabla_f;
  double max_disagreement = 0.0;
  Point disagreement_witness;
};
ExtractionTable extract_all_routes(const MetricFManifold& M, const std::vector<Point>& points);

/// Every identity check applicable to M, with classification labels.
VerificationReport verify_trans_s(const MetricFManifold& M, const std::vector<Point>& points,
                                  const TransSOptions& options = {});

}  // namespace fman
