#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "fman/trans_s.hpp"

namespace fman {

/// A construction was asked for outside the hypotheses it is valid under.
class HypothesisError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Generalized D-conformal deformation
//   f̃ = f,  ξ̃_i = ξ_i / a,  η̃_i = a η_i,  g̃ = b g + (a² − b) Σ η_i⊗η_i

struct DeformationParams {
  Expr a{1.0};
  Expr b{1.0};
};

/// Throws HypothesisError if a or b is not positive at one of `points`
/// (the chart's default sample when empty).
MetricFManifold d_conformal_deform(const MetricFManifold& M, const DeformationParams& params,
                                   std::vector<Point> points = {});

/// max |da∘f|, |db∘f|: zero exactly when a and b vary only along the ξ_i.
CheckResult check_structure_directions(const MetricFManifold& M, const DeformationParams& params,
                                       const std::vector<Point>& points, double tol);

/// α̃_i = α_i a/b,  β̃_i = ξ_i(b)/(2ab) + β_i/a, from the undeformed structure at the
/// same point. Throws HypothesisError when da∘f or db∘f exceeds tol there.
CharacteristicFunctions predicted_deformed_functions(const StructureAt& original, const CharacteristicFunctions& cf,
                                                     const DeformationParams& params, double tol = 1e-8);

/// Predicted functions for the deformed manifold, fed by `original_source` on M.
CharacteristicSource predicted_deformed_source(MetricFManifold M, DeformationParams params,
                                               CharacteristicSource original_source = extracted_source());

/// Closed form of ∇̃_X Y − ∇_X Y in terms of the trans-S data of M.
Vector deformed_connection_shift(const StructureAt& original, const CharacteristicFunctions& cf,
                                 const DeformationParams& params, const Vector& X, const Vector& Y);

/// Christoffel symbols of g̃ against the closed form, over f-basis pairs of M.
CheckResult check_deformed_connection(const MetricFManifold& M, const DeformationParams& params,
                                      const std::vector<Point>& points, double tol);

// ---------------------------------------------------------------------------
// Warped products R^s ×_h N with metric dt² + h(t)² G

struct WarpParams {
  int s = 1;
  std::string h = "1";                  // expression in the base coordinates
  std::vector<std::string> base_names;  // default t1..ts
  std::vector<Interval> base_domain;    // default [-1, 1] each
};

/// Fiber must have s = 0 (almost Hermitian (J, G)). Result: f̃ = 0 ⊕ J, ξ̃_i = ∂/∂t_i, η̃_i = dt_i.
MetricFManifold warp_kaehler(const MetricFManifold& fiber, const WarpParams& params);

/// Fiber with s₁ ≥ 1 structure fields. Result: ξ̃ = (∂/∂t_1..∂/∂t_s, ξ_1/h..ξ_{s₁}/h),
/// η̃ = (dt_1..dt_s, hη_1..hη_{s₁}), f̃ = 0 ⊕ f.
MetricFManifold warp_trans_s(const MetricFManifold& fiber, const WarpParams& params);

/// α̃ = (0.., α_j/h), β̃ = (∂h/∂t_i / h.., β_j/h), with (α_j, β_j) taken from
/// `fiber_source` at the projected point.
CharacteristicSource predicted_warp_source(MetricFManifold fiber, WarpParams params,
                                           CharacteristicSource fiber_source = extracted_source());

/// ∇_X Y on the warped product assembled from the flat base, the fiber
/// connection and h, for X, Y extended with constant coordinates.
Vector warped_connection(const MetricFManifold& fiber, const WarpParams& params, const Vector& X, const Vector& Y,
                         const Point& p);

/// warped_connection against the Levi-Civita connection of the assembled metric,
/// over coordinate pairs.
CheckResult check_warped_connection(const MetricFManifold& fiber, const WarpParams& params,
                                    const std::vector<Point>& points, double tol);

/// Predicted vs re-extracted functions on the constructed manifold.
CheckResult check_prediction(const MetricFManifold& constructed, const CharacteristicSource& predicted,
                             const std::vector<Point>& points, double tol);

}  // namespace fman
