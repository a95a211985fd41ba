#include <doctest.h>

#include <cmath>
#include <string>
#include <vector>

#include "fman/constructions.hpp"
#include "fman/gallery.hpp"
#include "fman/sampling.hpp"
#include "oracles.hpp"

using namespace fman;

namespace {

std::vector<Point> sample(const MetricFManifold& M, int count = 32) {
  SampleOptions o;
  o.count = count;
  return sample_points(M.chart(), o);
}

DeformationParams params_on(const MetricFManifold& M, const std::string& a, const std::string& b) {
  return {M.chart().parse(a), M.chart().parse(b)};
}

double max_metric_gap(const MetricFManifold& A, const MetricFManifold& B, const std::vector<Point>& pts) {
  double worst = 0.0;
  for (const auto& p : pts) worst = std::max(worst, (oracle::metric(A.g(), p) - oracle::metric(B.g(), p)).cwiseAbs().maxCoeff());
  return worst;
}

}  // namespace

TEST_CASE("deformed metric matches b g + (a^2 - b) sum eta (x) eta") {
  const MetricFManifold S = gallery("standard_S(1,2)");
  const auto params = params_on(S, "2 + x1^2/2", "exp(y1)");
  const MetricFManifold D = d_conformal_deform(S, params);
  for (const auto& p : sample(S, 16)) {
    const double a = params.a.evaluate(p), b = params.b.evaluate(p);
    Matrix expected = b * oracle::metric(S.g(), p);
    for (std::size_t i = 0; i < 2; ++i) {
      const Vector eta = oracle::components(S.eta()[i], p);
      expected += (a * a - b) * eta * eta.transpose();
      CHECK((oracle::components(D.xi()[i], p) - oracle::components(S.xi()[i], p) / a).norm() < 1e-14);
      CHECK((oracle::components(D.eta()[i], p) - a * eta).norm() < 1e-14);
    }
    CHECK((oracle::metric(D.g(), p) - expected).cwiseAbs().maxCoeff() < 1e-13);
  }
  CHECK(check_axioms(D, sample(D)).all_passed());
}

TEST_CASE("deforming by (a, b) then (1/a, 1/b) restores the metric") {
  for (const auto& [name, a, b] : std::vector<std::tuple<std::string, std::string, std::string>>{
           {"standard_S", "2 + x1^2/2", "exp(y1)"}, {"kenmotsu", "exp(2*t1)", "1 + t1^2"}, {"euclidean_C(2,2)", "3 + sin(t1)", "2 + t2"}}) {
    const MetricFManifold M = gallery(name);
    const MetricFManifold D = d_conformal_deform(M, params_on(M, a, b));
    const MetricFManifold back = d_conformal_deform(D, params_on(D, "1/(" + a + ")", "1/(" + b + ")"));
    CAPTURE(name);
    CHECK(max_metric_gap(M, back, sample(M)) <= 1e-9);
  }
}

TEST_CASE("deformation hypotheses") {
  const MetricFManifold S = gallery("standard_S");
  const auto pts = sample(S);
  CHECK_THROWS_AS(d_conformal_deform(S, params_on(S, "-1", "1")), HypothesisError);
  CHECK_THROWS_AS(d_conformal_deform(S, params_on(S, "1", "z1")), HypothesisError);

  const auto off_structure = params_on(S, "2 + x1^2", "1");
  const MetricFManifold D = d_conformal_deform(S, off_structure);
  CHECK(check_axioms(D, sample(D)).all_passed());
  CHECK_FALSE(check_structure_directions(S, off_structure, pts, 1e-8).passed);
  CHECK_THROWS_AS(check_deformed_connection(S, off_structure, pts, 1e-7), HypothesisError);
  CHECK_THROWS_AS(predicted_deformed_functions(evaluate_structure(S, pts[0]), CharacteristicFunctions{{1.0}, {0.0}}, off_structure),
                  HypothesisError);

  // z1 is the structure direction of standard_S but dz1 o f != 0 there.
  CHECK_FALSE(check_structure_directions(S, params_on(S, "2 + z1", "1"), pts, 1e-8).passed);
  const MetricFManifold E = gallery("euclidean_C");
  CHECK(check_structure_directions(E, params_on(E, "2 + t1", "exp(t1)"), sample(E), 1e-8).passed);
}

TEST_CASE("deformed standard_S with a = 2, b = 4 has alpha = 1/2") {
  const MetricFManifold S = gallery("standard_S");
  const auto params = params_on(S, "2", "4");
  const MetricFManifold D = d_conformal_deform(S, params);
  for (const auto& p : sample(D)) {
    const PointwiseFit fit = extract_pointwise(D, p);
    CHECK(fit.cf.alpha[0] == doctest::Approx(0.5).epsilon(1e-6));
    CHECK(std::abs(fit.cf.beta[0]) <= 1e-6);
  }
  CHECK(check_prediction(D, predicted_deformed_source(S, params), sample(D), 1e-6).passed);
  CHECK(check_deformed_connection(S, params, sample(S), 1e-7).passed);
}

TEST_CASE("deformed Kenmotsu with a = b = e^{2t}") {
  const MetricFManifold K = gallery("kenmotsu");
  const auto params = params_on(K, "exp(2*t1)", "exp(2*t1)");
  const MetricFManifold D = d_conformal_deform(K, params);
  const auto pts = sample(D);
  const auto predicted = predicted_deformed_source(K, params);
  for (const auto& p : pts) {
    const StructureAt st = evaluate_structure(D, p);
    const PointwiseFit fit = extract_pointwise(st);
    // ξ b / (2ab) + β / a with ξ = ∂t, β = 1
    const double t = p(0), a = std::exp(2 * t), b = std::exp(2 * t);
    const double beta = 2 * b / (2 * a * b) + 1 / a;
    CHECK(std::abs(fit.cf.alpha[0]) <= 1e-6);
    CHECK(fit.cf.beta[0] == doctest::Approx(beta).epsilon(1e-6));
    CHECK(predicted(st).beta[0] == doctest::Approx(beta).epsilon(1e-9));
  }
  CHECK(check_deformed_connection(K, params, sample(K), 1e-7).passed);
}

TEST_CASE("deformed connection shift and predicted functions") {
  for (const auto& [name, a, b] : std::vector<std::tuple<std::string, std::string, std::string>>{
           {"euclidean_C(2,2)", "2 + sin(t1)", "exp(t2)"}, {"trans_sasakian_3d", "2", "0.5"}, {"standard_S(1,2)", "3", "2"}}) {
    const MetricFManifold M = gallery(name);
    const auto params = params_on(M, a, b);
    CAPTURE(name);
    CHECK(check_deformed_connection(M, params, sample(M), 1e-7).passed);
    const MetricFManifold D = d_conformal_deform(M, params);
    CHECK(check_prediction(D, predicted_deformed_source(M, params), sample(D), 1e-6).passed);
  }
}

TEST_CASE("warping C^1 by e^t reproduces the Kenmotsu gallery entry") {
  WarpParams w;
  w.h = "exp(t1)";
  const MetricFManifold W = warp_kaehler(gallery("hermitian_flat"), w);
  const MetricFManifold K = gallery("kenmotsu");
  REQUIRE(W.chart().coordinates() == K.chart().coordinates());
  for (const auto& p : sample(W, 16)) {
    CHECK((oracle::metric(W.g(), p) - oracle::metric(K.g(), p)).norm() < 1e-14);
    CHECK((oracle::tensor11(W.f(), p) - oracle::tensor11(K.f(), p)).norm() < 1e-14);
    CHECK((oracle::components(W.xi()[0], p) - oracle::components(K.xi()[0], p)).norm() < 1e-14);
  }
}

TEST_CASE("warp over a Kaehler fiber: trans-S with beta_i = (dh/dt_i)/h") {
  WarpParams w;
  w.s = 2;
  w.h = "1 + t1^2 + t2^2/2";
  const MetricFManifold W = warp_kaehler(gallery("hermitian_flat(2)"), w);
  const auto pts = sample(W);
  for (const auto& p : pts) {
    const double t1 = p(0), t2 = p(1), h = 1 + t1 * t1 + t2 * t2 / 2;
    const PointwiseFit fit = extract_pointwise(W, p);
    CHECK(fit.residual <= 1e-8);
    CHECK(fit.cf.beta[0] == doctest::Approx(2 * t1 / h).epsilon(1e-6).scale(1));
    CHECK(fit.cf.beta[1] == doctest::Approx(t2 / h).epsilon(1e-6).scale(1));
    CHECK(std::abs(fit.cf.alpha[0]) + std::abs(fit.cf.alpha[1]) <= 1e-6);
  }
  CHECK(classify(W, pts).has_label(labels::trans_s));
  CHECK(check_prediction(W, predicted_warp_source(gallery("hermitian_flat(2)"), w), pts, 1e-6).passed);
}

TEST_CASE("warp over a non-Kaehler fiber is not almost trans-S") {
  WarpParams w;
  w.h = "exp(t1)";
  const MetricFManifold fiber = gallery("hermitian_rotated");
  const MetricFManifold W = warp_kaehler(fiber, w);
  CHECK(check_axioms(W, sample(W)).all_passed());
  const AlmostTransSVerdict v = almost_trans_s(W, sample(W));
  CHECK_FALSE(v.holds);
  CHECK(v.absolute.value >= 1e-3);
}

TEST_CASE("warp over standard_S with h = 1 + t^2") {
  WarpParams w;
  w.h = "1 + t1^2";
  const MetricFManifold fiber = gallery("standard_S");
  const MetricFManifold W = warp_trans_s(fiber, w);
  const auto pts = sample(W);
  for (const auto& p : pts) {
    const double t = p(0), h = 1 + t * t;
    const PointwiseFit fit = extract_pointwise(W, p);
    CHECK(fit.residual <= 1e-8);
    CHECK(std::abs(fit.cf.alpha[0]) <= 1e-6);
    CHECK(fit.cf.alpha[1] == doctest::Approx(1 / h).epsilon(1e-6));
    CHECK(fit.cf.beta[0] == doctest::Approx(2 * t / h).epsilon(1e-6).scale(1));
    CHECK(std::abs(fit.cf.beta[1]) <= 1e-6);
  }
  CHECK(check_prediction(W, predicted_warp_source(fiber, w), pts, 1e-6).passed);
  const VerificationReport c = classify(W, pts);
  CHECK(c.has_label(labels::almost_trans_s));
  CHECK_FALSE(c.has_label(labels::normal));
}

TEST_CASE("warped connection against the finite-difference Koszul formula") {
  for (const std::string fiber_name : {"standard_S", "hermitian_rotated", "trans_sasakian_3d"}) {
    const MetricFManifold fiber = gallery(fiber_name);
    WarpParams w;
    w.s = 2;
    w.h = "2 + t1 - t2^2/2";
    const MetricFManifold W = fiber.s() == 0 ? warp_kaehler(fiber, w) : warp_trans_s(fiber, w);
    CAPTURE(fiber_name);
    for (const auto& p : sample(W, 6)) {
      const auto gamma = oracle::christoffel(W.g(), p);
      for (int a = 0; a < W.dim(); ++a) {
        for (int b = 0; b < W.dim(); ++b) {
          const Vector got = warped_connection(fiber, w, Vector::Unit(W.dim(), a), Vector::Unit(W.dim(), b), p);
          for (int k = 0; k < W.dim(); ++k) CHECK(std::abs(got(k) - gamma[static_cast<std::size_t>(k)](a, b)) < 1e-7);
        }
      }
    }
    CHECK(check_warped_connection(fiber, w, sample(W), 1e-7).passed);
  }
}

TEST_CASE("warp hypotheses") {
  WarpParams w;
  w.h = "t1";
  CHECK_THROWS_AS(warp_kaehler(gallery("hermitian_flat"), w), HypothesisError);
  w.h = "1 + x1^2";
  CHECK_THROWS_AS(warp_kaehler(gallery("hermitian_flat"), w), HypothesisError);
  w.h = "2";
  CHECK_THROWS_AS(warp_kaehler(gallery("standard_S"), w), HypothesisError);
  CHECK_THROWS_AS(warp_trans_s(gallery("hermitian_flat"), w), HypothesisError);
  w.s = 0;
  CHECK_THROWS_AS(warp_kaehler(gallery("hermitian_flat"), w), HypothesisError);
  w.s = 1;
  w.base_names = {"x1"};
  CHECK_THROWS_AS(warp_kaehler(gallery("hermitian_flat"), w), HypothesisError);

  WarpParams ok;
  ok.h = "2";
  const MetricFManifold W = warp_kaehler(gallery("hermitian_flat"), ok);
  CHECK(W.s() == 1);
  CHECK(W.chart().coordinates().front() == "t1");
  CHECK_FALSE(W.notes().empty());
}
