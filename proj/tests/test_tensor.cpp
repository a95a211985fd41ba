#include <doctest.h>

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "fman/tensor.hpp"
#include "oracles.hpp"

using namespace fman;

namespace {

const Chart kChart(1, 1, {"x", "y", "z"}, {{-1, 1}, {-1, 1}, {-1, 1}});

MetricField metric_from(const std::vector<std::vector<std::string>>& rows) {
  MetricField g(static_cast<int>(rows.size()));
  for (int i = 0; i < g.dim; ++i)
    for (int j = 0; j < g.dim; ++j) g(i, j) = kChart.parse(rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]);
  return g;
}

MetricField curved_metric() {
  return metric_from({{"2 + x^2", "x*y", "0"}, {"x*y", "3 + sin(z)", "z"}, {"0", "z", "2 + y^2"}});
}

Tensor11Field tensor_from(const std::vector<std::vector<std::string>>& rows) {
  Tensor11Field f(static_cast<int>(rows.size()));
  for (int i = 0; i < f.dim; ++i)
    for (int j = 0; j < f.dim; ++j) f(i, j) = kChart.parse(rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]);
  return f;
}

template <class Field>
Field field_from(const std::vector<std::string>& comps) {
  Field v(static_cast<int>(comps.size()));
  for (int i = 0; i < v.dim(); ++i) v[i] = kChart.parse(comps[static_cast<std::size_t>(i)]);
  return v;
}

std::vector<Point> some_points(int count, unsigned seed = 5) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(-0.9, 0.9);
  std::vector<Point> out;
  for (int k = 0; k < count; ++k) out.push_back(Point{{u(rng), u(rng), u(rng)}});
  return out;
}

Matrix random_rotation(int m, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> n;
  Matrix a(m, m);
  for (auto& v : a.reshaped()) v = n(rng);
  Eigen::HouseholderQR<Matrix> qr(a);
  return qr.householderQ();
}

}  // namespace

TEST_CASE("Christoffel symbols of dt^2 + e^{2t} dx^2 at t = 0") {
  const Chart chart(0, 2, {"t", "x"}, {{-1, 1}, {-1, 1}});
  MetricField g(2);
  g(0, 0) = Expr(1.0);
  g(1, 1) = chart.parse("exp(2*t)");
  const Tensor3 gamma = christoffel(g, Point{{0.0, 0.3}});
  CHECK(gamma(0, 1, 1) == doctest::Approx(-1.0));
  CHECK(gamma(1, 0, 1) == doctest::Approx(1.0));
  CHECK(gamma(1, 1, 0) == doctest::Approx(1.0));
  CHECK(gamma(0, 0, 0) == 0.0);
  CHECK(gamma(1, 1, 1) == 0.0);
}

TEST_CASE("Christoffel symbols match the finite-difference Koszul formula") {
  const MetricField g = curved_metric();
  for (const auto& p : some_points(20)) {
    const Tensor3 gamma = christoffel(g, p);
    const auto ref = oracle::christoffel(g, p);
    for (int k = 0; k < 3; ++k)
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) CHECK(gamma(k, i, j) == doctest::Approx(ref[static_cast<std::size_t>(k)](i, j)).epsilon(1e-7));
  }
}

TEST_CASE("Levi-Civita connection is torsion free and metric") {
  const MetricField g = curved_metric();
  for (const auto& p : some_points(20)) {
    const LocalGeometry geom = local_geometry(g, p);
    const Matrix G = geom.metric.value;
    for (int k = 0; k < 3; ++k)
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
          CHECK(geom.gamma(k, i, j) == doctest::Approx(geom.gamma(k, j, i)).epsilon(1e-14));
          double nabla_g = (oracle::metric(g, oracle::shifted(p, k, 1e-5))(i, j) -
                            oracle::metric(g, oracle::shifted(p, k, -1e-5))(i, j)) / 2e-5;
          for (int l = 0; l < 3; ++l) nabla_g -= geom.gamma(l, k, i) * G(l, j) + geom.gamma(l, k, j) * G(i, l);
          CHECK(std::abs(nabla_g) < 1e-8);
        }
  }
}

TEST_CASE("covariant derivative of a vector field against finite differences") {
  const MetricField g = curved_metric();
  const auto Y = field_from<VectorField>({"y*z", "sin(x)", "1 + x*y"});
  const Vector X{{0.3, -1.2, 0.7}};
  for (const auto& p : some_points(10)) {
    const Vector got = covariant_derivative(local_geometry(g, p), X, evaluate(Y, p));
    const Vector ref = oracle::covariant(g, p, X, [&](const Point& q) { return oracle::components(Y, q); });
    CHECK((got - ref).cwiseAbs().maxCoeff() < 1e-8);
    CHECK((covariant_derivative_vector(g, field_from<VectorField>({"0.3", "-1.2", "0.7"}), Y, p) - got).norm() < 1e-14);
  }
}

TEST_CASE("Lie derivative of the metric against finite differences") {
  const MetricField g = curved_metric();
  const auto X = field_from<VectorField>({"y", "-x", "z^2"});
  for (const auto& p : some_points(10)) {
    const Matrix L = lie_derivative_metric(g, X, p);
    CHECK((L - L.transpose()).norm() < 1e-13);
    for (const Vector& Y : {Vector{{1, 0, 0}}, Vector{{0.2, -0.4, 1.0}}}) {
      CHECK(Y.dot(L * Y) == doctest::Approx(oracle::lie_metric_diag(g, X, p, Y)).epsilon(1e-8));
    }
  }
}

TEST_CASE("exterior derivative conventions") {
  const auto eta = field_from<OneForm>({"0", "x", "0"});
  const OneFormJet j = evaluate(eta, Point{{0.2, 0.1, 0.4}});
  CHECK(exterior_d(j)(0, 1) == doctest::Approx(0.5));
  CHECK(exterior_d(j, ExteriorConvention::plain)(0, 1) == doctest::Approx(1.0));
  CHECK(exterior_d(j)(1, 0) == doctest::Approx(-0.5));

  Matrix omega = Matrix::Zero(3, 3);
  omega(0, 1) = 1.0;
  omega(1, 0) = -1.0;
  const Vector theta{{0, 0, 1}};
  CHECK(wedge(omega, theta)(0, 1, 2) == doctest::Approx(1.0 / 3.0));
  CHECK(wedge(omega, theta, ExteriorConvention::plain)(0, 1, 2) == doctest::Approx(1.0));
  CHECK(wedge(omega, theta)(1, 0, 2) == doctest::Approx(-1.0 / 3.0));
}

TEST_CASE("d o d = 0") {
  const auto eta = field_from<OneForm>({"sin(x*y) + z^3", "exp(x)*cos(z)", "x*y*z + log(2 + y)"});
  for (const auto c : {ExteriorConvention::blair, ExteriorConvention::plain}) {
    for (const auto& p : some_points(15)) {
      const Tensor3 dd = exterior_d(exterior_d_jet(evaluate(eta, p), c), c);
      CHECK(dd.max_abs() < 1e-12);
    }
  }
}

TEST_CASE("codifferential does not depend on the orthonormal frame") {
  const MetricField g = curved_metric();
  const Tensor11Field f = tensor_from({{"0", "-1 - z^2", "x"}, {"1", "y", "0"}, {"x*z", "0", "sin(y)"}});
  const auto eta = field_from<OneForm>({"y", "x*z", "cos(x)"});
  unsigned seed = 1;
  for (const auto& p : some_points(10)) {
    const LocalGeometry geom = local_geometry(g, p);
    const TwoFormJet omega = lower(geom.metric, evaluate(f, p));
    const Matrix E = orthonormal_frame(geom.metric.value);
    const Matrix E2 = E * random_rotation(3, seed++);
    CHECK((codifferential(geom, omega, E) - codifferential(geom, omega, E2)).norm() < 1e-12);
    CHECK(codifferential(geom, evaluate(eta, p), E) == doctest::Approx(codifferential(geom, evaluate(eta, p), E2)));
    CHECK(codifferential(geom, evaluate(eta, p)) ==
          doctest::Approx(oracle::codifferential_eta(g, eta, p)).epsilon(1e-7));
  }
}

TEST_CASE("Nijenhuis tensor: component formula equals the bracket form for any extension") {
  const Tensor11Field f = tensor_from({{"0", "-1 - z^2", "x"}, {"1", "y", "0"}, {"x*z", "0", "sin(y)"}});
  const auto X1 = field_from<VectorField>({"1 + y", "z", "x^2"});
  const auto Y1 = field_from<VectorField>({"0", "exp(x)", "1"});
  for (const auto& p : some_points(10)) {
    const Tensor11Jet fj = evaluate(f, p);
    const VectorJet X = evaluate(X1, p), Y = evaluate(Y1, p);
    const Vector by_components = nijenhuis(fj, X.value, Y.value);
    CHECK((by_components - nijenhuis(fj, X, Y)).norm() < 1e-12);
    CHECK((by_components - nijenhuis(fj, constant_extension(X.value), constant_extension(Y.value))).norm() < 1e-12);
    CHECK((by_components + nijenhuis(fj, Y.value, X.value)).norm() < 1e-12);
  }
}

TEST_CASE("orthonormal frame") {
  const MetricField g = curved_metric();
  for (const auto& p : some_points(5)) {
    const Matrix G = oracle::metric(g, p);
    const Matrix E = orthonormal_frame(G);
    CHECK((E.transpose() * G * E - Matrix::Identity(3, 3)).norm() < 1e-13);
  }
  Matrix bad = Matrix::Identity(2, 2);
  bad(1, 1) = -1.0;
  CHECK_THROWS_AS(metric_at(bad), GeometryError);
}

TEST_CASE("chart validation") {
  CHECK_THROWS_AS(Chart(1, 1, {"x", "y"}, {{-1, 1}, {-1, 1}}), GeometryError);
  CHECK_THROWS_AS(Chart(1, 0, {"x", "x"}, {{-1, 1}, {-1, 1}}), GeometryError);
  CHECK_THROWS_AS(Chart(1, 0, {"x", "y"}, {{1, -1}, {-1, 1}}), GeometryError);
  CHECK(kChart.index_of("z") == std::optional<std::size_t>(2));
  CHECK(kChart.contains(Point{{0, 0, 1}}));
  CHECK_FALSE(kChart.contains(Point{{0, 0, 1.5}}));
}
