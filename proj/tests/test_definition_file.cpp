#include <doctest.h>

#include <filesystem>
#include <string>
#include <vector>

#include "fman/definition_file.hpp"
#include "fman/gallery.hpp"
#include "fman/sampling.hpp"
#include "oracles.hpp"

using namespace fman;

namespace {

const std::string kFixtures = FMAN_FIXTURE_DIR;

const std::string kMinimal = R"([chart]
n = 1
s = 1
coordinates = x, y, z
domain.x = -1, 1
domain.y = -1, 1
domain.z = -1, 1

[metric]
x,x = 1
y,y = 1
z,z = 1

[f]
y,x = 1
x,y = -1

[xi.1]
z = 1

[eta.1]
z = 1
)";

double field_gap(const MetricFManifold& A, const MetricFManifold& B, const std::vector<Point>& pts) {
  double worst = 0.0;
  auto upd = [&](double v) { worst = std::max(worst, v); };
  for (const auto& p : pts) {
    upd((oracle::metric(A.g(), p) - oracle::metric(B.g(), p)).cwiseAbs().maxCoeff());
    upd((oracle::tensor11(A.f(), p) - oracle::tensor11(B.f(), p)).cwiseAbs().maxCoeff());
    for (std::size_t i = 0; i < A.xi().size(); ++i) {
      upd((oracle::components(A.xi()[i], p) - oracle::components(B.xi()[i], p)).cwiseAbs().maxCoeff());
      upd((oracle::components(A.eta()[i], p) - oracle::components(B.eta()[i], p)).cwiseAbs().maxCoeff());
    }
  }
  return worst;
}

std::string replaced(std::string text, const std::string& from, const std::string& to) {
  const auto at = text.find(from);
  REQUIRE(at != std::string::npos);
  return text.replace(at, from.size(), to);
}

void check_rejected(const std::string& text, const std::string& fragment) {
  CAPTURE(fragment);
  try {
    parse_definition(text);
    FAIL("accepted");
  } catch (const DefinitionError& e) {
    CHECK(std::string(e.what()).find(fragment) != std::string::npos);
  }
}

}  // namespace

TEST_CASE("minimal file") {
  const MetricFManifold M = parse_definition(kMinimal);
  CHECK(M.n() == 1);
  CHECK(M.s() == 1);
  CHECK_FALSE(M.declared().has_value());
  CHECK(check_axioms(M, sample_points(M.chart())).all_passed());
}

TEST_CASE("every gallery manifold survives format and parse") {
  for (const auto& info : gallery_catalog()) {
    const MetricFManifold M = gallery(info.name);
    const std::string text = format_definition(M);
    const MetricFManifold back = parse_definition(text);
    CAPTURE(info.name);
    CHECK(back.name() == M.name());
    CHECK(back.chart().coordinates() == M.chart().coordinates());
    CHECK(back.n() == M.n());
    CHECK(back.s() == M.s());
    for (std::size_t i = 0; i < M.chart().domain().size(); ++i) {
      CHECK(back.chart().domain()[i].lo == M.chart().domain()[i].lo);
      CHECK(back.chart().domain()[i].hi == M.chart().domain()[i].hi);
    }
    CHECK(field_gap(M, back, sample_points(M.chart())) <= 1e-14);
    CHECK(back.declared().has_value() == M.declared().has_value());
    CHECK(format_definition(back) == text);
  }
}

TEST_CASE("hand-written Heisenberg file equals the gallery S-manifold") {
  const MetricFManifold file = load_definition(kFixtures + "/sasakian_heisenberg.ini");
  const MetricFManifold S = gallery("standard_S");
  CHECK(file.name() == "heisenberg_sasakian");
  CHECK(field_gap(file, S, sample_points(S.chart())) <= 1e-15);
  REQUIRE(file.declared().has_value());
  CHECK(file.declared()->alpha[0].is_constant(1.0));
}

TEST_CASE("gallery sources") {
  CHECK(load_manifold("gallery:kenmotsu(2)").n() == 2);
  CHECK_THROWS_AS(load_manifold("gallery:nonexistent"), DefinitionError);
  CHECK_THROWS_AS(load_manifold("gallery:standard_S(0, 1)"), DefinitionError);
  CHECK_THROWS_AS(load_manifold(kFixtures + "/no_such_file.ini"), DefinitionError);
}

TEST_CASE("malformed definitions are rejected with a reason") {
  check_rejected("n = 1\n" + kMinimal, "outside");
  check_rejected(kMinimal + "[colour]\nx = 1\n", "colour");
  check_rejected(replaced(kMinimal, "s = 1", "s = 2"), "2n+s");
  check_rejected(replaced(kMinimal, "domain.z = -1, 1\n", ""), "domain");
  check_rejected(replaced(kMinimal, "domain.z = -1, 1", "domain.z = 1, -1"), "domain");
  check_rejected(replaced(kMinimal, "z,z = 1", "w,z = 1"), "w");
  check_rejected(replaced(kMinimal, "y,x = 1", "y,x = 1 +"), "[f]");
  check_rejected(replaced(kMinimal, "x,x = 1", "x,x = 1\ny,x = 0.5\nx,y = 0.25"), "symmetric");
  check_rejected(replaced(kMinimal, "[xi.1]", "[xi.2]"), "xi");
  check_rejected(replaced(kMinimal, "[eta.1]\nz = 1\n", ""), "eta");
  check_rejected(replaced(kMinimal, "n = 1\n", ""), "n");
  check_rejected(kMinimal + "[declared]\nalpha.3 = 1\n", "declared");
  check_rejected(replaced(kMinimal, "z,z = 1", "z,z = 1\nz,z = 2"), "duplicate");
}

TEST_CASE("fixtures for the command line") {
  CHECK_THROWS_AS(load_definition(kFixtures + "/parse_error.ini"), DefinitionError);
  CHECK_THROWS_AS(load_definition(kFixtures + "/nonsymmetric_metric.ini"), DefinitionError);
  CHECK_NOTHROW(load_definition(kFixtures + "/wrong_declared.ini"));
  CHECK_NOTHROW(load_definition(kFixtures + "/incompatible_metric.ini"));
}

TEST_CASE("save and load") {
  const auto path = std::filesystem::temp_directory_path() / "fman_definition_roundtrip.ini";
  const MetricFManifold M = gallery("warped_trans_sasakian");
  save_definition(M, path);
  const MetricFManifold back = load_definition(path);
  CHECK(field_gap(M, back, sample_points(M.chart())) <= 1e-14);
  std::filesystem::remove(path);
}
