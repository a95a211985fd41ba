#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "fman/cli.hpp"
#include "fman/constructions.hpp"
#include "fman/definition_file.hpp"
#include "fman/gallery.hpp"
#include "fman/sampling.hpp"
#include "oracles.hpp"

using namespace fman;
using Json = nlohmann::json;

namespace {

const std::string kFixtures = FMAN_FIXTURE_DIR;

struct Run {
  int code;
  std::string out;
  std::string err;
  Json json() const { return Json::parse(out); }
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::filesystem::path temp_file(const std::string& name) { return std::filesystem::temp_directory_path() / ("fman_cli_" + name); }

std::vector<std::string> labels_in(const Json& doc) { return doc.at("labels").get<std::vector<std::string>>(); }

double field_gap(const MetricFManifold& A, const MetricFManifold& B) {
  double worst = 0.0;
  for (const auto& p : sample_points(A.chart())) {
    worst = std::max(worst, (oracle::metric(A.g(), p) - oracle::metric(B.g(), p)).cwiseAbs().maxCoeff());
    worst = std::max(worst, (oracle::tensor11(A.f(), p) - oracle::tensor11(B.f(), p)).cwiseAbs().maxCoeff());
    for (std::size_t i = 0; i < A.xi().size(); ++i) {
      worst = std::max(worst, (oracle::components(A.xi()[i], p) - oracle::components(B.xi()[i], p)).cwiseAbs().maxCoeff());
      worst = std::max(worst, (oracle::components(A.eta()[i], p) - oracle::components(B.eta()[i], p)).cwiseAbs().maxCoeff());
    }
  }
  return worst;
}

}  // namespace

TEST_CASE("exit codes on fixture files") {
  CHECK(run({"verify", kFixtures + "/sasakian_heisenberg.ini"}).code == cli::pass);
  CHECK(run({"verify", kFixtures + "/wrong_declared.ini"}).code == cli::check_failure);
  CHECK(run({"verify", kFixtures + "/incompatible_metric.ini"}).code == cli::check_failure);
  const Run parse = run({"verify", kFixtures + "/parse_error.ini"});
  CHECK(parse.code == cli::input_error);
  CHECK(parse.err.find("parse_error.ini") != std::string::npos);
  CHECK(run({"verify", kFixtures + "/nonsymmetric_metric.ini"}).code == cli::input_error);
  CHECK(run({"verify", kFixtures + "/missing.ini"}).code == cli::input_error);
}

TEST_CASE("verify against expected labels") {
  CHECK(run({"verify", "gallery:standard_S"}).code == cli::pass);
  CHECK(run({"verify", "gallery:kaehler_times_S", "--expect", "trans-S"}).code == cli::check_failure);
  CHECK(run({"verify", "gallery:kaehler_times_S", "--expect", "K", "--expect", "normal"}).code == cli::pass);
  CHECK(run({"verify", "gallery:kaehler_times_S", "--expect", "Kaehler"}).code == cli::input_error);
}

TEST_CASE("report document") {
  const Run r = run({"verify", "gallery:kenmotsu", "--points", "16", "--seed", "3", "--json", "-"});
  REQUIRE(r.code == 0);
  const Json doc = r.json();
  CHECK(doc["tool"] == "fman");
  CHECK(doc["command"] == "verify");
  CHECK(doc["seed"] == 3);
  CHECK(doc["point_count"] == 16 + 8);
  CHECK(doc["tolerances"]["structural"] == 1e-8);
  CHECK(doc["passed"] == true);
  CHECK(doc["manifold"]["dim"] == 3);
  CHECK(doc["characteristic_functions"]["beta_1"]["mean"].get<double>() == doctest::Approx(1.0));
  for (const auto& c : doc["checks"]) {
    for (const char* field : {"name", "value", "tolerance", "bound", "passed", "skipped", "witness", "note"}) CHECK(c.contains(field));
  }
  CHECK(labels_in(doc) == std::vector<std::string>{"normal", "almost trans-S", "trans-S"});
}

TEST_CASE("report is byte-identical across runs") {
  const std::vector<std::string> args = {"extract", "gallery:trans_sasakian_3d", "--seed", "9", "--json", "-"};
  CHECK(run(args).out == run(args).out);
  CHECK(run(args).out != run({"extract", "gallery:trans_sasakian_3d", "--seed", "10", "--json", "-"}).out);
}

TEST_CASE("classify") {
  const Run e = run({"classify", "gallery:euclidean_C", "--json", "-"});
  CHECK(e.code == 0);
  for (const char* l : {"C", "K", "trans-S"}) {
    const auto ls = labels_in(e.json());
    CHECK(std::find(ls.begin(), ls.end(), l) != ls.end());
  }
  const Run k = run({"classify", "gallery:kaehler_times_S"});
  CHECK(k.code == 0);
  CHECK(k.out.find("labels: normal, K") != std::string::npos);
}

TEST_CASE("extract reports three routes") {
  const Run r = run({"extract", "gallery:deformed_S", "--json", "-"});
  REQUIRE(r.code == 0);
  const Json doc = r.json();
  for (const char* route : {"least_squares", "codifferential", "nabla_F"}) {
    CHECK(doc["functions"]["alpha_1"][route]["mean"].get<double>() == doctest::Approx(0.5));
  }
  CHECK(doc["max_disagreement"].get<double>() <= 1e-6);

  const Run almost = run({"extract", "gallery:warped_almost", "--json", "-"});
  CHECK(almost.code == 0);
  CHECK(almost.json()["checks"][0]["skipped"] == true);
}

TEST_CASE("deform output reloads with the same labels") {
  const auto path = temp_file("deformed.ini");
  const Run r = run({"deform", "gallery:standard_S", "--a", "2", "--b", "4", "--out", path.string(), "--json", "-"});
  REQUIRE(r.code == 0);
  const MetricFManifold S = gallery("standard_S");
  const MetricFManifold D = d_conformal_deform(S, {Expr(2.0), Expr(4.0)});
  const auto in_memory = classify(D, sample_points(D.chart())).labels;
  CHECK(labels_in(r.json()) == in_memory);

  const Run again = run({"verify", path.string(), "--json", "-"});
  CHECK(again.code == 0);
  CHECK(labels_in(again.json()) == in_memory);
  CHECK(again.json()["characteristic_functions"]["alpha_1"]["mean"].get<double>() == doctest::Approx(0.5));
  std::filesystem::remove(path);
}

TEST_CASE("identity deformation reproduces the input") {
  const auto path = temp_file("identity.ini");
  REQUIRE(run({"deform", kFixtures + "/sasakian_heisenberg.ini", "--out", path.string()}).code == 0);
  CHECK(field_gap(load_definition(kFixtures + "/sasakian_heisenberg.ini"), load_definition(path)) <= 1e-15);
  std::filesystem::remove(path);
}

TEST_CASE("deform hypotheses are input errors") {
  CHECK(run({"deform", "gallery:standard_S", "--a", "2 + x1^2"}).code == cli::input_error);
  CHECK(run({"deform", "gallery:standard_S", "--a", "-2"}).code == cli::input_error);
  CHECK(run({"deform", "gallery:standard_S", "--b", "w"}).code == cli::input_error);
  const Run k = run({"deform", "gallery:kaehler_times_S", "--a", "2", "--b", "3"});
  CHECK(k.code == 0);
  CHECK(k.out.find("SKIP") != std::string::npos);
}

TEST_CASE("warp of C^1 by e^t is the Kenmotsu manifold") {
  const auto path = temp_file("kenmotsu.ini");
  REQUIRE(run({"warp", "gallery:hermitian_flat", "--s", "1", "--h", "exp(t1)", "--out", path.string()}).code == 0);
  CHECK(field_gap(load_definition(path), gallery("kenmotsu")) <= 1e-15);
  const Run v = run({"verify", path.string(), "--json", "-"});
  CHECK(v.code == 0);
  CHECK(labels_in(v.json()) == std::vector<std::string>{"normal", "almost trans-S", "trans-S"});
  std::filesystem::remove(path);
}

TEST_CASE("warp of standard_S by 1 + t^2 is almost trans-S, not normal") {
  const auto path = temp_file("warped_s.ini");
  const Run w = run({"warp", "gallery:standard_S", "--h", "1+t1^2", "--out", path.string(), "--json", "-"});
  REQUIRE(w.code == 0);
  bool predicted = false;
  const Json doc = w.json();
  for (const auto& c : doc["checks"]) {
    if (c["name"] == "predicted characteristic functions = re-extracted") predicted = c["passed"].get<bool>() && !c["skipped"].get<bool>();
  }
  CHECK(predicted);
  const Run v = run({"verify", path.string(), "--json", "-"});
  CHECK(v.code == 0);
  CHECK(labels_in(v.json()) == std::vector<std::string>{"almost trans-S"});
  std::filesystem::remove(path);

  CHECK(run({"warp", "gallery:standard_S", "--h", "t1"}).code == cli::input_error);
  CHECK(run({"warp", "gallery:standard_S", "--h", "1 + x1^2"}).code == cli::input_error);
}

TEST_CASE("json written to a file matches stdout") {
  const auto path = temp_file("report.json");
  const Run to_file = run({"classify", "gallery:kenmotsu", "--json", path.string()});
  CHECK(to_file.code == 0);
  CHECK(to_file.out.find("labels:") != std::string::npos);
  std::ifstream in(path);
  const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  CHECK(text == run({"classify", "gallery:kenmotsu", "--json", "-"}).out);
  std::filesystem::remove(path);
}

TEST_CASE("argument handling") {
  CHECK(run({"--help"}).code == 0);
  CHECK(run({"verify", "--help"}).code == 0);
  CHECK(run({}).code == cli::input_error);
  CHECK(run({"frobnicate"}).code == cli::input_error);
  CHECK(run({"verify", "gallery:standard_S", "--points", "0"}).code == cli::input_error);
  const Run list = run({"gallery-list"});
  CHECK(list.code == 0);
  for (const auto& g : gallery_catalog()) CHECK(list.out.find(g.name) != std::string::npos);
}
