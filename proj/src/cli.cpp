#include "fman/cli.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <limits>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>
#include <json.hpp>

#include "fman/constructions.hpp"
#include "fman/definition_file.hpp"
#include "fman/gallery.hpp"
#include "fman/sampling.hpp"
#include "fman/trans_s.hpp"

namespace fman::cli {

namespace {

using Json = nlohmann::ordered_json;

constexpr double kAgreementTol = 1e-6;

struct CommonOptions {
  int points = 64;
  std::uint64_t seed = 0;
  double tol = 1e-8;
  double relative_tol = 1e-6;
  std::string json_path;
};

struct Outcome {
  Json doc;
  VerificationReport report;
  std::vector<std::string> notes;  // extra human-readable lines
  bool exit_on_checks = true;
};

Json to_json(const Point& p) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < p.size(); ++i) a.push_back(p(i));
  return a;
}

Json to_json(const CheckResult& c) {
  Json j;
  j["name"] = c.name;
  j["value"] = c.value;
  j["tolerance"] = c.tolerance;
  j["bound"] = c.bound == CheckResult::Bound::at_most ? "at_most" : "at_least";
  j["passed"] = c.passed;
  j["skipped"] = c.skipped;
  j["witness"] = to_json(c.witness);
  j["note"] = c.note;
  return j;
}

Json checks_json(const VerificationReport& r) {
  Json a = Json::array();
  for (const auto& c : r.checks) a.push_back(to_json(c));
  return a;
}

Json header(const std::string& command, const std::string& source, const MetricFManifold& M,
            const CommonOptions& opt, std::size_t point_count) {
  Json j;
  j["tool"] = kToolName;
  j["version"] = kVersion;
  j["command"] = command;
  j["source"] = source;
  Json m;
  m["name"] = M.name();
  m["n"] = M.n();
  m["s"] = M.s();
  m["dim"] = M.dim();
  m["coordinates"] = M.chart().coordinates();
  m["notes"] = M.notes();
  j["manifold"] = m;
  j["seed"] = opt.seed;
  j["point_count"] = point_count;
  Json tol;
  tol["structural"] = opt.tol;
  tol["almost_trans_s_relative"] = opt.relative_tol;
  tol["extraction_agreement"] = kAgreementTol;
  j["tolerances"] = tol;
  return j;
}

std::vector<Point> points_for(const MetricFManifold& M, const CommonOptions& opt) {
  SampleOptions s;
  s.count = opt.points;
  s.seed = opt.seed;
  return sample_points(M.chart(), s);
}

TransSOptions trans_s_options(const CommonOptions& opt) { return {opt.tol, opt.relative_tol}; }

ClassifyOptions classify_options(const CommonOptions& opt) { return {opt.tol, opt.relative_tol}; }

struct Summary {
  double min = std::numeric_limits<double>::infinity();
  double max = -std::numeric_limits<double>::infinity();
  double sum = 0.0;
  std::size_t count = 0;
  void add(double v) {
    min = std::min(min, v);
    max = std::max(max, v);
    sum += v;
    ++count;
  }
  Json json() const {
    Json j;
    j["min"] = min;
    j["mean"] = count ? sum / static_cast<double>(count) : 0.0;
    j["max"] = max;
    return j;
  }
};

std::string function_name(int k, int s) { return (k < s ? "alpha_" : "beta_") + std::to_string(k % s + 1); }

// Least-squares characteristic functions over the sample, as min/mean/max.
Json fitted_functions(const MetricFManifold& M, const std::vector<Point>& pts) {
  const int s = M.s();
  std::vector<Summary> acc(static_cast<std::size_t>(2 * s));
  for (const auto& p : pts) {
    const PointwiseFit fit = extract_pointwise(M, p);
    for (int i = 0; i < s; ++i) {
      acc[static_cast<std::size_t>(i)].add(fit.cf.alpha[static_cast<std::size_t>(i)]);
      acc[static_cast<std::size_t>(s + i)].add(fit.cf.beta[static_cast<std::size_t>(i)]);
    }
  }
  Json j = Json::object();
  for (int k = 0; k < 2 * s; ++k) j[function_name(k, s)] = acc[static_cast<std::size_t>(k)].json();
  return j;
}

// ---------------------------------------------------------------------------

Outcome cmd_verify(const std::string& source, const std::vector<std::string>& expect, const CommonOptions& opt) {
  const MetricFManifold M = load_manifold(source);
  const auto pts = points_for(M, opt);
  Outcome o;
  o.report = verify_trans_s(M, pts, trans_s_options(opt));
  if (!expect.empty() && o.report.labels.empty()) {
    o.report.labels = classify(M, pts, classify_options(opt)).labels;
  }
  for (const auto& label : expect) {
    CheckResult c;
    c.name = "expected label: " + label;
    c.passed = o.report.has_label(label);
    c.value = c.passed ? 0.0 : 1.0;
    o.report.add(std::move(c));
  }
  o.doc = header("verify", source, M, opt, pts.size());
  o.doc["checks"] = checks_json(o.report);
  o.doc["labels"] = o.report.labels;
  o.doc["characteristic_functions"] =
      o.report.has_label(labels::almost_trans_s) ? fitted_functions(M, pts) : Json(nullptr);
  o.doc["passed"] = o.report.all_passed();
  return o;
}

Outcome cmd_classify(const std::string& source, const CommonOptions& opt) {
  const MetricFManifold M = load_manifold(source);
  const auto pts = points_for(M, opt);
  Outcome o;
  const VerificationReport axioms = check_axioms(M, pts, {opt.tol, 1e-8, 1e-6, 1e-10});
  o.doc = header("classify", source, M, opt, pts.size());
  if (!axioms.all_passed()) {
    o.report = axioms;
    o.doc["checks"] = checks_json(axioms);
    o.doc["labels"] = Json::array();
    o.doc["passed"] = false;
    return o;
  }
  const VerificationReport cls = classify(M, pts, classify_options(opt));
  o.report.labels = cls.labels;
  Json props = Json::array();
  for (const auto& c : cls.checks) {
    Json p = to_json(c);
    p.erase("passed");
    p["holds"] = c.passed;
    props.push_back(std::move(p));
  }
  o.doc["properties"] = props;
  o.doc["labels"] = cls.labels;
  o.doc["passed"] = true;
  for (const auto& c : cls.checks) {
    o.notes.push_back(fmt::format("  {:<5} {:>11.3e}  {}", c.passed ? "yes" : "no", c.value, c.name));
  }
  return o;
}

Outcome cmd_extract(const std::string& source, const CommonOptions& opt) {
  const MetricFManifold M = load_manifold(source);
  const auto pts = points_for(M, opt);
  Outcome o;
  o.doc = header("extract", source, M, opt, pts.size());
  o.report = check_axioms(M, pts, {opt.tol, 1e-8, 1e-6, 1e-10});
  if (!o.report.all_passed()) {
    o.doc["checks"] = checks_json(o.report);
    o.doc["passed"] = false;
    return o;
  }
  o.report.labels = classify(M, pts, classify_options(opt)).labels;
  const ExtractionTable table = extract_all_routes(M, pts);

  const int s = M.s();
  std::vector<Summary> lsq(static_cast<std::size_t>(2 * s)), cod(lsq.size()), nab(lsq.size());
  Summary residual;
  for (std::size_t p = 0; p < table.points.size(); ++p) {
    residual.add(table.fits[p].residual);
    for (int i = 0; i < s; ++i) {
      const auto ui = static_cast<std::size_t>(i), vi = static_cast<std::size_t>(s + i);
      lsq[ui].add(table.fits[p].cf.alpha[ui]);
      lsq[vi].add(table.fits[p].cf.beta[ui]);
      cod[ui].add(table.codifferential[p].alpha[ui]);
      cod[vi].add(table.codifferential[p].beta[ui]);
      nab[ui].add(table.nabla_f[p].alpha[ui]);
      nab[vi].add(table.nabla_f[p].beta[ui]);
    }
  }
  Json functions;
  for (int k = 0; k < 2 * s; ++k) {
    const auto uk = static_cast<std::size_t>(k);
    const std::string name = function_name(k, s);
    Json f;
    f["least_squares"] = lsq[uk].json();
    f["codifferential"] = cod[uk].json();
    f["nabla_F"] = nab[uk].json();
    functions[name] = f;
    o.notes.push_back(fmt::format("  {:<8} least squares [{:.9g}, {:.9g}]  codifferential [{:.9g}, {:.9g}]  "
                                  "nabla F [{:.9g}, {:.9g}]",
                                  name, lsq[uk].min, lsq[uk].max, cod[uk].min, cod[uk].max, nab[uk].min, nab[uk].max));
  }
  o.notes.push_back(fmt::format("  best-fit residual max {:.3e}, route disagreement max {:.3e}", residual.max,
                                table.max_disagreement));

  const bool trans = o.report.has_label(labels::trans_s);
  o.report.checks.clear();
  if (trans) {
    CheckResult agree;
    agree.name = "extraction routes agree (least squares, codifferential, nabla F)";
    agree.value = table.max_disagreement;
    agree.tolerance = kAgreementTol;
    agree.witness = table.disagreement_witness;
    agree.passed = agree.value <= agree.tolerance;
    o.report.add(std::move(agree));
  } else {
    o.report.add(skipped_check("extraction routes agree (least squares, codifferential, nabla F)", kAgreementTol,
                               "routes coincide only on trans-S manifolds"));
  }
  if (M.declared()) {
    CheckResult c = check_trans_s_identity(M, declared_source(*M.declared()), pts, opt.tol);
    c.name = "declared: " + c.name;
    o.report.add(std::move(c));
  }
  o.doc["functions"] = functions;
  o.doc["best_fit_residual"] = residual.json();
  o.doc["max_disagreement"] = table.max_disagreement;
  o.doc["checks"] = checks_json(o.report);
  o.doc["labels"] = o.report.labels;
  o.doc["passed"] = o.report.all_passed();
  return o;
}

void write_output(const MetricFManifold& M, const std::string& path, Outcome& o) {
  if (path.empty()) return;
  save_definition(M, path);
  o.doc["output"] = path;
  o.notes.push_back("  wrote " + path);
}

Outcome finish_construction(const std::string& command, const std::string& source, const MetricFManifold& input,
                            const MetricFManifold& built, const CommonOptions& opt, VerificationReport checks) {
  const auto pts = points_for(built, opt);
  Outcome o;
  o.report = std::move(checks);
  o.report.append(check_axioms(built, pts, {opt.tol, 1e-8, 1e-6, 1e-10}));
  if (o.report.all_passed()) o.report.labels = classify(built, pts, classify_options(opt)).labels;
  o.doc = header(command, source, input, opt, pts.size());
  Json out;
  out["name"] = built.name();
  out["n"] = built.n();
  out["s"] = built.s();
  out["coordinates"] = built.chart().coordinates();
  o.doc["result"] = out;
  o.doc["checks"] = checks_json(o.report);
  o.doc["labels"] = o.report.labels;
  o.doc["passed"] = o.report.all_passed();
  return o;
}

Outcome cmd_deform(const std::string& source, const std::string& a, const std::string& b, const std::string& out_path,
                   const CommonOptions& opt) {
  const MetricFManifold M = load_manifold(source);
  const auto pts = points_for(M, opt);
  const DeformationParams params{M.chart().parse(a), M.chart().parse(b)};
  const MetricFManifold D = d_conformal_deform(M, params, pts);

  const CheckResult directions = check_structure_directions(M, params, pts, opt.tol);
  if (!directions.passed) {
    throw HypothesisError("a and b must depend only on the directions of the structure vector fields (max |da o f|, "
                          "|db o f| = " + fmt::format("{:.3e}", directions.value) + ")");
  }
  VerificationReport checks;
  checks.add(directions);
  const bool input_trans_s = classify(M, pts, classify_options(opt)).has_label(labels::trans_s);
  if (input_trans_s) {
    CheckResult pred = check_prediction(D, predicted_deformed_source(M, params), points_for(D, opt), kAgreementTol);
    checks.add(std::move(pred));
    checks.add(check_deformed_connection(M, params, pts, 1e-7));
  } else {
    checks.add(skipped_check("predicted characteristic functions = re-extracted", kAgreementTol,
                             "input is not a trans-S manifold"));
  }
  Outcome o = finish_construction("deform", source, M, D, opt, std::move(checks));
  o.doc["parameters"] = Json{{"a", params.a.to_string()}, {"b", params.b.to_string()}};
  write_output(D, out_path, o);
  return o;
}

Outcome cmd_warp(const std::string& source, int s, const std::string& h, const std::string& out_path,
                 const CommonOptions& opt) {
  const MetricFManifold fiber = load_manifold(source);
  const WarpParams params{s, h, {}, {}};
  const MetricFManifold W = fiber.s() == 0 ? warp_kaehler(fiber, params) : warp_trans_s(fiber, params);
  const auto pts = points_for(W, opt);

  VerificationReport checks;
  checks.add(check_warped_connection(fiber, params, pts, 1e-7));
  const bool fiber_fits = almost_trans_s(fiber, points_for(fiber, opt), trans_s_options(opt)).holds;
  if (fiber_fits) {
    checks.add(check_prediction(W, predicted_warp_source(fiber, params), pts, kAgreementTol));
  } else {
    checks.add(skipped_check("predicted characteristic functions = re-extracted", kAgreementTol,
                             fiber.s() == 0 ? "fiber is not Kaehler" : "fiber is not almost trans-S"));
  }
  Outcome o = finish_construction("warp", source, fiber, W, opt, std::move(checks));
  o.doc["parameters"] = Json{{"s", s}, {"h", h}};
  write_output(W, out_path, o);
  return o;
}

Outcome cmd_gallery_list() {
  Outcome o;
  o.exit_on_checks = false;
  o.doc["tool"] = kToolName;
  o.doc["version"] = kVersion;
  o.doc["command"] = "gallery-list";
  Json list = Json::array();
  for (const auto& g : gallery_catalog()) {
    list.push_back(Json{{"name", g.name}, {"signature", g.signature}, {"summary", g.summary}});
    o.notes.push_back(fmt::format("  {:<24} {:<46} {}", g.name, g.signature, g.summary));
  }
  o.doc["gallery"] = list;
  return o;
}

// ---------------------------------------------------------------------------

void render(const Outcome& o, std::ostream& out) {
  const Json& d = o.doc;
  if (d.contains("manifold")) {
    const Json& m = d["manifold"];
    fmt::print(out, "{} {}: {} (n={}, s={}; {} points, seed {})\n", d["command"].get<std::string>(),
               d["source"].get<std::string>(), m["name"].get<std::string>(), m["n"].get<int>(), m["s"].get<int>(),
               d["point_count"].get<std::size_t>(), d["seed"].get<std::uint64_t>());
  }
  if (d.contains("result")) fmt::print(out, "result: {}\n", d["result"]["name"].get<std::string>());
  for (const auto& c : o.report.checks) {
    const char* status = c.skipped ? "SKIP" : c.passed ? "PASS" : "FAIL";
    const char* rel = c.bound == CheckResult::Bound::at_most ? "<=" : ">=";
    fmt::print(out, "  {}  {:>11.3e} {} {:<9.1e} {}", status, c.value, rel, c.tolerance, c.name);
    if (!c.note.empty()) fmt::print(out, "  ({})", c.note);
    fmt::print(out, "\n");
  }
  for (const auto& line : o.notes) fmt::print(out, "{}\n", line);
  if (d.contains("labels")) {
    std::string joined;
    for (const auto& l : o.report.labels) joined += (joined.empty() ? "" : ", ") + l;
    fmt::print(out, "labels: {}\n", joined.empty() ? "(none)" : joined);
  }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Verification engine for metric f-manifolds and trans-S structures", kToolName};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  CommonOptions opt;
  auto add_common = [&opt](CLI::App* sub) {
    sub->add_option("--points", opt.points, "quasi-random sample points per domain")->check(CLI::PositiveNumber);
    sub->add_option("--seed", opt.seed, "sampling seed");
    sub->add_option("--tol", opt.tol, "structural tolerance")->check(CLI::PositiveNumber);
    sub->add_option("--json", opt.json_path, "write the machine-readable report here ('-' for stdout)");
  };

  std::string source, a = "1", b = "1", h = "1", out_path;
  std::vector<std::string> expect;
  int warp_s = 1;

  auto* verify = app.add_subcommand("verify", "run every applicable check; exit 1 if any fails");
  verify->add_option("source", source, "definition file or gallery:NAME")->required();
  verify->add_option("--expect", expect, "assert that the manifold carries this label");
  add_common(verify);

  auto* classify_cmd = app.add_subcommand("classify", "report which structure labels hold");
  classify_cmd->add_option("source", source, "definition file or gallery:NAME")->required();
  add_common(classify_cmd);

  auto* extract = app.add_subcommand("extract", "characteristic functions by three routes");
  extract->add_option("source", source, "definition file or gallery:NAME")->required();
  add_common(extract);

  auto* deform = app.add_subcommand("deform", "generalized D-conformal deformation");
  deform->add_option("source", source, "definition file or gallery:NAME")->required();
  deform->add_option("--a", a, "positive function a (expression)");
  deform->add_option("--b", b, "positive function b (expression)");
  deform->add_option("--out", out_path, "write the deformed definition here");
  add_common(deform);

  auto* warp = app.add_subcommand("warp", "warped product R^s x_h fiber");
  warp->add_option("fiber", source, "fiber definition file or gallery:NAME")->required();
  warp->add_option("--s", warp_s, "base dimension")->check(CLI::PositiveNumber);
  warp->set_help_flag("--help", "Print this help message and exit");
  warp->add_option("--h", h, "positive warping function of t1..ts (expression)");
  warp->add_option("--out", out_path, "write the warped definition here");
  add_common(warp);

  auto* list = app.add_subcommand("gallery-list", "list built-in manifolds");
  list->add_option("--json", opt.json_path, "write the list here ('-' for stdout)");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? pass : input_error;
  }

  Outcome o;
  try {
    if (*verify) {
      for (const auto& l : expect) {
        static const std::vector<std::string> known = {labels::metric_f_contact, labels::normal, labels::K, labels::S,
                                                       labels::C, labels::almost_trans_s, labels::trans_s};
        if (std::find(known.begin(), known.end(), l) == known.end()) throw DefinitionError("unknown label '" + l + "'");
      }
      o = cmd_verify(source, expect, opt);
    } else if (*classify_cmd) {
      o = cmd_classify(source, opt);
    } else if (*extract) {
      o = cmd_extract(source, opt);
    } else if (*deform) {
      o = cmd_deform(source, a, b, out_path, opt);
    } else if (*warp) {
      o = cmd_warp(source, warp_s, h, out_path, opt);
    } else {
      o = cmd_gallery_list();
    }
  } catch (const DefinitionError& e) {
    err << "input error: " << e.what() << "\n";
    return input_error;
  } catch (const ExprError& e) {
    err << "input error: " << e.what() << "\n";
    return input_error;
  } catch (const HypothesisError& e) {
    err << "hypothesis violated: " << e.what() << "\n";
    return input_error;
  } catch (const GeometryError& e) {
    err << "input error: " << e.what() << "\n";
    return input_error;
  } catch (const std::invalid_argument& e) {
    err << "input error: " << e.what() << "\n";
    return input_error;
  }

  const std::string text = o.doc.dump(2) + "\n";
  if (opt.json_path == "-") {
    out << text;
  } else {
    render(o, out);
    if (!opt.json_path.empty()) {
      std::ofstream f(opt.json_path, std::ios::binary);
      if (!f || !(f << text)) {
        err << "cannot write '" << opt.json_path << "'\n";
        return input_error;
      }
    }
  }
  if (!o.exit_on_checks) return pass;
  return o.report.all_passed() ? pass : check_failure;
}

}  // namespace fman::cli
