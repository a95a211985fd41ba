#include "fman/trans_s.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace fman {

namespace {

std::string indexed(const std::string& base, int i) { return base + " [i=" + std::to_string(i + 1) + "]"; }

double trilinear(const Tensor3& t, const Vector& a, const Vector& b, const Vector& c) {
  const int m = t.dim();
  double acc = 0.0;
  for (int k = 0; k < m; ++k) {
    if (a(k) == 0.0) continue;
    for (int i = 0; i < m; ++i) {
      if (b(i) == 0.0) continue;
      double inner = 0.0;
      for (int j = 0; j < m; ++j) inner += t(k, i, j) * c(j);
      acc += a(k) * b(i) * inner;
    }
  }
  return acc;
}

// Runs fn(st, basis) at every point; evaluation failures count against every tracker.
template <class Fn>
void for_each_structure(const MetricFManifold& M, const std::vector<Point>& points,
                        std::initializer_list<ResidualTracker*> trackers, Fn&& fn) {
  for (const auto& p : points) {
    try {
      const StructureAt st = evaluate_structure(M, p);
      const Matrix basis = build_f_basis(st);
      fn(st, basis);
    } catch (const std::exception& e) {
      for (auto* t : trackers) t->fail(p, e.what());
    }
  }
}

// Coordinates of v in a g-orthonormal basis have Euclidean norm ‖v‖_g.
double defect_in_basis(const StructureAt& st, const CharacteristicFunctions& cf, const Matrix& basis) {
  double mx = 0.0;
  for (Eigen::Index a = 0; a < basis.cols(); ++a) {
    for (Eigen::Index b = 0; b < basis.cols(); ++b) {
      mx = std::max(mx, st.norm(trans_s_residual(st, cf, basis.col(a), basis.col(b))));
    }
  }
  return mx;
}

}  // namespace

double CharacteristicFunctions::distance(const CharacteristicFunctions& other) const {
  double mx = 0.0;
  const auto n = std::min(alpha.size(), other.alpha.size());
  for (std::size_t i = 0; i < n; ++i) {
    mx = std::max({mx, std::abs(alpha[i] - other.alpha[i]), std::abs(beta[i] - other.beta[i])});
  }
  if (alpha.size() != other.alpha.size()) return std::numeric_limits<double>::infinity();
  return mx;
}

CharacteristicSource extracted_source() {
  return [](const StructureAt& st) { return extract_pointwise(st).cf; };
}

CharacteristicSource constant_source(std::vector<double> alpha, std::vector<double> beta) {
  return [cf = CharacteristicFunctions{std::move(alpha), std::move(beta)}](const StructureAt&) { return cf; };
}

CharacteristicSource declared_source(CharacteristicExprs exprs) {
  return [exprs = std::move(exprs)](const StructureAt& st) {
    CharacteristicFunctions cf;
    for (const auto& e : exprs.alpha) cf.alpha.push_back(e.evaluate(st.point));
    for (const auto& e : exprs.beta) cf.beta.push_back(e.evaluate(st.point));
    return cf;
  };
}

Vector trans_s_model(const StructureAt& st, const CharacteristicFunctions& cf, const Vector& X, const Vector& Y) {
  const Vector fX = st.apply_f(X);
  const Vector f2X = st.apply_f(fX);
  const Vector fY = st.apply_f(Y);
  const double g_fx_fy = st.inner(fX, fY);
  const double g_fx_y = st.inner(fX, Y);
  Vector out = Vector::Zero(st.dim());
  for (int i = 0; i < st.s; ++i) {
    const double eta_y = st.eta_of(i, Y);
    const auto ui = static_cast<std::size_t>(i);
    out += cf.alpha[ui] * (g_fx_fy * st.xi_of(i) + eta_y * f2X);
    out += cf.beta[ui] * (g_fx_y * st.xi_of(i) - eta_y * fX);
  }
  return out;
}

Vector trans_s_residual(const StructureAt& st, const CharacteristicFunctions& cf, const Vector& X, const Vector& Y) {
  return st.nabla_f_applied(X, Y) - trans_s_model(st, cf, X, Y);
}

Vector trans_s_residual(const MetricFManifold& M, const CharacteristicFunctions& cf, const Vector& X, const Vector& Y,
                        const Point& p) {
  return trans_s_residual(evaluate_structure(M, p), cf, X, Y);
}

double trans_s_defect(const StructureAt& st, const CharacteristicFunctions& cf) {
  return defect_in_basis(st, cf, build_f_basis(st));
}

PointwiseFit extract_pointwise(const StructureAt& st) {
  const int m = st.dim();
  const int s = st.s;
  const Matrix basis = build_f_basis(st);
  const Matrix to_frame = basis.transpose() * st.metric();

  Matrix design(m * m * m, 2 * s);
  Vector rhs(m * m * m);
  double nabla_norm = 0.0;
  for (int a = 0; a < m; ++a) {
    for (int b = 0; b < m; ++b) {
      const Vector X = basis.col(a), Y = basis.col(b);
      const Vector target = st.nabla_f_applied(X, Y);
      nabla_norm = std::max(nabla_norm, st.norm(target));
      const int row = (a * m + b) * m;
      rhs.segment(row, m) = to_frame * target;
      for (int i = 0; i < s; ++i) {
        CharacteristicFunctions unit = CharacteristicFunctions::zeros(s);
        unit.alpha[static_cast<std::size_t>(i)] = 1.0;
        design.block(row, i, m, 1) = to_frame * trans_s_model(st, unit, X, Y);
        unit.alpha[static_cast<std::size_t>(i)] = 0.0;
        unit.beta[static_cast<std::size_t>(i)] = 1.0;
        design.block(row, s + i, m, 1) = to_frame * trans_s_model(st, unit, X, Y);
      }
    }
  }

  PointwiseFit fit;
  fit.cf = CharacteristicFunctions::zeros(s);
  if (s > 0) {
    const Eigen::JacobiSVD<Matrix> svd(design, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    if (sv(sv.size() - 1) <= 1e-12 * sv(0)) throw GeometryError("characteristic function fit is rank deficient");
    fit.condition_number = sv(0) / sv(sv.size() - 1);
    const Vector c = svd.solve(rhs);
    for (int i = 0; i < s; ++i) {
      fit.cf.alpha[static_cast<std::size_t>(i)] = c(i);
      fit.cf.beta[static_cast<std::size_t>(i)] = c(s + i);
    }
  }
  fit.residual = defect_in_basis(st, fit.cf, basis);
  fit.nabla_f_norm = nabla_norm;
  fit.normalized_residual = nabla_norm > 0.0 ? fit.residual / nabla_norm : 0.0;
  return fit;
}

PointwiseFit extract_pointwise(const MetricFManifold& M, const Point& p) {
  return extract_pointwise(evaluate_structure(M, p));
}

CharacteristicFunctions extract_via_codifferential(const StructureAt& st) {
  const double two_n = 2.0 * st.n;
  const Vector dF = codifferential(st.geom, st.F);
  CharacteristicFunctions cf = CharacteristicFunctions::zeros(st.s);
  for (int i = 0; i < st.s; ++i) {
    cf.alpha[static_cast<std::size_t>(i)] = dF.dot(st.xi_of(i)) / two_n;
    cf.beta[static_cast<std::size_t>(i)] = -codifferential(st.geom, st.eta[static_cast<std::size_t>(i)]) / two_n;
  }
  return cf;
}

CharacteristicFunctions extract_via_codifferential(const MetricFManifold& M, const Point& p) {
  return extract_via_codifferential(evaluate_structure(M, p));
}

CharacteristicFunctions extract_via_nabla_f(const StructureAt& st) {
  const Matrix basis = build_f_basis(st);
  const Tensor3 nabla_F = covariant_derivative(st.geom, st.F);
  CharacteristicFunctions cf = CharacteristicFunctions::zeros(st.s);
  const int count = 2 * st.n;
  for (int a = 0; a < count; ++a) {
    const Vector X = basis.col(a);
    const Vector fX = st.apply_f(X);
    for (int i = 0; i < st.s; ++i) {
      cf.alpha[static_cast<std::size_t>(i)] -= trilinear(nabla_F, X, X, st.xi_of(i)) / count;
      cf.beta[static_cast<std::size_t>(i)] += trilinear(nabla_F, X, st.xi_of(i), fX) / count;
    }
  }
  return cf;
}

CharacteristicFunctions extract_via_nabla_f(const MetricFManifold& M, const Point& p) {
  return extract_via_nabla_f(evaluate_structure(M, p));
}

bool almost_trans_s_verdict(const PointwiseFit& fit, const TransSOptions& options) {
  return fit.residual <= options.tol || fit.normalized_residual <= options.relative_tol;
}

CheckResult check_trans_s_identity(const MetricFManifold& M, const CharacteristicSource& source,
                                   const std::vector<Point>& points, double tol) {
  ResidualTracker t("(nabla_X f)Y = sum alpha_i A_i(X,Y) + beta_i B_i(X,Y)", tol);
  for_each_structure(M, points, {&t}, [&](const StructureAt& st, const Matrix& basis) {
    t.observe(defect_in_basis(st, source(st), basis), st.point);
  });
  return t.finish();
}

AlmostTransSVerdict almost_trans_s(const MetricFManifold& M, const std::vector<Point>& points,
                                   const TransSOptions& options) {
  ResidualTracker abs_t("best-fit residual", options.tol);
  ResidualTracker rel_t("best-fit residual / |nabla f|", options.relative_tol);
  bool holds = !points.empty();
  for (const auto& p : points) {
    try {
      const PointwiseFit fit = extract_pointwise(M, p);
      abs_t.observe(fit.residual, p);
      rel_t.observe(fit.normalized_residual, p);
      holds = holds && almost_trans_s_verdict(fit, options);
    } catch (const std::exception& e) {
      abs_t.fail(p, e.what());
      rel_t.fail(p, e.what());
      holds = false;
    }
  }
  return {holds, abs_t.finish(), rel_t.finish()};
}

VerificationReport check_xi_derivative(const MetricFManifold& M, const CharacteristicSource& source,
                                       const std::vector<Point>& points, double tol) {
  const int s = M.s();
  std::vector<ResidualTracker> per_i;
  for (int i = 0; i < s; ++i) per_i.emplace_back(indexed("nabla_X xi_i = -alpha_i fX - beta_i f^2X", i), tol);
  ResidualTracker eta_t("eta_k(nabla_X xi_i) = 0", tol);

  for (const auto& p : points) {
    try {
      const StructureAt st = evaluate_structure(M, p);
      const Matrix basis = build_f_basis(st);
      const CharacteristicFunctions cf = source(st);
      std::vector<double> worst(static_cast<std::size_t>(s), 0.0);
      double eta_worst = 0.0;
      for (Eigen::Index a = 0; a < basis.cols(); ++a) {
        const Vector X = basis.col(a);
        const Vector fX = st.apply_f(X);
        const Vector f2X = st.apply_f(fX);
        for (int i = 0; i < s; ++i) {
          const auto ui = static_cast<std::size_t>(i);
          const Vector nx = st.nabla_xi(i, X);
          worst[ui] = std::max(worst[ui], st.norm(nx + cf.alpha[ui] * fX + cf.beta[ui] * f2X));
          for (int k = 0; k < s; ++k) eta_worst = std::max(eta_worst, std::abs(st.eta_of(k, nx)));
        }
      }
      for (int i = 0; i < s; ++i) per_i[static_cast<std::size_t>(i)].observe(worst[static_cast<std::size_t>(i)], p);
      eta_t.observe(eta_worst, p);
    } catch (const std::exception& e) {
      for (auto& t : per_i) t.fail(p, e.what());
      eta_t.fail(p, e.what());
    }
  }
  VerificationReport r;
  for (const auto& t : per_i) r.add(t.finish());
  r.add(eta_t.finish());
  return r;
}

CheckResult check_normality_defect_identity(const MetricFManifold& M, const std::vector<Point>& points,
                                            const TransSOptions& options) {
  const std::string name = "[f,f] + 2 sum d eta_i (x) xi_i = sum eta_j(nabla xi_i) terms";
  if (!almost_trans_s(M, points, options).holds) {
    return skipped_check(name, options.tol, "not almost trans-S at every sample");
  }
  ResidualTracker t(name, options.tol);
  for_each_structure(M, points, {&t}, [&](const StructureAt& st, const Matrix& basis) {
    const int m = st.dim();
    double mx = 0.0;
    for (int a = 0; a < m; ++a) {
      for (int b = a + 1; b < m; ++b) {
        const Vector X = basis.col(a), Y = basis.col(b);
        Vector rhs = Vector::Zero(m);
        for (int i = 0; i < st.s; ++i) {
          const Vector nx = st.nabla_xi(i, X);
          const Vector ny = st.nabla_xi(i, Y);
          double coeff = 0.0;
          for (int j = 0; j < st.s; ++j) {
            coeff += st.eta_of(j, nx) * st.eta_of(j, Y) - st.eta_of(j, ny) * st.eta_of(j, X);
          }
          rhs += coeff * st.xi_of(i);
        }
        mx = std::max(mx, st.norm(normality_tensor(st, X, Y) - rhs));
      }
    }
    t.observe(mx, st.point);
  });
  return t.finish();
}

VerificationReport check_exterior_identities(const MetricFManifold& M, const CharacteristicSource& source,
                                             const std::vector<Point>& points, double tol) {
  const int s = M.s();
  ResidualTracker dF_t("dF = 2 F ^ sum beta_i eta_i", tol);
  std::vector<ResidualTracker> deta;
  for (int i = 0; i < s; ++i) deta.emplace_back(indexed("d eta_i = alpha_i F", i), tol);
  ResidualTracker codiff_t("(delta F) o f = 0", tol);

  for (const auto& p : points) {
    try {
      const StructureAt st = evaluate_structure(M, p);
      const CharacteristicFunctions cf = source(st);
      const Matrix frame = orthonormal_frame(st.metric());
      Vector beta_eta = Vector::Zero(st.dim());
      for (int i = 0; i < s; ++i) beta_eta += cf.beta[static_cast<std::size_t>(i)] * st.eta[static_cast<std::size_t>(i)].value;
      Tensor3 lhs = exterior_d(st.F);
      const Tensor3 rhs = wedge(st.F.value, beta_eta);
      const int m = st.dim();
      for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b)
          for (int c = 0; c < m; ++c) lhs(a, b, c) -= 2.0 * rhs(a, b, c);
      dF_t.observe(frame_max_abs(lhs, frame), p);
      for (int i = 0; i < s; ++i) {
        const Matrix d = exterior_d(st.eta[static_cast<std::size_t>(i)]) - cf.alpha[static_cast<std::size_t>(i)] * st.F.value;
        deta[static_cast<std::size_t>(i)].observe(frame_max_abs(d, frame), p);
      }
      const Vector delta_F = codifferential(st.geom, st.F);
      const Vector pulled = frame.transpose() * (st.f.value.transpose() * delta_F);
      codiff_t.observe(pulled.cwiseAbs().maxCoeff(), p);
    } catch (const std::exception& e) {
      dF_t.fail(p, e.what());
      for (auto& t : deta) t.fail(p, e.what());
      codiff_t.fail(p, e.what());
    }
  }
  VerificationReport r;
  r.add(dF_t.finish());
  for (const auto& t : deta) r.add(t.finish());
  r.add(codiff_t.finish());
  return r;
}

VerificationReport check_nabla_eta(const MetricFManifold& M, const CharacteristicSource& source,
                                   const std::vector<Point>& points, double tol) {
  ResidualTracker full("(nabla_X eta_i)Y = alpha_i g(X,fY) + beta_i g(fX,fY)", tol);
  ResidualTracker unit("(nabla_X eta_i)fX = -alpha_i, (nabla_X eta_i)X = beta_i for unit X in L", tol);
  for_each_structure(M, points, {&full, &unit}, [&](const StructureAt& st, const Matrix& basis) {
    const CharacteristicFunctions cf = source(st);
    const int m = st.dim();
    double mx_full = 0.0, mx_unit = 0.0;
    for (int i = 0; i < st.s; ++i) {
      const auto ui = static_cast<std::size_t>(i);
      const Matrix nabla_eta = covariant_derivative(st.geom, st.eta[ui]);
      for (int a = 0; a < m; ++a) {
        const Vector X = basis.col(a);
        const Vector fX = st.apply_f(X);
        for (int b = 0; b < m; ++b) {
          const Vector Y = basis.col(b);
          const double lhs = X.dot(nabla_eta * Y);
          const double rhs = cf.alpha[ui] * st.inner(X, st.apply_f(Y)) + cf.beta[ui] * st.inner(fX, st.apply_f(Y));
          mx_full = std::max(mx_full, std::abs(lhs - rhs));
        }
        if (a < 2 * st.n) {
          mx_unit = std::max(mx_unit, std::abs(X.dot(nabla_eta * fX) + cf.alpha[ui]));
          mx_unit = std::max(mx_unit, std::abs(X.dot(nabla_eta * X) - cf.beta[ui]));
        }
      }
    }
    full.observe(mx_full, st.point);
    unit.observe(mx_unit, st.point);
  });
  VerificationReport r;
  r.add(full.finish());
  r.add(unit.finish());
  return r;
}

KManifoldCriterion k_manifold_criterion(const MetricFManifold& M, const CharacteristicSource& source,
                                        const std::vector<Point>& points, double tol) {
  KManifoldCriterion out;
  double beta_max = 0.0, normal_max = 0.0, dF_max = 0.0, delta_max = 0.0;
  bool evaluated = !points.empty();
  for (const auto& p : points) {
    try {
      const StructureAt st = evaluate_structure(M, p);
      const CharacteristicFunctions cf = source(st);
      for (double b : cf.beta) beta_max = std::max(beta_max, std::abs(b));
      normal_max = std::max(normal_max, normality_defect(st));
      dF_max = std::max(dF_max, frame_max_abs(exterior_d(st.F), orthonormal_frame(st.metric())));
      for (const auto& e : st.eta) delta_max = std::max(delta_max, std::abs(codifferential(st.geom, e)));
    } catch (const std::exception&) {
      evaluated = false;
    }
  }
  out.beta_zero = beta_max <= tol;
  out.normal_and_closed = normal_max <= tol && dF_max <= tol;
  out.codifferential_zero = delta_max <= tol;
  out.entry.name = "K-manifold <=> beta_i = 0 <=> delta eta_i = 0";
  out.entry.tolerance = tol;
  const bool agree = out.beta_zero == out.normal_and_closed && out.beta_zero == out.codifferential_zero;
  out.entry.value = agree ? 0.0 : 1.0;
  out.entry.passed = evaluated && agree;
  out.entry.note = std::string("beta=0: ") + (out.beta_zero ? "yes" : "no") + ", normal and dF=0: " +
                   (out.normal_and_closed ? "yes" : "no") + ", delta eta=0: " + (out.codifferential_zero ? "yes" : "no");
  if (!evaluated) out.entry.note += " (evaluation failed at some sample)";
  return out;
}

KillingResult killing_defect(const MetricFManifold& M, int i, const CharacteristicSource& source,
                             const std::vector<Point>& points, double tol) {
  KillingResult out;
  ResidualTracker t(indexed("(L_xi_i g)(X,Y) = 2 beta_i g(fX,fY)", i), tol);
  double lie_max = 0.0, beta_max = 0.0;
  const auto ui = static_cast<std::size_t>(i);
  for_each_structure(M, points, {&t}, [&](const StructureAt& st, const Matrix& basis) {
    const CharacteristicFunctions cf = source(st);
    const Matrix L = lie_derivative_metric(st.geom.metric, st.xi[ui]);
    const Matrix fb = st.f.value * basis;
    const Matrix expected = 2.0 * cf.beta[ui] * fb.transpose() * st.metric() * fb;
    const Matrix in_basis = basis.transpose() * L * basis;
    t.observe((in_basis - expected).cwiseAbs().maxCoeff(), st.point);
    lie_max = std::max(lie_max, in_basis.cwiseAbs().maxCoeff());
    beta_max = std::max(beta_max, std::abs(cf.beta[ui]));
  });
  out.entry = t.finish();
  out.max_lie_derivative = lie_max;
  out.killing = lie_max <= tol;
  out.beta_zero = beta_max <= tol;
  return out;
}

NormalityCharacterization check_normality_characterization(const MetricFManifold& M,
                                                            const std::vector<Point>& points,
                                                            const TransSOptions& options) {
  NormalityCharacterization out;
  out.almost_trans_s = almost_trans_s(M, points, options).holds;
  const VerificationReport xi = check_xi_derivative(M, extracted_source(), points, options.tol);
  out.xi_formula = std::all_of(xi.checks.begin(), xi.checks.end() - 1, [](const CheckResult& c) { return c.passed; });
  out.normal = check_normality(M, points, options.tol).passed;
  const bool left = out.almost_trans_s && out.xi_formula;
  const bool right = out.almost_trans_s && out.normal;
  out.entry.name = "almost trans-S: xi-derivative formula <=> normal";
  out.entry.tolerance = 0.0;
  out.entry.value = left == right ? 0.0 : 1.0;
  out.entry.passed = left == right;
  out.entry.note = std::string("almost trans-S: ") + (out.almost_trans_s ? "yes" : "no") +
                   ", xi formula: " + (out.xi_formula ? "yes" : "no") + ", normal: " + (out.normal ? "yes" : "no");
  return out;
}

ExtractionTable extract_all_routes(const MetricFManifold& M, const std::vector<Point>& points) {
  ExtractionTable table;
  for (const auto& p : points) {
    const StructureAt st = evaluate_structure(M, p);
    PointwiseFit fit = extract_pointwise(st);
    CharacteristicFunctions cod = extract_via_codifferential(st);
    CharacteristicFunctions nab = extract_via_nabla_f(st);
    const double d = std::max({fit.cf.distance(cod), fit.cf.distance(nab), cod.distance(nab)});
    if (table.points.empty() || d > table.max_disagreement) {
      table.max_disagreement = d;
      table.disagreement_witness = p;
    }
    table.points.push_back(p);
    table.fits.push_back(std::move(fit));
    table.codifferential.push_back(std::move(cod));
    table.nabla_f.push_back(std::move(nab));
  }
  return table;
}

VerificationReport verify_trans_s(const MetricFManifold& M, const std::vector<Point>& points,
                                  const TransSOptions& options) {
  const double tol = options.tol;
  VerificationReport report = check_axioms(M, points, {tol, 1e-8, 1e-6, 1e-10});
  if (!report.all_passed()) return report;

  ClassifyOptions copt;
  copt.tol = tol;
  copt.almost_trans_s_relative = options.relative_tol;
  const VerificationReport cls = classify(M, points, copt);
  report.labels = cls.labels;

  const bool almost = report.has_label(labels::almost_trans_s);
  const bool trans = report.has_label(labels::trans_s);
  const bool normal = report.has_label(labels::normal);

  if (normal) report.add(check_normal_bracket(M, points, tol));
  report.add(check_normality_characterization(M, points, options).entry);
  report.add(check_normality_defect_identity(M, points, options));

  if (M.declared()) {
    CheckResult c = check_trans_s_identity(M, declared_source(*M.declared()), points, tol);
    c.name = "declared: " + c.name;
    report.add(std::move(c));
  }
  if (!almost) return report;

  const CharacteristicSource source = extracted_source();
  report.add(check_trans_s_identity(M, source, points, tol));
  if (!trans) return report;

  const ExtractionTable table = extract_all_routes(M, points);
  CheckResult agree;
  agree.name = "extraction routes agree (least squares, codifferential, nabla F)";
  agree.value = table.max_disagreement;
  agree.tolerance = 1e-6;
  agree.witness = table.disagreement_witness;
  agree.passed = agree.value <= agree.tolerance;
  report.add(std::move(agree));

  report.append(check_xi_derivative(M, source, points, tol));
  report.append(check_exterior_identities(M, source, points, tol));
  report.append(check_nabla_eta(M, source, points, tol));
  report.add(k_manifold_criterion(M, source, points, tol).entry);
  for (int i = 0; i < M.s(); ++i) {
    const KillingResult k = killing_defect(M, i, source, points, tol);
    report.add(k.entry);
    CheckResult flag;
    flag.name = indexed("xi_i Killing <=> beta_i = 0", i);
    flag.value = k.killing == k.beta_zero ? 0.0 : 1.0;
    flag.passed = k.killing == k.beta_zero;
    flag.note = std::string("Killing: ") + (k.killing ? "yes" : "no");
    report.add(std::move(flag));
  }
  return report;
}

}  // namespace fman
