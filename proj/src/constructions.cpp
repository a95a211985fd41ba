#include "fman/constructions.hpp"

#include <algorithm>
#include <cmath>

#include "fman/sampling.hpp"

namespace fman {

namespace {

std::vector<Point> default_points(const Chart& chart, std::vector<Point> points) {
  return points.empty() ? sample_points(chart) : points;
}

void require_positive(const Expr& e, const std::string& what, const std::vector<Point>& points) {
  for (const auto& p : points) {
    double v = 0.0;
    try {
      v = e.evaluate(p);
    } catch (const DomainError& err) {
      throw HypothesisError(what + " cannot be evaluated: " + err.what());
    }
    if (!(v > 0.0)) throw HypothesisError(what + " = " + e.to_string() + " is not positive on the domain");
  }
}

double structure_direction_defect(const Jet2& a, const Matrix& f) {
  return (a.gradient.transpose() * f).cwiseAbs().maxCoeff();
}

}  // namespace

MetricFManifold d_conformal_deform(const MetricFManifold& M, const DeformationParams& params,
                                   std::vector<Point> points) {
  const auto sample = default_points(M.chart(), std::move(points));
  require_positive(params.a, "a", sample);
  require_positive(params.b, "b", sample);

  const int m = M.dim();
  const int s = M.s();
  const Expr& a = params.a;
  const Expr& b = params.b;
  const Expr shift = a * a - b;

  MetricField g(m);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      Expr eta_eta;
      for (int k = 0; k < s; ++k) eta_eta = eta_eta + M.eta()[static_cast<std::size_t>(k)][i] * M.eta()[static_cast<std::size_t>(k)][j];
      g(i, j) = b * M.g()(i, j) + shift * eta_eta;
    }
  }
  std::vector<VectorField> xi;
  std::vector<OneForm> eta;
  for (int k = 0; k < s; ++k) {
    VectorField x(m);
    OneForm e(m);
    for (int i = 0; i < m; ++i) {
      x[i] = M.xi()[static_cast<std::size_t>(k)][i] / a;
      e[i] = a * M.eta()[static_cast<std::size_t>(k)][i];
    }
    xi.push_back(std::move(x));
    eta.push_back(std::move(e));
  }
  MetricFManifold out(M.name() + " deformed by a=" + a.to_string() + ", b=" + b.to_string(), M.chart(), M.f(),
                      std::move(xi), std::move(eta), std::move(g));
  for (const auto& note : M.notes()) out.add_note(note);
  return out;
}

CheckResult check_structure_directions(const MetricFManifold& M, const DeformationParams& params,
                                       const std::vector<Point>& points, double tol) {
  ResidualTracker t("a, b vary only along the structure vector fields (da o f = db o f = 0)", tol);
  for (const auto& p : points) {
    try {
      const Matrix f = evaluate(M.f(), p).value;
      t.observe(std::max(structure_direction_defect(params.a.evaluate_jet(p), f),
                         structure_direction_defect(params.b.evaluate_jet(p), f)),
                p);
    } catch (const std::exception& e) {
      t.fail(p, e.what());
    }
  }
  return t.finish();
}

CharacteristicFunctions predicted_deformed_functions(const StructureAt& original, const CharacteristicFunctions& cf,
                                                     const DeformationParams& params, double tol) {
  const Jet2 a = params.a.evaluate_jet(original.point);
  const Jet2 b = params.b.evaluate_jet(original.point);
  if (structure_direction_defect(a, original.f.value) > tol || structure_direction_defect(b, original.f.value) > tol) {
    throw HypothesisError("a and b must depend only on the directions of the structure vector fields");
  }
  CharacteristicFunctions out = CharacteristicFunctions::zeros(original.s);
  for (int i = 0; i < original.s; ++i) {
    const auto ui = static_cast<std::size_t>(i);
    const double xi_b = b.gradient.dot(original.xi_of(i));
    out.alpha[ui] = cf.alpha[ui] * a.value / b.value;
    out.beta[ui] = xi_b / (2.0 * a.value * b.value) + cf.beta[ui] / a.value;
  }
  return out;
}

CharacteristicSource predicted_deformed_source(MetricFManifold M, DeformationParams params,
                                               CharacteristicSource original_source) {
  return [M = std::move(M), params = std::move(params), src = std::move(original_source)](const StructureAt& st) {
    const StructureAt original = evaluate_structure(M, st.point);
    return predicted_deformed_functions(original, src(original), params);
  };
}

Vector deformed_connection_shift(const StructureAt& st, const CharacteristicFunctions& cf,
                                 const DeformationParams& params, const Vector& X, const Vector& Y) {
  const Jet2 ja = params.a.evaluate_jet(st.point);
  const Jet2 jb = params.b.evaluate_jet(st.point);
  const double a = ja.value, b = jb.value, a2 = a * a;
  const Vector& db = jb.gradient;
  const Vector da2 = 2.0 * a * ja.gradient;
  const Vector fX = st.apply_f(X), fY = st.apply_f(Y);
  const Vector f2X = st.apply_f(fX), f2Y = st.apply_f(fY);
  const double g_fx_fy = st.inner(fX, fY);

  double eta_eta = 0.0;
  for (int j = 0; j < st.s; ++j) eta_eta += st.eta_of(j, X) * st.eta_of(j, Y);

  Vector out = -(db.dot(X) * f2Y + db.dot(Y) * f2X) / (2.0 * b);
  for (int i = 0; i < st.s; ++i) {
    const auto ui = static_cast<std::size_t>(i);
    const Vector& xi = st.xi_of(i);
    const double xi_b = db.dot(xi);
    out += (2.0 * (a2 - b) * cf.beta[ui] - xi_b) / (2.0 * a2) * g_fx_fy * xi;
    out += (da2.dot(X) * st.eta_of(i, Y) + da2.dot(Y) * st.eta_of(i, X) - da2.dot(xi) * eta_eta) / (2.0 * a2) * xi;
    out -= (a2 - b) / b * cf.alpha[ui] * (st.eta_of(i, Y) * fX + st.eta_of(i, X) * fY);
  }
  return out;
}

CheckResult check_deformed_connection(const MetricFManifold& M, const DeformationParams& params,
                                      const std::vector<Point>& points, double tol) {
  const CheckResult directions = check_structure_directions(M, params, points, 1e-8);
  if (!directions.passed) {
    throw HypothesisError("a and b must depend only on the directions of the structure vector fields");
  }
  const MetricFManifold deformed = d_conformal_deform(M, params, points);
  ResidualTracker t("deformed Levi-Civita connection matches the closed form", tol);
  for (const auto& p : points) {
    try {
      const StructureAt st = evaluate_structure(M, p);
      const CharacteristicFunctions cf = extract_pointwise(st).cf;
      const Tensor3 gamma_new = christoffel(deformed.g(), p);
      const Matrix basis = build_f_basis(st);
      const int m = st.dim();
      double mx = 0.0;
      for (int a = 0; a < m; ++a) {
        for (int b = 0; b < m; ++b) {
          const Vector X = basis.col(a), Y = basis.col(b);
          Vector diff = Vector::Zero(m);
          for (int k = 0; k < m; ++k)
            for (int i = 0; i < m; ++i)
              for (int j = 0; j < m; ++j) diff(k) += (gamma_new(k, i, j) - st.geom.gamma(k, i, j)) * X(i) * Y(j);
          mx = std::max(mx, st.norm(diff - deformed_connection_shift(st, cf, params, X, Y)));
        }
      }
      t.observe(mx, p);
    } catch (const std::exception& e) {
      t.fail(p, e.what());
    }
  }
  return t.finish();
}

// ---------------------------------------------------------------------------

namespace {

struct WarpLayout {
  Chart chart;
  Expr h;
  int s = 0;
};

WarpLayout warp_layout(const MetricFManifold& fiber, const WarpParams& params) {
  if (params.s < 1) throw HypothesisError("warp base dimension must be at least 1");
  std::vector<std::string> names = params.base_names;
  if (names.empty()) {
    for (int i = 0; i < params.s; ++i) names.push_back("t" + std::to_string(i + 1));
  }
  std::vector<Interval> domain = params.base_domain;
  if (domain.empty()) domain.assign(static_cast<std::size_t>(params.s), Interval{-1.0, 1.0});
  if (static_cast<int>(names.size()) != params.s || static_cast<int>(domain.size()) != params.s) {
    throw HypothesisError("warp base needs exactly s coordinate names and intervals");
  }
  for (const auto& n : names) {
    if (fiber.chart().index_of(n)) throw HypothesisError("base coordinate '" + n + "' clashes with a fiber coordinate");
  }
  names.insert(names.end(), fiber.chart().coordinates().begin(), fiber.chart().coordinates().end());
  domain.insert(domain.end(), fiber.chart().domain().begin(), fiber.chart().domain().end());

  WarpLayout out;
  out.s = params.s;
  out.chart = Chart(fiber.n(), params.s + fiber.s(), std::move(names), std::move(domain));
  out.h = out.chart.parse(params.h);
  for (std::size_t idx : out.h.symbols()) {
    if (static_cast<int>(idx) >= params.s) {
      throw HypothesisError("h must depend on the base coordinates only, found '" + out.chart.coordinates()[idx] + "'");
    }
  }
  return out;
}

MetricFManifold warp(const MetricFManifold& fiber, const WarpParams& params) {
  WarpLayout layout = warp_layout(fiber, params);
  const Chart& chart = layout.chart;
  require_positive(layout.h, "h", sample_points(chart));

  const VerificationReport fiber_axioms = check_axioms(fiber, sample_points(fiber.chart()));
  if (!fiber_axioms.all_passed()) {
    for (const auto& c : fiber_axioms.checks) {
      if (!c.passed) throw HypothesisError("fiber fails its own axioms: " + c.name);
    }
  }

  const int s = layout.s;
  const int mf = fiber.dim();
  const int m = s + mf;
  const auto& coords = chart.coordinates();
  const Expr& h = layout.h;
  auto lift = [&](const Expr& e) { return e.rebind(coords); };

  MetricField g(m);
  Tensor11Field f(m);
  for (int i = 0; i < s; ++i) g(i, i) = Expr(1.0);
  for (int i = 0; i < mf; ++i) {
    for (int j = 0; j < mf; ++j) {
      g(s + i, s + j) = h * h * lift(fiber.g()(i, j));
      f(s + i, s + j) = lift(fiber.f()(i, j));
    }
  }
  std::vector<VectorField> xi;
  std::vector<OneForm> eta;
  for (int i = 0; i < s; ++i) {
    VectorField x(m);
    OneForm e(m);
    x[i] = Expr(1.0);
    e[i] = Expr(1.0);
    xi.push_back(std::move(x));
    eta.push_back(std::move(e));
  }
  for (int k = 0; k < fiber.s(); ++k) {
    VectorField x(m);
    OneForm e(m);
    for (int i = 0; i < mf; ++i) {
      x[s + i] = lift(fiber.xi()[static_cast<std::size_t>(k)][i]) / h;
      e[s + i] = h * lift(fiber.eta()[static_cast<std::size_t>(k)][i]);
    }
    xi.push_back(std::move(x));
    eta.push_back(std::move(e));
  }
  std::string base;
  for (int i = 0; i < s; ++i) base += (i ? "," : "") + coords[static_cast<std::size_t>(i)];
  MetricFManifold out("R^" + std::to_string(s) + " x_h " + fiber.name() + " (h=" + h.to_string() + ")", chart,
                      std::move(f), std::move(xi), std::move(eta), std::move(g));
  out.add_note("warped metric d(" + base + ")^2 + h^2 G with a positive base metric");
  return out;
}

}  // namespace

MetricFManifold warp_kaehler(const MetricFManifold& fiber, const WarpParams& params) {
  if (fiber.s() != 0) throw HypothesisError("warp_kaehler needs an almost Hermitian fiber (s = 0)");
  return warp(fiber, params);
}

MetricFManifold warp_trans_s(const MetricFManifold& fiber, const WarpParams& params) {
  if (fiber.s() < 1) throw HypothesisError("warp_trans_s needs a fiber with structure vector fields");
  return warp(fiber, params);
}

CharacteristicSource predicted_warp_source(MetricFManifold fiber, WarpParams params,
                                           CharacteristicSource fiber_source) {
  WarpLayout layout = warp_layout(fiber, params);
  return [fiber = std::move(fiber), h = layout.h, s = layout.s, src = std::move(fiber_source)](const StructureAt& st) {
    const int mf = fiber.dim();
    const StructureAt fst = evaluate_structure(fiber, st.point.tail(mf));
    const CharacteristicFunctions fcf = src(fst);
    const Jet2 hj = h.evaluate_jet(st.point);
    CharacteristicFunctions out = CharacteristicFunctions::zeros(s + fiber.s());
    for (int i = 0; i < s; ++i) out.beta[static_cast<std::size_t>(i)] = hj.gradient(i) / hj.value;
    for (int j = 0; j < fiber.s(); ++j) {
      const auto uj = static_cast<std::size_t>(j);
      out.alpha[static_cast<std::size_t>(s + j)] = fcf.alpha[uj] / hj.value;
      out.beta[static_cast<std::size_t>(s + j)] = fcf.beta[uj] / hj.value;
    }
    return out;
  };
}

Vector warped_connection(const MetricFManifold& fiber, const WarpParams& params, const Vector& X, const Vector& Y,
                         const Point& p) {
  const WarpLayout layout = warp_layout(fiber, params);
  const int s = layout.s;
  const int mf = fiber.dim();
  const Jet2 hj = layout.h.evaluate_jet(p);
  const double h = hj.value;
  const Vector grad_h = hj.gradient.head(s);

  const Vector U = X.head(s), V = X.tail(mf);
  const Vector U2 = Y.head(s), W = Y.tail(mf);
  const Point fp = p.tail(mf);
  const MetricAt G = metric_at(fiber.g(), fp);
  const Tensor3 gamma = christoffel(fiber.g(), fp);

  Vector out = Vector::Zero(s + mf);
  // base-base: flat, constant coefficients
  // fiber-fiber normal part: −(g_h(V,W)/h) grad h, g_h(V,W) = h² G(V,W)
  out.head(s) = -h * V.dot(G.matrix * W) * grad_h;
  Vector tangent = (U.dot(grad_h) / h) * W + (U2.dot(grad_h) / h) * V;
  for (int k = 0; k < mf; ++k)
    for (int i = 0; i < mf; ++i)
      for (int j = 0; j < mf; ++j) tangent(k) += gamma(k, i, j) * V(i) * W(j);
  out.tail(mf) = tangent;
  return out;
}

CheckResult check_warped_connection(const MetricFManifold& fiber, const WarpParams& params,
                                    const std::vector<Point>& points, double tol) {
  const MetricFManifold warped = warp(fiber, params);
  ResidualTracker t("warped connection from base, fiber and h matches Levi-Civita", tol);
  const int m = warped.dim();
  for (const auto& p : points) {
    try {
      const LocalGeometry geom = local_geometry(warped.g(), p);
      double mx = 0.0;
      for (int a = 0; a < m; ++a) {
        for (int b = 0; b < m; ++b) {
          const Vector X = Vector::Unit(m, a), Y = Vector::Unit(m, b);
          const Vector direct = covariant_derivative(geom, X, constant_extension(Y));
          mx = std::max(mx, geom.norm(direct - warped_connection(fiber, params, X, Y, p)));
        }
      }
      t.observe(mx, p);
    } catch (const std::exception& e) {
      t.fail(p, e.what());
    }
  }
  return t.finish();
}

CheckResult check_prediction(const MetricFManifold& constructed, const CharacteristicSource& predicted,
                             const std::vector<Point>& points, double tol) {
  ResidualTracker t("predicted characteristic functions = re-extracted", tol);
  for (const auto& p : points) {
    try {
      const StructureAt st = evaluate_structure(constructed, p);
      t.observe(extract_pointwise(st).cf.distance(predicted(st)), p);
    } catch (const std::exception& e) {
      t.fail(p, e.what());
    }
  }
  return t.finish();
}

}  // namespace fman
