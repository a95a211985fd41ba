#include "fman/f_structure.hpp"

#include <algorithm>
#include <cmath>

namespace fman {

MetricFManifold::MetricFManifold(std::string name, Chart chart, Tensor11Field f, std::vector<VectorField> xi,
                                 std::vector<OneForm> eta, MetricField g)
    : name_(std::move(name)),
      chart_(std::move(chart)),
      f_(std::move(f)),
      xi_(std::move(xi)),
      eta_(std::move(eta)),
      g_(std::move(g)) {
  const int m = chart_.dim();
  if (f_.dim != m || g_.dim != m) throw GeometryError("f and g must be " + std::to_string(m) + "x" + std::to_string(m));
  if (static_cast<int>(xi_.size()) != chart_.s() || static_cast<int>(eta_.size()) != chart_.s()) {
    throw GeometryError("expected " + std::to_string(chart_.s()) + " structure vector fields and 1-forms");
  }
  for (const auto& x : xi_) {
    if (x.dim() != m) throw GeometryError("structure vector field has wrong dimension");
  }
  for (const auto& e : eta_) {
    if (e.dim() != m) throw GeometryError("structure 1-form has wrong dimension");
  }
}

void MetricFManifold::set_declared(CharacteristicExprs cf) {
  if (static_cast<int>(cf.alpha.size()) != s() || static_cast<int>(cf.beta.size()) != s()) {
    throw GeometryError("declared characteristic functions must have s entries each");
  }
  declared_ = std::move(cf);
}

Vector StructureAt::nabla_f_applied(const Vector& X, const Vector& Y) const {
  const int m = dim();
  Vector out = Vector::Zero(m);
  for (int i = 0; i < m; ++i) {
    if (X(i) == 0.0) continue;
    for (int k = 0; k < m; ++k) {
      double acc = 0.0;
      for (int j = 0; j < m; ++j) acc += nabla_f(i, k, j) * Y(j);
      out(k) += X(i) * acc;
    }
  }
  return out;
}

Vector StructureAt::nabla_xi(int i, const Vector& X) const {
  return covariant_derivative(geom, X, xi[static_cast<std::size_t>(i)]);
}

StructureAt evaluate_structure(const MetricFManifold& M, const Point& p) {
  StructureAt st;
  st.point = p;
  st.n = M.n();
  st.s = M.s();
  st.geom = local_geometry(M.g(), p);
  st.f = evaluate(M.f(), p);
  for (const auto& x : M.xi()) st.xi.push_back(evaluate(x, p));
  for (const auto& e : M.eta()) st.eta.push_back(evaluate(e, p));
  st.F = lower(st.geom.metric, st.f);
  st.nabla_f = covariant_derivative(st.geom, st.f);
  return st;
}

int numerical_rank(const Matrix& a, double rel_threshold) {
  const Eigen::JacobiSVD<Matrix> svd(a);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0 || sv(0) == 0.0) return 0;
  int r = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > rel_threshold * sv(0)) ++r;
  }
  return r;
}

double frame_max_abs(const Matrix& bilinear, const Matrix& frame) {
  return (frame.transpose() * bilinear * frame).cwiseAbs().maxCoeff();
}

double frame_max_abs(const Tensor3& t, const Matrix& frame) {
  const int m = t.dim();
  // Contract one index at a time.
  Tensor3 a(m), b(m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      for (int c = 0; c < m; ++c) {
        double acc = 0.0;
        for (int k = 0; k < m; ++k) acc += t(i, j, k) * frame(k, c);
        a(i, j, c) = acc;
      }
  for (int i = 0; i < m; ++i)
    for (int bb = 0; bb < m; ++bb)
      for (int c = 0; c < m; ++c) {
        double acc = 0.0;
        for (int j = 0; j < m; ++j) acc += a(i, j, c) * frame(j, bb);
        b(i, bb, c) = acc;
      }
  double mx = 0.0;
  for (int aa = 0; aa < m; ++aa)
    for (int bb = 0; bb < m; ++bb)
      for (int c = 0; c < m; ++c) {
        double acc = 0.0;
        for (int i = 0; i < m; ++i) acc += b(i, bb, c) * frame(i, aa);
        mx = std::max(mx, std::abs(acc));
      }
  return mx;
}

namespace {

double max_abs(const Matrix& a) { return a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff(); }

// Largest principal-angle sine between column spaces of two orthonormal bases.
double subspace_gap(const Matrix& q1, const Matrix& q2) {
  if (q1.cols() != q2.cols()) return 1.0;
  if (q1.cols() == 0) return 0.0;
  const Matrix residual = q2 - q1 * (q1.transpose() * q2);
  return Eigen::JacobiSVD<Matrix>(residual).singularValues()(0);
}

Matrix orthonormal_columns(const Matrix& a) {
  if (a.cols() == 0) return a;
  Eigen::HouseholderQR<Matrix> qr(a);
  return qr.householderQ() * Matrix::Identity(a.rows(), a.cols());
}

}  // namespace

VerificationReport check_axioms(const MetricFManifold& M, const std::vector<Point>& points,
                                const FStructureTolerances& tol) {
  const int m = M.dim();
  const int s = M.s();
  const int n = M.n();
  using Bound = CheckResult::Bound;

  ResidualTracker metric_sym("metric_symmetric", tol.structural);
  ResidualTracker metric_pd("metric_positive_definite", 0.0, Bound::at_least);
  ResidualTracker f_cubed("f^3 + f = 0", tol.structural);
  ResidualTracker rank("rank f = 2n", 0.0);
  ResidualTracker f_xi("f xi_i = 0", tol.structural);
  ResidualTracker eta_f("eta_i o f = 0", tol.structural);
  ResidualTracker f_sq("f^2 = -I + sum eta_i (x) xi_i", tol.structural);
  ResidualTracker compat("g(X,Y) = g(fX,fY) + sum eta_i(X) eta_i(Y)", tol.structural);
  ResidualTracker duality("eta_i(xi_j) = delta_ij", tol.structural);
  ResidualTracker kernel("ker f = span{xi_i}", tol.principal_angle);
  ResidualTracker volume("eta_1^...^eta_s^F^n != 0", tol.volume, Bound::at_least);
  rank.note("sampled rank certificate");

  for (const auto& p : points) {
    Matrix g(m, m), f(m, m);
    std::vector<Vector> xi(static_cast<std::size_t>(s), Vector(m)), eta(static_cast<std::size_t>(s), Vector(m));
    try {
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
          g(i, j) = M.g()(i, j).evaluate(p);
          f(i, j) = M.f()(i, j).evaluate(p);
        }
      for (int a = 0; a < s; ++a)
        for (int k = 0; k < m; ++k) {
          xi[static_cast<std::size_t>(a)](k) = M.xi()[static_cast<std::size_t>(a)][k].evaluate(p);
          eta[static_cast<std::size_t>(a)](k) = M.eta()[static_cast<std::size_t>(a)][k].evaluate(p);
        }
    } catch (const DomainError& e) {
      for (auto* t : {&metric_sym, &metric_pd, &f_cubed, &rank, &f_xi, &eta_f, &f_sq, &compat, &duality, &kernel,
                      &volume}) {
        t->fail(p, e.what());
      }
      continue;
    }

    metric_sym.observe(max_abs(g - g.transpose()), p);
    const Eigen::SelfAdjointEigenSolver<Matrix> eig(0.5 * (g + g.transpose()), Eigen::EigenvaluesOnly);
    metric_pd.observe(eig.eigenvalues().minCoeff(), p);

    f_cubed.observe(max_abs(f * f * f + f), p);
    const int r = numerical_rank(f, tol.rank_threshold);
    rank.observe(std::abs(r - 2 * n), p);

    Matrix outer = Matrix::Zero(m, m);
    Matrix eta_outer = Matrix::Zero(m, m);
    double fxi = 0.0, etaf = 0.0, dual = 0.0;
    for (int a = 0; a < s; ++a) {
      const Vector& x = xi[static_cast<std::size_t>(a)];
      const Vector& e = eta[static_cast<std::size_t>(a)];
      fxi = std::max(fxi, (f * x).cwiseAbs().maxCoeff());
      etaf = std::max(etaf, (e.transpose() * f).cwiseAbs().maxCoeff());
      outer += x * e.transpose();
      eta_outer += e * e.transpose();
      for (int b = 0; b < s; ++b) {
        dual = std::max(dual, std::abs(e.dot(xi[static_cast<std::size_t>(b)]) - (a == b ? 1.0 : 0.0)));
      }
    }
    f_xi.observe(fxi, p);
    eta_f.observe(etaf, p);
    duality.observe(dual, p);
    f_sq.observe(max_abs(f * f + Matrix::Identity(m, m) - outer), p);
    compat.observe(max_abs(g - f.transpose() * g * f - eta_outer), p);

    // ker f against span{ξ}
    const Eigen::JacobiSVD<Matrix> svd(f, Eigen::ComputeFullV | Eigen::ComputeFullU);
    const auto& sv = svd.singularValues();
    const double cut = sv.size() > 0 ? tol.rank_threshold * std::max(sv(0), 1e-300) : 0.0;
    int img_rank = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i) {
      if (sv(i) > cut) ++img_rank;
    }
    const Matrix ker = svd.matrixV().rightCols(m - img_rank);
    Matrix xi_cols(m, s);
    for (int a = 0; a < s; ++a) xi_cols.col(a) = xi[static_cast<std::size_t>(a)];
    const Matrix xi_basis = orthonormal_columns(xi_cols);
    kernel.observe(std::max(subspace_gap(ker, xi_basis), subspace_gap(xi_basis, ker)), p);

    // {ξ̂_i} together with an orthonormal basis of im f
    Matrix assembled(m, s + img_rank);
    for (int a = 0; a < s; ++a) {
      const double nrm = xi[static_cast<std::size_t>(a)].norm();
      assembled.col(a) = nrm > 0.0 ? Vector(xi[static_cast<std::size_t>(a)] / nrm) : Vector::Zero(m);
    }
    assembled.rightCols(img_rank) = svd.matrixU().leftCols(img_rank);
    volume.observe(assembled.cols() == m ? std::abs(assembled.determinant()) : 0.0, p);
  }

  VerificationReport report;
  for (const auto* t : {&metric_sym, &metric_pd, &f_cubed, &rank, &f_xi, &eta_f, &f_sq, &compat, &duality, &kernel,
                        &volume}) {
    report.add(t->finish());
  }
  // Positive definiteness is strict.
  for (auto& c : report.checks) {
    if (c.name == "metric_positive_definite") c.passed = c.value > 0.0;
  }
  return report;
}

Matrix fundamental_two_form(const MetricFManifold& M, const Point& p) {
  const MetricAt g = metric_at(M.g(), p);
  return g.matrix * evaluate(M.f(), p).value;
}

Vector normality_tensor(const StructureAt& st, const Vector& X, const Vector& Y) {
  Vector out = nijenhuis(st.f, X, Y);
  for (int i = 0; i < st.s; ++i) {
    const Matrix d_eta = exterior_d(st.eta[static_cast<std::size_t>(i)]);
    out += 2.0 * X.dot(d_eta * Y) * st.xi_of(i);
  }
  return out;
}

Vector normality_tensor(const MetricFManifold& M, const Vector& X, const Vector& Y, const Point& p) {
  return normality_tensor(evaluate_structure(M, p), X, Y);
}

double normality_defect(const StructureAt& st) {
  const int m = st.dim();
  const Matrix frame = orthonormal_frame(st.metric());
  std::vector<Matrix> d_eta;
  for (int i = 0; i < st.s; ++i) d_eta.push_back(exterior_d(st.eta[static_cast<std::size_t>(i)]));
  double mx = 0.0;
  for (int a = 0; a < m; ++a) {
    for (int b = a + 1; b < m; ++b) {
      const Vector X = frame.col(a), Y = frame.col(b);
      Vector v = nijenhuis(st.f, X, Y);
      for (int i = 0; i < st.s; ++i) v += 2.0 * X.dot(d_eta[static_cast<std::size_t>(i)] * Y) * st.xi_of(i);
      mx = std::max(mx, st.norm(v));
    }
  }
  return mx;
}

CheckResult check_normality(const MetricFManifold& M, const std::vector<Point>& points, double tol) {
  ResidualTracker t("normality [f,f] + 2 sum xi_i (x) d eta_i = 0", tol);
  for (const auto& p : points) {
    try {
      t.observe(normality_defect(evaluate_structure(M, p)), p);
    } catch (const std::exception& e) {
      t.fail(p, e.what());
    }
  }
  return t.finish();
}

CheckResult check_normal_bracket(const MetricFManifold& M, const std::vector<Point>& points, double tol) {
  ResidualTracker t("[xi_i, xi_j] = 0", tol);
  for (const auto& p : points) {
    try {
      const StructureAt st = evaluate_structure(M, p);
      double mx = 0.0;
      for (int i = 0; i < st.s; ++i) {
        for (int j = i + 1; j < st.s; ++j) {
          mx = std::max(mx, st.norm(lie_bracket(st.xi[static_cast<std::size_t>(i)], st.xi[static_cast<std::size_t>(j)])));
        }
      }
      t.observe(mx, p);
    } catch (const std::exception& e) {
      t.fail(p, e.what());
    }
  }
  return t.finish();
}

Matrix build_f_basis(const StructureAt& st, double rank_threshold) {
  const int m = st.dim();
  const int n = st.n;
  const int s = st.s;
  const Matrix& G = st.metric();
  if (numerical_rank(st.f.value, rank_threshold) != 2 * n) {
    throw GeometryError("f-basis breakdown: rank f != 2n");
  }

  std::vector<Vector> span;  // g-orthonormal vectors already used
  auto project_out = [&](Vector v) {
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& u : span) v -= u.dot(G * v) * u;
    }
    return v;
  };
  for (int i = 0; i < s; ++i) {
    Vector v = project_out(st.xi_of(i));
    const double nv = std::sqrt(std::max(0.0, v.dot(G * v)));
    if (nv < 1e-8) throw GeometryError("f-basis breakdown: structure vector fields are dependent");
    span.push_back(v / nv);
  }

  Matrix basis(m, m);
  for (int k = 0; k < n; ++k) {
    int best = -1;
    double best_norm = -1.0;
    Vector best_vec;
    for (int c = 0; c < m; ++c) {
      const Vector r = project_out(Vector::Unit(m, c));
      const double nr = std::sqrt(std::max(0.0, r.dot(G * r)));
      if (nr > best_norm) {
        best = c;
        best_norm = nr;
        best_vec = r;
      }
    }
    if (best < 0 || best_norm < 1e-8) throw GeometryError("f-basis breakdown: no direction left in L");
    const Vector X = best_vec / best_norm;
    const Vector fX = st.f.value * X;
    basis.col(k) = X;
    basis.col(n + k) = fX;
    span.push_back(X);
    const Vector fX_perp = project_out(fX);
    const double nf = std::sqrt(std::max(0.0, fX_perp.dot(G * fX_perp)));
    if (nf < 1e-8) throw GeometryError("f-basis breakdown: fX is not independent of earlier vectors");
    span.push_back(fX_perp / nf);
  }
  for (int i = 0; i < s; ++i) basis.col(2 * n + i) = st.xi_of(i);
  return basis;
}

Matrix build_f_basis(const MetricFManifold& M, const Point& p) { return build_f_basis(evaluate_structure(M, p)); }

}  // namespace fman
