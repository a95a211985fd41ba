#include "fman/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace fman {

Chart::Chart(int n, int s, std::vector<std::string> coordinates, std::vector<Interval> domain)
    : n_(n), s_(s), coordinates_(std::move(coordinates)), domain_(std::move(domain)) {
  if (n_ < 0 || s_ < 0) throw GeometryError("chart requires n >= 0 and s >= 0");
  if (static_cast<int>(coordinates_.size()) != dim()) {
    throw GeometryError("chart has " + std::to_string(coordinates_.size()) + " coordinates, expected 2n+s = " +
                        std::to_string(dim()));
  }
  if (domain_.size() != coordinates_.size()) throw GeometryError("chart domain does not match coordinate count");
  std::set<std::string> seen;
  for (const auto& c : coordinates_) {
    if (!seen.insert(c).second) throw GeometryError("duplicate coordinate name '" + c + "'");
  }
  for (std::size_t i = 0; i < domain_.size(); ++i) {
    if (!(domain_[i].lo <= domain_[i].hi)) {
      throw GeometryError("empty domain interval for coordinate '" + coordinates_[i] + "'");
    }
  }
}

std::optional<std::size_t> Chart::index_of(const std::string& name) const {
  for (std::size_t i = 0; i < coordinates_.size(); ++i) {
    if (coordinates_[i] == name) return i;
  }
  return std::nullopt;
}

bool Chart::contains(const Point& p) const {
  if (p.size() != dim()) return false;
  for (int i = 0; i < dim(); ++i) {
    if (p(i) < domain_[static_cast<std::size_t>(i)].lo || p(i) > domain_[static_cast<std::size_t>(i)].hi) {
      return false;
    }
  }
  return true;
}

double Tensor3::max_abs() const {
  double m = 0.0;
  for (double v : data_) m = std::max(m, std::abs(v));
  return m;
}

// ---------------------------------------------------------------------------
// Field evaluation

VectorJet evaluate(const VectorField& X, const Point& p) {
  const int m = static_cast<int>(p.size());
  if (X.dim() != m) throw GeometryError("vector field dimension does not match point");
  VectorJet out{Vector(m), Matrix(m, m)};
  for (int k = 0; k < m; ++k) {
    const Jet2 j = X[k].evaluate_jet(p);
    out.value(k) = j.value;
    out.jacobian.row(k) = j.gradient.transpose();
  }
  return out;
}

OneFormJet evaluate(const OneForm& eta, const Point& p) {
  const int m = static_cast<int>(p.size());
  if (eta.dim() != m) throw GeometryError("1-form dimension does not match point");
  OneFormJet out{Vector(m), Matrix(m, m), Tensor3(m)};
  for (int k = 0; k < m; ++k) {
    const Jet2 j = eta[k].evaluate_jet(p);
    out.value(k) = j.value;
    out.jacobian.col(k) = j.gradient;
    for (int a = 0; a < m; ++a) {
      for (int b = 0; b < m; ++b) out.second(a, b, k) = j.hessian(a, b);
    }
  }
  return out;
}

Tensor11Jet evaluate(const Tensor11Field& f, const Point& p) {
  const int m = static_cast<int>(p.size());
  if (f.dim != m) throw GeometryError("(1,1) tensor dimension does not match point");
  Tensor11Jet out{Matrix(m, m), Tensor3(m)};
  for (int k = 0; k < m; ++k) {
    for (int j = 0; j < m; ++j) {
      const Jet2 v = f(k, j).evaluate_jet(p);
      out.value(k, j) = v.value;
      for (int l = 0; l < m; ++l) out.derivative(l, k, j) = v.gradient(l);
    }
  }
  return out;
}

MetricJet evaluate(const MetricField& g, const Point& p) {
  const int m = static_cast<int>(p.size());
  if (g.dim != m) throw GeometryError("metric dimension does not match point");
  MetricJet out{Matrix(m, m), Tensor3(m)};
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      const Jet2 v = g(i, j).evaluate_jet(p);
      out.value(i, j) = v.value;
      for (int k = 0; k < m; ++k) out.derivative(k, i, j) = v.gradient(k);
    }
  }
  return out;
}

VectorJet constant_extension(const Vector& v) {
  return VectorJet{v, Matrix::Zero(v.size(), v.size())};
}

VectorJet apply(const Tensor11Jet& f, const VectorJet& X) {
  const int m = static_cast<int>(X.value.size());
  VectorJet out{f.value * X.value, f.value * X.jacobian};
  for (int i = 0; i < m; ++i) {
    for (int k = 0; k < m; ++k) {
      double acc = 0.0;
      for (int j = 0; j < m; ++j) acc += f.derivative(i, k, j) * X.value(j);
      out.jacobian(k, i) += acc;
    }
  }
  return out;
}

TwoFormJet lower(const MetricJet& g, const Tensor11Jet& f) {
  const int m = static_cast<int>(g.value.rows());
  TwoFormJet out{g.value * f.value, Tensor3(m)};
  for (int l = 0; l < m; ++l) {
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < m; ++j) {
        double acc = 0.0;
        for (int k = 0; k < m; ++k) {
          acc += g.derivative(l, i, k) * f.value(k, j) + g.value(i, k) * f.derivative(l, k, j);
        }
        out.derivative(l, i, j) = acc;
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Metric and connection

MetricAt metric_at(const Matrix& g) {
  const double scale = std::max(1.0, g.cwiseAbs().maxCoeff());
  if ((g - g.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw GeometryError("metric is not symmetric");
  }
  const Matrix sym = 0.5 * (g + g.transpose());
  Eigen::LLT<Matrix> llt(sym);
  if (llt.info() != Eigen::Success) throw GeometryError("metric is not positive definite");
  const Eigen::SelfAdjointEigenSolver<Matrix> eig(sym, Eigen::EigenvaluesOnly);
  if (eig.eigenvalues().minCoeff() <= 0.0) throw GeometryError("metric is not positive definite");
  MetricAt out{sym, llt.solve(Matrix::Identity(g.rows(), g.cols()))};
  out.inverse = 0.5 * (out.inverse + out.inverse.transpose());
  return out;
}

MetricAt metric_at(const MetricField& g, const Point& p) {
  Matrix v(g.dim, g.dim);
  for (int i = 0; i < g.dim; ++i) {
    for (int j = 0; j < g.dim; ++j) v(i, j) = g(i, j).evaluate(p);
  }
  return metric_at(v);
}

Tensor3 christoffel(const MetricJet& g, const Matrix& inverse) {
  const int m = static_cast<int>(g.value.rows());
  // Γ_{l,ij} = ½(∂_i g_lj + ∂_j g_li − ∂_l g_ij)
  Tensor3 first(m);
  for (int l = 0; l < m; ++l) {
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < m; ++j) {
        first(l, i, j) = 0.5 * (g.derivative(i, l, j) + g.derivative(j, l, i) - g.derivative(l, i, j));
      }
    }
  }
  Tensor3 gamma(m);
  for (int k = 0; k < m; ++k) {
    for (int i = 0; i < m; ++i) {
      for (int j = i; j < m; ++j) {
        double acc = 0.0;
        for (int l = 0; l < m; ++l) acc += inverse(k, l) * first(l, i, j);
        gamma(k, i, j) = acc;
        gamma(k, j, i) = acc;
      }
    }
  }
  return gamma;
}

Tensor3 christoffel(const MetricField& g, const Point& p) { return local_geometry(g, p).gamma; }

double LocalGeometry::norm(const Vector& a) const { return std::sqrt(std::max(0.0, inner(a, a))); }

LocalGeometry local_geometry(MetricJet g) {
  MetricAt at = metric_at(g.value);
  g.value = at.matrix;
  Tensor3 gamma = christoffel(g, at.inverse);
  return LocalGeometry{std::move(g), std::move(at.inverse), std::move(gamma)};
}

LocalGeometry local_geometry(const MetricField& g, const Point& p) { return local_geometry(evaluate(g, p)); }

Vector covariant_derivative(const LocalGeometry& geom, const Vector& X, const VectorJet& Y) {
  const int m = geom.dim();
  Vector out = Y.jacobian * X;
  for (int k = 0; k < m; ++k) {
    double acc = 0.0;
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < m; ++j) acc += geom.gamma(k, i, j) * X(i) * Y.value(j);
    }
    out(k) += acc;
  }
  return out;
}

Tensor3 covariant_derivative(const LocalGeometry& geom, const Tensor11Jet& f) {
  const int m = geom.dim();
  Tensor3 out(m);
  for (int i = 0; i < m; ++i) {
    for (int k = 0; k < m; ++k) {
      for (int j = 0; j < m; ++j) {
        double acc = f.derivative(i, k, j);
        for (int l = 0; l < m; ++l) {
          acc += geom.gamma(k, i, l) * f.value(l, j) - geom.gamma(l, i, j) * f.value(k, l);
        }
        out(i, k, j) = acc;
      }
    }
  }
  return out;
}

Matrix covariant_derivative(const LocalGeometry& geom, const Tensor11Jet& f, const Vector& X) {
  const int m = geom.dim();
  const Tensor3 full = covariant_derivative(geom, f);
  Matrix out = Matrix::Zero(m, m);
  for (int i = 0; i < m; ++i) {
    if (X(i) == 0.0) continue;
    for (int k = 0; k < m; ++k) {
      for (int j = 0; j < m; ++j) out(k, j) += X(i) * full(i, k, j);
    }
  }
  return out;
}

Matrix covariant_derivative(const LocalGeometry& geom, const OneFormJet& eta) {
  const int m = geom.dim();
  Matrix out = eta.jacobian;
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      double acc = 0.0;
      for (int l = 0; l < m; ++l) acc += geom.gamma(l, i, j) * eta.value(l);
      out(i, j) -= acc;
    }
  }
  return out;
}

Tensor3 covariant_derivative(const LocalGeometry& geom, const TwoFormJet& omega) {
  const int m = geom.dim();
  Tensor3 out(m);
  for (int k = 0; k < m; ++k) {
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < m; ++j) {
        double acc = omega.derivative(k, i, j);
        for (int l = 0; l < m; ++l) {
          acc -= geom.gamma(l, k, i) * omega.value(l, j) + geom.gamma(l, k, j) * omega.value(i, l);
        }
        out(k, i, j) = acc;
      }
    }
  }
  return out;
}

Vector covariant_derivative_vector(const MetricField& g, const VectorField& X, const VectorField& Y,
                                   const Point& p) {
  return covariant_derivative(local_geometry(g, p), evaluate(X, p).value, evaluate(Y, p));
}

Matrix covariant_derivative_t11(const MetricField& g, const Tensor11Field& f, const Vector& X,
                                const Point& p) {
  return covariant_derivative(local_geometry(g, p), evaluate(f, p), X);
}

// ---------------------------------------------------------------------------
// Lie and exterior calculus

Vector lie_bracket(const VectorJet& X, const VectorJet& Y) {
  return Y.jacobian * X.value - X.jacobian * Y.value;
}

Vector lie_bracket(const VectorField& X, const VectorField& Y, const Point& p) {
  return lie_bracket(evaluate(X, p), evaluate(Y, p));
}

Matrix lie_derivative_metric(const MetricJet& g, const VectorJet& X) {
  const int m = static_cast<int>(g.value.rows());
  Matrix out(m, m);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      double acc = 0.0;
      for (int k = 0; k < m; ++k) {
        acc += X.value(k) * g.derivative(k, i, j) + g.value(k, j) * X.jacobian(k, i) +
               g.value(i, k) * X.jacobian(k, j);
      }
      out(i, j) = acc;
    }
  }
  return out;
}

Matrix lie_derivative_metric(const MetricField& g, const VectorField& X, const Point& p) {
  return lie_derivative_metric(evaluate(g, p), evaluate(X, p));
}

namespace {

double one_form_factor(ExteriorConvention c) { return c == ExteriorConvention::blair ? 0.5 : 1.0; }
double two_form_factor(ExteriorConvention c) { return c == ExteriorConvention::blair ? 1.0 / 3.0 : 1.0; }

}  // namespace

Matrix exterior_d(const OneFormJet& eta, ExteriorConvention c) {
  return one_form_factor(c) * (eta.jacobian - eta.jacobian.transpose());
}

TwoFormJet exterior_d_jet(const OneFormJet& eta, ExteriorConvention c) {
  const int m = static_cast<int>(eta.value.size());
  const double a = one_form_factor(c);
  TwoFormJet out{exterior_d(eta, c), Tensor3(m)};
  for (int k = 0; k < m; ++k) {
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < m; ++j) out.derivative(k, i, j) = a * (eta.second(k, i, j) - eta.second(k, j, i));
    }
  }
  return out;
}

Tensor3 exterior_d(const TwoFormJet& omega, ExteriorConvention c) {
  const int m = static_cast<int>(omega.value.rows());
  const double a = two_form_factor(c);
  Tensor3 out(m);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      for (int k = 0; k < m; ++k) {
        out(i, j, k) = a * (omega.derivative(i, j, k) + omega.derivative(j, k, i) + omega.derivative(k, i, j));
      }
    }
  }
  return out;
}

Tensor3 wedge(const Matrix& omega, const Vector& theta, ExteriorConvention c) {
  const int m = static_cast<int>(omega.rows());
  const double a = two_form_factor(c);
  Tensor3 out(m);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      for (int k = 0; k < m; ++k) {
        out(i, j, k) = a * (omega(i, j) * theta(k) + omega(j, k) * theta(i) + omega(k, i) * theta(j));
      }
    }
  }
  return out;
}

Vector codifferential(const LocalGeometry& geom, const TwoFormJet& omega, const Matrix& frame) {
  const int m = geom.dim();
  const Tensor3 nabla = covariant_derivative(geom, omega);
  // Σ_a e_a^k e_a^i = g^{ki} for an orthonormal frame; the frame sum is kept explicit.
  const Matrix contraction = frame * frame.transpose();
  Vector out = Vector::Zero(m);
  for (int x = 0; x < m; ++x) {
    double acc = 0.0;
    for (int k = 0; k < m; ++k) {
      for (int i = 0; i < m; ++i) acc += contraction(k, i) * nabla(k, i, x);
    }
    out(x) = -acc;
  }
  return out;
}

Vector codifferential(const LocalGeometry& geom, const TwoFormJet& omega) {
  return codifferential(geom, omega, orthonormal_frame(geom.metric.value));
}

double codifferential(const LocalGeometry& geom, const OneFormJet& eta, const Matrix& frame) {
  const Matrix nabla = covariant_derivative(geom, eta);
  double acc = 0.0;
  for (int a = 0; a < frame.cols(); ++a) acc += frame.col(a).dot(nabla * frame.col(a));
  return -acc;
}

double codifferential(const LocalGeometry& geom, const OneFormJet& eta) {
  return codifferential(geom, eta, orthonormal_frame(geom.metric.value));
}

Vector nijenhuis(const Tensor11Jet& f, const Vector& X, const Vector& Y) {
  const int m = static_cast<int>(X.size());
  // N^k_{ij} = f^l_i ∂_l f^k_j − f^l_j ∂_l f^k_i + f^k_l (∂_j f^l_i − ∂_i f^l_j)
  Vector out = Vector::Zero(m);
  for (int k = 0; k < m; ++k) {
    double acc = 0.0;
    for (int i = 0; i < m; ++i) {
      if (X(i) == 0.0) continue;
      for (int j = 0; j < m; ++j) {
        if (Y(j) == 0.0) continue;
        double n = 0.0;
        for (int l = 0; l < m; ++l) {
          n += f.value(l, i) * f.derivative(l, k, j) - f.value(l, j) * f.derivative(l, k, i) +
               f.value(k, l) * (f.derivative(j, l, i) - f.derivative(i, l, j));
        }
        acc += n * X(i) * Y(j);
      }
    }
    out(k) = acc;
  }
  return out;
}

Vector nijenhuis(const Tensor11Jet& f, const VectorJet& X, const VectorJet& Y) {
  const VectorJet fX = apply(f, X);
  const VectorJet fY = apply(f, Y);
  const Matrix& F = f.value;
  return F * F * lie_bracket(X, Y) + lie_bracket(fX, fY) - F * lie_bracket(fX, Y) - F * lie_bracket(X, fY);
}

Matrix orthonormal_frame(const Matrix& g) {
  const int m = static_cast<int>(g.rows());
  Matrix frame = Matrix::Zero(m, m);
  for (int c = 0; c < m; ++c) {
    Vector v = Vector::Unit(m, c);
    // Modified Gram–Schmidt, two passes for stability.
    for (int pass = 0; pass < 2; ++pass) {
      for (int a = 0; a < c; ++a) v -= frame.col(a).dot(g * v) * frame.col(a);
    }
    const double n2 = v.dot(g * v);
    if (!(n2 > 1e-24)) throw GeometryError("orthonormal frame breakdown: metric is degenerate");
    frame.col(c) = v / std::sqrt(n2);
  }
  return frame;
}

}  // namespace fman
