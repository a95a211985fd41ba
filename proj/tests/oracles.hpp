#pragma once

// Finite-difference reference computations that share no code with the
// engine's jet arithmetic. Everything here works from Expr::evaluate only.

#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "fman/f_structure.hpp"

namespace oracle {

using fman::Expr;
using fman::Matrix;
using fman::Point;
using fman::Vector;

inline Point shifted(const Point& p, int i, double h) {
  Point q = p;
  q(i) += h;
  return q;
}

inline double fd_partial(const Expr& e, const Point& p, int i, double h = 1e-5) {
  return (e.evaluate(shifted(p, i, h)) - e.evaluate(shifted(p, i, -h))) / (2 * h);
}

inline Vector fd_gradient(const Expr& e, const Point& p, double h = 1e-5) {
  Vector g(p.size());
  for (int i = 0; i < p.size(); ++i) g(i) = fd_partial(e, p, i, h);
  return g;
}

inline Matrix fd_hessian(const Expr& e, const Point& p, double h = 1e-4) {
  const int m = static_cast<int>(p.size());
  Matrix H(m, m);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      const Point pp = shifted(shifted(p, i, h), j, h), pm = shifted(shifted(p, i, h), j, -h);
      const Point mp = shifted(shifted(p, i, -h), j, h), mm = shifted(shifted(p, i, -h), j, -h);
      H(i, j) = (e.evaluate(pp) - e.evaluate(pm) - e.evaluate(mp) + e.evaluate(mm)) / (4 * h * h);
    }
  }
  return H;
}

inline Matrix metric(const fman::MetricField& g, const Point& p) {
  Matrix m(g.dim, g.dim);
  for (int i = 0; i < g.dim; ++i)
    for (int j = 0; j < g.dim; ++j) m(i, j) = g(i, j).evaluate(p);
  return m;
}

inline Matrix tensor11(const fman::Tensor11Field& f, const Point& p) {
  Matrix m(f.dim, f.dim);
  for (int k = 0; k < f.dim; ++k)
    for (int j = 0; j < f.dim; ++j) m(k, j) = f(k, j).evaluate(p);
  return m;
}

template <class Field>
Vector components(const Field& v, const Point& p) {
  Vector out(v.dim());
  for (int i = 0; i < v.dim(); ++i) out(i) = v[i].evaluate(p);
  return out;
}

/// Christoffel symbols Γ^k_ij (stored as gamma[k](i, j)) from the Koszul
/// formula with central-difference metric derivatives.
inline std::vector<Matrix> christoffel(const fman::MetricField& g, const Point& p, double h = 1e-5) {
  const int m = g.dim;
  std::vector<Matrix> dg(static_cast<std::size_t>(m));  // dg[k](i, j) = ∂_k g_ij
  for (int k = 0; k < m; ++k) dg[static_cast<std::size_t>(k)] = (metric(g, shifted(p, k, h)) - metric(g, shifted(p, k, -h))) / (2 * h);
  const Matrix inv = metric(g, p).inverse();
  std::vector<Matrix> gamma(static_cast<std::size_t>(m), Matrix::Zero(m, m));
  for (int k = 0; k < m; ++k)
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) {
        double sum = 0.0;
        for (int l = 0; l < m; ++l) {
          sum += inv(k, l) * (dg[static_cast<std::size_t>(i)](j, l) + dg[static_cast<std::size_t>(j)](i, l) -
                              dg[static_cast<std::size_t>(l)](i, j));
        }
        gamma[static_cast<std::size_t>(k)](i, j) = 0.5 * sum;
      }
  return gamma;
}

/// ∇_X Y for a vector field Y given pointwise by `field`, differentiated by
/// central differences along the coordinate axes.
template <class F>
Vector covariant(const fman::MetricField& g, const Point& p, const Vector& X, F field, double h = 1e-5) {
  const auto gamma = christoffel(g, p, h);
  const Vector Y = field(p);
  Vector out = Vector::Zero(p.size());
  for (int i = 0; i < p.size(); ++i) {
    const Vector dY = (field(shifted(p, i, h)) - field(shifted(p, i, -h))) / (2 * h);
    out += X(i) * dY;
  }
  for (int k = 0; k < p.size(); ++k) out(k) += X.dot(gamma[static_cast<std::size_t>(k)] * Y);
  return out;
}

/// Codifferential of F(X,Y) = g(X, fY) evaluated on Z: −Σ_{a,b} g^{ab}(∇_a F)(b, Z).
inline double codifferential_F(const fman::MetricFManifold& M, const Point& p, const Vector& Z, double h = 1e-5) {
  const int m = M.dim();
  auto F = [&](const Point& q) { return Matrix(metric(M.g(), q) * tensor11(M.f(), q)); };
  const auto gamma = christoffel(M.g(), p, h);
  const Matrix Fp = F(p);
  const Matrix inv = metric(M.g(), p).inverse();
  double sum = 0.0;
  for (int a = 0; a < m; ++a) {
    const Matrix dF = (F(shifted(p, a, h)) - F(shifted(p, a, -h))) / (2 * h);
    for (int b = 0; b < m; ++b) {
      for (int c = 0; c < m; ++c) {
        double nabla = dF(b, c);
        for (int d = 0; d < m; ++d) {
          nabla -= gamma[static_cast<std::size_t>(d)](a, b) * Fp(d, c) + gamma[static_cast<std::size_t>(d)](a, c) * Fp(b, d);
        }
        sum += inv(a, b) * nabla * Z(c);
      }
    }
  }
  return -sum;
}

/// Codifferential of a 1-form: −Σ g^{ab}(∇_a η)_b.
inline double codifferential_eta(const fman::MetricField& g, const fman::OneForm& eta, const Point& p, double h = 1e-5) {
  const int m = g.dim;
  const auto gamma = christoffel(g, p, h);
  const Vector e = components(eta, p);
  const Matrix inv = metric(g, p).inverse();
  double sum = 0.0;
  for (int a = 0; a < m; ++a) {
    const Vector de = (components(eta, shifted(p, a, h)) - components(eta, shifted(p, a, -h))) / (2 * h);
    for (int b = 0; b < m; ++b) {
      double nabla = de(b);
      for (int d = 0; d < m; ++d) nabla -= gamma[static_cast<std::size_t>(d)](a, b) * e(d);
      sum += inv(a, b) * nabla;
    }
  }
  return -sum;
}

/// (L_X g)(Y, Y) = X(g(Y,Y)) − 2 g([X, Y], Y) with Y extended as a constant field.
inline double lie_metric_diag(const fman::MetricField& g, const fman::VectorField& X, const Point& p, const Vector& Y,
                              double h = 1e-5) {
  const int m = g.dim;
  double directional = 0.0;  // X(g(Y,Y))
  Vector bracket = Vector::Zero(m);  // [X, Y] = −Y(X) for constant Y
  const Vector Xp = components(X, p);
  for (int i = 0; i < m; ++i) {
    const double dgyy = (Y.dot(metric(g, shifted(p, i, h)) * Y) - Y.dot(metric(g, shifted(p, i, -h)) * Y)) / (2 * h);
    directional += Xp(i) * dgyy;
    const Vector dX = (components(X, shifted(p, i, h)) - components(X, shifted(p, i, -h))) / (2 * h);
    bracket -= Y(i) * dX;
  }
  return directional - 2 * bracket.dot(metric(g, p) * Y);
}

}  // namespace oracle
