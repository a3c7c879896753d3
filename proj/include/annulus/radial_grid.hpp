#pragma once

#include "annulus/error.hpp"
#include "annulus/scalar.hpp"

#include <cmath>

namespace annulus {

/// Chebyshev–Gauss–Lobatto collocation on [a, b].
///
/// Node 0 sits on the outer wall r = b and node N on the inner wall r = a.
/// `weights` integrates f(r) r dr; `plain_weights` integrates f(r) dr.
template <typename Scalar>
struct RadialGrid {
  Scalar a;
  Scalar b;
  int n = 0;  // polynomial degree, n + 1 nodes
  Vec<Scalar> nodes;
  Vec<Scalar> inv_r;
  Mat<Scalar> d1, d2, d3, d4;
  Vec<Scalar> plain_weights;
  Vec<Scalar> weights;

  Eigen::Index size() const { return nodes.size(); }
  Eigen::Index outer() const { return 0; }
  Eigen::Index inner() const { return n; }
};

namespace detail {

// Differentiation matrix on the reference interval [-1, 1], nodes cos(pi j/N).
// Node differences use the product-of-sines identity and the diagonal uses the
// negative-sum rule; both keep rows of d1 summing to zero to rounding.
template <typename Scalar>
Mat<Scalar> chebyshev_d1(int n) {
  using std::sin;
  const Scalar p = pi<Scalar>();
  Mat<Scalar> d = Mat<Scalar>::Zero(n + 1, n + 1);
  auto c = [n](int j) { return Scalar((j == 0 || j == n) ? 2 : 1) * Scalar(j % 2 == 0 ? 1 : -1); };
  for (int i = 0; i <= n; ++i) {
    for (int j = 0; j <= n; ++j) {
      if (i == j) continue;
      const Scalar dx = Scalar(-2) * sin(p * Scalar(i + j) / Scalar(2 * n)) *
                        sin(p * Scalar(i - j) / Scalar(2 * n));
      d(i, j) = c(i) / (c(j) * dx);
    }
  }
  for (int i = 0; i <= n; ++i) d(i, i) = -d.row(i).sum();
  return d;
}

// Clenshaw–Curtis weights for the same nodes on [-1, 1].
template <typename Scalar>
Vec<Scalar> clenshaw_curtis(int n) {
  using std::cos;
  const Scalar p = pi<Scalar>();
  Vec<Scalar> w = Vec<Scalar>::Zero(n + 1);
  const Scalar nn = Scalar(n) * Scalar(n);
  const bool even = (n % 2 == 0);
  w(0) = w(n) = even ? Scalar(1) / (nn - Scalar(1)) : Scalar(1) / nn;
  for (int i = 1; i < n; ++i) {
    const Scalar theta = p * Scalar(i) / Scalar(n);
    Scalar v = 1;
    const int kmax = even ? n / 2 - 1 : (n - 1) / 2;
    for (int k = 1; k <= kmax; ++k) {
      v -= Scalar(2) * cos(Scalar(2 * k) * theta) / Scalar(4 * k * k - 1);
    }
    if (even) v -= cos(Scalar(n) * theta) / (nn - Scalar(1));
    w(i) = Scalar(2) * v / Scalar(n);
  }
  return w;
}

}  // namespace detail

template <typename Scalar = double>
RadialGrid<Scalar> build_grid(Scalar a, Scalar b, int n) {
  using std::cos;
  if (n < 8) throw Error(ErrorCode::TooCoarse, "radial grid needs N >= 8");
  if (!(a > Scalar(0)) || !(a < b)) throw Error(ErrorCode::InvalidGeometry, "need 0 < a < b");

  RadialGrid<Scalar> g;
  g.a = a;
  g.b = b;
  g.n = n;
  const Scalar half = (b - a) / Scalar(2);
  const Scalar mid = (a + b) / Scalar(2);
  const Scalar p = pi<Scalar>();
  g.nodes.resize(n + 1);
  for (int j = 0; j <= n; ++j) g.nodes(j) = mid + half * cos(p * Scalar(j) / Scalar(n));
  g.nodes(0) = b;
  g.nodes(n) = a;
  g.inv_r = g.nodes.cwiseInverse();

  g.d1 = detail::chebyshev_d1<Scalar>(n) / half;
  g.d2 = g.d1 * g.d1;
  g.d3 = g.d2 * g.d1;
  g.d4 = g.d2 * g.d2;

  g.plain_weights = detail::clenshaw_curtis<Scalar>(n) * half;
  g.weights = g.plain_weights.cwiseProduct(g.nodes);
  return g;
}

/// Quadrature of f(r) r dr over [a, b].
template <typename Scalar, typename Derived>
auto integrate_r(const RadialGrid<Scalar>& g, const Eigen::MatrixBase<Derived>& f) {
  return (g.weights.template cast<typename Derived::Scalar>().cwiseProduct(f.derived())).sum();
}

/// Barycentric interpolation of nodal values onto arbitrary radii.
template <typename Scalar, typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> interpolate(
    const RadialGrid<Scalar>& g, const Eigen::MatrixBase<Derived>& values, const Vec<Scalar>& points) {
  using T = typename Derived::Scalar;
  using std::abs;
  Eigen::Matrix<T, Eigen::Dynamic, 1> out(points.size());
  const int n = g.n;
  for (Eigen::Index k = 0; k < points.size(); ++k) {
    T num = T(0);
    Scalar den = 0;
    bool exact = false;
    for (int j = 0; j <= n; ++j) {
      const Scalar diff = points(k) - g.nodes(j);
      if (diff == Scalar(0)) {
        out(k) = values(j);
        exact = true;
        break;
      }
      Scalar w = (j % 2 == 0) ? Scalar(1) : Scalar(-1);
      if (j == 0 || j == n) w /= Scalar(2);
      const Scalar t = w / diff;
      num += values(j) * t;
      den += t;
    }
    if (!exact) out(k) = num / den;
  }
  return out;
}

}  // namespace annulus
