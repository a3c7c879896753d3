#pragma once

#include "annulus/error.hpp"
#include "annulus/modal_field.hpp"
#include "annulus/radial_grid.hpp"
#include "annulus/scalar.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include <algorithm>
#include <complex>
#include <limits>
#include <vector>

namespace annulus {

/// Dense radial operator for angular wavenumber n.
/// order 1 is the modal Laplacian, order 2 its matrix square.
template <typename Scalar = double>
struct ModalOperator {
  int n = 0;
  int order = 1;
  Mat<Scalar> matrix;
};

/// Δ_n = d²/dr² + (1/r) d/dr − n²/r².
template <typename Scalar>
ModalOperator<Scalar> laplacian_n(const RadialGrid<Scalar>& g, int n) {
  const Vec<Scalar> inv_r2 = g.inv_r.cwiseAbs2();
  Mat<Scalar> m = g.d2 + g.inv_r.asDiagonal() * g.d1;
  m.diagonal() -= Scalar(n) * Scalar(n) * inv_r2;
  return {n, 1, std::move(m)};
}

/// Δ_n², composed as a matrix product of two Laplacians.
template <typename Scalar>
ModalOperator<Scalar> bilaplacian_n(const RadialGrid<Scalar>& g, int n) {
  const Mat<Scalar> lap = laplacian_n(g, n).matrix;
  return {n, 2, lap * lap};
}

/// One linear functional of the nodal values that replaces the operator row at `position`.
template <typename Scalar>
struct BoundaryRow {
  Eigen::Index position;
  RowVec<Scalar> functional;
};

template <typename Scalar = double>
struct BoundaryConditionSet {
  std::vector<BoundaryRow<Scalar>> rows;

  std::size_t size() const { return rows.size(); }
};

/// The four wall conditions of the streamfunction problem:
///   Ψ(b) = 0, Ψ''(b) + Ψ'(b)/b = 0            (stress-free outer wall)
///   Ψ(a) = 0, Ψ''(a) − (1/a − α/μ) Ψ'(a) = 0   (Navier slip on the inner wall)
/// Rows 0, 1 carry the outer wall, rows N−1, N the inner wall.
template <typename Scalar>
BoundaryConditionSet<Scalar> navier_slip_bcs(const RadialGrid<Scalar>& g, Scalar alpha, Scalar mu) {
  const Eigen::Index o = g.outer();
  const Eigen::Index i = g.inner();
  const Eigen::Index np = g.size();
  BoundaryConditionSet<Scalar> bc;
  bc.rows.push_back({o, RowVec<Scalar>::Unit(np, o)});
  bc.rows.push_back({o + 1, g.d2.row(o) + g.d1.row(o) / g.b});
  bc.rows.push_back({i - 1, g.d2.row(i) - (Scalar(1) / g.a - alpha / mu) * g.d1.row(i)});
  bc.rows.push_back({i, RowVec<Scalar>::Unit(np, i)});
  return bc;
}

/// Homogeneous Dirichlet conditions at both walls (second-order problems).
template <typename Scalar>
BoundaryConditionSet<Scalar> dirichlet_bcs(const RadialGrid<Scalar>& g) {
  BoundaryConditionSet<Scalar> bc;
  bc.rows.push_back({g.outer(), RowVec<Scalar>::Unit(g.size(), g.outer())});
  bc.rows.push_back({g.inner(), RowVec<Scalar>::Unit(g.size(), g.inner())});
  return bc;
}

/// Cheap conditioning proxy that works for every scalar type Eigen supports.
template <typename Scalar>
Scalar pivot_ratio(const Eigen::PartialPivLU<Mat<Scalar>>& lu) {
  const Vec<Scalar> piv = lu.matrixLU().diagonal().cwiseAbs();
  const Scalar hi = piv.maxCoeff();
  return hi > Scalar(0) ? Scalar(piv.minCoeff() / hi) : Scalar(0);
}

/// Replaces the boundary rows, equilibrates and factorizes; reused by the
/// time stepper which solves the same system many times.
template <typename Scalar>
class BoundaryValueSolver {
 public:
  BoundaryValueSolver(Mat<Scalar> op, const BoundaryConditionSet<Scalar>& bcs) : bcs_(bcs) {
    if (op.rows() != op.cols()) throw Error(ErrorCode::GridMismatch, "operator is not square");
    for (const auto& row : bcs.rows) {
      if (row.functional.size() != op.cols()) throw Error(ErrorCode::GridMismatch, "boundary row length");
      op.row(row.position) = row.functional;
    }
    scale_ = op.rowwise().template lpNorm<Eigen::Infinity>().cwiseInverse();
    op = scale_.asDiagonal() * op;
    lu_.compute(op);
    const Scalar rc = rcond();
    if (!(rc > singular_threshold()) || !std::isfinite(static_cast<double>(rc))) {
      throw Error(ErrorCode::SingularSystem, "boundary value system is numerically singular");
    }
  }

  /// Solves op·x = rhs on interior rows with the boundary functionals equal to
  /// `boundary_values` (zero when empty).
  template <typename Derived>
  auto solve(const Eigen::MatrixBase<Derived>& rhs, const std::vector<typename Derived::Scalar>& boundary_values = {}) const {
    using T = typename Derived::Scalar;
    Eigen::Matrix<T, Eigen::Dynamic, 1> b = rhs;
    for (std::size_t k = 0; k < bcs_.rows.size(); ++k) {
      b(bcs_.rows[k].position) = boundary_values.empty() ? T(0) : boundary_values[k];
    }
    b = scale_.template cast<T>().cwiseProduct(b);
    if constexpr (Eigen::NumTraits<T>::IsComplex) {
      const Vec<Scalar> re = lu_.solve(Vec<Scalar>(b.real()));
      const Vec<Scalar> im = lu_.solve(Vec<Scalar>(b.imag()));
      Eigen::Matrix<T, Eigen::Dynamic, 1> x(re.size());
      for (Eigen::Index k = 0; k < x.size(); ++k) x(k) = T(re(k), im(k));
      return x;
    } else {
      return Eigen::Matrix<T, Eigen::Dynamic, 1>(lu_.solve(b));
    }
  }

  /// Smallest over largest pivot of the equilibrated factorization.
  Scalar rcond() const { return pivot_ratio(lu_); }

  static Scalar singular_threshold() { return Scalar(64) * Eigen::NumTraits<Scalar>::epsilon(); }

 private:
  BoundaryConditionSet<Scalar> bcs_;
  Vec<Scalar> scale_;
  Eigen::PartialPivLU<Mat<Scalar>> lu_;
};

template <typename Scalar, typename Derived>
auto solve_bvp(const Mat<Scalar>& op, const Eigen::MatrixBase<Derived>& rhs, const BoundaryConditionSet<Scalar>& bcs,
               const std::vector<typename Derived::Scalar>& boundary_values = {}) {
  return BoundaryValueSolver<Scalar>(op, bcs).solve(rhs, boundary_values);
}

/// ModalField front end; the result carries the wavenumber of the rhs.
template <typename Scalar>
ModalField<Scalar> solve_bvp(const ModalOperator<Scalar>& op, const ModalField<Scalar>& rhs,
                             const BoundaryConditionSet<Scalar>& bcs) {
  if (op.matrix.rows() != rhs.size()) throw Error(ErrorCode::GridMismatch, "rhs length differs from operator");
  return {rhs.n, solve_bvp(op.matrix, rhs.values, bcs)};
}

template <typename Scalar>
struct EigenPair {
  std::complex<Scalar> value;
  CVec<Scalar> vector;
};

/// Finite spectrum of A x = λ B x with the boundary rows of A replaced by `bcs`
/// and the matching rows of B zeroed.
///
/// The boundary unknowns are eliminated through the boundary functionals, which
/// removes the infinite eigenvalues of the row-replaced pencil exactly and
/// leaves a standard problem on the interior nodes. Eigenvalues with
/// |λ| > cap are discarded; the rest are sorted by descending real part.
template <typename Scalar>
std::vector<EigenPair<Scalar>> generalized_eig(const Mat<Scalar>& A, const Mat<Scalar>& B,
                                               const BoundaryConditionSet<Scalar>& bcs,
                                               Scalar cap = std::numeric_limits<Scalar>::infinity()) {
  using std::abs;
  using C = std::complex<Scalar>;
  const Eigen::Index np = A.rows();
  if (A.cols() != np || B.rows() != np || B.cols() != np) throw Error(ErrorCode::GridMismatch, "pencil shapes");
  const Eigen::Index nb = static_cast<Eigen::Index>(bcs.size());

  std::vector<Eigen::Index> bnd, interior;
  std::vector<bool> is_bnd(np, false);
  for (const auto& row : bcs.rows) is_bnd[row.position] = true;
  for (Eigen::Index k = 0; k < np; ++k) (is_bnd[k] ? bnd : interior).push_back(k);
  const Eigen::Index ni = static_cast<Eigen::Index>(interior.size());

  Mat<Scalar> cb(nb, nb), ci(nb, ni);
  for (Eigen::Index r = 0; r < nb; ++r) {
    for (Eigen::Index c = 0; c < nb; ++c) cb(r, c) = bcs.rows[r].functional(bnd[c]);
    for (Eigen::Index c = 0; c < ni; ++c) ci(r, c) = bcs.rows[r].functional(interior[c]);
  }
  Eigen::FullPivLU<Mat<Scalar>> cb_lu(cb);
  if (!cb_lu.isInvertible()) throw Error(ErrorCode::EigSolverFailure, "boundary block is singular");
  const Mat<Scalar> elim = -cb_lu.solve(ci);  // boundary values in terms of interior values

  auto condense = [&](const Mat<Scalar>& M) {
    Mat<Scalar> out(ni, ni);
    for (Eigen::Index r = 0; r < ni; ++r) {
      for (Eigen::Index c = 0; c < ni; ++c) out(r, c) = M(interior[r], interior[c]);
      for (Eigen::Index c = 0; c < nb; ++c) out.row(r) += M(interior[r], bnd[c]) * elim.row(c);
    }
    return out;
  };
  const Mat<Scalar> a_red = condense(A);
  const Mat<Scalar> b_red = condense(B);
  Eigen::PartialPivLU<Mat<Scalar>> b_lu(b_red);
  if (!(pivot_ratio(b_lu) > Eigen::NumTraits<Scalar>::epsilon())) {
    throw Error(ErrorCode::EigSolverFailure, "mass operator is singular after boundary elimination");
  }
  const Mat<Scalar> standard = b_lu.solve(a_red);

  Eigen::EigenSolver<Mat<Scalar>> es(standard, true);
  if (es.info() != Eigen::Success) throw Error(ErrorCode::EigSolverFailure, "eigenvalue iteration did not converge");

  std::vector<EigenPair<Scalar>> out;
  const auto values = es.eigenvalues();
  const auto vectors = es.eigenvectors();
  for (Eigen::Index k = 0; k < values.size(); ++k) {
    const C lam = values(k);
    if (!(abs(lam) <= cap)) continue;
    CVec<Scalar> full(np);
    const CVec<Scalar> vi = vectors.col(k);
    for (Eigen::Index r = 0; r < ni; ++r) full(interior[r]) = vi(r);
    for (Eigen::Index r = 0; r < nb; ++r) {
      C acc(0);
      for (Eigen::Index c = 0; c < ni; ++c) acc += elim(r, c) * vi(c);
      full(bnd[r]) = acc;
    }
    out.push_back({lam, std::move(full)});
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const EigenPair<Scalar>& x, const EigenPair<Scalar>& y) { return x.value.real() > y.value.real(); });
  return out;
}

template <typename Scalar>
std::vector<EigenPair<Scalar>> generalized_eig(const ModalOperator<Scalar>& A, const ModalOperator<Scalar>& B,
                                               const BoundaryConditionSet<Scalar>& bcs,
                                               Scalar cap = std::numeric_limits<Scalar>::infinity()) {
  return generalized_eig(A.matrix, B.matrix, bcs, cap);
}

/// L² pairing of two modal fields over the annulus, ∫∫ f conj(g) r dr dθ.
/// Distinct wavenumbers are orthogonal in θ and give exactly zero.
template <typename Scalar>
std::complex<Scalar> inner_product(const ModalField<Scalar>& f, const ModalField<Scalar>& g,
                                   const RadialGrid<Scalar>& grid) {
  if (f.size() != grid.size() || g.size() != grid.size()) throw Error(ErrorCode::GridMismatch, "field length");
  if (f.n != g.n) return std::complex<Scalar>(0);
  std::complex<Scalar> acc(0);
  for (Eigen::Index k = 0; k < f.size(); ++k) acc += grid.weights(k) * f.values(k) * std::conj(g.values(k));
  return Scalar(2) * pi<Scalar>() * acc;
}

}  // namespace annulus
