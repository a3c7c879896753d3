#pragma once

#include "annulus/error.hpp"
#include "annulus/modal_operators.hpp"
#include "annulus/params.hpp"
#include "annulus/radial_grid.hpp"

#include <cmath>
#include <vector>

namespace annulus {

/// Closed-form critical viscosity of the mode-1 problem. Linear in a·α, and
/// otherwise a function of σ = b/a only. A series in σ − 1 takes over in thin
/// annuli where the closed form cancels catastrophically.
double mu_c_closed(const DomainParams& params);

/// Determinant of the 4×4 wall-condition matrix built on the kernel basis
/// {r, r ln r, 1/r, r³} of Δ₁² (rows scaled by powers of a and b). Linear in mu;
/// its root is the critical viscosity.
template <typename Scalar = double>
Eigen::Matrix<Scalar, 4, 4> det_matrix(const DomainParams& p, Scalar mu) {
  using std::log;
  const Scalar a(p.a), b(p.b), al(p.alpha);
  const Scalar la = log(a), lb = log(b);
  const Scalar a2 = a * a, a3 = a2 * a, a4 = a2 * a2, a5 = a4 * a;
  const Scalar b2 = b * b, b4 = b2 * b2;
  Eigen::Matrix<Scalar, 4, 4> m;
  m << a2, a2 * la, Scalar(1), a4,
       b2, b2 * lb, Scalar(1), b4,
       b2, b2 * (Scalar(2) + lb), Scalar(1), Scalar(9) * b4,
       -a2 * mu + al * a3, a3 * al - a2 * mu * la + a3 * al * la, Scalar(3) * mu - a * al,
       Scalar(3) * a5 * al + Scalar(3) * a4 * mu;
  return m;
}

template <typename Scalar = double>
Scalar det_condition(const DomainParams& p, Scalar mu) {
  return det_matrix<Scalar>(p, mu).determinant();
}

/// Hadamard bound of the determinant, the natural size against which a
/// vanishing determinant is judged.
template <typename Scalar = double>
Scalar det_scale(const DomainParams& p, Scalar mu) {
  const auto m = det_matrix<Scalar>(p, mu);
  Scalar s(1);
  for (int r = 0; r < 4; ++r) s *= m.row(r).norm();
  return s;
}

/// Root of det_condition bracketed in (1e-6·aα, 10·aα): 80 bisection steps then
/// up to 5 secant steps kept inside the final bracket.
template <typename Scalar = double>
Scalar mu_c_oracle(const DomainParams& params) {
  validate_geometry(params);
  using std::abs;
  const Scalar scale = Scalar(params.a) * Scalar(params.alpha);
  Scalar lo = Scalar(1e-6) * scale, hi = Scalar(10) * scale;
  Scalar flo = det_condition<Scalar>(params, lo), fhi = det_condition<Scalar>(params, hi);
  if (flo == Scalar(0)) return lo;
  if (fhi == Scalar(0)) return hi;
  if ((flo > 0) == (fhi > 0)) throw Error(ErrorCode::NoBracket, "determinant has no sign change in (1e-6 aα, 10 aα)");
  for (int it = 0; it < 80; ++it) {
    const Scalar mid = (lo + hi) / Scalar(2);
    const Scalar fm = det_condition<Scalar>(params, mid);
    if (fm == Scalar(0)) return mid;
    if ((fm > 0) == (flo > 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
      fhi = fm;
    }
  }
  Scalar x0 = lo, x1 = hi, f0 = flo, f1 = fhi;
  for (int it = 0; it < 5 && f1 != f0; ++it) {
    const Scalar x2 = x1 - f1 * (x1 - x0) / (f1 - f0);
    if (!(x2 >= lo && x2 <= hi)) break;
    x0 = x1;
    f0 = f1;
    x1 = x2;
    f1 = det_condition<Scalar>(params, x1);
    if (f1 == Scalar(0)) break;
  }
  return (x1 >= lo && x1 <= hi) ? x1 : (lo + hi) / Scalar(2);
}

/// Minimizer of ∫ r (Δ_n Φ)² dr / Φ'(a)² over Φ(a) = Φ(b) = 0, normalized to Φ'(a) = 1.
template <typename Scalar>
struct GammaResult {
  int n = 0;
  Scalar gamma;
  Vec<Scalar> minimizer;
};

/// The minimizer satisfies Δ_n²Ψ = 0 with Ψ(a) = Ψ(b) = 0, Δ_nΨ(b) = 0 and the
/// natural condition −a Δ_nΨ(a) = γ Ψ'(a). Fixing Ψ'(a) = 1 turns this into a
/// single boundary value solve from which γ is read off.
template <typename Scalar>
GammaResult<Scalar> gamma_n(const DomainParams& params, int n, const RadialGrid<Scalar>& g) {
  if (n < 1) throw Error(ErrorCode::InvalidSpec, "gamma_n needs n >= 1");
  validate_geometry(params);
  const Mat<Scalar> lap = laplacian_n(g, n).matrix;
  const Mat<Scalar> bilap = lap * lap;
  const Eigen::Index o = g.outer(), i = g.inner(), np = g.size();
  BoundaryConditionSet<Scalar> bc;
  bc.rows.push_back({o, RowVec<Scalar>::Unit(np, o)});
  bc.rows.push_back({o + 1, lap.row(o)});
  bc.rows.push_back({i - 1, g.d1.row(i)});
  bc.rows.push_back({i, RowVec<Scalar>::Unit(np, i)});
  const Vec<Scalar> psi = solve_bvp(bilap, Vec<Scalar>::Zero(np), bc, {Scalar(0), Scalar(0), Scalar(1), Scalar(0)});
  const Scalar lap_a = lap.row(i).dot(psi);
  const Scalar slope = g.d1.row(i).dot(psi);
  GammaResult<Scalar> out;
  out.n = n;
  out.gamma = -g.a * lap_a / slope;
  out.minimizer = psi;
  using std::isfinite;
  if (!isfinite(static_cast<double>(out.gamma)) || !(out.gamma > Scalar(0))) {
    throw Error(ErrorCode::EigSolverFailure, "variational constant is not positive and finite");
  }
  return out;
}

/// ∫ r (Δ_n Φ)² dr / Φ'(a)² for a real profile vanishing at both walls.
template <typename Scalar>
Scalar gamma_quotient(const RadialGrid<Scalar>& g, int n, const Vec<Scalar>& phi) {
  const Vec<Scalar> lp = laplacian_n(g, n).matrix * phi;
  const Scalar slope = g.d1.row(g.inner()).dot(phi);
  return g.weights.dot(lp.cwiseAbs2()) / (slope * slope);
}

struct CriticalResult {
  double mu_c_closed = 0;
  double mu_c_oracle = 0;
  std::vector<double> gamma;  // gamma[k] is γ_{k+1}
  double discrepancy = 0;
};

CriticalResult critical_result(const DomainParams& params, int n_max, int grid_n = 64);

}  // namespace annulus
