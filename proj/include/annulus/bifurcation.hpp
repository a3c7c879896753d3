#pragma once

#include "annulus/modal_field.hpp"
#include "annulus/modal_operators.hpp"
#include "annulus/params.hpp"
#include "annulus/radial_grid.hpp"

#include <complex>
#include <optional>
#include <string>
#include <vector>

namespace annulus {

/// Spectrum of the linearized streamfunction problem for wavenumber n,
///   μ Δ_n² Ψ = λ Δ_n Ψ  with the four wall conditions.
/// Eigenvalues above 1e6·μ/(b−a)² in modulus are treated as spurious.
template <typename Scalar>
std::vector<EigenPair<Scalar>> mode_spectrum(const DomainParams& params, Scalar mu, const RadialGrid<Scalar>& g,
                                             int n = 1) {
  const Mat<Scalar> lap = laplacian_n(g, n).matrix;
  const Mat<Scalar> stiff = mu * (lap * lap);
  const auto bcs = navier_slip_bcs(g, Scalar(params.alpha), mu);
  const Scalar width = g.b - g.a;
  const Scalar cap = Scalar(1e6) * mu / (width * width);
  auto spec = generalized_eig(stiff, lap, bcs, cap);
  if (spec.empty()) throw Error(ErrorCode::EigSolverFailure, "no finite eigenvalues survived the filter");
  return spec;
}

template <typename Scalar>
Scalar leading_eigenvalue(const DomainParams& params, Scalar mu, const RadialGrid<Scalar>& g, int n = 1) {
  return mode_spectrum(params, mu, g, n).front().value.real();
}

/// Leading eigenpair of the mode-n problem. Ψ₁ is scaled to ∫|Ψ₁|² r dr = 1
/// with Ψ₁'(a) real and positive.
struct EigenResult {
  double lambda1 = 0;
  double lambda1_imag = 0;
  ModalField<double> psi1;
  double mu = 0;
};

EigenResult leading_eigenpair(const DomainParams& params, double mu, const RadialGrid<double>& grid, int n = 1);

/// Mode content of the advection term 𝔾(f, g) = (1/r)(∂_θ f ∂_r − ∂_r f ∂_θ) Δ g.
/// Operands may carry negative wavenumbers (conjugate partners).
ModalField<double> interaction(const ModalField<double>& f, const ModalField<double>& g,
                               const RadialGrid<double>& grid);

/// Quadratic center-manifold coefficient: g11 = G₁₁ e^{2iθ}, with g12 = 0 and
/// g22 = conj(g11) implied.
struct ManifoldCoeffs {
  ModalField<double> g11;
  double residual = 0;  // relative interior residual of the solve
};

/// Solves μΔ₂²G − 2λ₁Δ₂G = −𝔾(ψ₁, ψ₁) with the four wall conditions.
ManifoldCoeffs solve_G11(const DomainParams& params, double mu, double lambda1, const ModalField<double>& psi1,
                         const RadialGrid<double>& grid);

struct LyapunovResult {
  double l = 0;
  double imag = 0;        // imaginary residue of the projection
  double l_plain = 0;     // same cubic term projected with the plain ψ-L² pairing and A⁻¹
};

/// Cubic coefficient of the reduced equation dz/dt = λ₁z + l z|z|².
///
/// The mode-1 part of 𝔾(ψ̄₁, g11) + 𝔾(g11, ψ̄₁) is projected on ψ₁ with the
/// kinetic-energy pairing, under which the linear operator is self-adjoint.
/// That gives l = ⟨h, ψ₁⟩ / ⟨Δ₁ψ₁, ψ₁⟩.
LyapunovResult lyapunov_coeff(const DomainParams& params, double mu, const EigenResult& eig,
                              const ManifoldCoeffs& mc, const RadialGrid<double>& grid);

enum class Classification { Supercritical, Subcritical, Degenerate };

std::string to_string(Classification c);

/// |l| below 1e-10·aα/(b−a)⁴ counts as degenerate.
double degeneracy_tolerance(const DomainParams& params);
Classification classify(const DomainParams& params, double l);

struct BifurcationReport {
  DomainParams params;
  double lambda1 = 0;
  double l = 0;
  Classification classification = Classification::Degenerate;
  std::optional<double> amplitude;  // |s| = sqrt(−λ₁/l) when λ₁/l < 0
  std::string note;
  Eigen::VectorXd radii;
  ModalField<double> psi1;
  ModalField<double> g11;

  /// Modes of ψ_s = sΨ₁e^{iθ} + s²G₁₁e^{2iθ} + c.c.
  std::vector<ModalField<double>> state(std::complex<double> s) const;
  PhysicalField field(std::complex<double> s, int ntheta) const;
  /// v_r = −(1/r)∂_θψ and v_θ = ∂_rψ on the same lattice.
  std::pair<PhysicalField, PhysicalField> velocity(std::complex<double> s, int ntheta,
                                                   const RadialGrid<double>& grid) const;
};

/// Throws DegenerateCoefficient when |l| is within the tolerance.
BifurcationReport classify_and_build(const DomainParams& params, double mu, const EigenResult& eig,
                                     const ManifoldCoeffs& mc, double l,
                                     const RadialGrid<double>& grid);

/// Leading pair, G₁₁, l and the report in one call.
BifurcationReport analyze_bifurcation(const DomainParams& params, double mu, const RadialGrid<double>& grid);

}  // namespace annulus
