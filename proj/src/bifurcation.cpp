#include "annulus/bifurcation.hpp"

#include <cmath>
#include <sstream>

namespace annulus {

using cd = std::complex<double>;
constexpr cd I{0.0, 1.0};

EigenResult leading_eigenpair(const DomainParams& params, double mu, const RadialGrid<double>& grid, int n) {
  validate(DomainParams{params.a, params.b, params.alpha, mu});
  const auto spec = mode_spectrum<double>(params, mu, grid, n);
  const auto& top = spec.front();

  Eigen::VectorXcd psi = top.vector;
  const double norm = std::sqrt(integrate_r(grid, psi.cwiseAbs2()));
  if (!(norm > 0.0)) throw Error(ErrorCode::EigSolverFailure, "zero eigenvector");
  psi /= norm;
  const cd slope = grid.d1.row(grid.inner()).cast<cd>().dot(psi);
  if (std::abs(slope) > 0.0) psi *= std::conj(slope) / std::abs(slope);

  EigenResult out;
  out.lambda1 = top.value.real();
  out.lambda1_imag = top.value.imag();
  out.psi1 = {n, psi};
  out.mu = mu;
  return out;
}

ModalField<double> interaction(const ModalField<double>& f, const ModalField<double>& g,
                               const RadialGrid<double>& grid) {
  if (f.size() != grid.size() || g.size() != grid.size()) throw Error(ErrorCode::GridMismatch, "interaction operands");
  const Eigen::MatrixXd lap = laplacian_n(grid, g.n).matrix;
  const Eigen::VectorXcd w = lap.cast<cd>() * g.values;
  const Eigen::VectorXcd dw = grid.d1.cast<cd>() * w;
  const Eigen::VectorXcd df = grid.d1.cast<cd>() * f.values;
  const Eigen::VectorXcd inv_r = grid.inv_r.cast<cd>();
  Eigen::VectorXcd out = I * (double(f.n) * f.values.cwiseProduct(inv_r).cwiseProduct(dw) -
                              double(g.n) * df.cwiseProduct(inv_r).cwiseProduct(w));
  return {f.n + g.n, std::move(out)};
}

ManifoldCoeffs solve_G11(const DomainParams& params, double mu, double lambda1, const ModalField<double>& psi1,
                         const RadialGrid<double>& grid) {
  const Eigen::MatrixXd lap2 = laplacian_n(grid, 2).matrix;
  const Eigen::MatrixXd op = mu * (lap2 * lap2) - 2.0 * lambda1 * lap2;
  const Eigen::VectorXcd rhs = -interaction(psi1, psi1, grid).values;
  const auto bcs = navier_slip_bcs(grid, params.alpha, mu);
  ManifoldCoeffs mc;
  mc.g11 = {2, solve_bvp(op, rhs, bcs)};

  Eigen::VectorXcd res = op.cast<cd>() * mc.g11.values - rhs;
  for (const auto& row : bcs.rows) res(row.position) = 0.0;
  const double scale = rhs.cwiseAbs().maxCoeff();
  mc.residual = scale > 0.0 ? res.cwiseAbs().maxCoeff() / scale : 0.0;
  return mc;
}

LyapunovResult lyapunov_coeff(const DomainParams& params, double mu, const EigenResult& eig, const ManifoldCoeffs& mc,
                              const RadialGrid<double>& grid) {
  (void)params;
  (void)mu;
  const ModalField<double> psi_bar{-eig.psi1.n, eig.psi1.values.conjugate()};
  const auto h1 = interaction(psi_bar, mc.g11, grid);
  const auto h2 = interaction(mc.g11, psi_bar, grid);
  const Eigen::VectorXcd h = h1.values + h2.values;
  const Eigen::VectorXcd& psi = eig.psi1.values;

  const cd num = integrate_r(grid, h.cwiseProduct(psi.conjugate()));
  const Eigen::VectorXcd dpsi = grid.d1.cast<cd>() * psi;
  const double n2 = double(eig.psi1.n) * eig.psi1.n;
  const double kinetic =
      integrate_r(grid, dpsi.cwiseAbs2() + n2 * psi.cwiseAbs2().cwiseProduct(grid.inv_r.cwiseAbs2()));
  const cd l = -num / kinetic;

  // Plain pairing: w = Δ₁⁻¹ h with Dirichlet walls, then (w, ψ₁)/(ψ₁, ψ₁).
  const Eigen::MatrixXd lap1 = laplacian_n(grid, eig.psi1.n).matrix;
  const Eigen::VectorXcd w = solve_bvp(lap1, h, dirichlet_bcs(grid));
  const cd plain = integrate_r(grid, w.cwiseProduct(psi.conjugate())) / integrate_r(grid, psi.cwiseAbs2());

  LyapunovResult out;
  out.l = l.real();
  out.imag = l.imag();
  out.l_plain = plain.real();
  return out;
}

std::string to_string(Classification c) {
  switch (c) {
    case Classification::Supercritical: return "supercritical";
    case Classification::Subcritical: return "subcritical";
    case Classification::Degenerate: return "degenerate";
  }
  return "unknown";
}

double degeneracy_tolerance(const DomainParams& p) {
  const double w = p.b - p.a;
  return 1e-10 * p.a * p.alpha / (w * w * w * w);
}

Classification classify(const DomainParams& params, double l) {
  const double tol = degeneracy_tolerance(params);
  if (l < -tol) return Classification::Supercritical;
  if (l > tol) return Classification::Subcritical;
  return Classification::Degenerate;
}

std::vector<ModalField<double>> BifurcationReport::state(cd s) const {
  return {ModalField<double>{1, s * psi1.values}, ModalField<double>{2, s * s * g11.values}};
}

PhysicalField BifurcationReport::field(cd s, int ntheta) const { return synthesize_physical(radii, state(s), ntheta); }

std::pair<PhysicalField, PhysicalField> BifurcationReport::velocity(cd s, int ntheta,
                                                                    const RadialGrid<double>& grid) const {
  std::vector<ModalField<double>> vr, vt;
  for (const auto& m : state(s)) {
    vr.push_back({m.n, -I * double(m.n) * m.values.cwiseProduct(grid.inv_r.cast<cd>())});
    vt.push_back({m.n, grid.d1.cast<cd>() * m.values});
  }
  return {synthesize_physical(radii, vr, ntheta), synthesize_physical(radii, vt, ntheta)};
}

BifurcationReport classify_and_build(const DomainParams& params, double mu, const EigenResult& eig,
                                     const ManifoldCoeffs& mc, double l,
                                     const RadialGrid<double>& grid) {
  if (!std::isfinite(l) || !std::isfinite(eig.lambda1)) {
    throw Error(ErrorCode::DegenerateCoefficient, "non-finite growth rate or Lyapunov coefficient");
  }
  BifurcationReport rep;
  rep.params = params;
  rep.params.mu = mu;
  rep.lambda1 = eig.lambda1;
  rep.l = l;
  rep.classification = classify(params, l);
  if (rep.classification == Classification::Degenerate) {
    std::ostringstream os;
    os << "|l| = " << std::abs(l) << " is below the degeneracy tolerance " << degeneracy_tolerance(params);
    throw Error(ErrorCode::DegenerateCoefficient, os.str());
  }
  if (eig.psi1.size() != grid.size()) throw Error(ErrorCode::GridMismatch, "eigenfunction length");
  rep.radii = grid.nodes;
  rep.psi1 = eig.psi1;
  rep.g11 = mc.g11;
  if (eig.lambda1 / l < 0.0) {
    rep.amplitude = std::sqrt(-eig.lambda1 / l);
  } else if (rep.classification == Classification::Supercritical) {
    rep.note = "mu is above the critical viscosity: no bifurcated steady states on this side";
  } else {
    rep.note = "mu is below the critical viscosity: subcritical branch exists only for mu above it";
  }
  return rep;
}

BifurcationReport analyze_bifurcation(const DomainParams& params, double mu, const RadialGrid<double>& grid) {
  const auto eig = leading_eigenpair(params, mu, grid);
  const auto mc = solve_G11(params, mu, eig.lambda1, eig.psi1, grid);
  const auto ly = lyapunov_coeff(params, mu, eig, mc, grid);
  return classify_and_build(params, mu, eig, mc, ly.l, grid);
}

}  // namespace annulus
