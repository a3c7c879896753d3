#pragma once

#include "annulus/error.hpp"
#include "annulus/radial_grid.hpp"
#include "annulus/scalar.hpp"

#include <complex>
#include <vector>

namespace annulus {

/// Radial profile of one angular Fourier mode, psi(r, theta) ⊃ values(r) e^{i n theta}.
///
/// Only n >= 0 is ever stored; the n < 0 partner is the complex conjugate, so a
/// stored mode n > 0 contributes values e^{inθ} + conj(values) e^{-inθ} to a
/// real field.
template <typename Scalar = double>
struct ModalField {
  int n = 0;
  CVec<Scalar> values;

  Eigen::Index size() const { return values.size(); }
};

/// Real field sampled on the tensor lattice (r_i, theta_j), theta_j = 2πj/ntheta.
/// values(i, j) with i the radial index (outer wall first, as in RadialGrid).
struct PhysicalField {
  Eigen::VectorXd r;
  Eigen::VectorXd theta;
  Eigen::MatrixXd values;

  Eigen::Index nr() const { return values.rows(); }
  Eigen::Index ntheta() const { return values.cols(); }
};

inline Eigen::VectorXd angular_lattice(int ntheta) {
  Eigen::VectorXd th(ntheta);
  for (int j = 0; j < ntheta; ++j) th(j) = 2.0 * pi<double>() * j / ntheta;
  return th;
}

/// Inverse angular transform of a conjugate-symmetric mode set.
PhysicalField synthesize_physical(const Eigen::VectorXd& radii,
                                  const std::vector<ModalField<double>>& modes, int ntheta);

inline PhysicalField synthesize_physical(const RadialGrid<double>& grid,
                                         const std::vector<ModalField<double>>& modes, int ntheta) {
  return synthesize_physical(grid.nodes, modes, ntheta);
}

/// Forward angular transform; returns modes 0..n_max. Exact for ntheta >= 2 n_max + 2.
std::vector<ModalField<double>> analyze_physical(const PhysicalField& field, int n_max);

/// Rotate a mode set so that the resulting field is f(r, θ - phi).
std::vector<ModalField<double>> rotate(std::vector<ModalField<double>> modes, double phi);

}  // namespace annulus
