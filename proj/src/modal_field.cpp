#include "annulus/modal_field.hpp"

#include <cmath>

namespace annulus {

PhysicalField synthesize_physical(const Eigen::VectorXd& radii,
                                  const std::vector<ModalField<double>>& modes, int ntheta) {
  if (ntheta < 1) throw Error(ErrorCode::InvalidSpec, "ntheta must be positive");
  PhysicalField f;
  f.r = radii;
  f.theta = angular_lattice(ntheta);
  f.values = Eigen::MatrixXd::Zero(radii.size(), ntheta);
  for (const auto& m : modes) {
    if (m.size() != radii.size()) throw Error(ErrorCode::GridMismatch, "mode length differs from grid");
    if (m.n < 0) throw Error(ErrorCode::InvalidSpec, "only n >= 0 modes are stored");
    for (int j = 0; j < ntheta; ++j) {
      const std::complex<double> phase = std::polar(1.0, m.n * f.theta(j));
      if (m.n == 0) {
        f.values.col(j) += m.values.real();
      } else {
        f.values.col(j) += 2.0 * (m.values * phase).real();
      }
    }
  }
  return f;
}

std::vector<ModalField<double>> analyze_physical(const PhysicalField& field, int n_max) {
  const int nt = static_cast<int>(field.ntheta());
  std::vector<ModalField<double>> out;
  out.reserve(n_max + 1);
  for (int n = 0; n <= n_max; ++n) {
    ModalField<double> m{n, Eigen::VectorXcd::Zero(field.nr())};
    for (int j = 0; j < nt; ++j) {
      m.values += field.values.col(j).cast<std::complex<double>>() * std::polar(1.0, -n * field.theta(j));
    }
    m.values /= static_cast<double>(nt);
    out.push_back(std::move(m));
  }
  return out;
}

std::vector<ModalField<double>> rotate(std::vector<ModalField<double>> modes, double phi) {
  for (auto& m : modes) m.values *= std::polar(1.0, -m.n * phi);
  return modes;
}

}  // namespace annulus
