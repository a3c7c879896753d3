#pragma once

// Scalar plumbing shared by the templated radial core. Double is the working
// precision; Quad exists because fourth-order collocation operators amplify
// rounding by roughly N^8 and some grid-level checks need the headroom.

#include <boost/multiprecision/eigen.hpp>
#include <boost/multiprecision/float128.hpp>

#include <Eigen/Dense>

#include <cmath>
#include <complex>

namespace annulus {

using Quad = boost::multiprecision::float128;

template <typename Scalar>
using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using RowVec = Eigen::Matrix<Scalar, 1, Eigen::Dynamic>;
template <typename Scalar>
using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using CVec = Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, 1>;

template <typename Scalar>
inline Scalar pi() {
  using std::atan;
  return Scalar(4) * atan(Scalar(1));
}

template <typename Scalar>
inline double to_double(const Scalar& x) {
  return static_cast<double>(x);
}

template <typename Scalar>
inline std::complex<double> to_double(const std::complex<Scalar>& z) {
  return {static_cast<double>(z.real()), static_cast<double>(z.imag())};
}

}  // namespace annulus
