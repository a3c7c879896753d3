#pragma once

#include "annulus/error.hpp"

namespace annulus {

/// Geometry and physics of the slip annulus a < r < b.
///
/// `alpha` is the Navier-slip coefficient on the inner wall and `mu` the
/// kinematic viscosity. The radius ratio is always derived, never stored.
struct DomainParams {
  double a = 1.0;
  double b = 3.0;
  double alpha = 5.0;
  double mu = 1.0;

  double sigma() const { return b / a; }
};

/// Throws InvalidGeometry / InvalidPhysics; returns the params unchanged otherwise.
DomainParams validate(const DomainParams& params);

/// Geometry-only check used by routines that ignore mu (closed-form threshold).
void validate_geometry(const DomainParams& params);

}  // namespace annulus
