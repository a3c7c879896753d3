#include "annulus/params.hpp"

#include <cmath>
#include <sstream>

namespace annulus {

void validate_geometry(const DomainParams& p) {
  if (!std::isfinite(p.a) || !std::isfinite(p.b) || !(p.a > 0.0) || !(p.a < p.b)) {
    std::ostringstream os;
    os << "need 0 < a < b, got a=" << p.a << " b=" << p.b;
    throw Error(ErrorCode::InvalidGeometry, os.str());
  }
  if (!std::isfinite(p.alpha) || !(p.alpha > 0.0)) {
    throw Error(ErrorCode::InvalidPhysics, "slip coefficient alpha must be positive");
  }
}

DomainParams validate(const DomainParams& p) {
  validate_geometry(p);
  if (!std::isfinite(p.mu) || !(p.mu > 0.0)) {
    throw Error(ErrorCode::InvalidPhysics, "viscosity mu must be positive");
  }
  return p;
}

}  // namespace annulus
