#include "annulus/critical.hpp"

#include <array>
#include <cmath>

namespace annulus {

namespace {

// Taylor coefficients of μ_c/(aα) in ε = σ − 1 (exact rationals, generated
// symbolically). Truncation error at ε = 0.05 is below 1e-19 relative.
constexpr std::array<double, 16> kThinSeries = {
    0.0,
    1.0 / 3.0,
    -2.0 / 9.0,
    31.0 / 270.0,
    -19.0 / 648.0,
    -223.0 / 8505.0,
    27001.0 / 510300.0,
    -87653.0 / 1530900.0,
    1750757.0 / 36741600.0,
    -96693809.0 / 3031182000.0,
    126131051.0 / 7956852750.0,
    -2977686377.0 / 993015223200.0,
    -1571893718933.0 / 297904566960000.0,
    290965275859.0 / 31918346460000.0,
    -364999797419.0 / 38302015752000.0,
    9365061603997633.0 / 1196459217053100000.0,
};

constexpr double kThinSwitch = 0.05;

}  // namespace

double mu_c_closed(const DomainParams& p) {
  validate_geometry(p);
  const double sigma = p.sigma();
  const double eps = sigma - 1.0;
  const double scale = p.a * p.alpha;
  if (eps < kThinSwitch) {
    double acc = 0.0;
    for (auto it = kThinSeries.rbegin(); it != kThinSeries.rend(); ++it) acc = acc * eps + *it;
    return scale * acc;
  }
  const double s2 = sigma * sigma;
  const double s4 = s2 * s2;
  const double ls = std::log1p(eps);
  const double num = 1.0 + 3.0 * s4 - 4.0 * s2 - 4.0 * s4 * ls;
  const double den = 2.0 * (s4 - 1.0 - 4.0 * s4 * ls);
  return scale * num / den;
}

CriticalResult critical_result(const DomainParams& params, int n_max, int grid_n) {
  CriticalResult out;
  out.mu_c_closed = mu_c_closed(params);
  out.mu_c_oracle = mu_c_oracle<double>(params);
  out.discrepancy = std::abs(out.mu_c_closed - out.mu_c_oracle) / out.mu_c_closed;
  const auto grid = build_grid<double>(params.a, params.b, grid_n);
  for (int n = 1; n <= n_max; ++n) out.gamma.push_back(gamma_n(params, n, grid).gamma);
  return out;
}

}  // namespace annulus
