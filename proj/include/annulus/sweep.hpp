#pragma once

#include "annulus/bifurcation.hpp"
#include "annulus/params.hpp"

#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace annulus {

/// Closed interval sampled at `count` evenly spaced points (count = 1 gives lo).
struct SampleRange {
  double lo = 0;
  double hi = 0;
  int count = 1;

  std::vector<double> samples() const;
};

struct SweepSpec {
  double a = 1.0;
  SampleRange alpha{5.0, 15.0, 11};
  SampleRange b{5.0, 15.0, 11};
  double mu_offset = -1e-4;  // l is evaluated at μ_c(1 + mu_offset)
  int n = 48;
  int n_theta = 32;
  int threads = 0;           // 0 picks the hardware concurrency

  void validate() const;  // throws InvalidSpec
};

struct SweepRow {
  double alpha = 0;
  double b = 0;
  double mu_c = std::nan("");
  double lambda1 = std::nan("");
  double l = std::nan("");
  Classification classification = Classification::Degenerate;
  std::string status = "ok";  // "ok" or the error code name of the failure

  bool ok() const { return status == "ok"; }
};

/// One point of the sweep. Failures are captured in `status`, never thrown.
SweepRow evaluate_point(double a, double alpha, double b, double mu_offset, int n);

/// Row-major over (alpha, b): alpha is the outer index. Rows of `previous` with
/// matching coordinates and status "ok" are reused instead of recomputed.
std::vector<SweepRow> sweep_l(const SweepSpec& spec, const std::vector<SweepRow>& previous = {});

struct SignBisection {
  bool flipped = false;
  double lo = 0, hi = 0;        // final bracket
  double f_lo = 0, f_hi = 0;    // function values at the bracket ends
  int iterations = 0;
};

/// Bisects a sign change of f on [lo, hi] until hi − lo < tol or max_iter is hit.
/// Returns flipped = false without iterating when the endpoint signs agree.
SignBisection bisect_sign(const std::function<double(double)>& f, double lo, double hi, double tol = 1e-4,
                          int max_iter = 40);

struct BoundaryPoint {
  double alpha = 0;
  bool no_flip = true;
  double b_star = std::nan("");
  double b_lo = std::nan(""), b_hi = std::nan("");
  double l_lo = std::nan(""), l_hi = std::nan("");  // l at the bracket ends
  int iterations = 0;
  bool verified = false;  // sign(l(b*−2e−4)) ≠ sign(l(b*+2e−4))
  std::string status = "ok";
};

/// Locates b* in spec.b where sign(l) changes for this α. A range with the same sign
/// at both ends is a normal outcome (no_flip = true).
BoundaryPoint boundary_bisect(const SweepSpec& spec, double alpha);

/// boundary_bisect for every α sample, in order.
std::vector<BoundaryPoint> boundary_curve(const SweepSpec& spec);

}  // namespace annulus
