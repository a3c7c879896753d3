#include "annulus/sweep.hpp"

#include "annulus/critical.hpp"
#include "annulus/error.hpp"

#include <algorithm>
#include <atomic>
#include <thread>

namespace annulus {

std::vector<double> SampleRange::samples() const {
  std::vector<double> out;
  if (count == 1) return {lo};
  for (int i = 0; i < count; ++i) out.push_back(lo + (hi - lo) * i / (count - 1));
  out.back() = hi;
  return out;
}

void SweepSpec::validate() const {
  auto check_range = [](const SampleRange& r, const char* name) {
    if (r.count < 1) throw Error(ErrorCode::InvalidSpec, std::string(name) + " range is empty");
    if (!(r.lo <= r.hi)) throw Error(ErrorCode::InvalidSpec, std::string(name) + " range has lo > hi");
  };
  check_range(alpha, "alpha");
  check_range(b, "b");
  if (!(std::abs(mu_offset) < 1e-2)) throw Error(ErrorCode::InvalidSpec, "|mu_offset| must be below 1e-2");
  if (n < 8) throw Error(ErrorCode::InvalidSpec, "N must be at least 8");
  if (n_theta < 6) throw Error(ErrorCode::InvalidSpec, "N_theta must be at least 6");
  if (threads < 0) throw Error(ErrorCode::InvalidSpec, "threads must be nonnegative");
  validate_geometry({a, b.lo, alpha.lo, 1.0});
  validate_geometry({a, b.hi, alpha.hi, 1.0});
}

SweepRow evaluate_point(double a, double alpha, double b, double mu_offset, int n) {
  SweepRow row;
  row.alpha = alpha;
  row.b = b;
  try {
    DomainParams p{a, b, alpha, 1.0};
    validate_geometry(p);
    row.mu_c = mu_c_closed(p);
    const double mu = row.mu_c * (1.0 + mu_offset);
    p.mu = mu;
    const auto grid = build_grid<double>(a, b, n);
    const auto eig = leading_eigenpair(p, mu, grid);
    row.lambda1 = eig.lambda1;
    const auto mc = solve_G11(p, mu, eig.lambda1, eig.psi1, grid);
    row.l = lyapunov_coeff(p, mu, eig, mc, grid).l;
    row.classification = classify(p, row.l);
  } catch (const Error& e) {
    row.status = to_string(e.code());
  } catch (const std::exception&) {
    row.status = "SolverFailure";
  }
  return row;
}

std::vector<SweepRow> sweep_l(const SweepSpec& spec, const std::vector<SweepRow>& previous) {
  spec.validate();
  const auto alphas = spec.alpha.samples();
  const auto bs = spec.b.samples();
  std::vector<SweepRow> rows(alphas.size() * bs.size());
  std::vector<std::size_t> todo;
  for (std::size_t i = 0; i < alphas.size(); ++i) {
    for (std::size_t j = 0; j < bs.size(); ++j) {
      const std::size_t k = i * bs.size() + j;
      auto hit = std::find_if(previous.begin(), previous.end(), [&](const SweepRow& r) {
        return r.ok() && r.alpha == alphas[i] && r.b == bs[j];
      });
      if (hit != previous.end()) {
        rows[k] = *hit;
      } else {
        rows[k].alpha = alphas[i];
        rows[k].b = bs[j];
        todo.push_back(k);
      }
    }
  }
  unsigned workers = spec.threads > 0 ? unsigned(spec.threads) : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min<unsigned>(workers, std::max<std::size_t>(todo.size(), 1));
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t t = next++; t < todo.size(); t = next++) {
      auto& row = rows[todo[t]];
      row = evaluate_point(spec.a, row.alpha, row.b, spec.mu_offset, spec.n);
    }
  };
  std::vector<std::thread> pool;
  for (unsigned w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  return rows;
}

SignBisection bisect_sign(const std::function<double(double)>& f, double lo, double hi, double tol, int max_iter) {
  SignBisection out;
  out.lo = lo;
  out.hi = hi;
  out.f_lo = f(lo);
  out.f_hi = f(hi);
  if (std::signbit(out.f_lo) == std::signbit(out.f_hi)) return out;
  out.flipped = true;
  while (out.hi - out.lo >= tol && out.iterations < max_iter) {
    const double mid = 0.5 * (out.lo + out.hi);
    const double fm = f(mid);
    ++out.iterations;
    if (std::signbit(fm) == std::signbit(out.f_lo)) {
      out.lo = mid;
      out.f_lo = fm;
    } else {
      out.hi = mid;
      out.f_hi = fm;
    }
  }
  return out;
}

BoundaryPoint boundary_bisect(const SweepSpec& spec, double alpha) {
  spec.validate();
  BoundaryPoint pt;
  pt.alpha = alpha;
  std::string failure;
  auto l_at = [&](double b) {
    const auto row = evaluate_point(spec.a, alpha, b, spec.mu_offset, spec.n);
    if (!row.ok()) throw Error(ErrorCode::SolverFailure, row.status + " at b=" + std::to_string(b));
    return row.l;
  };
  try {
    const auto res = bisect_sign(l_at, spec.b.lo, spec.b.hi);
    pt.b_lo = res.lo;
    pt.b_hi = res.hi;
    pt.l_lo = res.f_lo;
    pt.l_hi = res.f_hi;
    pt.iterations = res.iterations;
    pt.no_flip = !res.flipped;
    if (res.flipped) {
      pt.b_star = 0.5 * (res.lo + res.hi);
      pt.verified = std::signbit(l_at(pt.b_star - 2e-4)) != std::signbit(l_at(pt.b_star + 2e-4));
    }
  } catch (const Error& e) {
    pt.status = e.what();
  }
  return pt;
}

std::vector<BoundaryPoint> boundary_curve(const SweepSpec& spec) {
  std::vector<BoundaryPoint> out;
  for (double alpha : spec.alpha.samples()) out.push_back(boundary_bisect(spec, alpha));
  return out;
}

}  // namespace annulus
