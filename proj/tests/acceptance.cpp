// Acceptance suite: one PASS/FAIL line per criterion, tolerances fixed below.
#include "annulus/bifurcation.hpp"
#include "annulus/critical.hpp"
#include "annulus/simulator.hpp"
#include "annulus/sweep.hpp"

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <functional>
#include <random>
#include <string>

using namespace annulus;
using cd = std::complex<double>;
using Clock = std::chrono::steady_clock;

namespace {

constexpr double kMuCValue = 1.3404, kMuCTol = 2e-4, kMuCTime = 1e-3;
constexpr double kOracleTol = 1e-8, kOracleTime = 1.0;
constexpr double kPesTol = 1e-5, kPesTime = 1.0;
constexpr double kKernelTol = 1e-8;
constexpr double kSaturationTol = 0.10, kPlateauTol = 0.01, kSaturationTime = 300.0;
constexpr double kRateTol = 1e-3;
constexpr double kEnergyTol = 1e-5, kEnergyRatioLo = 3.5, kEnergyRatioHi = 4.5;
constexpr double kEscapeTol = 0.05;
constexpr double kEquivTol = 1e-8;

const DomainParams kBase{1, 3, 5, 1};

int failures = 0;

void report(const std::string& id, bool pass, const std::string& detail) {
  std::printf("%s  %-3s %s\n", pass ? "PASS" : "FAIL", id.c_str(), detail.c_str());
  std::fflush(stdout);
  failures += !pass;
}

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* f, ...) __attribute__((format(printf, 1, 2)));
std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

void criterion_1() {
  const auto t0 = Clock::now();
  const double mc = mu_c_closed(kBase);
  const double once = seconds_since(t0);
  report("1", std::abs(mc - kMuCValue) <= kMuCTol && once < kMuCTime,
         fmt("mu_c_closed(1,3,5) = %.10f (target %.4f +/- %.0e), %.2e s", mc, kMuCValue, kMuCTol, once));
}

void criterion_2() {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const auto t0 = Clock::now();
  double worst = 0;
  for (int k = 0; k < 20; ++k) {
    const double a = 1.0 + 8.9 * unit(rng);
    const double b = a + (10.0 - a) * (0.001 + 0.999 * unit(rng));
    const DomainParams p{a, b, 20.0 * (1.0 - unit(rng)), 1};
    const double closed = mu_c_closed(p);
    worst = std::max(worst, std::abs(to_double(mu_c_oracle<Quad>(p)) - closed) / closed);
  }
  const double t = seconds_since(t0);
  report("2", worst < kOracleTol && t < kOracleTime,
         fmt("20 random triples, max |oracle - closed|/closed = %.2e (tol %.0e), %.3f s", worst, kOracleTol, t));
}

void criterion_3() {
  const auto t0 = Clock::now();
  const double mc = mu_c_closed(kBase);
  const auto g = build_grid<double>(1.0, 3.0, 64);
  auto lam = [&](double mu) { return leading_eigenvalue<double>(kBase, mu, g); };
  const double at = lam(mc), above = lam(1.1 * mc), below = lam(0.9 * mc);
  const double h = 1e-3 * mc;
  const double slope = (lam(mc + h) - lam(mc - h)) / (2 * h);
  const double t = seconds_since(t0);
  report("3", std::abs(at) < kPesTol && above < 0 && below > 0 && slope < 0 && t < kPesTime,
         fmt("N=64: lambda1(mu_c) = %.2e, lambda1(1.1mu_c) = %.4f, lambda1(0.9mu_c) = %.4f, dlambda/dmu = %.4f, %.3f s",
             at, above, below, slope, t));
}

void criterion_4() {
  using std::log;
  const auto gq = build_grid<Quad>(Quad(1), Quad(3), 64);
  const auto gd = build_grid<double>(1.0, 3.0, 64);
  const Mat<Quad> bq = bilaplacian_n(gq, 1).matrix;
  const Eigen::MatrixXd bd = bilaplacian_n(gd, 1).matrix;
  const char* names[4] = {"r^3", "r", "r ln r", "1/r"};
  const std::function<Quad(Quad)> kernel[4] = {[](Quad r) { return r * r * r; }, [](Quad r) { return r; },
                                               [](Quad r) { return r * log(r); }, [](Quad r) { return 1 / r; }};
  double worst = 0, worst_double = 0;
  std::string detail = "N=64 float128 residuals:";
  for (int k = 0; k < 4; ++k) {
    Vec<Quad> v(gq.size());
    for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = kernel[k](gq.nodes(i));
    const double res = to_double((bq * v).cwiseAbs().maxCoeff() / v.cwiseAbs().maxCoeff());
    const Eigen::VectorXd vd = v.cast<double>();
    worst_double = std::max(worst_double, (bd * vd).cwiseAbs().maxCoeff() / vd.cwiseAbs().maxCoeff());
    worst = std::max(worst, res);
    detail += fmt(" %s %.1e", names[k], res);
  }
  report("4", worst < kKernelTol, detail + fmt(" (tol %.0e; double gives %.1e)", kKernelTol, worst_double));
}

void criterion_5() {
  const auto g = build_grid<Quad>(Quad(1), Quad(3), 64);
  std::vector<double> gam;
  bool increasing = true;
  for (int n = 1; n <= 5; ++n) {
    gam.push_back(to_double(gamma_n<Quad>(kBase, n, g).gamma));
    if (n > 1) increasing &= gam[n - 2] < gam[n - 1];
  }
  report("5", increasing,
         fmt("gamma_1..5 = %.6f %.6f %.6f %.6f %.6f", gam[0], gam[1], gam[2], gam[3], gam[4]));
}

void criterion_6() {
  const auto g = build_grid<double>(1.0, 3.0, 48);
  const double mu = 1.3403;
  const auto e = leading_eigenpair(kBase, mu, g);
  const auto mc = solve_G11(kBase, mu, e.lambda1, e.psi1, g);
  const auto ly = lyapunov_coeff(kBase, mu, e, mc, g);
  const auto cls = classify(kBase, ly.l);
  const double s = std::sqrt(-e.lambda1 / ly.l);
  report("6a", ly.l < 0 && cls == Classification::Supercritical,
         fmt("l(1,3,5; mu=1.3403) = %.6f -> %s, |s| = %.5f (unit-L2 Psi1; published -0.2783 and 0.0578 use another "
             "normalization)",
             ly.l, to_string(cls).c_str(), s));

  int neg = 0, pos = 0, other = 0;
  double lmin = INFINITY, lmax = -INFINITY;
  for (const auto& range : {SampleRange{5, 15, 11}, SampleRange{4.99, 5.02, 4}}) {
    SweepSpec spec;
    spec.alpha = {5, 15, 11};
    spec.b = range;
    for (const auto& row : sweep_l(spec)) {
      if (!row.ok()) {
        ++other;
        continue;
      }
      lmin = std::min(lmin, row.l);
      lmax = std::max(lmax, row.l);
      if (row.classification == Classification::Supercritical) ++neg;
      else if (row.classification == Classification::Subcritical) ++pos;
      else ++other;
    }
  }
  report("6b", neg > 0 && pos > 0,
         fmt("a=1, alpha in [5,15], b in [5,15] and {4.99..5.02}: %d supercritical, %d subcritical, %d other; "
             "l in [%.3e, %.3e]",
             neg, pos, other, lmin, lmax));
}

void criterion_7() {
  const auto t0 = Clock::now();
  DomainParams p = kBase;
  p.mu = 0.99 * mu_c_closed(kBase);
  const auto g = build_grid<double>(1.0, 3.0, 48);
  const auto rep = analyze_bifurcation(p, p.mu, g);
  const double predicted = rep.field(*rep.amplitude, 128).values.cwiseAbs().maxCoeff();
  SimConfig cfg;
  cfg.n_theta = 32;
  const Simulator sim(p, g, cfg);
  const auto e = leading_eigenpair(p, p.mu, g);
  std::vector<double> plateau;
  for (double delta : {1e-3, 3e-3, 1e-2}) {
    auto s = sim.init_from_mode(e, delta);
    double last = 0;
    // run in 10-unit chunks until max|psi| stops moving
    for (int chunk = 0; chunk < 40; ++chunk) {
      s = sim.run(s, 0.01, 1000, 1000);
      const double now = s.history.back().max_psi;
      if (s.t > 50 && std::abs(now - last) < 1e-7 * now) break;
      last = now;
    }
    plateau.push_back(s.history.back().max_psi);
  }
  const double hi = *std::max_element(plateau.begin(), plateau.end());
  const double lo = *std::min_element(plateau.begin(), plateau.end());
  const double spread = (hi - lo) / hi;
  const double err = std::abs(plateau[0] - predicted) / predicted;
  const double t = seconds_since(t0);
  report("7", err < kSaturationTol && spread < kPlateauTol && t < kSaturationTime,
         fmt("mu=0.99mu_c: simulated max|psi| = %.5f %.5f %.5f, predicted %.5f, error %.2f%% (tol %.0f%%), "
             "spread %.1e (tol %.0e), %.1f s",
             plateau[0], plateau[1], plateau[2], predicted, 100 * err, 100 * kSaturationTol, spread, kPlateauTol, t));
}

void criterion_8() {
  std::string detail;
  bool pass = true;
  const auto g = build_grid<double>(1.0, 3.0, 48);
  for (double mu : {1.2, 2.0}) {
    DomainParams p = kBase;
    p.mu = mu;
    SimConfig cfg;
    cfg.nonlinear = false;
    const Simulator sim(p, g, cfg);
    const auto e = leading_eigenpair(p, mu, g);
    auto s = sim.run(sim.init_from_mode(e, 1e-3), 0.005, 1000, 10);
    const double rate = fit_growth_rate(s.history.to_vector());
    const double rel = std::abs(rate - e.lambda1) / std::abs(e.lambda1);
    pass &= rel < kRateTol;
    detail += fmt("mu=%.1f: rate %.6f vs lambda1 %.6f (rel %.1e); ", mu, rate, e.lambda1, rel);
  }
  report("8", pass, detail + fmt("tol %.0e", kRateTol));
}

void criterion_9() {
  DomainParams p = kBase;
  p.mu = 2 * mu_c_closed(kBase);
  const auto g = build_grid<double>(1.0, 3.0, 48);
  SimConfig cfg;
  cfg.nonlinear = false;
  const Simulator sim(p, g, cfg);
  const auto e = leading_eigenpair(p, p.mu, g);
  std::vector<double> res;
  for (double dt : {1e-3, 5e-4}) {
    auto s = sim.run(sim.init_from_mode(e, 1e-3), dt, long(std::lround(0.1 / dt)), 1000000);
    double worst = 0;
    for (int k = 0; k < 10; ++k) {
      const auto next = sim.step(s, dt);
      worst = std::max(worst, energy_residual(sim, s, next, dt));
      s = next;
    }
    res.push_back(worst);
  }
  const double ratio = res[0] / res[1];
  report("9", res[1] < kEnergyTol && ratio > kEnergyRatioLo && ratio < kEnergyRatioHi,
         fmt("mu=2mu_c linear run: residual %.2e at dt=1e-3, %.2e at dt=5e-4 (tol %.0e), ratio %.2f", res[0], res[1],
             kEnergyTol, ratio));
}

void criterion_10() {
  DomainParams p = kBase;
  p.mu = 2 * mu_c_closed(kBase);
  const auto g = build_grid<double>(1.0, 3.0, 48);
  const Simulator sim(p, g, SimConfig{});
  const double lambda1 = leading_eigenpair(p, p.mu, g).lambda1;
  std::vector<ModalField<double>> modes;
  for (int n = 1; n <= 3; ++n) {
    modes.push_back({n, std::polar(1e-3 / n, 0.7 * n) * leading_eigenpair(p, p.mu, g, n).psi1.values});
  }
  auto s = sim.init_from_modes(modes);
  const double v0 = sim.diagnostics(s).norm();
  s = sim.run(s, 0.005, 600, 5);
  double worst = -INFINITY;
  std::size_t samples = 0;
  for (const auto& d : s.history.to_vector()) {
    worst = std::max(worst, d.norm() / (v0 * std::exp(lambda1 * d.t)));
    ++samples;
  }
  report("10", worst <= 1.0,
         fmt("mu=2mu_c, modes 1-3: max ||v(t)|| / (||v0|| e^{lambda1 t}) = %.6f over %zu samples", worst, samples));
}

void criterion_11() {
  DomainParams p = kBase;
  p.mu = 1.2;
  const auto g = build_grid<double>(1.0, 3.0, 48);
  const Simulator sim(p, g, SimConfig{});
  const auto e = leading_eigenpair(p, p.mu, g);
  const auto res = escape_experiment(sim, e, {1e-6, 1e-5, 1e-4}, 1e-2, 0.005, 50);
  const double rel = std::abs(res.slope * e.lambda1 - 1);
  report("11", rel < kEscapeTol,
         fmt("mu=1.2: T = %.4f %.4f %.4f, slope %.5f vs 1/lambda1 %.5f (rel %.1e, tol %.0e)", res.rows[0].escape_time,
             res.rows[1].escape_time, res.rows[2].escape_time, res.slope, 1 / e.lambda1, rel, kEscapeTol));
}

void criterion_12() {
  const auto g = build_grid<double>(1.0, 3.0, 48);
  const double mu = 1.3403;
  const auto rep = analyze_bifurcation(kBase, mu, g);
  const double s = *rep.amplitude;
  const int nt = 64;
  const auto base = rep.field(s, nt);
  const double scale = base.values.cwiseAbs().maxCoeff();
  double state_err = 0;
  for (int k = 1; k < 4; ++k) {
    // a quarter turn of the phase is a lattice shift of nt/4 samples
    const auto turned = rep.field(std::polar(s, 2 * pi<double>() * k / 4), nt);
    for (int j = 0; j < nt; ++j) {
      state_err = std::max(state_err, (turned.values.col(j) - base.values.col((j + k * nt / 4) % nt)).cwiseAbs().maxCoeff());
    }
  }
  state_err /= scale;

  DomainParams p = kBase;
  p.mu = 1.2;
  const Simulator sim(p, g, SimConfig{});
  std::vector<ModalField<double>> modes;
  for (int n = 1; n <= 3; ++n) {
    modes.push_back({n, std::polar(0.05, 1.3 * n) * leading_eigenpair(p, p.mu, g, n).psi1.values});
  }
  const double phi = 0.9;
  auto x = sim.init_from_modes(modes);
  auto y = sim.rotated(x, phi);
  for (int k = 0; k < 100; ++k) {
    x = sim.step(x, 0.01);
    y = sim.step(y, 0.01);
  }
  const auto xr = sim.rotated(x, phi);
  double sim_err = 0, sim_scale = 0;
  for (std::size_t k = 0; k < x.psi_modes.size(); ++k) {
    sim_err = std::max(sim_err, (xr.psi_modes[k].values - y.psi_modes[k].values).cwiseAbs().maxCoeff());
    sim_scale = std::max(sim_scale, x.psi_modes[k].values.cwiseAbs().maxCoeff());
  }
  sim_err /= sim_scale;

  auto e = leading_eigenpair(kBase, mu, g);
  e.psi1.values *= std::polar(3.0, 0.4);
  const auto mc = solve_G11(kBase, mu, e.lambda1, e.psi1, g);
  const auto rescaled = classify_and_build(kBase, mu, e, mc, lyapunov_coeff(kBase, mu, e, mc, g).l, g);
  // Ψ₁ carries an extra phase 0.4, so the matching state uses s e^{−0.4i}
  const auto other = rescaled.field(std::polar(*rescaled.amplitude, -0.4), nt);
  const double norm_err = (other.values - base.values).cwiseAbs().maxCoeff() / scale;

  report("12", state_err < kEquivTol && sim_err < kEquivTol && norm_err < kEquivTol,
         fmt("psi_s rotation %.1e, simulator rotation over 100 steps %.1e, normalization %.1e (tol %.0e)", state_err,
             sim_err, norm_err, kEquivTol));
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, void (*)()>> criteria = {
      {"1", criterion_1}, {"2", criterion_2}, {"3", criterion_3},   {"4", criterion_4},
      {"5", criterion_5}, {"6", criterion_6}, {"7", criterion_7},   {"8", criterion_8},
      {"9", criterion_9}, {"10", criterion_10}, {"11", criterion_11}, {"12", criterion_12}};
  for (const auto& [id, run] : criteria) {
    try {
      run();
    } catch (const std::exception& e) {
      report(id, false, std::string("threw: ") + e.what());
    }
  }
  std::printf("%d criterion line(s) failed\n", failures);
  return failures == 0 ? 0 : 1;
}
