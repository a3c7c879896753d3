#include "annulus/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace annulus {

using cd = std::complex<double>;
constexpr cd I{0.0, 1.0};

double Diagnostics::norm() const { return std::sqrt(std::max(E3, 0.0)); }

Simulator::Simulator(const DomainParams& params, RadialGrid<double> grid, SimConfig config)
    : params_(validate(params)), grid_(std::move(grid)), config_(config), max_mode_(config.n_theta / 3) {
  if (config_.n_theta < 6) throw Error(ErrorCode::InvalidSpec, "n_theta must be at least 6");
  if (!(config_.cfl_limit > 0.0)) throw Error(ErrorCode::InvalidSpec, "cfl_limit must be positive");
  for (int n = 1; n <= max_mode_; ++n) lap_.push_back(laplacian_n(grid_, n).matrix);
  bcs_ = navier_slip_bcs(grid_, params_.alpha, params_.mu);
  const Eigen::Index np = grid_.size();
  dr_.resize(np);
  for (Eigen::Index i = 0; i < np; ++i) {
    double h = std::numeric_limits<double>::infinity();
    if (i > 0) h = std::min(h, std::abs(grid_.nodes(i - 1) - grid_.nodes(i)));
    if (i + 1 < np) h = std::min(h, std::abs(grid_.nodes(i + 1) - grid_.nodes(i)));
    dr_(i) = h;
  }
}

const Simulator::StepSystem& Simulator::system_for(double dt) const {
  std::lock_guard<std::mutex> lock(cache_mutex_);
  auto it = cache_.find(dt);
  if (it != cache_.end()) return *it->second;
  auto sys = std::make_shared<StepSystem>();
  const double c = 0.5 * dt * params_.mu;
  for (const auto& lap : lap_) {
    const Eigen::MatrixXd bilap = lap * lap;
    ModeSystem m;
    try {
      m.implicit = std::make_unique<BoundaryValueSolver<double>>(lap - c * bilap, bcs_);
    } catch (const Error& e) {
      throw Error(ErrorCode::SolverFailure, std::string("implicit viscous system: ") + e.what());
    }
    m.explicit_part = lap + c * bilap;
    sys->modes.push_back(std::move(m));
  }
  if (cache_.size() > 8) cache_.clear();
  return *cache_.emplace(dt, std::move(sys)).first->second;
}

SimState Simulator::zero_state() const {
  SimState s;
  for (int n = 1; n <= max_mode_; ++n) {
    s.psi_modes.push_back({n, Eigen::VectorXcd::Zero(grid_.size())});
    s.omega_modes.push_back({n, Eigen::VectorXcd::Zero(grid_.size())});
  }
  return s;
}

SimState Simulator::init_from_modes(const std::vector<ModalField<double>>& modes) const {
  SimState s = zero_state();
  for (const auto& m : modes) {
    if (m.size() != grid_.size()) throw Error(ErrorCode::GridMismatch, "initial mode length");
    if (m.n < 1 || m.n > max_mode_) continue;  // mean mode and truncated modes are projected out
    s.psi_modes[m.n - 1].values += m.values;
  }
  for (int n = 1; n <= max_mode_; ++n) {
    s.omega_modes[n - 1].values = lap_[n - 1].cast<cd>() * s.psi_modes[n - 1].values;
  }
  return s;
}

SimState Simulator::init_from_mode(const EigenResult& eig, double delta, double phase) const {
  if (delta < 0.0) throw Error(ErrorCode::InvalidSpec, "amplitude must be nonnegative");
  return init_from_modes({ModalField<double>{eig.psi1.n, delta * std::polar(1.0, phase) * eig.psi1.values}});
}

std::vector<Eigen::VectorXcd> Simulator::nonlinear_term(const SimState& state) const {
  const int K = max_mode_;
  const Eigen::Index np = grid_.size();
  std::vector<Eigen::VectorXcd> out(K, Eigen::VectorXcd::Zero(np));
  if (!config_.nonlinear) return out;

  // Per-mode profiles for n = 1..K; n < 0 uses conjugates.
  std::vector<Eigen::VectorXcd> f(K), df(K), w(K), dw(K);
  bool any = false;
  for (int k = 0; k < K; ++k) {
    f[k] = state.psi_modes[k].values;
    if (f[k].cwiseAbs().maxCoeff() == 0.0) continue;
    any = true;
  }
  if (!any) return out;
  const Eigen::MatrixXcd d1 = grid_.d1.cast<cd>();
  for (int k = 0; k < K; ++k) {
    df[k] = d1 * f[k];
    w[k] = state.omega_modes[k].values;
    dw[k] = d1 * w[k];
  }
  const Eigen::ArrayXd inv_r = grid_.inv_r.array();
  auto pick = [](const std::vector<Eigen::VectorXcd>& v, int n) -> Eigen::ArrayXcd {
    if (n > 0) return v[n - 1].array();
    return v[-n - 1].conjugate().array();
  };
  for (int m = 1; m <= K; ++m) {
    Eigen::ArrayXcd acc = Eigen::ArrayXcd::Zero(np);
    for (int p = -K; p <= K; ++p) {
      const int q = m - p;
      if (p == 0 || q == 0 || q < -K || q > K) continue;
      acc += double(p) * pick(f, p) * inv_r * pick(dw, q) - double(q) * pick(df, p) * inv_r * pick(w, q);
    }
    out[m - 1] = (I * acc).matrix();
  }
  return out;
}

SimState Simulator::step(const SimState& state, double dt) const {
  if (!(dt > 0.0)) throw Error(ErrorCode::InvalidSpec, "dt must be positive");
  if (config_.nonlinear) {
    const double cfl = cfl_number(state, dt);
    if (cfl > config_.cfl_limit) {
      std::ostringstream os;
      os << "CFL number " << cfl << " exceeds " << config_.cfl_limit << " at t=" << state.t;
      throw Error(ErrorCode::CFLViolation, os.str());
    }
  }
  const auto& sys = system_for(dt);
  const auto nl = nonlinear_term(state);
  const bool startup = state.previous_nonlinear.empty();

  SimState next;
  next.t = state.t + dt;
  next.steps = state.steps + 1;
  next.history = state.history;
  next.psi_modes.reserve(max_mode_);
  next.omega_modes.reserve(max_mode_);
  for (int k = 0; k < max_mode_; ++k) {
    Eigen::VectorXcd rhs = sys.modes[k].explicit_part.cast<cd>() * state.psi_modes[k].values;
    if (config_.nonlinear) {
      rhs += startup ? Eigen::VectorXcd(dt * nl[k])
                     : Eigen::VectorXcd(dt * (1.5 * nl[k] - 0.5 * state.previous_nonlinear[k]));
    }
    Eigen::VectorXcd psi = sys.modes[k].implicit->solve(rhs);
    if (!psi.allFinite()) throw Error(ErrorCode::SolverFailure, "non-finite state after implicit solve");
    next.omega_modes.push_back({k + 1, lap_[k].cast<cd>() * psi});
    next.psi_modes.push_back({k + 1, std::move(psi)});
  }
  next.previous_nonlinear = nl;
  return next;
}

SimState Simulator::run(SimState state, double dt, long steps, long record_every) const {
  if (record_every < 1) record_every = 1;
  if (state.history.empty() || state.history.back().t != state.t) state.history.push(diagnostics(state));
  for (long s = 1; s <= steps; ++s) {
    state = step(state, dt);
    if (s % record_every == 0 || s == steps) state.history.push(diagnostics(state));
  }
  return state;
}

Diagnostics Simulator::diagnostics(const SimState& state) const {
  Diagnostics d;
  d.t = state.t;
  const Eigen::MatrixXcd d1 = grid_.d1.cast<cd>();
  const Eigen::ArrayXd r = grid_.nodes.array();
  const Eigen::ArrayXd inv_r = grid_.inv_r.array();
  const double four_pi = 4.0 * pi<double>();
  const auto o = grid_.outer(), in = grid_.inner();
  for (const auto& m : state.psi_modes) {
    const double n = m.n;
    // v_r = R e^{inθ}, v_θ = T e^{inθ}
    const Eigen::VectorXcd R = (-I * n) * (m.values.array() * inv_r).matrix();
    const Eigen::VectorXcd T = d1 * m.values;
    const Eigen::VectorXcd dR = d1 * R;
    const Eigen::VectorXcd dT = d1 * T;
    const double e3 = four_pi * integrate_r(grid_, (R.cwiseAbs2() + T.cwiseAbs2()).eval());
    const Eigen::ArrayXd grad = dR.array().abs2() + dT.array().abs2() +
                                ((I * n) * R.array() - T.array()).abs2() * inv_r.square() +
                                ((I * n) * T.array() + R.array()).abs2() * inv_r.square();
    d.E1 += four_pi * integrate_r(grid_, grad.matrix()) + four_pi * std::norm(T(o));
    d.E2 += four_pi * grid_.a * std::norm(T(in));
    d.E3 += e3;
    d.mode_energy.push_back(e3);
  }
  (void)r;
  const int nt = std::max(config_.diag_n_theta, 4 * max_mode_ + 4);
  d.max_psi = physical(state, nt).values.cwiseAbs().maxCoeff();
  return d;
}

double Simulator::energy_rate(const Diagnostics& d) const {
  return -params_.mu * d.E1 + (params_.alpha - params_.mu / params_.a) * d.E2;
}

double Simulator::cfl_number(const SimState& state, double dt) const {
  const int nt = config_.n_theta;
  std::vector<ModalField<double>> vr, vt;
  const Eigen::MatrixXcd d1 = grid_.d1.cast<cd>();
  for (const auto& m : state.psi_modes) {
    vr.push_back({m.n, (-I * double(m.n)) * m.values.cwiseProduct(grid_.inv_r.cast<cd>())});
    vt.push_back({m.n, d1 * m.values});
  }
  const auto fr = synthesize_physical(grid_.nodes, vr, nt);
  const auto ft = synthesize_physical(grid_.nodes, vt, nt);
  const double dtheta = 2.0 * pi<double>() / nt;
  double worst = 0.0;
  for (Eigen::Index i = 0; i < fr.nr(); ++i) {
    for (Eigen::Index j = 0; j < fr.ntheta(); ++j) {
      worst = std::max(worst, std::abs(fr.values(i, j)) / dr_(i) + std::abs(ft.values(i, j)) * grid_.inv_r(i) / dtheta);
    }
  }
  return dt * worst;
}

PhysicalField Simulator::physical(const SimState& state, int ntheta) const {
  return synthesize_physical(grid_.nodes, state.psi_modes, ntheta);
}

SimState Simulator::rotated(const SimState& state, double phi) const {
  SimState s = state;
  for (auto& m : s.psi_modes) m.values *= std::polar(1.0, -m.n * phi);
  for (auto& m : s.omega_modes) m.values *= std::polar(1.0, -m.n * phi);
  for (std::size_t k = 0; k < s.previous_nonlinear.size(); ++k) {
    s.previous_nonlinear[k] *= std::polar(1.0, -double(k + 1) * phi);
  }
  return s;
}

double Simulator::boundary_residual(const SimState& state) const {
  double worst = 0.0;
  for (const auto& m : state.psi_modes) {
    const double scale = std::max(m.values.cwiseAbs().maxCoeff(), std::numeric_limits<double>::min());
    for (const auto& row : bcs_.rows) {
      worst = std::max(worst, std::abs(row.functional.cast<cd>().dot(m.values.conjugate())) / scale);
    }
  }
  return worst;
}

double Simulator::vorticity_mismatch(const SimState& state) const {
  double worst = 0.0;
  for (std::size_t k = 0; k < state.psi_modes.size(); ++k) {
    const Eigen::VectorXcd w = lap_[k].cast<cd>() * state.psi_modes[k].values;
    const double scale = std::max(w.cwiseAbs().maxCoeff(), std::numeric_limits<double>::min());
    worst = std::max(worst, (state.omega_modes[k].values - w).cwiseAbs().maxCoeff() / scale);
  }
  return worst;
}

double energy_residual(const Simulator& sim, const SimState& before, const SimState& after, double dt) {
  const auto d0 = sim.diagnostics(before);
  const auto d1 = sim.diagnostics(after);
  const double lhs = 0.5 * (d1.E3 - d0.E3) / dt;
  const double rhs = 0.5 * (sim.energy_rate(d0) + sim.energy_rate(d1));
  const double denom = std::abs(rhs) + std::numeric_limits<double>::min();
  if (lhs == 0.0 && rhs == 0.0) return 0.0;
  return std::abs(lhs - rhs) / denom;
}

double fit_growth_rate(const std::vector<Diagnostics>& history, double lo, double hi) {
  double st = 0, sy = 0, stt = 0, sty = 0;
  int count = 0;
  for (const auto& d : history) {
    const double v = d.norm();
    if (!(v > lo && v < hi)) continue;
    const double y = std::log(v);
    st += d.t;
    sy += y;
    stt += d.t * d.t;
    sty += d.t * y;
    ++count;
  }
  if (count < 2) return std::numeric_limits<double>::quiet_NaN();
  const double den = count * stt - st * st;
  if (den == 0.0) return std::numeric_limits<double>::quiet_NaN();
  return (count * sty - st * sy) / den;
}

EscapeResult escape_experiment(const Simulator& sim, const EigenResult& eig, const std::vector<double>& deltas,
                               double threshold, double dt, double t_max, double phase) {
  if (!(threshold > 0.0)) throw Error(ErrorCode::InvalidSpec, "escape threshold must be positive");
  EscapeResult res;
  res.threshold = threshold;
  // Thresholds are in units of the unit-amplitude initial condition's norm.
  const double unit = sim.diagnostics(sim.init_from_mode(eig, 1.0, phase)).norm();
  const double target = threshold * unit;
  for (double delta : deltas) {
    if (!(delta > 0.0)) throw Error(ErrorCode::InvalidSpec, "escape amplitudes must be positive");
    if (delta >= threshold) {
      res.rows.push_back({delta, 0.0});
      continue;
    }
    SimState s = sim.init_from_mode(eig, delta, phase);
    double prev_norm = sim.diagnostics(s).norm();
    double prev_t = s.t;
    double found = -1.0;
    while (s.t < t_max) {
      s = sim.step(s, dt);
      const double now = sim.diagnostics(s).norm();
      if (now >= target) {
        const double y0 = std::log(prev_norm), y1 = std::log(now), yt = std::log(target);
        found = prev_t + (s.t - prev_t) * (yt - y0) / (y1 - y0);
        break;
      }
      prev_norm = now;
      prev_t = s.t;
    }
    if (found < 0.0) {
      std::ostringstream os;
      os << "threshold " << threshold << " not reached from delta=" << delta << " by t=" << t_max;
      throw Error(ErrorCode::NoEscape, os.str());
    }
    res.rows.push_back({delta, found});
  }
  // slope of T against ln(1/δ) over rows with positive escape time
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int count = 0;
  for (const auto& row : res.rows) {
    if (row.escape_time <= 0.0) continue;
    const double x = std::log(1.0 / row.delta);
    sx += x;
    sy += row.escape_time;
    sxx += x * x;
    sxy += x * row.escape_time;
    ++count;
  }
  const double den = count * sxx - sx * sx;
  res.slope = (count >= 2 && den != 0.0) ? (count * sxy - sx * sy) / den : std::numeric_limits<double>::quiet_NaN();
  return res;
}

}  // namespace annulus
