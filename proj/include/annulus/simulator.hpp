#pragma once

#include "annulus/bifurcation.hpp"
#include "annulus/modal_field.hpp"
#include "annulus/modal_operators.hpp"
#include "annulus/params.hpp"
#include "annulus/radial_grid.hpp"

#include <cstddef>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <vector>

namespace annulus {

/// Fixed-capacity FIFO; the oldest entry is dropped when full.
template <typename T>
class RingBuffer {
 public:
  explicit RingBuffer(std::size_t capacity = 4096) : capacity_(capacity) {}

  void push(T value) {
    if (data_.size() < capacity_) {
      data_.push_back(std::move(value));
    } else {
      data_[head_] = std::move(value);
      head_ = (head_ + 1) % capacity_;
    }
  }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }
  /// i = 0 is the oldest retained entry.
  const T& operator[](std::size_t i) const { return data_[(head_ + i) % data_.size()]; }
  const T& back() const { return (*this)[size() - 1]; }
  std::vector<T> to_vector() const {
    std::vector<T> out;
    out.reserve(size());
    for (std::size_t i = 0; i < size(); ++i) out.push_back((*this)[i]);
    return out;
  }

 private:
  std::size_t capacity_;
  std::size_t head_ = 0;
  std::vector<T> data_;
};

struct Diagnostics {
  double t = 0;
  double E3 = 0;  // ∫|v|²
  double E1 = 0;  // ∫|∇v|² + (1/b)∮_b v_τ²
  double E2 = 0;  // ∮_a v_τ²
  double max_psi = 0;
  std::vector<double> mode_energy;  // E3 carried by each stored wavenumber

  double norm() const;  // ‖v‖_{L²} = sqrt(E3)
};

/// Modal state of the streamfunction. psi_modes[k] holds wavenumber k + 1; the
/// mean (n = 0) mode is not part of the phase space and is never stored.
struct SimState {
  double t = 0;
  long steps = 0;
  std::vector<ModalField<double>> psi_modes;
  std::vector<ModalField<double>> omega_modes;     // Δ_n ψ_n
  std::vector<Eigen::VectorXcd> previous_nonlinear;  // for the Adams–Bashforth stage; empty before the first step
  RingBuffer<Diagnostics> history{8192};
};

struct SimConfig {
  int n_theta = 32;          // angular collocation points; wavenumbers above n_theta/3 are truncated
  bool nonlinear = true;
  double cfl_limit = 0.5;
  int diag_n_theta = 128;    // angular sampling for max|ψ|
};

/// IMEX integrator for Δψ_t = μΔ²ψ + 𝔾(ψ, ψ): Crank–Nicolson on the viscous
/// term, Adams–Bashforth 2 on the Jacobian (forward Euler on the first step).
/// ψ is the prognostic variable and each mode solves
///   (Δ_n − ½dt μΔ_n²) ψⁿ⁺¹ = (Δ_n + ½dt μΔ_n²) ψⁿ + dt·N
/// with the four wall rows replacing the boundary rows.
class Simulator {
 public:
  Simulator(const DomainParams& params, RadialGrid<double> grid, SimConfig config = {});

  int max_mode() const { return max_mode_; }
  const RadialGrid<double>& grid() const { return grid_; }
  const DomainParams& params() const { return params_; }
  const SimConfig& config() const { return config_; }

  SimState zero_state() const;
  /// ψ = δ e^{iφ} Ψ₁ e^{inθ} + c.c.
  SimState init_from_mode(const EigenResult& eig, double delta, double phase = 0.0) const;
  SimState init_from_modes(const std::vector<ModalField<double>>& modes) const;

  SimState step(const SimState& state, double dt) const;
  /// Advances `steps` steps, recording diagnostics every `record_every` steps (and at the start).
  SimState run(SimState state, double dt, long steps, long record_every = 1) const;

  Diagnostics diagnostics(const SimState& state) const;
  /// Right-hand side of the energy balance, −μE₁ + (α − μ/a)E₂.
  double energy_rate(const Diagnostics& d) const;
  /// dt·max(|v_r|/Δr + |v_θ|/(rΔθ)) over the lattice.
  double cfl_number(const SimState& state, double dt) const;

  /// Mode n = 1..max_mode content of 𝔾(ψ, ψ), truncated.
  std::vector<Eigen::VectorXcd> nonlinear_term(const SimState& state) const;

  PhysicalField physical(const SimState& state, int ntheta) const;
  SimState rotated(const SimState& state, double phi) const;

  /// Boundary-row residual of each ψ_n and the ω_n − Δ_nψ_n mismatch.
  double boundary_residual(const SimState& state) const;
  double vorticity_mismatch(const SimState& state) const;

 private:
  struct ModeSystem {
    std::unique_ptr<BoundaryValueSolver<double>> implicit;
    Eigen::MatrixXd explicit_part;
  };
  struct StepSystem {
    std::vector<ModeSystem> modes;
  };
  const StepSystem& system_for(double dt) const;

  DomainParams params_;
  RadialGrid<double> grid_;
  SimConfig config_;
  int max_mode_;
  std::vector<Eigen::MatrixXd> lap_;  // Δ_n, n = 1..max_mode
  BoundaryConditionSet<double> bcs_;
  Eigen::VectorXd dr_;                // local radial spacing at each node

  mutable std::mutex cache_mutex_;
  mutable std::map<double, std::shared_ptr<const StepSystem>> cache_;
};

/// |Δ(½E₃)/dt − mean RHS| / (|mean RHS| + ε) across one step.
double energy_residual(const Simulator& sim, const SimState& before, const SimState& after, double dt);

/// Least-squares slope of ln‖v‖ against t over samples with lo < ‖v‖ < hi.
double fit_growth_rate(const std::vector<Diagnostics>& history, double lo = 0.0,
                       double hi = std::numeric_limits<double>::infinity());

struct EscapeRow {
  double delta = 0;
  double escape_time = 0;
};

struct EscapeResult {
  std::vector<EscapeRow> rows;
  double slope = 0;  // fitted dT/d ln(1/δ)
  double threshold = 0;
};

/// First time ‖v‖ exceeds `threshold` from ψ(0) = δΨ₁e^{iθ} + c.c., for each δ.
/// Throws NoEscape when `t_max` passes first.
EscapeResult escape_experiment(const Simulator& sim, const EigenResult& eig, const std::vector<double>& deltas,
                               double threshold, double dt, double t_max, double phase = 0.0);

}  // namespace annulus
