#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "ellflow/rotation.hpp"

// Time integration of the rotating Euler system in vorticity-stream form:
//   d zeta/dt = -J(psi, zeta) + omega mu(theta) d_phi psi,   psi = Delta^{-1} zeta,
// advanced with explicit RK4. The running integral of psi is accumulated by the
// trapezoid rule so the time average commutes with perp_grad and Delta^{-1}.

namespace ellflow {

struct RunConfig {
  double b = 1.0;
  double omega = 0.0;
  std::size_t l_max = 21;
  std::size_t n_theta = 64;
  std::size_t n_phi = 128;
  double dt = 0.0;  // 0 = auto
  double T = 1.0;
  std::string initial_condition = "random";  // random | mode | zonal
  std::size_t ic_l = 4, ic_m = 1;            // for "mode"
  double amplitude = 1.0;  // target H^hk velocity norm (random/zonal) or mode coeff
  int hk = 3;              // Sobolev order for the IC normalization and diagnostics
  std::uint64_t seed = 1;
  std::size_t diag_every = 16;  // steps between diagnostics rows
};

struct DiagnosticsRow {
  double t, energy, enstrophy, hk_norm, zonal_fraction;
};

struct SolverState {
  SpectralScalar zeta;
  SpectralScalar psi_integral;  // trapezoidal accumulation of int_0^t psi dt
  double t = 0.0;
  std::size_t step_count = 0;

  SolverState() = default;
  explicit SolverState(const Basis& b) : zeta(b), psi_integral(b) {}
};

// energy = sum c_m Lambda |psi|^2 = sum c_m |zeta|^2 / Lambda,
// enstrophy = sum c_m |zeta|^2.
double energy(const SpectralScalar& zeta);
double enstrophy(const SpectralScalar& zeta);

class Solver {
 public:
  // Validates the dealiasing contract n_theta >= (3/2) l_max, n_phi >= 3 m_max.
  Solver(const Basis& basis, double omega);

  const Basis& basis() const { return *basis_; }
  const RotationOps& rotation() const { return rot_; }
  double omega() const { return omega_; }

  SpectralScalar tendency(const SpectralScalar& zeta) const;
  void step_rk4(SolverState& state, double dt) const;  // throws on NaN/Inf

  // Fastest linear frequency omega * max_m max|eig(m C_m / Lambda)| bounded by
  // omega * max_m (2/b^2) m / Lambda_min(m); used by the auto dt rule.
  double linear_rate() const;

 private:
  const Basis* basis_;
  RotationOps rot_;
  double omega_;
};

// dt = min(0.03 / linear_rate, 0.03 / ((l_max+1) * 1.5 * max|u0|)), capped at T.
// The 0.03 keeps the RK4 amplitude defect (x^6/72 per step at frequency x/dt)
// below 1e-6 over unit time for rates up to ~1e3.
double auto_dt(const Solver& solver, const SpectralScalar& zeta0, double T);

SpectralScalar initial_condition(const Basis& basis, const RunConfig& config);

struct RunResult {
  SolverState final;
  std::vector<DiagnosticsRow> diagnostics;
  double dt_used = 0.0;
};

// Integrates to config.T; `resume_from`, when non-null, supplies the starting
// state (its t counts toward T). `on_step` runs after every accepted step.
RunResult run(const Basis& basis, const RunConfig& config,
              const SolverState* resume_from = nullptr,
              const std::function<void(const SolverState&)>& on_step = {});

DiagnosticsRow diagnostics_row(const SolverState& state, int hk);

// ubar(T) = perp_grad(psi_integral / t); throws at t = 0.
VelocityField time_average(const SolverState& state);
SpectralScalar time_average_stream(const SolverState& state);

}  // namespace ellflow
