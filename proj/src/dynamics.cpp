#include "ellflow/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

namespace ellflow {

namespace {

double spectral_sum(const SpectralScalar& zeta, int lambda_power) {
  const Basis& basis = *zeta.basis;
  double s = 0.0;
  for (std::size_t m = 0; m <= basis.m_max; ++m) {
    const double cm = (m == 0) ? 1.0 : 2.0;
    const auto& blk = basis.blocks[m];
    const std::size_t off = basis.offsets[m];
    for (std::size_t k = 0; k < blk.n_l(); ++k)
      s += cm * std::pow(blk.lambda[k], lambda_power) *
           std::norm(zeta.coeffs[off + k]);
  }
  return s;
}

}  // namespace

double energy(const SpectralScalar& zeta) { return spectral_sum(zeta, -1); }
double enstrophy(const SpectralScalar& zeta) { return spectral_sum(zeta, 0); }

Solver::Solver(const Basis& basis, double omega)
    : basis_(&basis), rot_(basis), omega_(omega) {
  const Geometry& g = basis.geom;
  if (2 * g.n_theta < 3 * basis.l_max)
    throw std::invalid_argument("Solver: need n_theta >= (3/2) l_max");
  if (g.n_phi < 3 * basis.m_max)
    throw std::invalid_argument("Solver: need n_phi >= 3 m_max");
  if (omega < 0.0) throw std::invalid_argument("Solver: omega must be >= 0");
}

SpectralScalar Solver::tendency(const SpectralScalar& zeta) const {
  SpectralScalar psi = invert_laplacian(zeta);
  SpectralScalar out = jacobian(psi, zeta);
  for (auto& c : out.coeffs) c = -c;
  if (omega_ != 0.0) {
    SpectralScalar lin = rot_.coriolis_curl_term(psi);
    for (std::size_t n = 0; n < out.coeffs.size(); ++n)
      out.coeffs[n] += omega_ * lin.coeffs[n];
  }
  return out;
}

void Solver::step_rk4(SolverState& state, double dt) const {
  SpectralScalar psi_old = invert_laplacian(state.zeta);

  const std::size_t n = state.zeta.coeffs.size();
  SpectralScalar k1 = tendency(state.zeta);
  SpectralScalar tmp(*basis_);
  for (std::size_t i = 0; i < n; ++i)
    tmp.coeffs[i] = state.zeta.coeffs[i] + 0.5 * dt * k1.coeffs[i];
  SpectralScalar k2 = tendency(tmp);
  for (std::size_t i = 0; i < n; ++i)
    tmp.coeffs[i] = state.zeta.coeffs[i] + 0.5 * dt * k2.coeffs[i];
  SpectralScalar k3 = tendency(tmp);
  for (std::size_t i = 0; i < n; ++i)
    tmp.coeffs[i] = state.zeta.coeffs[i] + dt * k3.coeffs[i];
  SpectralScalar k4 = tendency(tmp);
  for (std::size_t i = 0; i < n; ++i)
    state.zeta.coeffs[i] +=
        (dt / 6.0) * (k1.coeffs[i] + 2.0 * (k2.coeffs[i] + k3.coeffs[i]) +
                      k4.coeffs[i]);

  SpectralScalar psi_new = invert_laplacian(state.zeta);
  for (std::size_t i = 0; i < n; ++i)
    state.psi_integral.coeffs[i] +=
        0.5 * dt * (psi_old.coeffs[i] + psi_new.coeffs[i]);

  state.t += dt;
  ++state.step_count;

  if (!std::isfinite(enstrophy(state.zeta)))
    throw std::runtime_error("step_rk4: non-finite state at t = " +
                             std::to_string(state.t) + ", step " +
                             std::to_string(state.step_count));
}

double Solver::linear_rate() const {
  const auto& mu = rot_.mu();
  const double mu_max = *std::max_element(mu.begin(), mu.end());
  double rate = 0.0;
  for (std::size_t m = 1; m <= basis_->m_max; ++m)
    rate = std::max(rate, mu_max * static_cast<double>(m) /
                              basis_->blocks[m].lambda[0]);
  return omega_ * rate;
}

double auto_dt(const Solver& solver, const SpectralScalar& zeta0, double T) {
  if (T <= 0.0) throw std::invalid_argument("auto_dt: T must be > 0");
  VelocityField u0 = perp_grad(invert_laplacian(zeta0));
  double umax = 0.0;
  for (std::size_t i = 0; i < u0.u_phi.values.size(); ++i)
    umax = std::max(umax, std::hypot(u0.u_phi.values[i], u0.u_theta.values[i]));
  const double adv_rate =
      1.5 * static_cast<double>(solver.basis().l_max + 1) * umax;
  const double rate = std::max({solver.linear_rate(), adv_rate, 0.03 / T});
  return std::min(T, 0.03 / rate);
}

SpectralScalar initial_condition(const Basis& basis, const RunConfig& config) {
  SpectralScalar psi(basis);
  std::mt19937_64 rng(config.seed);
  std::uniform_real_distribution<double> unif(0.0, 2.0 * std::numbers::pi);
  const std::size_t l_band = (2 * basis.l_max) / 3;
  const int k = config.hk;
  if (k < 0) throw std::invalid_argument("initial_condition: hk must be >= 0");

  if (config.initial_condition == "mode") {
    const std::size_t l = config.ic_l, m = config.ic_m;
    if (m > basis.m_max || l < basis.blocks[m].l_min ||
        l >= basis.blocks[m].l_min + basis.blocks[m].n_l())
      throw std::invalid_argument("initial_condition: mode (l,m) out of range");
    psi.at(l, m) = config.amplitude;
  } else if (config.initial_condition == "random" ||
             config.initial_condition == "zonal") {
    const std::size_t m_top =
        (config.initial_condition == "zonal") ? 0 : basis.m_max;
    for (std::size_t m = 0; m <= m_top; ++m) {
      const auto& blk = basis.blocks[m];
      for (std::size_t kk = 0; kk < blk.n_l(); ++kk) {
        const std::size_t l = blk.l_min + kk;
        const double phase = unif(rng);  // drawn for every mode, kept or not
        if (l > l_band) continue;
        const double amp = std::pow(blk.lambda[kk], -0.5 * (k + 1)) /
                           static_cast<double>(l);
        psi.coeffs[basis.offsets[m] + kk] =
            (m == 0) ? std::complex<double>(amp * (phase < std::numbers::pi
                                                       ? 1.0
                                                       : -1.0),
                                            0.0)
                     : std::polar(amp, phase);
      }
    }
    const double norm = hk_norm_velocity(psi, k);
    if (norm <= 0.0)
      throw std::runtime_error("initial_condition: empty band-limited field");
    const double scale = config.amplitude / norm;
    for (auto& c : psi.coeffs) c *= scale;
  } else {
    throw std::invalid_argument("initial_condition: unknown kind '" +
                                config.initial_condition + "'");
  }
  return apply_laplacian(psi);  // zeta = Delta psi
}

DiagnosticsRow diagnostics_row(const SolverState& state, int hk) {
  SpectralScalar psi = invert_laplacian(state.zeta);
  const Basis& basis = *psi.basis;
  const double e = energy(state.zeta);
  double e_zonal = 0.0;
  const auto& blk0 = basis.blocks[0];
  for (std::size_t k = 0; k < blk0.n_l(); ++k)
    e_zonal += blk0.lambda[k] * std::norm(psi.coeffs[basis.offsets[0] + k]);
  return {state.t, e, enstrophy(state.zeta), hk_norm_velocity(psi, hk),
          e > 0.0 ? e_zonal / e : 1.0};
}

RunResult run(const Basis& basis, const RunConfig& config,
              const SolverState* resume_from,
              const std::function<void(const SolverState&)>& on_step) {
  if (basis.geom.b != config.b || basis.l_max != config.l_max ||
      basis.geom.n_theta != config.n_theta || basis.geom.n_phi != config.n_phi)
    throw std::invalid_argument("run: basis does not match config");
  if (config.T <= 0.0) throw std::invalid_argument("run: T must be > 0");

  Solver solver(basis, config.omega);
  SolverState state(basis);
  if (resume_from) {
    state = *resume_from;
    if (state.t >= config.T)
      throw std::invalid_argument("run: resume state already at or past T");
  } else {
    state.zeta = initial_condition(basis, config);
  }

  double dt = config.dt > 0.0 ? config.dt : auto_dt(solver, state.zeta, config.T);
  const double remaining = config.T - state.t;
  const std::size_t n_steps =
      std::max<std::size_t>(1, static_cast<std::size_t>(
                                   std::ceil(remaining / dt - 1e-12)));
  dt = remaining / static_cast<double>(n_steps);

  RunResult result;
  result.dt_used = dt;
  result.diagnostics.push_back(diagnostics_row(state, config.hk));
  for (std::size_t s = 0; s < n_steps; ++s) {
    solver.step_rk4(state, dt);
    if (on_step) on_step(state);
    if ((s + 1) % std::max<std::size_t>(1, config.diag_every) == 0 ||
        s + 1 == n_steps)
      result.diagnostics.push_back(diagnostics_row(state, config.hk));
  }
  result.final = std::move(state);
  return result;
}

SpectralScalar time_average_stream(const SolverState& state) {
  if (state.t <= 0.0)
    throw std::invalid_argument("time_average: state has t = 0");
  SpectralScalar avg = state.psi_integral;
  for (auto& c : avg.coeffs) c /= state.t;
  return avg;
}

VelocityField time_average(const SolverState& state) {
  return perp_grad(time_average_stream(state));
}

}  // namespace ellflow
