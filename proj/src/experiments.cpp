#include "ellflow/experiments.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

namespace ellflow {

double zonalization_error(const SpectralScalar& ubar_stream, int k) {
  if (k < 3) throw std::invalid_argument("zonalization_error: k must be >= 3");
  const Basis& basis = *ubar_stream.basis;
  double s = 0.0;
  for (std::size_t m = 1; m <= basis.m_max; ++m) {
    const auto& blk = basis.blocks[m];
    const std::size_t off = basis.offsets[m];
    for (std::size_t kk = 0; kk < blk.n_l(); ++kk)
      s += 2.0 * std::pow(blk.lambda[kk], k - 2) *
           std::norm(ubar_stream.coeffs[off + kk]);
  }
  return std::sqrt(s);
}

double zonalization_error(const VelocityField& ubar, const Basis& basis, int k) {
  HodgeParts h = hodge_decompose(ubar, basis);
  return zonalization_error(h.stream, k);
}

void fit_line(const std::vector<double>& x, const std::vector<double>& y,
              double& slope, double& half_width) {
  const std::size_t n = x.size();
  if (n < 2 || y.size() != n) throw std::invalid_argument("fit_line: need >= 2 points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double dn = static_cast<double>(n);
  const double denom = dn * sxx - sx * sx;
  slope = (dn * sxy - sx * sy) / denom;
  const double intercept = (sy - slope * sx) / dn;
  double ss_res = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = y[i] - (intercept + slope * x[i]);
    ss_res += r * r;
  }
  half_width = (n > 2)
                   ? 2.0 * std::sqrt(ss_res / (dn - 2.0) / (sxx - sx * sx / dn))
                   : 0.0;
}

SweepResult omega_sweep(const Basis& basis, const RunConfig& base,
                        const std::vector<double>& omegas) {
  if (omegas.size() < 2)
    throw std::invalid_argument("omega_sweep: need >= 2 omegas");
  for (std::size_t i = 0; i < omegas.size(); ++i)
    if (omegas[i] < 10.0 || (i > 0 && omegas[i] <= omegas[i - 1]))
      throw std::invalid_argument("omega_sweep: omegas must be increasing, min >= 10");

  SweepResult result;
  for (double omega : omegas) {
    RunConfig cfg = base;
    cfg.omega = omega;
    const auto t0 = std::chrono::steady_clock::now();
    RunResult r = run(basis, cfg);
    const double runtime =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    const double err =
        zonalization_error(time_average_stream(r.final), cfg.hk);
    const double e0 = r.diagnostics.front().energy;
    double drift = 0.0;
    for (const auto& row : r.diagnostics)
      drift = std::max(drift, std::abs(row.energy - e0) / e0);
    result.rows.push_back({omega, cfg.T, cfg.b,
                           r.diagnostics.front().hk_norm, err, drift, runtime});
  }

  std::vector<double> lx, ly;
  for (const auto& row : result.rows) {
    lx.push_back(std::log(row.omega));
    ly.push_back(std::log(row.error));
  }
  fit_line(lx, ly, result.slope, result.half_width);
  return result;
}

std::vector<ContinuationRow> b_continuation(const std::vector<double>& bs,
                                            const RunConfig& probe,
                                            std::size_t samples) {
  std::vector<ContinuationRow> table;
  for (double b : bs) {
    Geometry geom = build_geometry(b, probe.n_theta, probe.n_phi);
    Basis basis = build_basis(geom, probe.l_max);
    RotationOps rot(basis);

    ContinuationRow row;
    row.b = b;
    const auto& blk0 = basis.blocks[0];
    const std::size_t n_eigs = std::min<std::size_t>(10, blk0.n_l());
    row.eig_dev = 0.0;
    for (std::size_t k = 0; k < n_eigs; ++k) {
      row.eigenvalues.push_back(blk0.lambda[k]);
      const double l = static_cast<double>(blk0.l_min + k);
      row.eig_dev = std::max(
          row.eig_dev, std::abs(blk0.lambda[k] - l * (l + 1)) / (l * (l + 1)));
    }

    row.gap_ratio_max = 0.0;
    row.commres_max = 0.0;
    RunConfig ic = probe;
    ic.b = b;
    ic.initial_condition = "random";
    for (std::size_t s = 0; s < samples; ++s) {
      ic.seed = probe.seed + s;
      SpectralScalar psi = invert_laplacian(initial_condition(basis, ic));
      auto gap = rot.key_estimate_gap(psi, 0);
      if (gap.rhs > 0.0)
        row.gap_ratio_max = std::max(row.gap_ratio_max, gap.lhs / gap.rhs);
      row.commres_max =
          std::max(row.commres_max, rot.commutation_residual(psi, 1));
    }
    table.push_back(std::move(row));
  }
  return table;
}

}  // namespace ellflow
