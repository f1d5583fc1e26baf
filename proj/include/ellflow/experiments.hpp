#pragma once

#include <cstdint>
#include <vector>

#include "ellflow/dynamics.hpp"

// Quantitative studies: the O(1/omega) zonalization rate of time-averaged
// velocity fields, and continuity of the operator diagnostics in the polar
// semi-axis b.

namespace ellflow {

// ||(id - Pi) ubar||_{H^{k-3}} of the velocity: spectral sum over m >= 1 of the
// averaged stream function with exponent (k-3)+1. k >= 3.
double zonalization_error(const SpectralScalar& ubar_stream, int k);
// Same quantity from the velocity field itself (Hodge route, cross-check path).
double zonalization_error(const VelocityField& ubar, const Basis& basis, int k);

struct SweepRow {
  double omega, T, b, M0, error, energy_drift, runtime;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  double slope = 0.0;       // least-squares slope of log(error) vs log(omega)
  double half_width = 0.0;  // 2 x standard error of the slope
};

// Runs `base` at each omega (shared basis, shared seed/IC) and fits the decay
// rate of the zonalization error. omegas must be increasing with min >= 10.
SweepResult omega_sweep(const Basis& basis, const RunConfig& base,
                        const std::vector<double>& omegas);

struct ContinuationRow {
  double b;
  std::vector<double> eigenvalues;  // lowest 10 zonal (m = 0) eigenvalues
  double eig_dev;        // max relative deviation from l(l+1)
  double gap_ratio_max;  // max lhs/rhs of key_estimate_gap(k=0) over the ensemble
  double commres_max;    // max commutation_residual(j=1) over the ensemble
};

// Continuity report in b over a seeded ensemble of random band-limited fields.
std::vector<ContinuationRow> b_continuation(const std::vector<double>& bs,
                                            const RunConfig& probe,
                                            std::size_t samples = 20);

// Fits y = a + slope * x by least squares; half_width = 2 x SE(slope).
void fit_line(const std::vector<double>& x, const std::vector<double>& y,
              double& slope, double& half_width);

}  // namespace ellflow
