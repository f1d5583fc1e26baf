#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

// Finite-dimensional verifier of the abstract averaging bound: for
// du/dt = omega L u + f(t) with L real skew-symmetric and the spectral-gap
// property ||u - Pi u|| <= C ||L u|| (Pi = projection onto ker L), the time
// average satisfies ||(1/T) int (id - Pi) u dt|| <= (C/omega)(2M/T + M') with
// M = sup ||u||, M' = sup ||f||.

namespace ellflow {

struct ToySystem {
  Eigen::MatrixXd L;        // n x n skew-symmetric, kernel dimension n/4
  Eigen::MatrixXd Q;        // orthogonal; L = Q S Q^T with S block rotations
  std::vector<double> sigma;  // rotation frequencies of the 2x2 blocks
  Eigen::VectorXd u0;
  Eigen::VectorXd fa, fb;   // forcing f(t) = fa cos t + fb sin 2t
  double C = 0.0;           // 1/min sigma

  Eigen::VectorXd kernel_projection(const Eigen::VectorXd& u) const;
  Eigen::VectorXd forcing(double t) const;
  // exact solution at time t for f = 0 (block rotations in Q coordinates)
  Eigen::VectorXd free_solution(double omega, double t) const;
};

// n must be a positive multiple of 4 and <= 64.
ToySystem make_toy_system(std::size_t n, std::uint64_t seed,
                          bool with_forcing = true);

struct ToyTrajectory {
  Eigen::VectorXd u_final;
  Eigen::VectorXd integral;  // int_0^T u dt, carried in the ODE state
  double M = 0.0;            // max ||u(t)|| over the trajectory
  std::size_t steps = 0;
};

// Adaptive Dormand-Prince RK45 on the augmented state (u, int u).
ToyTrajectory integrate_toy(const ToySystem& sys, double omega, double T,
                            double tol = 1e-10);

struct ToyRow {
  double omega, lhs, rhs;
  bool pass;
};

struct ToyAveragingReport {
  std::size_t n = 0;
  std::uint64_t seed = 0;
  double T = 0.0, C = 0.0;
  std::vector<double> sigma;
  std::vector<ToyRow> rows;
  bool all_pass = true;
};

ToyAveragingReport toy_averaging_verify(std::size_t n, std::uint64_t seed,
                                        const std::vector<double>& omegas,
                                        double T, bool with_forcing = true);

}  // namespace ellflow
