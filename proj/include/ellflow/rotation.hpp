#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <vector>

#include "ellflow/calculus.hpp"

// The Coriolis operator L[u] = perp_grad Delta^{-1} curl(F J u) and the
// L^2-orthogonal projection Pi onto its null space (zonal flows), plus the
// numerical checkers for the operator-level claims.
//
// For div-free u = perp_grad psi, curl(F J u) = grad F . u = mu(theta) d_phi psi
// with mu = 2 b^2 / m(theta)^4, so in stream form L reduces to per-m coupling
// matrices C_m[k][l] = sum_j w_j mu_j Y_k Y_l (diagonal at b = 1 where mu = 2).

namespace ellflow {

class RotationOps {
 public:
  RotationOps(const Basis& basis);

  const Basis& basis() const { return *basis_; }
  const std::vector<double>& mu() const { return mu_; }
  const Eigen::MatrixXd& coupling(std::size_t m) const { return coupling_[m]; }

  // L applied through the velocity path (grid curl of F J u); div-free output.
  VelocityField l_apply(const VelocityField& u) const;

  // Stream function chi with L[perp_grad psi] = perp_grad chi; independent of
  // the velocity path above (pure coefficient arithmetic).
  SpectralScalar l_apply_streamform(const SpectralScalar& psi) const;

  // Spectral linear tendency contribution: coefficients of mu d_phi psi.
  SpectralScalar coriolis_curl_term(const SpectralScalar& psi) const;

  // Zonal mean Pi u = (1/2pi int u_phi dphi) e_phi.
  VelocityField null_projection(const VelocityField& u) const;
  // m = 0 truncation of a stream function (Pi in stream form).
  SpectralScalar null_projection_stream(const SpectralScalar& psi) const;

  struct GapPair {
    double lhs;  // ||(id - Pi) u||_{H^k}
    double rhs;  // ||L[u]||_{H^{k+2}}
  };
  GapPair key_estimate_gap(const SpectralScalar& psi, int k) const;

  // |<Delta^j u, Delta^j L[u]>| / (||Delta^j u|| ||Delta^j L[u]|| + tiny)
  double commutation_residual(const SpectralScalar& psi, int j) const;

  struct CommutatorPair {
    double num;  // ||Delta^j curl(nabla_u u) - nabla_u(Delta^j curl u)||_L2
    double den;  // ||u||^2_{H^{2j+1}}
  };
  CommutatorPair advection_commutator_residual(const SpectralScalar& psi,
                                               int j) const;

 private:
  const Basis* basis_;
  std::vector<double> mu_;                 // mu(theta_j)
  std::vector<Eigen::MatrixXd> coupling_;  // per-m symmetric matrices
};

}  // namespace ellflow
