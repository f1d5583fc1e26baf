#include "ellflow/rotation.hpp"

#include <cmath>
#include <stdexcept>

namespace ellflow {

RotationOps::RotationOps(const Basis& basis) : basis_(&basis) {
  const Geometry& g = basis.geom;
  mu_.resize(g.n_theta);
  for (std::size_t j = 0; j < g.n_theta; ++j) {
    const double m2 = g.m_vals[j] * g.m_vals[j];
    mu_[j] = 2.0 * g.b * g.b / (m2 * m2);
  }
  coupling_.resize(basis.m_max + 1);
  for (std::size_t m = 0; m <= basis.m_max; ++m) {
    const auto& blk = basis.blocks[m];
    const std::size_t nl = blk.n_l(), nt = g.n_theta;
    Eigen::MatrixXd Y(nl, nt);
    for (std::size_t k = 0; k < nl; ++k)
      for (std::size_t j = 0; j < nt; ++j) Y(k, j) = blk.modes[k * nt + j];
    Eigen::VectorXd w(nt);
    for (std::size_t j = 0; j < nt; ++j) w(j) = g.quad_weights[j] * mu_[j];
    coupling_[m] = Y * w.asDiagonal() * Y.transpose();
  }
}

SpectralScalar RotationOps::coriolis_curl_term(const SpectralScalar& psi) const {
  const Basis& basis = *basis_;
  SpectralScalar out(basis);
  for (std::size_t m = 1; m <= basis.m_max; ++m) {
    const auto& blk = basis.blocks[m];
    const std::size_t nl = blk.n_l(), off = basis.offsets[m];
    Eigen::VectorXd re(nl), im(nl);
    for (std::size_t k = 0; k < nl; ++k) {
      re(k) = psi.coeffs[off + k].real();
      im(k) = psi.coeffs[off + k].imag();
    }
    const Eigen::VectorXd cre = coupling_[m] * re;
    const Eigen::VectorXd cim = coupling_[m] * im;
    const double dm = static_cast<double>(m);
    for (std::size_t k = 0; k < nl; ++k)
      out.coeffs[off + k] = {-dm * cim(k), dm * cre(k)};
  }
  return out;
}

SpectralScalar RotationOps::l_apply_streamform(const SpectralScalar& psi) const {
  SpectralScalar out = coriolis_curl_term(psi);
  return invert_laplacian(out);
}

VelocityField RotationOps::l_apply(const VelocityField& u) const {
  const Geometry& g = basis_->geom;
  VelocityField w(g);
  for (std::size_t j = 0; j < g.n_theta; ++j) {
    const double F = g.F_vals[j];
    for (std::size_t i = 0; i < g.n_phi; ++i) {
      // J u = (u_theta, -u_phi)
      w.u_phi.at(j, i) = F * u.u_theta.at(j, i);
      w.u_theta.at(j, i) = -F * u.u_phi.at(j, i);
    }
  }
  SpectralScalar chi = invert_laplacian(curl(w, *basis_));
  return perp_grad(chi);
}

VelocityField RotationOps::null_projection(const VelocityField& u) const {
  const Geometry& g = basis_->geom;
  VelocityField out(g);
  for (std::size_t j = 0; j < g.n_theta; ++j) {
    double mean = 0.0;
    for (std::size_t i = 0; i < g.n_phi; ++i) mean += u.u_phi.at(j, i);
    mean /= static_cast<double>(g.n_phi);
    for (std::size_t i = 0; i < g.n_phi; ++i) out.u_phi.at(j, i) = mean;
  }
  return out;
}

SpectralScalar RotationOps::null_projection_stream(const SpectralScalar& psi) const {
  SpectralScalar out(*basis_);
  const auto& blk0 = basis_->blocks[0];
  for (std::size_t k = 0; k < blk0.n_l(); ++k)
    out.coeffs[basis_->offsets[0] + k] = psi.coeffs[basis_->offsets[0] + k];
  return out;
}

RotationOps::GapPair RotationOps::key_estimate_gap(const SpectralScalar& psi,
                                                   int k) const {
  if (k < 0) throw std::invalid_argument("key_estimate_gap: k must be >= 0");
  const Basis& basis = *basis_;
  SpectralScalar chi = l_apply_streamform(psi);
  double lhs2 = 0.0, rhs2 = 0.0;
  for (std::size_t m = 1; m <= basis.m_max; ++m) {
    const auto& blk = basis.blocks[m];
    const std::size_t off = basis.offsets[m];
    for (std::size_t kk = 0; kk < blk.n_l(); ++kk) {
      const double lam = blk.lambda[kk];
      lhs2 += 2.0 * std::pow(lam, k + 1) * std::norm(psi.coeffs[off + kk]);
      rhs2 += 2.0 * std::pow(lam, k + 3) * std::norm(chi.coeffs[off + kk]);
    }
  }
  return {std::sqrt(lhs2), std::sqrt(rhs2)};
}

double RotationOps::commutation_residual(const SpectralScalar& psi, int j) const {
  if (j < 0) throw std::invalid_argument("commutation_residual: j must be >= 0");
  const Basis& basis = *basis_;
  SpectralScalar chi = l_apply_streamform(psi);
  double inner = 0.0, na2 = 0.0, nb2 = 0.0;
  for (std::size_t m = 0; m <= basis.m_max; ++m) {
    const double cm = (m == 0) ? 1.0 : 2.0;
    const auto& blk = basis.blocks[m];
    const std::size_t off = basis.offsets[m];
    for (std::size_t k = 0; k < blk.n_l(); ++k) {
      const double lam = blk.lambda[k];
      const double w = std::pow(lam, 2 * j + 1);
      const auto a = psi.coeffs[off + k];
      const auto b = chi.coeffs[off + k];
      inner += cm * w * (a.real() * b.real() + a.imag() * b.imag());
      na2 += cm * w * std::norm(a);
      nb2 += cm * w * std::norm(b);
    }
  }
  const double tiny = 1e-300;
  return std::abs(inner) / (std::sqrt(na2) * std::sqrt(nb2) + tiny);
}

RotationOps::CommutatorPair RotationOps::advection_commutator_residual(
    const SpectralScalar& psi, int j) const {
  if (j < 1)
    throw std::invalid_argument("advection_commutator_residual: j must be >= 1");
  const Basis& basis = *basis_;

  VelocityField u = perp_grad(psi);
  SpectralScalar curl_adv = curl(advect(u, basis), basis);

  // Delta^j curl(nabla_u u) in coefficients
  SpectralScalar term1 = curl_adv;
  SpectralScalar zeta_j(basis);  // Delta^j curl u = (-Lambda)^{j+1} psi
  for (std::size_t m = 0; m <= basis.m_max; ++m) {
    const auto& blk = basis.blocks[m];
    const std::size_t off = basis.offsets[m];
    for (std::size_t k = 0; k < blk.n_l(); ++k) {
      const double lam = blk.lambda[k];
      term1.coeffs[off + k] *= std::pow(-lam, j);
      zeta_j.coeffs[off + k] = psi.coeffs[off + k] * std::pow(-lam, j + 1);
    }
  }
  SpectralScalar term2 = jacobian(psi, zeta_j);  // nabla_u (Delta^j curl u)

  double num2 = 0.0;
  for (std::size_t m = 0; m <= basis.m_max; ++m) {
    const double cm = (m == 0) ? 1.0 : 2.0;
    const auto& blk = basis.blocks[m];
    const std::size_t off = basis.offsets[m];
    for (std::size_t k = 0; k < blk.n_l(); ++k)
      num2 += cm * std::norm(term1.coeffs[off + k] - term2.coeffs[off + k]);
  }
  const double hn = hk_norm_velocity(psi, 2 * j + 1);
  return {std::sqrt(num2), hn * hn};
}

}  // namespace ellflow
