#include "ellflow/calculus.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "ellflow/kernels.hpp"

namespace ellflow {

namespace {
const double kSqrt2Pi = std::sqrt(2.0 * std::numbers::pi);

// phi-analysis of one grid scalar at wavenumber m: out_re/out_im per theta row
void phi_analysis(const GridScalar& f, const Basis::MBlock& blk, std::size_t np,
                  std::vector<double>& out_re, std::vector<double>& out_im) {
  const std::size_t nt = out_re.size();
  const double c = kSqrt2Pi / static_cast<double>(np);
  for (std::size_t j = 0; j < nt; ++j) {
    const double* row = f.values.data() + j * np;
    out_re[j] = c * kernels::dot(row, blk.cos_tab.data(), np);
    out_im[j] = -c * kernels::dot(row, blk.sin_tab.data(), np);
  }
}

}  // namespace

VelocityField grad(const SpectralScalar& psi) {
  const Geometry& g = psi.basis->geom;
  VelocityField u(g);
  GridScalar dphi = synthesis_dphi(psi);
  GridScalar dtheta = synthesis_dtheta(psi);
  for (std::size_t j = 0; j < g.n_theta; ++j)
    for (std::size_t i = 0; i < g.n_phi; ++i) {
      u.u_phi.at(j, i) = dphi.at(j, i) / g.cos_vals[j];
      u.u_theta.at(j, i) = dtheta.at(j, i) / g.m_vals[j];
    }
  return u;
}

VelocityField perp_grad(const SpectralScalar& psi) {
  const Geometry& g = psi.basis->geom;
  VelocityField u(g);
  GridScalar dphi = synthesis_dphi(psi);
  GridScalar dtheta = synthesis_dtheta(psi);
  for (std::size_t j = 0; j < g.n_theta; ++j)
    for (std::size_t i = 0; i < g.n_phi; ++i) {
      u.u_phi.at(j, i) = dtheta.at(j, i) / g.m_vals[j];
      u.u_theta.at(j, i) = -dphi.at(j, i) / g.cos_vals[j];
    }
  return u;
}

VelocityField perp(const VelocityField& u) {
  VelocityField v(u.geom());
  v.u_phi.values = u.u_theta.values;
  for (std::size_t n = 0; n < u.u_phi.values.size(); ++n)
    v.u_theta.values[n] = -u.u_phi.values[n];
  return v;
}

SpectralScalar curl(const VelocityField& u, const Basis& basis, double* mean) {
  const Geometry& g = basis.geom;
  const std::size_t nt = g.n_theta, np = g.n_phi;
  SpectralScalar out(basis);
  std::vector<double> pr(nt), pi(nt), tr(nt), ti(nt);
  for (std::size_t m = 0; m <= basis.m_max; ++m) {
    const auto& blk = basis.blocks[m];
    phi_analysis(u.u_phi, blk, np, pr, pi);
    phi_analysis(u.u_theta, blk, np, tr, ti);
    const double dm = static_cast<double>(m);
    for (std::size_t k = 0; k < blk.n_l(); ++k) {
      const double* wd = blk.wdmodes_over_m.data() + k * nt;
      const double* wc = blk.wmodes_over_cos.data() + k * nt;
      // <curl u, Y e^{im phi}> = -<u_phi, d_theta(conj mode)/m>
      //                          -<u_theta, d_phi(conj mode)/cos>
      const double re = -kernels::dot(wd, pr.data(), nt) +
                        dm * kernels::dot(wc, ti.data(), nt);
      const double im = -kernels::dot(wd, pi.data(), nt) -
                        dm * kernels::dot(wc, tr.data(), nt);
      out.coeffs[basis.offsets[m] + k] = {re, im};
    }
  }
  // total circulation vanishes identically under the adjoint quadrature
  // (the constant test function has zero gradient)
  if (mean) *mean = 0.0;
  return out;
}

SpectralScalar div(const VelocityField& u, const Basis& basis, double* mean) {
  const Geometry& g = basis.geom;
  const std::size_t nt = g.n_theta, np = g.n_phi;
  SpectralScalar out(basis);
  std::vector<double> pr(nt), pi(nt), tr(nt), ti(nt);
  for (std::size_t m = 0; m <= basis.m_max; ++m) {
    const auto& blk = basis.blocks[m];
    phi_analysis(u.u_phi, blk, np, pr, pi);
    phi_analysis(u.u_theta, blk, np, tr, ti);
    const double dm = static_cast<double>(m);
    for (std::size_t k = 0; k < blk.n_l(); ++k) {
      const double* wd = blk.wdmodes_over_m.data() + k * nt;
      const double* wc = blk.wmodes_over_cos.data() + k * nt;
      // <div u, Y e^{im phi}> = -<u, grad of the conjugate mode>
      const double re = -dm * kernels::dot(wc, pi.data(), nt) -
                        kernels::dot(wd, tr.data(), nt);
      const double im = dm * kernels::dot(wc, pr.data(), nt) -
                        kernels::dot(wd, ti.data(), nt);
      out.coeffs[basis.offsets[m] + k] = {re, im};
    }
  }
  if (mean) *mean = 0.0;
  return out;
}

HodgeParts hodge_decompose(const VelocityField& u, const Basis& basis) {
  HodgeParts h;
  h.potential = invert_laplacian(div(u, basis));
  h.stream = invert_laplacian(curl(u, basis));
  return h;
}

VelocityField advect(const VelocityField& u, const Basis& basis) {
  const Geometry& g = basis.geom;
  const std::size_t nt = g.n_theta, np = g.n_phi;

  // Cartesian components of u on the grid
  GridScalar vx(g), vy(g), vz(g);
  for (std::size_t j = 0; j < nt; ++j)
    for (std::size_t i = 0; i < np; ++i) {
      Vec3 v = components_to_cartesian(g.b, u.u_phi.at(j, i), u.u_theta.at(j, i),
                                       g.theta_nodes[j], g.phi_nodes[i]);
      vx.at(j, i) = v[0];
      vy.at(j, i) = v[1];
      vz.at(j, i) = v[2];
    }

  // tangential derivatives of each component, pseudospectrally
  auto deriv = [&](const GridScalar& f, GridScalar& dphi, GridScalar& dtheta) {
    SpectralScalar c = analysis(f, basis);
    dphi = synthesis_dphi(c);
    dtheta = synthesis_dtheta(c);
  };
  GridScalar dxp, dxt, dyp, dyt, dzp, dzt;
  deriv(vx, dxp, dxt);
  deriv(vy, dyp, dyt);
  deriv(vz, dzp, dzt);

  VelocityField out(g);
  for (std::size_t j = 0; j < nt; ++j) {
    const double ct = g.cos_vals[j], mt = g.m_vals[j];
    for (std::size_t i = 0; i < np; ++i) {
      const double a = u.u_phi.at(j, i) / ct;   // coefficient of d/dphi
      const double b = u.u_theta.at(j, i) / mt; // coefficient of d/dtheta
      Vec3 w = {a * dxp.at(j, i) + b * dxt.at(j, i),
                a * dyp.at(j, i) + b * dyt.at(j, i),
                a * dzp.at(j, i) + b * dzt.at(j, i)};
      // tangential projection via the orthogonal unit frame
      double wp, wt;
      cartesian_to_components(g.b, w, g.theta_nodes[j], g.phi_nodes[i], wp, wt);
      out.u_phi.at(j, i) = wp;
      out.u_theta.at(j, i) = wt;
    }
  }
  return out;
}

SpectralScalar jacobian(const SpectralScalar& psi, const SpectralScalar& q) {
  const Basis& basis = *psi.basis;
  const Geometry& g = basis.geom;
  GridScalar pt = synthesis_dtheta(psi);
  GridScalar pp = synthesis_dphi(psi);
  GridScalar qt = synthesis_dtheta(q);
  GridScalar qp = synthesis_dphi(q);
  GridScalar prod(g);
  for (std::size_t j = 0; j < g.n_theta; ++j) {
    const double inv = 1.0 / (g.cos_vals[j] * g.m_vals[j]);
    for (std::size_t i = 0; i < g.n_phi; ++i)
      prod.at(j, i) =
          inv * (pt.at(j, i) * qp.at(j, i) - pp.at(j, i) * qt.at(j, i));
  }
  return analysis(prod, basis);
}

double l2_inner(const GridScalar& a, const GridScalar& b) {
  const Geometry& g = *a.geom;
  std::vector<double> prod(a.values.size());
  for (std::size_t n = 0; n < prod.size(); ++n) prod[n] = a.values[n] * b.values[n];
  return g.integrate(prod);
}

double l2_inner(const VelocityField& a, const VelocityField& b) {
  return l2_inner(a.u_phi, b.u_phi) + l2_inner(a.u_theta, b.u_theta);
}

double l2_inner(const SpectralScalar& a, const SpectralScalar& b) {
  const Basis& basis = *a.basis;
  double s = 0.0;
  for (std::size_t m = 0; m <= basis.m_max; ++m) {
    const double cm = (m == 0) ? 1.0 : 2.0;
    const auto& blk = basis.blocks[m];
    for (std::size_t k = 0; k < blk.n_l(); ++k) {
      const auto av = a.coeffs[basis.offsets[m] + k];
      const auto bv = b.coeffs[basis.offsets[m] + k];
      s += cm * (av.real() * bv.real() + av.imag() * bv.imag());
    }
  }
  return s;
}

namespace {
double spectral_weighted_norm(const SpectralScalar& psi, int power) {
  const Basis& basis = *psi.basis;
  double s = 0.0;
  for (std::size_t m = 0; m <= basis.m_max; ++m) {
    const double cm = (m == 0) ? 1.0 : 2.0;
    const auto& blk = basis.blocks[m];
    for (std::size_t k = 0; k < blk.n_l(); ++k) {
      const double lam = blk.lambda[k];
      s += cm * std::pow(lam, power) * std::norm(psi.coeffs[basis.offsets[m] + k]);
    }
  }
  return std::sqrt(s);
}
}  // namespace

double hk_norm_scalar(const SpectralScalar& psi, int k) {
  if (k < 0) throw std::invalid_argument("hk_norm_scalar: k must be >= 0");
  return spectral_weighted_norm(psi, k);
}

double hk_norm_velocity(const SpectralScalar& psi, int k) {
  if (k < 0) throw std::invalid_argument("hk_norm_velocity: k must be >= 0");
  return spectral_weighted_norm(psi, k + 1);
}

double l2_norm(const VelocityField& u) {
  return std::sqrt(l2_inner(u, u));
}

}  // namespace ellflow
