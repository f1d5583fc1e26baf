#pragma once

#include <cstddef>

#include "ellflow/basis.hpp"

// Vector calculus on E^2. Tangent fields are stored as physical (unit-frame)
// components (u_phi, u_theta) on the grid. Orientation convention: the perp
// rotation is J(a_phi, a_theta) = (a_theta, -a_phi), fixed so that
// curl(perp_grad psi) = Laplacian psi holds (discretely to machine precision,
// by the Galerkin structure of the transforms).

namespace ellflow {

struct VelocityField {
  GridScalar u_phi;
  GridScalar u_theta;

  VelocityField() = default;
  explicit VelocityField(const Geometry& g) : u_phi(g), u_theta(g) {}
  const Geometry& geom() const { return *u_phi.geom; }
};

// u = grad psi: u_phi = d_phi psi / cos, u_theta = d_theta psi / m
VelocityField grad(const SpectralScalar& psi);

// u = perp_grad psi: u_phi = d_theta psi / m, u_theta = -d_phi psi / cos
VelocityField perp_grad(const SpectralScalar& psi);

// J u = (u_theta, -u_phi)
VelocityField perp(const VelocityField& u);

// Scalar curl in coefficient space (computed by the adjoint quadrature so that
// curl(perp_grad) = Laplacian exactly); circulation mean reported separately.
SpectralScalar curl(const VelocityField& u, const Basis& basis,
                    double* mean = nullptr);

SpectralScalar div(const VelocityField& u, const Basis& basis,
                   double* mean = nullptr);

struct HodgeParts {
  SpectralScalar potential;  // Phi, with u_irr = grad Phi
  SpectralScalar stream;     // Psi, with u_inc = perp_grad Psi
};

HodgeParts hodge_decompose(const VelocityField& u, const Basis& basis);

// Covariant advection nabla_u u via the Cartesian-component route (the
// Appendix expansion): differentiate Cartesian components tangentially, then
// project back onto the tangent plane. Cross-check oracle for the vorticity
// solver, not on the hot path.
VelocityField advect(const VelocityField& u, const Basis& basis);

// Coefficients of u . grad q for u = perp_grad psi:
// (1/(cos m)) (d_theta psi d_phi q - d_phi psi d_theta q), formed on the grid
// and re-analyzed (spectral truncation = dealiasing in l; requires the 2/3
// band-limit contract checked at construction of the run, not here).
SpectralScalar jacobian(const SpectralScalar& psi, const SpectralScalar& q);

double l2_inner(const GridScalar& a, const GridScalar& b);
double l2_inner(const VelocityField& a, const VelocityField& b);
// Spectral inner product sum_{l,m} c_m Re(a conj(b)) (equals the L2 integral).
double l2_inner(const SpectralScalar& a, const SpectralScalar& b);

// ||psi||_{H^k} = sqrt(sum Lambda^k |psi|^2); k >= 0.
double hk_norm_scalar(const SpectralScalar& psi, int k);
// Velocity norm of the div-free field perp_grad psi: exponent k+1.
double hk_norm_velocity(const SpectralScalar& psi, int k);

double l2_norm(const VelocityField& u);

}  // namespace ellflow
