#pragma once

#include <complex>
#include <cstddef>
#include <string>
#include <vector>

#include "ellflow/geometry.hpp"

// Ellipsoidal-harmonic eigenbasis of the Laplace-Beltrami operator on E^2:
// -Delta Y_l^m = Lambda_{l,m} Y_l^m with Y_l^m = Y(theta) e^{i m phi}/sqrt(2 pi).
// For each zonal wavenumber m the theta-profiles solve the Sturm-Liouville
// problem in s = sin(theta)
//   -d/ds[ ((1-s^2)/m(s)) dY/ds ] + (m^2 m(s)/(1-s^2)) Y = Lambda m(s) Y
// discretized by Galerkin projection onto orthonormal associated Legendre
// functions; the resulting symmetric-definite pencil is diagonal at b = 1.
//
// Stored profiles satisfy sum_j w_j Y_l(theta_j) Y_l'(theta_j) = delta_{ll'};
// the 1/sqrt(2 pi) lives in the transforms, so Parseval holds with no extra
// factor: integral |f|^2 dA = |psi_00-mean part| + sum_m c_m |psi_l^m|^2,
// c_m = 1 for m = 0 and 2 for m > 0 (coefficients stored for m >= 0 only).
// The l = 0 mean is excluded from the representation.

namespace ellflow {

// Orthonormal associated Legendre P-bar_l^m(s), l = m..l_top, with
// int_{-1}^{1} P^2 ds = 1, no Condon-Shortley sign. Also d/ds.
void assoc_legendre_normalized(std::size_t m, std::size_t l_top, double s,
                               std::vector<double>& vals, std::vector<double>& ders);

struct GridScalar {
  const Geometry* geom = nullptr;
  std::vector<double> values;  // row-major [j * n_phi + i]

  GridScalar() = default;
  explicit GridScalar(const Geometry& g)
      : geom(&g), values(g.n_theta * g.n_phi, 0.0) {}
  double& at(std::size_t j, std::size_t i) { return values[j * geom->n_phi + i]; }
  double at(std::size_t j, std::size_t i) const { return values[j * geom->n_phi + i]; }
};

class Basis {
 public:
  Geometry geom;
  std::size_t l_max = 0;
  std::size_t m_max = 0;  // = l_max (square truncation)

  struct MBlock {
    std::size_t l_min = 1;          // max(m, 1); l = l_min + k for stored index k
    std::vector<double> lambda;     // eigenvalues, strictly increasing
    // all matrices row-major, n_l rows of length n_theta
    std::vector<double> modes;          // Y_l(theta_j)
    std::vector<double> dmodes;         // dY_l/dtheta
    std::vector<double> wmodes;         // w_j Y_l
    std::vector<double> wdmodes_over_m; // w_j (dY_l/dtheta)/m_j
    std::vector<double> wmodes_over_cos;// w_j Y_l/cos_j
    std::vector<double> cos_tab, sin_tab;  // cos(m phi_i), sin(m phi_i)
    std::size_t n_l() const { return lambda.size(); }
  };
  std::vector<MBlock> blocks;       // index by m
  std::vector<std::size_t> offsets; // coefficient offset of each m-block
  std::size_t n_coeff = 0;

  std::size_t index(std::size_t l, std::size_t m) const {
    return offsets[m] + (l - blocks[m].l_min);
  }
  double lambda_of(std::size_t l, std::size_t m) const {
    return blocks[m].lambda[l - blocks[m].l_min];
  }
  double lambda_min() const;
};

// Requires l_max >= 2 and n_theta >= 2*l_max. Throws on eigensolver failure or
// a non-monotone eigenvalue table (insufficient resolution).
Basis build_basis(const Geometry& geom, std::size_t l_max);

void save_basis(const Basis& basis, const std::string& path);
Basis load_basis(const std::string& path);

struct SpectralScalar {
  const Basis* basis = nullptr;
  std::vector<std::complex<double>> coeffs;  // blocks for m = 0..m_max

  SpectralScalar() = default;
  explicit SpectralScalar(const Basis& b) : basis(&b), coeffs(b.n_coeff, 0.0) {}
  std::complex<double>& at(std::size_t l, std::size_t m) {
    return coeffs[basis->index(l, m)];
  }
  std::complex<double> at(std::size_t l, std::size_t m) const {
    return coeffs[basis->index(l, m)];
  }
};

// Forward transform; the area mean (excluded l=0 part) is reported through
// `mean` when non-null.
SpectralScalar analysis(const GridScalar& field, const Basis& basis,
                        double* mean = nullptr);

GridScalar synthesis(const SpectralScalar& coeffs);
GridScalar synthesis_dtheta(const SpectralScalar& coeffs);  // d/dtheta on the grid
GridScalar synthesis_dphi(const SpectralScalar& coeffs);    // d/dphi on the grid

SpectralScalar apply_laplacian(const SpectralScalar& coeffs);
SpectralScalar invert_laplacian(const SpectralScalar& coeffs);

}  // namespace ellflow
