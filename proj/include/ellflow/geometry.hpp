#pragma once

#include <array>
#include <cstddef>
#include <vector>

// Biaxial ellipsoid E^2: x^2 + y^2 + z^2/b^2 = 1, parameterized by
// (theta, phi) -> (cos t cos p, cos t sin p, b sin t). Scale factors
// h_phi = cos(theta), h_theta = m(theta) = sqrt(sin^2 + b^2 cos^2).

namespace ellflow {

using Vec3 = std::array<double, 3>;

double metric_m(double b, double theta);

// F(theta) = -2 sin(theta)/m(theta); omega*(-F) is the local Coriolis parameter.
double coriolis_profile(double b, double theta);

// dF/dtheta = -2 b^2 cos(theta)/m^3
double coriolis_gradient(double b, double theta);

struct Frame {
  Vec3 point;    // embedding (cos t cos p, cos t sin p, b sin t)
  Vec3 e_phi;    // (-sin p, cos p, 0), unit length
  Vec3 e_theta;  // (-sin t cos p, -sin t sin p, b cos t), length m(theta)
  Vec3 normal;   // unit outward normal
};

Frame embed(double b, double theta, double phi);

// Physical (unit-frame) tangent components -> Cartesian vector.
Vec3 components_to_cartesian(double b, double v_phi, double v_theta, double theta,
                             double phi);

// Inverse of components_to_cartesian for tangent vectors.
void cartesian_to_components(double b, const Vec3& v, double theta, double phi,
                             double& v_phi, double& v_theta);

struct Geometry {
  double b = 1.0;
  std::size_t n_theta = 0;
  std::size_t n_phi = 0;
  std::vector<double> theta_nodes;  // ascending, strictly interior
  std::vector<double> s_nodes;      // sin(theta_j), Gauss-Legendre nodes
  std::vector<double> gl_weights;   // plain Gauss-Legendre weights in s
  std::vector<double> quad_weights; // w_j = glw_j * m_j; area = 2*pi*sum w_j
  std::vector<double> m_vals;
  std::vector<double> cos_vals;
  std::vector<double> F_vals;
  std::vector<double> dF_vals;
  std::vector<double> phi_nodes;    // uniform on [-pi, pi)

  double area() const;
  // integral of a grid function f(j,i) stored row-major [j*n_phi + i]
  double integrate(const std::vector<double>& values) const;
};

// Gauss-Legendre nodes/weights on (-1,1), ascending nodes.
void gauss_legendre(std::size_t n, std::vector<double>& nodes, std::vector<double>& weights);

// Throws std::invalid_argument for b outside (0,1] or undersized grids
// (n_theta >= 8, n_phi >= 8 and even).
Geometry build_geometry(double b, std::size_t n_theta, std::size_t n_phi);

}  // namespace ellflow
