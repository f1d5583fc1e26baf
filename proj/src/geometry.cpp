#include "ellflow/geometry.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace ellflow {

namespace {
constexpr double kPi = std::numbers::pi;
}

double metric_m(double b, double theta) {
  const double s = std::sin(theta), c = std::cos(theta);
  return std::sqrt(s * s + b * b * c * c);
}

double coriolis_profile(double b, double theta) {
  return -2.0 * std::sin(theta) / metric_m(b, theta);
}

double coriolis_gradient(double b, double theta) {
  const double m = metric_m(b, theta);
  return -2.0 * b * b * std::cos(theta) / (m * m * m);
}

Frame embed(double b, double theta, double phi) {
  const double st = std::sin(theta), ct = std::cos(theta);
  const double sp = std::sin(phi), cp = std::cos(phi);
  Frame f;
  f.point = {ct * cp, ct * sp, b * st};
  f.e_phi = {-sp, cp, 0.0};
  f.e_theta = {-st * cp, -st * sp, b * ct};
  // normal = cross(e_phi, e_theta) normalized; orientation outward
  Vec3 n = {f.e_phi[1] * f.e_theta[2] - f.e_phi[2] * f.e_theta[1],
            f.e_phi[2] * f.e_theta[0] - f.e_phi[0] * f.e_theta[2],
            f.e_phi[0] * f.e_theta[1] - f.e_phi[1] * f.e_theta[0]};
  const double len = std::sqrt(n[0] * n[0] + n[1] * n[1] + n[2] * n[2]);
  // cross(e_phi, e_theta) = (b ct cp, b ct sp, -st ct)... flip to outward
  double outward = n[0] * f.point[0] + n[1] * f.point[1] + n[2] * f.point[2];
  const double sgn = (outward >= 0.0) ? 1.0 : -1.0;
  f.normal = {sgn * n[0] / len, sgn * n[1] / len, sgn * n[2] / len};
  return f;
}

Vec3 components_to_cartesian(double b, double v_phi, double v_theta, double theta,
                             double phi) {
  const Frame f = embed(b, theta, phi);
  const double mt = metric_m(b, theta);
  return {v_phi * f.e_phi[0] + v_theta * f.e_theta[0] / mt,
          v_phi * f.e_phi[1] + v_theta * f.e_theta[1] / mt,
          v_phi * f.e_phi[2] + v_theta * f.e_theta[2] / mt};
}

void cartesian_to_components(double b, const Vec3& v, double theta, double phi,
                             double& v_phi, double& v_theta) {
  const Frame f = embed(b, theta, phi);
  const double mt = metric_m(b, theta);
  // e_phi and e_theta are orthogonal; e_phi is unit, |e_theta| = m.
  v_phi = v[0] * f.e_phi[0] + v[1] * f.e_phi[1] + v[2] * f.e_phi[2];
  v_theta = (v[0] * f.e_theta[0] + v[1] * f.e_theta[1] + v[2] * f.e_theta[2]) / mt;
}

void gauss_legendre(std::size_t n, std::vector<double>& nodes,
                    std::vector<double>& weights) {
  nodes.assign(n, 0.0);
  weights.assign(n, 0.0);
  const std::size_t half = (n + 1) / 2;
  for (std::size_t k = 0; k < half; ++k) {
    // Newton iteration from the Chebyshev-like initial guess
    double x = std::cos(kPi * (static_cast<double>(k) + 0.75) /
                        (static_cast<double>(n) + 0.5));
    double pp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * x * p1 - static_cast<double>(j) * p2) /
             (static_cast<double>(j) + 1.0);
      }
      pp = static_cast<double>(n) * (x * p0 - p1) / (x * x - 1.0);
      const double dx = p0 / pp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    nodes[k] = -x;
    nodes[n - 1 - k] = x;
    const double w = 2.0 / ((1.0 - x * x) * pp * pp);
    weights[k] = w;
    weights[n - 1 - k] = w;
  }
}

double Geometry::area() const {
  double s = 0.0;
  for (double w : quad_weights) s += w;
  return 2.0 * kPi * s;
}

double Geometry::integrate(const std::vector<double>& values) const {
  const double dphi = 2.0 * kPi / static_cast<double>(n_phi);
  double total = 0.0;
  for (std::size_t j = 0; j < n_theta; ++j) {
    double row = 0.0;
    for (std::size_t i = 0; i < n_phi; ++i) row += values[j * n_phi + i];
    total += quad_weights[j] * row;
  }
  return total * dphi;
}

Geometry build_geometry(double b, std::size_t n_theta, std::size_t n_phi) {
  if (!(b > 0.0) || b > 1.0) throw std::invalid_argument("build_geometry: b must be in (0,1]");
  if (n_theta < 8) throw std::invalid_argument("build_geometry: n_theta must be >= 8");
  if (n_phi < 8 || n_phi % 2 != 0)
    throw std::invalid_argument("build_geometry: n_phi must be >= 8 and even");

  Geometry g;
  g.b = b;
  g.n_theta = n_theta;
  g.n_phi = n_phi;
  gauss_legendre(n_theta, g.s_nodes, g.gl_weights);
  g.theta_nodes.resize(n_theta);
  g.quad_weights.resize(n_theta);
  g.m_vals.resize(n_theta);
  g.cos_vals.resize(n_theta);
  g.F_vals.resize(n_theta);
  g.dF_vals.resize(n_theta);
  for (std::size_t j = 0; j < n_theta; ++j) {
    const double theta = std::asin(g.s_nodes[j]);
    g.theta_nodes[j] = theta;
    g.m_vals[j] = metric_m(b, theta);
    g.cos_vals[j] = std::cos(theta);
    g.F_vals[j] = coriolis_profile(b, theta);
    g.dF_vals[j] = coriolis_gradient(b, theta);
    g.quad_weights[j] = g.gl_weights[j] * g.m_vals[j];
  }
  g.phi_nodes.resize(n_phi);
  for (std::size_t i = 0; i < n_phi; ++i)
    g.phi_nodes[i] = -kPi + 2.0 * kPi * static_cast<double>(i) / static_cast<double>(n_phi);
  return g;
}

}  // namespace ellflow
