#include "ellflow/basis.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <numbers>
#include <stdexcept>

#include "ellflow/kernels.hpp"

namespace ellflow {

namespace {
constexpr double kPi = std::numbers::pi;
const double kSqrt2Pi = std::sqrt(2.0 * kPi);
constexpr std::uint32_t kBasisMagic = 0x53424C45;  // "ELBS"
constexpr std::uint32_t kBasisVersion = 1;
constexpr std::uint32_t kEndianTag = 0x01020304;
}  // namespace

void assoc_legendre_normalized(std::size_t m, std::size_t l_top, double s,
                               std::vector<double>& vals, std::vector<double>& ders) {
  const std::size_t n = l_top + 1 - m;
  vals.assign(n, 0.0);
  ders.assign(n, 0.0);
  const double one_m_s2 = 1.0 - s * s;

  double pmm = std::sqrt(0.5);
  for (std::size_t k = 1; k <= m; ++k)
    pmm *= std::sqrt((2.0 * k + 1.0) / (2.0 * k)) * std::sqrt(one_m_s2);
  vals[0] = pmm;
  if (n > 1) vals[1] = std::sqrt(2.0 * m + 3.0) * s * pmm;
  for (std::size_t l = m + 2; l <= l_top; ++l) {
    const double dl = static_cast<double>(l), dm = static_cast<double>(m);
    const double al = std::sqrt((4.0 * dl * dl - 1.0) / (dl * dl - dm * dm));
    const double alm1 =
        std::sqrt((4.0 * (dl - 1) * (dl - 1) - 1.0) / ((dl - 1) * (dl - 1) - dm * dm));
    vals[l - m] = al * (s * vals[l - m - 1] - vals[l - m - 2] / alm1);
  }
  // (1-s^2) P' = -l s P + c_l P_{l-1}, c_l = sqrt((2l+1)/(2l-1) (l^2-m^2))
  for (std::size_t l = m; l <= l_top; ++l) {
    const double dl = static_cast<double>(l), dm = static_cast<double>(m);
    double d = -dl * s * vals[l - m];
    if (l > m) {
      const double cl = std::sqrt((2.0 * dl + 1.0) / (2.0 * dl - 1.0) *
                                  (dl * dl - dm * dm));
      d += cl * vals[l - m - 1];
    }
    ders[l - m] = d / one_m_s2;
  }
}

double Basis::lambda_min() const {
  double v = blocks[0].lambda[0];
  for (const auto& blk : blocks)
    if (!blk.lambda.empty() && blk.lambda[0] < v) v = blk.lambda[0];
  return v;
}

namespace {

void fill_derived_tables(Basis& basis) {
  const Geometry& g = basis.geom;
  basis.offsets.assign(basis.m_max + 1, 0);
  basis.n_coeff = 0;
  for (std::size_t m = 0; m <= basis.m_max; ++m) {
    auto& blk = basis.blocks[m];
    basis.offsets[m] = basis.n_coeff;
    basis.n_coeff += blk.n_l();
    const std::size_t nt = g.n_theta;
    blk.wmodes.resize(blk.n_l() * nt);
    blk.wdmodes_over_m.resize(blk.n_l() * nt);
    blk.wmodes_over_cos.resize(blk.n_l() * nt);
    for (std::size_t k = 0; k < blk.n_l(); ++k) {
      for (std::size_t j = 0; j < nt; ++j) {
        const double w = g.quad_weights[j];
        blk.wmodes[k * nt + j] = w * blk.modes[k * nt + j];
        blk.wdmodes_over_m[k * nt + j] = w * blk.dmodes[k * nt + j] / g.m_vals[j];
        blk.wmodes_over_cos[k * nt + j] = w * blk.modes[k * nt + j] / g.cos_vals[j];
      }
    }
    blk.cos_tab.resize(g.n_phi);
    blk.sin_tab.resize(g.n_phi);
    for (std::size_t i = 0; i < g.n_phi; ++i) {
      blk.cos_tab[i] = std::cos(static_cast<double>(m) * g.phi_nodes[i]);
      blk.sin_tab[i] = std::sin(static_cast<double>(m) * g.phi_nodes[i]);
    }
  }
}

}  // namespace

Basis build_basis(const Geometry& geom, std::size_t l_max) {
  if (l_max < 2) throw std::invalid_argument("build_basis: l_max must be >= 2");
  if (geom.n_theta < 2 * l_max)
    throw std::invalid_argument("build_basis: need n_theta >= 2*l_max");

  Basis basis;
  basis.geom = geom;
  basis.l_max = l_max;
  basis.m_max = l_max;
  basis.blocks.resize(l_max + 1);

  const std::size_t nt = geom.n_theta;

  std::vector<double> pv, pd;
  for (std::size_t m = 0; m <= l_max; ++m) {
    auto& blk = basis.blocks[m];
    blk.l_min = std::max<std::size_t>(m, 1);
    const std::size_t n_keep = l_max - blk.l_min + 1;
    const std::size_t skip = (m == 0) ? 1 : 0;  // drop the constant mode
    // Galerkin basis size: margin for b < 1, capped so the b = 1 integrands
    // stay inside the quadrature's exactness degree.
    std::size_t n_basis = n_keep + skip + 33;
    if (n_basis > nt - m) n_basis = nt - m;
    if (n_basis < n_keep + skip)
      throw std::runtime_error("build_basis: insufficient n_theta for m-block " +
                               std::to_string(m));
    const std::size_t l_top = m + n_basis - 1;

    // P-bar values and d/ds at the quadrature nodes, row-major [l-m][j]
    Eigen::MatrixXd P(n_basis, nt), D(n_basis, nt);
    for (std::size_t j = 0; j < nt; ++j) {
      assoc_legendre_normalized(m, l_top, geom.s_nodes[j], pv, pd);
      for (std::size_t k = 0; k < n_basis; ++k) {
        P(k, j) = pv[k];
        D(k, j) = pd[k];
      }
    }

    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n_basis, n_basis);
    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(n_basis, n_basis);
    const double dm2 = static_cast<double>(m) * static_cast<double>(m);
    for (std::size_t j = 0; j < nt; ++j) {
      const double glw = geom.gl_weights[j];
      const double mj = geom.m_vals[j];
      const double c2 = geom.cos_vals[j] * geom.cos_vals[j];  // 1 - s^2
      const double wa_d = glw * c2 / mj;
      const double wa_p = (m == 0) ? 0.0 : glw * dm2 * mj / c2;
      const double wb = glw * mj;
      A.noalias() += wa_d * (D.col(j) * D.col(j).transpose());
      if (m != 0) A.noalias() += wa_p * (P.col(j) * P.col(j).transpose());
      B.noalias() += wb * (P.col(j) * P.col(j).transpose());
    }

    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> solver(A, B);
    if (solver.info() != Eigen::Success)
      throw std::runtime_error("build_basis: eigensolver failed for m = " +
                               std::to_string(m));

    blk.lambda.resize(n_keep);
    blk.modes.resize(n_keep * nt);
    blk.dmodes.resize(n_keep * nt);
    for (std::size_t k = 0; k < n_keep; ++k) {
      const std::size_t src = k + skip;
      blk.lambda[k] = solver.eigenvalues()(src);
      Eigen::VectorXd c = solver.eigenvectors().col(src);
      Eigen::VectorXd y = P.transpose() * c;   // Y(theta_j)
      Eigen::VectorXd dy = D.transpose() * c;  // dY/ds
      // fix the sign at the first node carrying signal
      double ref = 0.0;
      for (std::size_t j = 0; j < nt; ++j)
        if (std::abs(y(j)) > 1e-8 * y.cwiseAbs().maxCoeff()) {
          ref = y(j);
          break;
        }
      const double sgn = (ref < 0.0) ? -1.0 : 1.0;
      for (std::size_t j = 0; j < nt; ++j) {
        blk.modes[k * nt + j] = sgn * y(j);
        blk.dmodes[k * nt + j] = sgn * dy(j) * geom.cos_vals[j];  // d/dtheta
      }
    }
    for (std::size_t k = 0; k < n_keep; ++k) {
      if (!(blk.lambda[k] > 0.0) ||
          (k > 0 && !(blk.lambda[k] > blk.lambda[k - 1])))
        throw std::runtime_error(
            "build_basis: eigenvalue table not positive/increasing for m = " +
            std::to_string(m) + " (insufficient resolution)");
    }
  }

  fill_derived_tables(basis);
  return basis;
}

// ---------------------------------------------------------------------------
// transforms

SpectralScalar analysis(const GridScalar& field, const Basis& basis, double* mean) {
  const Geometry& g = basis.geom;
  if (field.geom->n_theta != g.n_theta || field.geom->n_phi != g.n_phi)
    throw std::invalid_argument("analysis: field/basis shape mismatch");
  SpectralScalar out(basis);
  const std::size_t nt = g.n_theta, np = g.n_phi;
  const double c = kSqrt2Pi / static_cast<double>(np);
  std::vector<double> fre(nt), fim(nt);
  for (std::size_t m = 0; m <= basis.m_max; ++m) {
    const auto& blk = basis.blocks[m];
    for (std::size_t j = 0; j < nt; ++j) {
      const double* row = field.values.data() + j * np;
      fre[j] = c * kernels::dot(row, blk.cos_tab.data(), np);
      fim[j] = -c * kernels::dot(row, blk.sin_tab.data(), np);
    }
    for (std::size_t k = 0; k < blk.n_l(); ++k) {
      const double* w = blk.wmodes.data() + k * nt;
      out.coeffs[basis.offsets[m] + k] = {kernels::dot(w, fre.data(), nt),
                                          kernels::dot(w, fim.data(), nt)};
    }
  }
  if (mean) *mean = g.integrate(field.values) / g.area();
  return out;
}

namespace {

// Shared synthesis core: selects the mode table and an optional i*m factor.
GridScalar synth_impl(const SpectralScalar& sc, bool use_dtheta, bool dphi) {
  const Basis& basis = *sc.basis;
  const Geometry& g = basis.geom;
  GridScalar out(g);
  const std::size_t nt = g.n_theta, np = g.n_phi;
  std::vector<double> gre(nt), gim(nt);
  for (std::size_t m = 0; m <= basis.m_max; ++m) {
    const auto& blk = basis.blocks[m];
    if (dphi && m == 0) continue;
    std::fill(gre.begin(), gre.end(), 0.0);
    std::fill(gim.begin(), gim.end(), 0.0);
    const std::vector<double>& tab = use_dtheta ? blk.dmodes : blk.modes;
    for (std::size_t k = 0; k < blk.n_l(); ++k) {
      std::complex<double> a = sc.coeffs[basis.offsets[m] + k];
      if (dphi) a *= std::complex<double>(0.0, static_cast<double>(m));
      const double* row = tab.data() + k * nt;
      if (a.real() != 0.0) kernels::axpy(a.real(), row, gre.data(), nt);
      if (a.imag() != 0.0) kernels::axpy(a.imag(), row, gim.data(), nt);
    }
    const double scale = ((m == 0) ? 1.0 : 2.0) / kSqrt2Pi;
    for (std::size_t j = 0; j < nt; ++j) {
      double* row = out.values.data() + j * np;
      kernels::axpby2(scale * gre[j], blk.cos_tab.data(), -scale * gim[j],
                      blk.sin_tab.data(), row, np);
    }
  }
  return out;
}

}  // namespace

GridScalar synthesis(const SpectralScalar& coeffs) {
  return synth_impl(coeffs, false, false);
}
GridScalar synthesis_dtheta(const SpectralScalar& coeffs) {
  return synth_impl(coeffs, true, false);
}
GridScalar synthesis_dphi(const SpectralScalar& coeffs) {
  return synth_impl(coeffs, false, true);
}

SpectralScalar apply_laplacian(const SpectralScalar& coeffs) {
  SpectralScalar out = coeffs;
  const Basis& basis = *coeffs.basis;
  for (std::size_t m = 0; m <= basis.m_max; ++m) {
    const auto& blk = basis.blocks[m];
    for (std::size_t k = 0; k < blk.n_l(); ++k)
      out.coeffs[basis.offsets[m] + k] *= -blk.lambda[k];
  }
  return out;
}

SpectralScalar invert_laplacian(const SpectralScalar& coeffs) {
  SpectralScalar out = coeffs;
  const Basis& basis = *coeffs.basis;
  for (std::size_t m = 0; m <= basis.m_max; ++m) {
    const auto& blk = basis.blocks[m];
    for (std::size_t k = 0; k < blk.n_l(); ++k)
      out.coeffs[basis.offsets[m] + k] /= -blk.lambda[k];
  }
  return out;
}

// ---------------------------------------------------------------------------
// serialization
//
// Little-endian binary layout:
//   u32 magic "ELBS", u32 version, u32 endian tag 0x01020304,
//   f64 b, u64 l_max, u64 n_theta, u64 n_phi,
//   then per m = 0..l_max: u64 n_l, f64 lambda[n_l],
//   f64 modes[n_l*n_theta], f64 dmodes[n_l*n_theta].
// Derived tables are rebuilt on load.

namespace {
template <typename T>
void put(std::ostream& os, const T& v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}
template <typename T>
void get(std::istream& is, T& v) {
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
}
}  // namespace

void save_basis(const Basis& basis, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("save_basis: cannot open " + path);
  put(os, kBasisMagic);
  put(os, kBasisVersion);
  put(os, kEndianTag);
  put(os, basis.geom.b);
  put(os, static_cast<std::uint64_t>(basis.l_max));
  put(os, static_cast<std::uint64_t>(basis.geom.n_theta));
  put(os, static_cast<std::uint64_t>(basis.geom.n_phi));
  for (const auto& blk : basis.blocks) {
    put(os, static_cast<std::uint64_t>(blk.n_l()));
    os.write(reinterpret_cast<const char*>(blk.lambda.data()),
             static_cast<std::streamsize>(blk.lambda.size() * sizeof(double)));
    os.write(reinterpret_cast<const char*>(blk.modes.data()),
             static_cast<std::streamsize>(blk.modes.size() * sizeof(double)));
    os.write(reinterpret_cast<const char*>(blk.dmodes.data()),
             static_cast<std::streamsize>(blk.dmodes.size() * sizeof(double)));
  }
  if (!os) throw std::runtime_error("save_basis: write failed for " + path);
}

Basis load_basis(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("load_basis: cannot open " + path);
  std::uint32_t magic = 0, version = 0, endian = 0;
  get(is, magic);
  get(is, version);
  get(is, endian);
  if (magic != kBasisMagic || version != kBasisVersion || endian != kEndianTag)
    throw std::runtime_error("load_basis: bad header in " + path);
  double b = 0;
  std::uint64_t l_max = 0, nt = 0, np = 0;
  get(is, b);
  get(is, l_max);
  get(is, nt);
  get(is, np);
  Basis basis;
  basis.geom = build_geometry(b, nt, np);
  basis.l_max = l_max;
  basis.m_max = l_max;
  basis.blocks.resize(l_max + 1);
  for (std::size_t m = 0; m <= l_max; ++m) {
    auto& blk = basis.blocks[m];
    blk.l_min = std::max<std::size_t>(m, 1);
    std::uint64_t n_l = 0;
    get(is, n_l);
    blk.lambda.resize(n_l);
    blk.modes.resize(n_l * nt);
    blk.dmodes.resize(n_l * nt);
    is.read(reinterpret_cast<char*>(blk.lambda.data()),
            static_cast<std::streamsize>(n_l * sizeof(double)));
    is.read(reinterpret_cast<char*>(blk.modes.data()),
            static_cast<std::streamsize>(blk.modes.size() * sizeof(double)));
    is.read(reinterpret_cast<char*>(blk.dmodes.data()),
            static_cast<std::streamsize>(blk.dmodes.size() * sizeof(double)));
  }
  if (!is) throw std::runtime_error("load_basis: truncated file " + path);
  fill_derived_tables(basis);
  return basis;
}

}  // namespace ellflow
