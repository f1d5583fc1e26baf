// Acceptance suite: one pass/fail line per criterion, exit code = number of
// failures. argv[1] (optional) is the path to the CLI binary, used by the
// determinism criterion.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "ellflow/experiments.hpp"
#include "ellflow/io.hpp"
#include "ellflow/toy_averaging.hpp"

using namespace ellflow;

namespace {

int g_failures = 0;

void report(int criterion, bool pass, const std::string& details) {
  std::printf("%s criterion %2d: %s\n", pass ? "PASS" : "FAIL", criterion,
              details.c_str());
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

double now_seconds() {
  return std::chrono::duration<double>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

SpectralScalar random_band_limited(const Basis& basis, std::mt19937_64& rng,
                                   std::size_t l_top) {
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  SpectralScalar c(basis);
  for (std::size_t m = 0; m <= basis.m_max; ++m) {
    const auto& blk = basis.blocks[m];
    for (std::size_t k = 0; k < blk.n_l(); ++k) {
      if (blk.l_min + k > l_top) continue;
      c.coeffs[basis.offsets[m] + k] =
          (m == 0) ? std::complex<double>(unif(rng), 0.0)
                   : std::complex<double>(unif(rng), unif(rng));
    }
  }
  return c;
}

double coeff_norm(const SpectralScalar& a) {
  double s = 0;
  for (const auto& c : a.coeffs) s += std::norm(c);
  return std::sqrt(s);
}

std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

// ---- criterion 1: sphere-limit spectrum -----------------------------------
void criterion_1() {
  const double t0 = now_seconds();
  Geometry g = build_geometry(1.0, 128, 16);
  Basis basis = build_basis(g, 10);
  double max_rel = 0;
  for (std::size_t m = 0; m <= basis.m_max; ++m) {
    const auto& blk = basis.blocks[m];
    for (std::size_t k = 0; k < blk.n_l(); ++k) {
      const double l = static_cast<double>(blk.l_min + k);
      max_rel = std::max(max_rel,
                         std::abs(blk.lambda[k] - l * (l + 1)) / (l * (l + 1)));
    }
  }
  const double dt = now_seconds() - t0;
  report(1, max_rel < 1e-6 && dt < 10.0,
         fmt("sphere spectrum max rel dev %.3g (tol 1e-6), %.2f s", max_rel, dt));
}

// ---- criterion 2: transform exactness -------------------------------------
void criterion_2() {
  std::mt19937_64 rng(101);
  double max_err = 0;
  int fields = 0;
  for (double b : {1.0, 0.9, 0.7}) {
    Geometry g = build_geometry(b, 48, 64);
    Basis basis = build_basis(g, 14);
    for (int trial = 0; trial < 34 && fields < 100; ++trial, ++fields) {
      SpectralScalar c = random_band_limited(basis, rng, 14);
      SpectralScalar c2 = analysis(synthesis(c), basis);
      for (std::size_t n = 0; n < c.coeffs.size(); ++n)
        max_err = std::max(max_err, std::abs(c2.coeffs[n] - c.coeffs[n]));
    }
  }
  report(2, max_err < 1e-10,
         fmt("round trip max coeff error %.3g over %d fields (tol 1e-10)",
             max_err, fields));
}

// ---- criterion 3: calculus identities -------------------------------------
void criterion_3() {
  std::mt19937_64 rng(103);
  double worst = 0;
  for (double b : {1.0, 0.85}) {
    Geometry g = build_geometry(b, 48, 64);
    Basis basis = build_basis(g, 14);
    for (int trial = 0; trial < 10; ++trial) {
      SpectralScalar psi = random_band_limited(basis, rng, 14);
      const double scale = coeff_norm(apply_laplacian(psi));
      worst = std::max(worst, coeff_norm(curl(grad(psi), basis)) / scale);
      worst = std::max(worst, coeff_norm(div(perp_grad(psi), basis)) / scale);
      SpectralScalar cp = curl(perp_grad(psi), basis);
      SpectralScalar lap = apply_laplacian(psi);
      double d = 0;
      for (std::size_t n = 0; n < cp.coeffs.size(); ++n)
        d += std::norm(cp.coeffs[n] - lap.coeffs[n]);
      worst = std::max(worst, std::sqrt(d) / scale);
    }
  }

  // advect cross-check convergence; the test function must be smooth at the
  // poles (e^{im phi} profile = cos^m theta times a smooth function of sin)
  auto psi_fun = [](double theta, double phi) {
    const double c = std::cos(theta), s = std::sin(theta);
    return c * s * s * std::sin(phi) + 0.5 * c * c * s * std::cos(2 * phi);
  };
  std::vector<double> errs;
  for (std::size_t lmax : {10ul, 18ul}) {
    Geometry g = build_geometry(0.8, 2 * lmax + 8, 96);
    Basis basis = build_basis(g, lmax);
    GridScalar pf(g);
    for (std::size_t j = 0; j < g.n_theta; ++j)
      for (std::size_t i = 0; i < g.n_phi; ++i)
        pf.at(j, i) = psi_fun(g.theta_nodes[j], g.phi_nodes[i]);
    SpectralScalar psi = analysis(pf, basis);
    SpectralScalar lhs = curl(advect(perp_grad(psi), basis), basis);
    SpectralScalar rhs = jacobian(psi, apply_laplacian(psi));
    double e = 0;
    for (std::size_t n = 0; n < lhs.coeffs.size(); ++n)
      e += std::norm(lhs.coeffs[n] - rhs.coeffs[n]);
    errs.push_back(std::sqrt(e));
  }
  const double order = std::log(errs[0] / errs[1]) / std::log(18.0 / 10.0);
  report(3, worst < 1e-8 && order >= 1.5,
         fmt("identities max rel %.3g (tol 1e-8), advect-vs-jacobian order %.2f "
             "(need >= 1.5)",
             worst, order));
}

// ---- criterion 4: operator algebra ----------------------------------------
void criterion_4() {
  std::mt19937_64 rng(107);
  Geometry g = build_geometry(1.0, 48, 64);
  Basis basis = build_basis(g, 14);
  RotationOps rot(basis);

  double proj_err = 0, commute_err = 0, antisym = 0, gap_sphere = 0;
  for (int trial = 0; trial < 100; ++trial) {
    SpectralScalar psi = random_band_limited(basis, rng, 14);
    VelocityField u = perp_grad(psi);
    const double un = l2_norm(u);

    VelocityField pu = rot.null_projection(u);
    VelocityField ppu = rot.null_projection(pu);
    double d = 0;
    for (std::size_t n = 0; n < pu.u_phi.values.size(); ++n)
      d += std::pow(ppu.u_phi.values[n] - pu.u_phi.values[n], 2);
    proj_err = std::max(proj_err, std::sqrt(d) / un);

    SpectralScalar phi = random_band_limited(basis, rng, 14);
    VelocityField v = perp_grad(phi);
    proj_err = std::max(
        proj_err, std::abs(l2_inner(pu, v) - l2_inner(u, rot.null_projection(v))) /
                      (un * l2_norm(v)));

    SpectralScalar l_pi = rot.l_apply_streamform(rot.null_projection_stream(psi));
    SpectralScalar pi_l = rot.null_projection_stream(rot.l_apply_streamform(psi));
    const double pn = hk_norm_velocity(psi, 0);
    commute_err = std::max(commute_err, hk_norm_velocity(l_pi, 0) / pn);
    commute_err = std::max(commute_err, hk_norm_velocity(pi_l, 0) / pn);

    antisym = std::max(antisym,
                       std::abs(l2_inner(u, rot.l_apply(u))) / (un * un));

    auto gap = rot.key_estimate_gap(psi, 0);
    if (gap.rhs > 0) gap_sphere = std::max(gap_sphere, gap.lhs / gap.rhs);
  }

  std::string ell;
  bool ell_ok = true;
  for (double b : {0.9, 0.8}) {
    Geometry gb = build_geometry(b, 48, 64);
    Basis bb = build_basis(gb, 14);
    RotationOps rotb(bb);
    double gmax = 0;
    for (int trial = 0; trial < 30; ++trial) {
      SpectralScalar psi = random_band_limited(bb, rng, 14);
      auto gap = rotb.key_estimate_gap(psi, 0);
      if (gap.rhs > 0) gmax = std::max(gmax, gap.lhs / gap.rhs);
    }
    const double envelope = 1.0 / std::pow(b, 4);
    ell += fmt(" b=%.1f ratio %.4f (envelope %.4f)", b, gmax, envelope);
    ell_ok = ell_ok && gmax <= envelope + 1e-6;
  }

  const bool pass = proj_err < 1e-10 && commute_err < 1e-8 && antisym < 1e-10 &&
                    gap_sphere <= 1.0 + 1e-8 && ell_ok;
  report(4, pass,
         fmt("Pi err %.2g, L/Pi commute %.2g, <u,Lu> %.2g, sphere gap %.6f;%s",
             proj_err, commute_err, antisym, gap_sphere, ell.c_str()));
}

// ---- criterion 5: conservation --------------------------------------------
void criterion_5() {
  bool pass = true;
  std::string detail;
  for (double b : {1.0, 0.9}) {
    Geometry g = build_geometry(b, 64, 128);
    Basis basis = build_basis(g, 21);
    // Coriolis profile as a zonal spectral field; q = zeta - omega*F is the
    // materially advected (absolute) vorticity, whose enstrophy is the
    // quantity conserved by the rotating dynamics when b < 1
    GridScalar fg(g);
    for (std::size_t j = 0; j < g.n_theta; ++j)
      for (std::size_t i = 0; i < g.n_phi; ++i)
        fg.at(j, i) = coriolis_profile(b, g.theta_nodes[j]);
    SpectralScalar fc = analysis(fg, basis);
    for (double omega : {0.0, 100.0, 1000.0}) {
      RunConfig cfg;
      cfg.b = b;
      cfg.omega = omega;
      cfg.l_max = 21;
      cfg.n_theta = 64;
      cfg.n_phi = 128;
      cfg.T = 1.0;
      cfg.seed = 7;
      cfg.diag_every = 64;
      auto qens = [&](const SpectralScalar& z) {
        SpectralScalar q = z;
        for (std::size_t n = 0; n < q.coeffs.size(); ++n)
          q.coeffs[n] -= omega * fc.coeffs[n];
        return l2_inner(q, q);
      };
      const SpectralScalar zeta0 = initial_condition(basis, cfg);
      const double z0 = l2_inner(zeta0, zeta0);
      const double q0 = qens(zeta0);
      double dq = 0;
      std::size_t calls = 0;
      const double t0 = now_seconds();
      RunResult r = run(basis, cfg, nullptr, [&](const SolverState& st) {
        if (++calls % 64 == 0)
          dq = std::max(dq, std::abs(qens(st.zeta) - q0) / z0);
      });
      const double rt = now_seconds() - t0;
      dq = std::max(dq, std::abs(qens(r.final.zeta) - q0) / z0);
      const double e0 = r.diagnostics.front().energy;
      double de = 0, dz = 0;
      for (const auto& row : r.diagnostics) {
        de = std::max(de, std::abs(row.energy - e0) / e0);
        dz = std::max(dz, std::abs(row.enstrophy - z0) / z0);
      }
      const bool ok = de <= 1e-6 && dz <= 1e-6 && rt < 60.0;
      pass = pass && ok;
      detail += fmt(" [b=%.1f w=%g dE=%.1e dZ=%.1e dQ=%.1e %.0fs]", b, omega, de,
                    dz, dq, rt);
    }
  }
  report(5, pass,
         "energy/enstrophy drift (tol 1e-6, dQ = absolute-enstrophy drift, "
         "informational):" + detail);
}

// ---- criterion 6: omega-uniform regularity --------------------------------
void criterion_6() {
  // At b=1 the rotation operator preserves every mode magnitude, so the
  // H^3 ceiling can be compared across omega = 0 and omega > 0 directly.
  // At b < 1 the rotation term is energy-neutral but not H^3-neutral: any
  // omega > 0 excites an omega-independent H^3 oscillation that omega = 0
  // lacks, so uniformity is checked across the rotating runs there.
  auto ratio_for = [](const Basis& basis, double b, double omega) {
    RunConfig cfg;
    cfg.b = b;
    cfg.omega = omega;
    cfg.l_max = 21;
    cfg.n_theta = 64;
    cfg.n_phi = 128;
    cfg.T = 0.5;  // 0.5 / M0 with M0 = 1
    cfg.seed = 7;
    cfg.diag_every = 32;
    RunResult r = run(basis, cfg);
    const double m0 = r.diagnostics.front().hk_norm;
    double hmax = 0;
    for (const auto& row : r.diagnostics) hmax = std::max(hmax, row.hk_norm);
    return hmax / m0;
  };
  auto spread_of = [](const std::vector<double>& ratios) {
    const double lo = *std::min_element(ratios.begin(), ratios.end());
    const double hi = *std::max_element(ratios.begin(), ratios.end());
    return (hi - lo) / lo;
  };

  Geometry gs = build_geometry(1.0, 64, 128);
  Basis bs = build_basis(gs, 21);
  std::vector<double> rs;
  for (double omega : {0.0, 100.0, 1000.0}) rs.push_back(ratio_for(bs, 1.0, omega));
  const double spread_sphere = spread_of(rs);

  Geometry ge = build_geometry(0.9, 64, 128);
  Basis be = build_basis(ge, 21);
  std::vector<double> re;
  for (double omega : {100.0, 1000.0}) re.push_back(ratio_for(be, 0.9, omega));
  const double spread_ell = spread_of(re);

  report(6, spread_sphere < 0.05 && spread_ell < 0.05,
         fmt("max_t ||u||_H3 / M0: b=1 {%.4f, %.4f, %.4f} spread %.2f%% over "
             "w={0,100,1000}; b=0.9 {%.4f, %.4f} spread %.2f%% over w={100,1000} "
             "(tol 5%%)",
             rs[0], rs[1], rs[2], 100 * spread_sphere, re[0], re[1],
             100 * spread_ell));
}

// ---- criterion 7: zonalization rate ---------------------------------------
void criterion_7() {
  const double t0 = now_seconds();
  bool pass = true;
  std::string detail;
  for (double b : {0.9, 1.0}) {
    RunConfig base;
    base.b = b;
    base.l_max = 15;
    base.n_theta = 48;
    base.n_phi = 96;
    base.T = 0.5;
    base.amplitude = 1.0;
    base.hk = 3;
    base.seed = 7;
    base.diag_every = 1024;
    Geometry g = build_geometry(b, base.n_theta, base.n_phi);
    Basis basis = build_basis(g, base.l_max);
    // the pass window is judged on {50..800}; the extra octaves document the
    // asymptotic tail, where the sinc-type attenuation has converged to its
    // 1/omega envelope for every populated mode
    SweepResult sweep = omega_sweep(
        basis, base, {50.0, 100.0, 200.0, 400.0, 800.0, 1600.0, 3200.0});
    std::vector<double> lx, ly, tx, ty;
    for (std::size_t i = 0; i < sweep.rows.size(); ++i) {
      const double gx = std::log(sweep.rows[i].omega);
      const double gy = std::log(sweep.rows[i].error);
      if (i < 5) lx.push_back(gx), ly.push_back(gy);
      if (i >= 4) tx.push_back(gx), ty.push_back(gy);
    }
    double slope = 0, hw = 0, tail = 0, thw = 0;
    fit_line(lx, ly, slope, hw);
    fit_line(tx, ty, tail, thw);
    const bool ok = slope >= -1.25 && slope <= -0.75;
    pass = pass && ok;
    detail += fmt(" [b=%.1f slope %.3f +- %.3f, tail(800-3200) %.3f]", b, slope,
                  hw, tail);
  }
  const double rt = now_seconds() - t0;
  pass = pass && rt < 600.0;
  report(7, pass, fmt("zonalization slope (need [-1.25,-0.75]):%s %.0fs", detail.c_str(), rt));
}

// ---- criterion 8: Rossby-Haurwitz frequency -------------------------------
void criterion_8() {
  Geometry g = build_geometry(1.0, 48, 64);
  Basis basis = build_basis(g, 12);
  const double omega = 100.0;
  Solver solver(basis, omega);
  SolverState state(basis);
  SpectralScalar psi(basis);
  psi.at(4, 1) = 0.15;
  state.zeta = apply_laplacian(psi);
  const std::complex<double> z0 = state.zeta.at(4, 1);

  const double T = 0.2;
  const int n_steps = 4000;
  double prev_phase = 0.0, total = 0.0;
  for (int i = 0; i < n_steps; ++i) {
    solver.step_rk4(state, T / n_steps);
    double ph = std::arg(state.zeta.at(4, 1) / z0);
    double d = ph - prev_phase;
    while (d > M_PI) d -= 2 * M_PI;
    while (d < -M_PI) d += 2 * M_PI;
    total += d;
    prev_phase = ph;
  }
  const double measured = -total / T;  // precession frequency magnitude
  const double predicted = 2.0 * omega * 1.0 / (4.0 * 5.0);
  const double rel = std::abs(measured - predicted) / predicted;
  report(8, rel < 0.01,
         fmt("Rossby-Haurwitz frequency %.5f vs 2wm/(l(l+1)) = %.5f, rel %.2e "
             "(tol 1%%)",
             measured, predicted, rel));
}

// ---- criterion 9: finite-dimensional averaging bound ----------------------
void criterion_9() {
  const std::vector<double> omegas{100.0, 1000.0, 10000.0};
  bool all_rows = true;
  std::vector<double> slopes;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    ToyAveragingReport rep = toy_averaging_verify(32, seed, omegas, 1.0);
    all_rows = all_rows && rep.all_pass;
    std::vector<double> lx, ly;
    for (const auto& row : rep.rows) {
      lx.push_back(std::log(row.omega));
      ly.push_back(std::log(row.lhs));
    }
    double slope = 0, hw = 0;
    fit_line(lx, ly, slope, hw);
    slopes.push_back(slope);
  }
  std::sort(slopes.begin(), slopes.end());
  const double median = 0.5 * (slopes[4] + slopes[5]);
  const bool pass = all_rows && median >= -1.1 && median <= -0.9;
  report(9, pass,
         fmt("bound %s for all 30 rows, median lhs-vs-omega slope %.3f "
             "(need -1 +- 0.1)",
             all_rows ? "held" : "VIOLATED", median));
}

// ---- criterion 10: determinism --------------------------------------------
void criterion_10(const std::string& cli) {
  if (cli.empty()) {
    report(10, false, "CLI binary path not supplied");
    return;
  }
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "ellflow_acc10";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const std::string cfg_path = (dir / "run.cfg").string();
  {
    std::ofstream cfg(cfg_path);
    cfg << "b = 0.9\nomega = 20\nl_max = 10\nn_theta = 32\nn_phi = 64\n"
           "T = 0.05\nseed = 11\ndiag_every = 8\n";
  }
  auto read_file = [](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
  };
  bool pass = true;
  for (const char* sub : {"a", "b"}) {
    const std::string cmd = "'" + cli + "' simulate --config '" + cfg_path +
                            "' --out-dir '" + (dir / sub).string() + "' > /dev/null";
    pass = pass && std::system(cmd.c_str()) == 0;
  }
  pass = pass && read_file(dir / "a" / "diagnostics.csv") ==
                     read_file(dir / "b" / "diagnostics.csv");
  for (const char* sub : {"ta", "tb"}) {
    const std::string cmd = "'" + cli +
                            "' toy-average --dim 16 --seeds 3 --omegas 100,1000 "
                            "--T 0.5 --out-dir '" +
                            (dir / sub).string() + "' > /dev/null";
    pass = pass && std::system(cmd.c_str()) == 0;
  }
  pass = pass && read_file(dir / "ta" / "toy_average.csv") ==
                     read_file(dir / "tb" / "toy_average.csv");
  fs::remove_all(dir);
  report(10, pass, "repeated runs produce byte-identical CSVs");
}

}  // namespace

int main(int argc, char** argv) {
  const std::string cli = argc > 1 ? argv[1] : "";
  criterion_1();
  criterion_2();
  criterion_3();
  criterion_4();
  criterion_5();
  criterion_6();
  criterion_7();
  criterion_8();
  criterion_9();
  criterion_10(cli);
  std::printf("%d of 10 criteria passed\n", 10 - g_failures);
  return g_failures;
}
