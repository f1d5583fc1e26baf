#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "ellflow/experiments.hpp"
#include "ellflow/io.hpp"
#include "ellflow/kernels.hpp"
#include "ellflow/toy_averaging.hpp"

namespace {

constexpr const char* kVersion = "1.0.0";

std::vector<double> parse_list(const std::string& csv) {
  std::vector<double> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(std::stod(item));
  return out;
}

std::map<std::string, std::string> config_map(const ellflow::RunConfig& cfg) {
  std::map<std::string, std::string> m;
  for (const auto& [k, v] :
       ellflow::io::parse_key_values(ellflow::io::run_config_to_text(cfg)))
    m[k] = v;
  return m;
}

int cmd_basis(double b, std::size_t lmax, std::size_t ntheta, std::size_t nphi,
              const std::string& out_path) {
  ellflow::Geometry geom = ellflow::build_geometry(b, ntheta, nphi);
  ellflow::Basis basis = ellflow::build_basis(geom, lmax);
  std::printf("# b=%g l_max=%zu n_theta=%zu n_phi=%zu area=%.12g\n", b, lmax,
              ntheta, nphi, geom.area());
  std::printf("%4s %4s %18s\n", "l", "m", "lambda");
  for (std::size_t m = 0; m <= basis.m_max; ++m) {
    const auto& blk = basis.blocks[m];
    for (std::size_t k = 0; k < blk.n_l(); ++k)
      std::printf("%4zu %4zu %18.12g\n", blk.l_min + k, m, blk.lambda[k]);
  }
  if (!out_path.empty()) {
    ellflow::save_basis(basis, out_path);
    std::fprintf(stderr, "wrote %s\n", out_path.c_str());
  }
  return 0;
}

int cmd_simulate(const std::string& config_path, const std::string& out_dir,
                 std::size_t checkpoint_every, const std::string& resume_path) {
  namespace io = ellflow::io;
  const std::string started = io::iso_timestamp_now();
  ellflow::RunConfig cfg = io::run_config_from_file(config_path);
  std::filesystem::create_directories(out_dir);

  ellflow::Geometry geom = ellflow::build_geometry(cfg.b, cfg.n_theta, cfg.n_phi);
  ellflow::Basis basis = ellflow::build_basis(geom, cfg.l_max);

  ellflow::SolverState resume_state;
  const ellflow::SolverState* resume = nullptr;
  if (!resume_path.empty()) {
    resume_state = io::load_checkpoint(basis, resume_path);
    resume = &resume_state;
  }

  const std::string ck_path = out_dir + "/checkpoint.bin";
  std::function<void(const ellflow::SolverState&)> on_step;
  if (checkpoint_every > 0)
    on_step = [&](const ellflow::SolverState& s) {
      if (s.step_count % checkpoint_every == 0) io::save_checkpoint(s, cfg, ck_path);
    };

  ellflow::RunResult result = ellflow::run(basis, cfg, resume, on_step);
  io::save_checkpoint(result.final, cfg, ck_path);

  const std::string csv_path = out_dir + "/diagnostics.csv";
  std::vector<std::vector<double>> rows;
  for (const auto& d : result.diagnostics)
    rows.push_back({d.t, d.energy, d.enstrophy, d.hk_norm, d.zonal_fraction});
  io::write_csv(csv_path, {"t", "energy", "enstrophy", "hk_norm", "zonal_fraction"},
                rows);

  io::Manifest man;
  man.command = "simulate";
  man.version = kVersion;
  man.seed = cfg.seed;
  man.started_at = started;
  man.finished_at = io::iso_timestamp_now();
  man.config = config_map(cfg);
  man.outputs = {csv_path, ck_path};
  io::write_manifest(man, out_dir + "/manifest.json");

  std::printf("steps=%zu dt=%s final_energy=%s\n", result.final.step_count,
              io::format_double(result.dt_used).c_str(),
              io::format_double(result.diagnostics.back().energy).c_str());
  return 0;
}

int cmd_sweep(const std::string& config_path, const std::string& omegas_csv,
              const std::string& out_dir) {
  namespace io = ellflow::io;
  const std::string started = io::iso_timestamp_now();
  ellflow::RunConfig cfg = io::run_config_from_file(config_path);
  const std::vector<double> omegas = parse_list(omegas_csv);
  std::filesystem::create_directories(out_dir);

  ellflow::Geometry geom = ellflow::build_geometry(cfg.b, cfg.n_theta, cfg.n_phi);
  ellflow::Basis basis = ellflow::build_basis(geom, cfg.l_max);
  ellflow::SweepResult sweep = ellflow::omega_sweep(basis, cfg, omegas);

  const std::string csv_path = out_dir + "/sweep.csv";
  std::vector<std::vector<double>> rows;
  for (const auto& r : sweep.rows)
    rows.push_back({r.omega, r.T, r.b, r.M0, r.error, r.energy_drift, r.runtime});
  io::write_csv(csv_path, {"omega", "T", "b", "M0", "error", "energy_drift", "runtime"},
                rows);

  const std::string dat_path = out_dir + "/sweep_loglog.dat";
  {
    std::vector<std::vector<double>> pts;
    for (const auto& r : sweep.rows)
      pts.push_back({std::log10(r.omega), std::log10(r.error)});
    io::write_csv(dat_path, {"log10_omega", "log10_error"}, pts);
  }
  const std::string gp_path = out_dir + "/sweep.gp";
  {
    std::ofstream gp(gp_path);
    gp << "set datafile separator ','\n"
       << "set xlabel 'log10(omega)'\nset ylabel 'log10(error)'\n"
       << "plot 'sweep_loglog.dat' skip 1 using 1:2 with linespoints title 'measured', \\\n"
       << "  " << sweep.rows.front().error << " * (10**x/" << sweep.rows.front().omega
       << ")**(-1) title '1/omega'\n";
  }

  io::Manifest man;
  man.command = "sweep";
  man.version = kVersion;
  man.seed = cfg.seed;
  man.started_at = started;
  man.finished_at = io::iso_timestamp_now();
  man.config = config_map(cfg);
  man.outputs = {csv_path, dat_path, gp_path};
  io::write_manifest(man, out_dir + "/manifest.json");

  std::printf("slope=%.6g half_width=%.6g\n", sweep.slope, sweep.half_width);
  return 0;
}

int cmd_toy_average(std::size_t dim, std::size_t seeds,
                    const std::string& omegas_csv, double T,
                    const std::string& out_dir) {
  namespace io = ellflow::io;
  const std::vector<double> omegas = parse_list(omegas_csv);
  std::vector<std::vector<double>> rows;
  bool all_pass = true;
  for (std::size_t seed = 1; seed <= seeds; ++seed) {
    ellflow::ToyAveragingReport rep =
        ellflow::toy_averaging_verify(dim, seed, omegas, T);
    for (const auto& r : rep.rows) {
      rows.push_back({static_cast<double>(seed), r.omega, r.lhs, r.rhs,
                      r.pass ? 1.0 : 0.0});
      std::printf("seed=%zu omega=%g lhs=%.6g rhs=%.6g %s\n", seed, r.omega,
                  r.lhs, r.rhs, r.pass ? "ok" : "VIOLATED");
    }
    all_pass = all_pass && rep.all_pass;
  }
  if (!out_dir.empty()) {
    std::filesystem::create_directories(out_dir);
    io::write_csv(out_dir + "/toy_average.csv",
                  {"seed", "omega", "lhs", "rhs", "pass"}, rows);
  }
  std::printf("bound held for %s rows\n", all_pass ? "all" : "NOT all");
  return all_pass ? 0 : 1;
}

int cmd_diagnose(double b, int k, int j, std::size_t samples, std::size_t lmax,
                 std::size_t ntheta, std::size_t nphi, std::uint64_t seed,
                 const std::string& out_dir) {
  namespace io = ellflow::io;
  ellflow::Geometry geom = ellflow::build_geometry(b, ntheta, nphi);
  ellflow::Basis basis = ellflow::build_basis(geom, lmax);
  ellflow::RotationOps rot(basis);

  ellflow::RunConfig ic;
  ic.b = b;
  ic.l_max = lmax;
  ic.n_theta = ntheta;
  ic.n_phi = nphi;
  ic.initial_condition = "random";

  std::vector<std::vector<double>> rows;
  std::printf("%6s %12s %12s %12s %12s %12s %12s\n", "sample", "gap_lhs",
              "gap_rhs", "gap_ratio", "commres", "advcomm_num", "advcomm_den");
  for (std::size_t s = 0; s < samples; ++s) {
    ic.seed = seed + s;
    ellflow::SpectralScalar psi =
        ellflow::invert_laplacian(ellflow::initial_condition(basis, ic));
    auto gap = rot.key_estimate_gap(psi, k);
    const double ratio = gap.rhs > 0 ? gap.lhs / gap.rhs : 0.0;
    const double commres = rot.commutation_residual(psi, j);
    auto adv = rot.advection_commutator_residual(psi, std::max(j, 1));
    rows.push_back({static_cast<double>(s), gap.lhs, gap.rhs, ratio, commres,
                    adv.num, adv.den});
    std::printf("%6zu %12.6g %12.6g %12.6g %12.6g %12.6g %12.6g\n", s, gap.lhs,
                gap.rhs, ratio, commres, adv.num, adv.den);
  }
  if (!out_dir.empty()) {
    std::filesystem::create_directories(out_dir);
    io::write_csv(out_dir + "/diagnose.csv",
                  {"sample", "gap_lhs", "gap_rhs", "gap_ratio", "commres",
                   "advcomm_num", "advcomm_den"},
                  rows);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pseudospectral rotating Euler flow on a biaxial ellipsoid"};
  app.require_subcommand(1);
  std::string backend;
  app.add_option("--kernel-backend", backend, "scalar or avx2 (default: auto)");

  auto* basis_cmd = app.add_subcommand("basis", "build and inspect an eigenbasis");
  double b = 1.0;
  std::size_t lmax = 21, ntheta = 64, nphi = 128;
  std::string out_path;
  basis_cmd->add_option("--b", b, "polar semi-axis in (0,1]");
  basis_cmd->add_option("--lmax", lmax, "truncation degree");
  basis_cmd->add_option("--ntheta", ntheta, "latitude nodes");
  basis_cmd->add_option("--nphi", nphi, "longitude nodes");
  basis_cmd->add_option("--out", out_path, "serialize the basis here");

  auto* sim_cmd = app.add_subcommand("simulate", "run one configuration");
  std::string config_path, out_dir = "out", resume_path;
  std::size_t checkpoint_every = 0;
  sim_cmd->add_option("--config", config_path, "config file")->required();
  sim_cmd->add_option("--out-dir", out_dir, "output directory");
  sim_cmd->add_option("--checkpoint-every", checkpoint_every,
                      "steps between checkpoints (0 = final only)");
  sim_cmd->add_option("--resume", resume_path, "checkpoint to resume from");

  auto* sweep_cmd = app.add_subcommand("sweep", "omega sweep with slope fit");
  std::string omegas_csv = "50,100,200,400,800";
  sweep_cmd->add_option("--config", config_path, "config file")->required();
  sweep_cmd->add_option("--omegas", omegas_csv, "comma-separated rotation rates");
  sweep_cmd->add_option("--out-dir", out_dir, "output directory");

  auto* toy_cmd = app.add_subcommand("toy-average", "finite-dimensional averaging bound");
  std::size_t dim = 32, seeds = 10;
  double T = 1.0;
  std::string toy_omegas = "100,1000,10000";
  toy_cmd->add_option("--dim", dim, "state dimension (multiple of 4, <= 64)");
  toy_cmd->add_option("--seeds", seeds, "number of random systems");
  toy_cmd->add_option("--omegas", toy_omegas, "comma-separated rotation rates");
  toy_cmd->add_option("--T", T, "averaging horizon");
  toy_cmd->add_option("--out-dir", out_dir, "optional CSV output directory")
      ->default_val("");

  auto* diag_cmd = app.add_subcommand("diagnose", "operator diagnostics ensemble");
  int gap_k = 0, comm_j = 1;
  std::size_t samples = 20;
  std::uint64_t seed = 1;
  diag_cmd->add_option("--b", b, "polar semi-axis in (0,1]");
  diag_cmd->add_option("--k", gap_k, "Sobolev order of the gap estimate");
  diag_cmd->add_option("--j", comm_j, "power of the Laplacian in the residuals");
  diag_cmd->add_option("--samples", samples, "ensemble size");
  diag_cmd->add_option("--lmax", lmax, "truncation degree");
  diag_cmd->add_option("--ntheta", ntheta, "latitude nodes");
  diag_cmd->add_option("--nphi", nphi, "longitude nodes");
  diag_cmd->add_option("--seed", seed, "base seed");
  diag_cmd->add_option("--out-dir", out_dir, "optional CSV output directory")
      ->default_val("");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    app.exit(e);
    return 2;
  }

  try {
    if (!backend.empty() && !ellflow::kernels::select_backend(backend)) {
      std::fprintf(stderr, "unsupported kernel backend: %s\n", backend.c_str());
      return 2;
    }
    if (basis_cmd->parsed())
      return cmd_basis(b, lmax, ntheta, nphi, out_path);
    if (sim_cmd->parsed())
      return cmd_simulate(config_path, out_dir, checkpoint_every, resume_path);
    if (sweep_cmd->parsed()) return cmd_sweep(config_path, omegas_csv, out_dir);
    if (toy_cmd->parsed())
      return cmd_toy_average(dim, seeds, toy_omegas, T, out_dir);
    if (diag_cmd->parsed())
      return cmd_diagnose(b, gap_k, comm_j, samples, lmax, ntheta, nphi, seed,
                          out_dir);
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 2;
}
