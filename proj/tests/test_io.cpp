#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <nlohmann/json.hpp>

#include "ellflow/io.hpp"

using namespace ellflow;

TEST_CASE("key-value parsing") {
  auto kv = io::parse_key_values("a = 1\n# comment\n\nb= two # trailing\n");
  CHECK(kv.size() == 2);
  CHECK(kv.at("a") == "1");
  CHECK(kv.at("b") == "two");
  CHECK_THROWS_AS(io::parse_key_values("no equals sign"), std::invalid_argument);
  CHECK_THROWS_AS(io::parse_key_values("a = 1\na = 2\n"), std::invalid_argument);
  CHECK_THROWS_AS(io::parse_key_values("= 1\n"), std::invalid_argument);
}

TEST_CASE("run config round trip and strictness") {
  RunConfig cfg;
  cfg.b = 0.9;
  cfg.omega = 123.5;
  cfg.l_max = 15;
  cfg.T = 0.25;
  cfg.dt = 1e-4;
  cfg.initial_condition = "mode";
  cfg.ic_l = 5;
  cfg.ic_m = 2;
  cfg.seed = 42;
  RunConfig back = io::run_config_from_text(io::run_config_to_text(cfg));
  CHECK(back.b == cfg.b);
  CHECK(back.omega == cfg.omega);
  CHECK(back.l_max == cfg.l_max);
  CHECK(back.dt == cfg.dt);
  CHECK(back.T == cfg.T);
  CHECK(back.initial_condition == cfg.initial_condition);
  CHECK(back.ic_l == cfg.ic_l);
  CHECK(back.seed == cfg.seed);

  CHECK(io::run_config_from_text("dt = auto\n").dt == 0.0);
  CHECK_THROWS_AS(io::run_config_from_text("bogus_key = 3\n"),
                  std::invalid_argument);
  CHECK_THROWS_AS(io::run_config_from_text("omega = fast\n"),
                  std::invalid_argument);
}

TEST_CASE("doubles survive CSV formatting") {
  const double v = 0.1 + 0.2 / 0.7;
  CHECK(std::stod(io::format_double(v)) == v);
  CHECK(std::stod(io::format_double(1e-300)) == 1e-300);

  const std::string path = "test_io_table.csv";
  io::write_csv(path, {"x", "y"}, {{1.0, v}, {2.0, -v}});
  std::ifstream in(path);
  std::string header, row1;
  std::getline(in, header);
  std::getline(in, row1);
  CHECK(header == "x,y");
  CHECK(row1 == "1," + io::format_double(v));
  std::remove(path.c_str());
}

TEST_CASE("fnv1a checksum") {
  // standard FNV-1a 64-bit test vectors
  CHECK(io::fnv1a("") == 0xcbf29ce484222325ull);
  CHECK(io::fnv1a("a") == 0xaf63dc4c8601ec8cull);
  CHECK(io::fnv1a("foobar") == 0x85944171f73967e8ull);
}

TEST_CASE("manifest is valid json with checksums") {
  const std::string out = "test_io_out.csv";
  io::write_csv(out, {"x"}, {{1.0}});
  io::Manifest man;
  man.command = "simulate";
  man.version = "test";
  man.seed = 7;
  man.started_at = io::iso_timestamp_now();
  man.finished_at = man.started_at;
  man.config["b"] = "0.9";
  man.outputs = {out};
  const std::string mpath = "test_io_manifest.json";
  io::write_manifest(man, mpath);

  std::ifstream in(mpath);
  nlohmann::json j = nlohmann::json::parse(in);
  CHECK(j["seed"] == 7);
  CHECK(j["outputs"].size() == 1);
  CHECK(j["outputs"][0]["path"] == out);
  CHECK(j["outputs"][0]["fnv1a"] == io::fnv1a_hex_of_file(out));
  std::remove(out.c_str());
  std::remove(mpath.c_str());
}

TEST_CASE("checkpoint round trip and resume") {
  RunConfig cfg;
  cfg.b = 0.9;
  cfg.l_max = 10;
  cfg.n_theta = 32;
  cfg.n_phi = 64;
  cfg.omega = 15.0;
  cfg.T = 0.04;
  cfg.dt = 1e-4;
  cfg.seed = 5;
  Geometry g = build_geometry(cfg.b, cfg.n_theta, cfg.n_phi);
  Basis basis = build_basis(g, cfg.l_max);

  // full run in one piece
  RunResult full = run(basis, cfg);

  // run half, checkpoint, reload, resume
  RunConfig half = cfg;
  half.T = 0.02;
  RunResult first = run(basis, half);
  const std::string ck = "test_io_checkpoint.bin";
  io::save_checkpoint(first.final, cfg, ck);
  SolverState loaded = io::load_checkpoint(basis, ck);
  CHECK(loaded.t == first.final.t);
  CHECK(loaded.step_count == first.final.step_count);
  for (std::size_t n = 0; n < loaded.zeta.coeffs.size(); ++n)
    CHECK(loaded.zeta.coeffs[n] == first.final.zeta.coeffs[n]);

  RunResult resumed = run(basis, cfg, &loaded);
  double diff = 0, den = 0;
  for (std::size_t n = 0; n < resumed.final.zeta.coeffs.size(); ++n) {
    diff += std::norm(resumed.final.zeta.coeffs[n] - full.final.zeta.coeffs[n]);
    den += std::norm(full.final.zeta.coeffs[n]);
  }
  CHECK(std::sqrt(diff / den) < 1e-12);

  // mismatched basis rejected
  Geometry g2 = build_geometry(0.9, 32, 32);
  Basis basis2 = build_basis(g2, 10);
  CHECK_THROWS_AS(io::load_checkpoint(basis2, ck), std::runtime_error);
  std::remove(ck.c_str());
}
