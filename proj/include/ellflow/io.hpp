#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "ellflow/dynamics.hpp"

// Run persistence: flat key=value config files (strict schema), CSV tables with
// 17-significant-digit floats, JSON run manifests with FNV-1a checksums, and a
// binary checkpoint format for resumable runs.

namespace ellflow::io {

// Lines of the form key = value; '#' starts a comment; blank lines ignored.
// Throws on malformed lines or duplicate keys.
std::map<std::string, std::string> parse_key_values(const std::string& text);

// Recognized keys: b, omega, l_max, n_theta, n_phi, dt, T, initial_condition,
// ic_l, ic_m, amplitude, hk, seed, diag_every. Unknown keys are an error.
RunConfig run_config_from_text(const std::string& text);
RunConfig run_config_from_file(const std::string& path);
std::string run_config_to_text(const RunConfig& config);

std::string format_double(double v);  // shortest round-trip-exact form (%.17g)

void write_csv(const std::string& path, const std::vector<std::string>& columns,
               const std::vector<std::vector<double>>& rows);

std::uint64_t fnv1a(const std::string& bytes);
std::string fnv1a_hex_of_file(const std::string& path);

struct Manifest {
  std::string command;
  std::string version;
  std::uint64_t seed = 0;
  std::string started_at, finished_at;  // ISO 8601 UTC
  std::map<std::string, std::string> config;
  std::vector<std::string> outputs;  // paths; checksummed at write time
};

std::string iso_timestamp_now();
void write_manifest(const Manifest& manifest, const std::string& path);

// Checkpoint: magic "ELCK", version, endian tag, config echo
// (b, l_max, n_theta, n_phi, omega, dt), then t, step_count and the zeta and
// psi-integral coefficient arrays.
void save_checkpoint(const SolverState& state, const RunConfig& config,
                     const std::string& path);
// The basis must match the checkpoint's config echo (validated).
SolverState load_checkpoint(const Basis& basis, const std::string& path);

}  // namespace ellflow::io
