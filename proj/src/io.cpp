#include "ellflow/io.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace ellflow::io {

namespace {

constexpr std::uint32_t kCheckpointMagic = 0x4B434C45;  // "ELCK"
constexpr std::uint32_t kCheckpointVersion = 1;
constexpr std::uint32_t kEndianTag = 0x01020304;

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

template <typename T>
void put(std::ostream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <typename T>
void get(std::istream& in, T& v) {
  in.read(reinterpret_cast<char*>(&v), sizeof v);
}

}  // namespace

std::map<std::string, std::string> parse_key_values(const std::string& text) {
  std::map<std::string, std::string> kv;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config line " + std::to_string(lineno) +
                                  ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty())
      throw std::invalid_argument("config line " + std::to_string(lineno) +
                                  ": empty key or value");
    if (!kv.emplace(key, value).second)
      throw std::invalid_argument("config: duplicate key '" + key + "'");
  }
  return kv;
}

RunConfig run_config_from_text(const std::string& text) {
  RunConfig cfg;
  for (const auto& [key, value] : parse_key_values(text)) {
    try {
      if (key == "b") cfg.b = std::stod(value);
      else if (key == "omega") cfg.omega = std::stod(value);
      else if (key == "l_max") cfg.l_max = std::stoul(value);
      else if (key == "n_theta") cfg.n_theta = std::stoul(value);
      else if (key == "n_phi") cfg.n_phi = std::stoul(value);
      else if (key == "dt") cfg.dt = (value == "auto") ? 0.0 : std::stod(value);
      else if (key == "T") cfg.T = std::stod(value);
      else if (key == "initial_condition") cfg.initial_condition = value;
      else if (key == "ic_l") cfg.ic_l = std::stoul(value);
      else if (key == "ic_m") cfg.ic_m = std::stoul(value);
      else if (key == "amplitude") cfg.amplitude = std::stod(value);
      else if (key == "hk") cfg.hk = std::stoi(value);
      else if (key == "seed") cfg.seed = std::stoull(value);
      else if (key == "diag_every") cfg.diag_every = std::stoul(value);
      else throw std::invalid_argument("config: unknown key '" + key + "'");
    } catch (const std::invalid_argument&) {
      throw;
    } catch (const std::exception&) {
      throw std::invalid_argument("config: bad value for '" + key + "': " + value);
    }
  }
  return cfg;
}

RunConfig run_config_from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return run_config_from_text(buf.str());
}

std::string run_config_to_text(const RunConfig& c) {
  std::ostringstream out;
  out << "b = " << format_double(c.b) << "\n"
      << "omega = " << format_double(c.omega) << "\n"
      << "l_max = " << c.l_max << "\n"
      << "n_theta = " << c.n_theta << "\n"
      << "n_phi = " << c.n_phi << "\n"
      << "dt = " << (c.dt > 0.0 ? format_double(c.dt) : std::string("auto")) << "\n"
      << "T = " << format_double(c.T) << "\n"
      << "initial_condition = " << c.initial_condition << "\n"
      << "ic_l = " << c.ic_l << "\n"
      << "ic_m = " << c.ic_m << "\n"
      << "amplitude = " << format_double(c.amplitude) << "\n"
      << "hk = " << c.hk << "\n"
      << "seed = " << c.seed << "\n"
      << "diag_every = " << c.diag_every << "\n";
  return out.str();
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_csv(const std::string& path, const std::vector<std::string>& columns,
               const std::vector<std::vector<double>>& rows) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  for (std::size_t i = 0; i < columns.size(); ++i)
    out << (i ? "," : "") << columns[i];
  out << "\n";
  for (const auto& row : rows) {
    if (row.size() != columns.size())
      throw std::invalid_argument("write_csv: row width mismatch");
    for (std::size_t i = 0; i < row.size(); ++i)
      out << (i ? "," : "") << format_double(row[i]);
    out << "\n";
  }
}

std::uint64_t fnv1a(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string fnv1a_hex_of_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open for checksum: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  char hex[32];
  std::snprintf(hex, sizeof hex, "%016llx",
                static_cast<unsigned long long>(fnv1a(buf.str())));
  return hex;
}

std::string iso_timestamp_now() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t tt = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&tt, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_manifest(const Manifest& manifest, const std::string& path) {
  nlohmann::json j;
  j["command"] = manifest.command;
  j["version"] = manifest.version;
  j["seed"] = manifest.seed;
  j["started_at"] = manifest.started_at;
  j["finished_at"] = manifest.finished_at;
  j["config"] = manifest.config;
  nlohmann::json outs = nlohmann::json::array();
  for (const auto& p : manifest.outputs)
    outs.push_back({{"path", p}, {"fnv1a", fnv1a_hex_of_file(p)}});
  j["outputs"] = outs;
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << j.dump(2) << "\n";
}

void save_checkpoint(const SolverState& state, const RunConfig& config,
                     const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  put(out, kCheckpointMagic);
  put(out, kCheckpointVersion);
  put(out, kEndianTag);
  put(out, config.b);
  put(out, config.omega);
  put(out, config.dt);
  put(out, static_cast<std::uint64_t>(config.l_max));
  put(out, static_cast<std::uint64_t>(config.n_theta));
  put(out, static_cast<std::uint64_t>(config.n_phi));
  put(out, state.t);
  put(out, static_cast<std::uint64_t>(state.step_count));
  put(out, static_cast<std::uint64_t>(state.zeta.coeffs.size()));
  out.write(reinterpret_cast<const char*>(state.zeta.coeffs.data()),
            static_cast<std::streamsize>(state.zeta.coeffs.size() *
                                         sizeof(std::complex<double>)));
  out.write(reinterpret_cast<const char*>(state.psi_integral.coeffs.data()),
            static_cast<std::streamsize>(state.psi_integral.coeffs.size() *
                                         sizeof(std::complex<double>)));
  if (!out) throw std::runtime_error("write failure: " + path);
}

SolverState load_checkpoint(const Basis& basis, const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open checkpoint: " + path);
  std::uint32_t magic = 0, version = 0, endian = 0;
  get(in, magic);
  get(in, version);
  get(in, endian);
  if (magic != kCheckpointMagic || version != kCheckpointVersion ||
      endian != kEndianTag)
    throw std::runtime_error("bad checkpoint header: " + path);
  double b = 0, omega = 0, dt = 0;
  std::uint64_t l_max = 0, n_theta = 0, n_phi = 0;
  get(in, b);
  get(in, omega);
  get(in, dt);
  get(in, l_max);
  get(in, n_theta);
  get(in, n_phi);
  if (b != basis.geom.b || l_max != basis.l_max ||
      n_theta != basis.geom.n_theta || n_phi != basis.geom.n_phi)
    throw std::runtime_error("checkpoint does not match basis: " + path);

  SolverState state(basis);
  std::uint64_t step_count = 0, n_coeff = 0;
  get(in, state.t);
  get(in, step_count);
  get(in, n_coeff);
  if (n_coeff != basis.n_coeff)
    throw std::runtime_error("checkpoint coefficient count mismatch: " + path);
  state.step_count = step_count;
  in.read(reinterpret_cast<char*>(state.zeta.coeffs.data()),
          static_cast<std::streamsize>(n_coeff * sizeof(std::complex<double>)));
  in.read(reinterpret_cast<char*>(state.psi_integral.coeffs.data()),
          static_cast<std::streamsize>(n_coeff * sizeof(std::complex<double>)));
  if (!in) throw std::runtime_error("truncated checkpoint: " + path);
  return state;
}

}  // namespace ellflow::io
