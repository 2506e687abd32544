#include "gdp/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>

#include "gdp/error.hpp"
#include "gdp/harmonics.hpp"

namespace gdp::config {

namespace {

using nlohmann::json;

void require_object(const json& j, const std::string& where,
                    std::initializer_list<const char*> known) {
  if (!j.is_object()) throw Error(Errc::Config, where + " must be a JSON object");
  const std::set<std::string> allowed(known.begin(), known.end());
  for (const auto& [key, value] : j.items()) {
    if (!allowed.contains(key)) throw Error(Errc::Config, "unknown key '" + key + "' in " + where);
  }
}

template <class T>
void read(const json& j, const char* key, T& out, const std::string& where) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception&) {
    throw Error(Errc::Config, where + "." + key + " has the wrong type");
  }
}

template <class T>
void read_optional(const json& j, const char* key, std::optional<T>& out) {
  if (!j.contains(key) || j.at(key).is_null()) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception&) {
    throw Error(Errc::Config, std::string(key) + " has the wrong type");
  }
}

void check(bool ok, const std::string& msg) {
  if (!ok) throw Error(Errc::Config, msg);
}

}  // namespace

std::string to_string(netgdp::Backend b) {
  return b == netgdp::Backend::KernelExact ? "kernel_exact" : "finite_width";
}

netgdp::Backend parse_backend(const std::string& s) {
  if (s == "kernel_exact") return netgdp::Backend::KernelExact;
  if (s == "finite_width") return netgdp::Backend::FiniteWidth;
  throw Error(Errc::Config, "backend must be kernel_exact or finite_width, got '" + s + "'");
}

std::string to_string(select::LossMode mode) {
  return mode == select::LossMode::Clean ? "clean" : "debiased";
}

select::LossMode parse_loss_mode(const std::string& s) {
  if (s == "clean") return select::LossMode::Clean;
  if (s == "debiased") return select::LossMode::Debiased;
  throw Error(Errc::Config, "loss_mode must be clean or debiased, got '" + s + "'");
}

int RunConfig::resolved_steps() const {
  if (steps) return *steps;
  const double t = std::round(n / std::pow(static_cast<double>(d), k0));
  return t < 1.0 ? 1 : static_cast<int>(t);
}

int RunConfig::resolved_rank() const {
  if (rank) return *rank;
  const std::uint64_t r = harmonics::cumulative_dim(harmonics::SphereDim(d), k0);
  return r > static_cast<std::uint64_t>(n) ? n + 1 : static_cast<int>(r);
}

void RunConfig::validate() const {
  check(d >= 3, "d must be >= 3");
  check(k0 >= 0 && k0 <= 20, "k0 must be in [0, 20]");
  check(n >= 1 && n <= spectral::kMaxSamples,
        "n must be in [1, " + std::to_string(spectral::kMaxSamples) + "]");
  check(m >= 2 && m % 2 == 0, "m must be even and >= 2");
  check(kappa > 0.0, "kappa must be positive");
  check(eta > 0.0 && eta < 1.0, "eta must lie in (0, 1)");
  check(!steps || *steps >= 0, "T must be >= 0");
  check(!rank || *rank >= 1, "r must be >= 1");
  check(resolved_rank() <= n, "r = " + std::to_string(resolved_rank()) + " exceeds n = " +
                                  std::to_string(n));
  check(sigma0 >= 0.0, "sigma0 must be >= 0");
  check(gamma0 > 0.0, "gamma0 must be positive");
  check(degree_energies.empty() || static_cast<int>(degree_energies.size()) == k0 + 1,
        "degree_energies needs k0 + 1 entries");
  check(n_mc >= 1000, "n_mc must be >= 1000");
  check(sweep.seeds_per_n >= 1, "sweep.seeds_per_n must be >= 1");
  check(select.beta0 > 0.0, "select.beta0 must be positive");
  check(select.step_scale > 0.0, "select.step_scale must be positive");
  check(audit.n_probes >= 2, "audit.n_probes must be >= 2");
  check(audit.seeds >= 1, "audit.seeds must be >= 1");
  for (std::size_t i = 1; i < audit.m_grid.size(); ++i) {
    check(audit.m_grid[i] > audit.m_grid[i - 1], "audit.m_grid must be increasing");
  }
  for (int mm : audit.m_grid) check(mm >= 1, "audit.m_grid entries must be >= 1");
  for (double b : audit.bands) check(b > 0.0, "audit.bands entries must be positive");
  check(spectrum.max_degree >= 0, "spectrum.max_degree must be >= 0");
  for (int dd : spectrum.dims) check(dd >= 3, "spectrum.dims entries must be >= 3");
}

RunConfig from_json(const json& j) {
  require_object(j, "config",
                 {"d", "k0", "n", "m", "kappa", "eta", "T", "r", "sigma0", "gamma0",
                  "degree_energies", "backend", "n_mc", "seeds", "output_path", "sweep", "select",
                  "audit", "spectrum", "defaults_version"});
  RunConfig c;
  read(j, "d", c.d, "config");
  read(j, "k0", c.k0, "config");
  read(j, "n", c.n, "config");
  read(j, "m", c.m, "config");
  read(j, "kappa", c.kappa, "config");
  read(j, "eta", c.eta, "config");
  read_optional(j, "T", c.steps);
  read_optional(j, "r", c.rank);
  read(j, "sigma0", c.sigma0, "config");
  read(j, "gamma0", c.gamma0, "config");
  read(j, "degree_energies", c.degree_energies, "config");
  if (j.contains("backend")) {
    std::string b;
    read(j, "backend", b, "config");
    c.backend = parse_backend(b);
  }
  read(j, "n_mc", c.n_mc, "config");
  read(j, "output_path", c.output_path, "config");
  if (j.contains("seeds")) {
    const json& s = j.at("seeds");
    require_object(s, "seeds", {"data", "init", "noise", "mc", "poles"});
    read(s, "data", c.seeds.data, "seeds");
    read(s, "init", c.seeds.init, "seeds");
    read(s, "noise", c.seeds.noise, "seeds");
    read(s, "mc", c.seeds.mc, "seeds");
    read(s, "poles", c.seeds.poles, "seeds");
  }
  if (j.contains("sweep")) {
    const json& s = j.at("sweep");
    require_object(s, "sweep", {"n_grid", "seeds_per_n"});
    read(s, "n_grid", c.sweep.n_grid, "sweep");
    read(s, "seeds_per_n", c.sweep.seeds_per_n, "sweep");
  }
  if (j.contains("select")) {
    const json& s = j.at("select");
    require_object(s, "select", {"start_degree", "beta0", "loss_mode", "step_scale", "epsilon0"});
    read(s, "start_degree", c.select.start_degree, "select");
    read(s, "beta0", c.select.beta0, "select");
    if (s.contains("loss_mode")) {
      std::string mode;
      read(s, "loss_mode", mode, "select");
      c.select.loss_mode = parse_loss_mode(mode);
    }
    read(s, "step_scale", c.select.step_scale, "select");
    read(s, "epsilon0", c.select.epsilon0, "select");
  }
  if (j.contains("audit")) {
    const json& s = j.at("audit");
    require_object(s, "audit", {"m_grid", "n_probes", "seeds", "bands"});
    read(s, "m_grid", c.audit.m_grid, "audit");
    read(s, "n_probes", c.audit.n_probes, "audit");
    read(s, "seeds", c.audit.seeds, "audit");
    read(s, "bands", c.audit.bands, "audit");
  }
  if (j.contains("spectrum")) {
    const json& s = j.at("spectrum");
    require_object(s, "spectrum", {"dims", "max_degree"});
    read(s, "dims", c.spectrum.dims, "spectrum");
    read(s, "max_degree", c.spectrum.max_degree, "spectrum");
  }
  return c;
}

json to_json(const RunConfig& c) {
  json j;
  j["defaults_version"] = defaults::kDefaultsVersion;
  j["d"] = c.d;
  j["k0"] = c.k0;
  j["n"] = c.n;
  j["m"] = c.m;
  j["kappa"] = c.kappa;
  j["eta"] = c.eta;
  j["T"] = c.steps ? json(*c.steps) : json(nullptr);
  j["r"] = c.rank ? json(*c.rank) : json(nullptr);
  j["sigma0"] = c.sigma0;
  j["gamma0"] = c.gamma0;
  j["degree_energies"] = c.degree_energies;
  j["backend"] = to_string(c.backend);
  j["n_mc"] = c.n_mc;
  j["seeds"] = {{"data", c.seeds.data},
                {"init", c.seeds.init},
                {"noise", c.seeds.noise},
                {"mc", c.seeds.mc},
                {"poles", c.seeds.poles}};
  j["output_path"] = c.output_path;
  j["sweep"] = {{"n_grid", c.sweep.n_grid}, {"seeds_per_n", c.sweep.seeds_per_n}};
  j["select"] = {{"start_degree", c.select.start_degree},
                 {"beta0", c.select.beta0},
                 {"loss_mode", to_string(c.select.loss_mode)},
                 {"step_scale", c.select.step_scale},
                 {"epsilon0", c.select.epsilon0}};
  j["audit"] = {{"m_grid", c.audit.m_grid},
                {"n_probes", c.audit.n_probes},
                {"seeds", c.audit.seeds},
                {"bands", c.audit.bands}};
  j["spectrum"] = {{"dims", c.spectrum.dims}, {"max_degree", c.spectrum.max_degree}};
  return j;
}

RunConfig load(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw Error(Errc::Io, "cannot open config " + path.string());
  json j;
  try {
    is >> j;
  } catch (const json::exception& e) {
    throw Error(Errc::Config, path.string() + ": " + e.what());
  }
  return from_json(j);
}

std::uint64_t config_hash(const RunConfig& cfg) {
  json j = to_json(cfg);
  j.erase("output_path");
  const std::string text = j.dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hash_hex(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace gdp::config
