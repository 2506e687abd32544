#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "gdp/defaults.hpp"
#include "gdp/netgdp.hpp"
#include "gdp/random.hpp"
#include "gdp/select.hpp"

namespace gdp::config {

struct SweepSection {
  std::vector<int> n_grid{defaults::kSweepGrid.begin(), defaults::kSweepGrid.end()};
  int seeds_per_n = defaults::kSeedsPerPoint;
};

struct SelectSection {
  int start_degree = 3;
  double beta0 = defaults::kBeta0;
  select::LossMode loss_mode = select::LossMode::Debiased;
  double step_scale = defaults::kStepScale;
  double epsilon0 = 0.0;
};

struct AuditSection {
  std::vector<int> m_grid{defaults::kAuditWidths.begin(), defaults::kAuditWidths.end()};
  int n_probes = defaults::kAuditProbes;
  int seeds = defaults::kAuditSeeds;
  std::vector<double> bands{defaults::kAuditBands.begin(), defaults::kAuditBands.end()};
};

struct SpectrumSection {
  std::vector<int> dims{defaults::kSpectrumDims.begin(), defaults::kSpectrumDims.end()};
  int max_degree = defaults::kSpectrumMaxDegree;
};

/// Everything needed to reproduce one experiment. Optional fields fall back
/// to the documented default rules (T = max(1, round(n / d^k0)), r = m_k0,
/// c_l = gamma0 sqrt(mu_l / (k0 + 1))).
struct RunConfig {
  int d = 5;
  int k0 = 1;
  int n = 500;
  int m = defaults::kWidth;
  double kappa = defaults::kKappa;
  double eta = defaults::kEta;
  std::optional<int> steps;
  std::optional<int> rank;
  double sigma0 = defaults::kSigma0;
  double gamma0 = defaults::kGamma0;
  std::vector<double> degree_energies;
  netgdp::Backend backend = netgdp::Backend::KernelExact;
  int n_mc = defaults::kMonteCarloPoints;
  SeedStreams seeds{defaults::kSeedData, defaults::kSeedInit, defaults::kSeedNoise,
                    defaults::kSeedMc, defaults::kSeedPoles};
  std::string output_path = "gdp_out";

  SweepSection sweep;
  SelectSection select;
  AuditSection audit;
  SpectrumSection spectrum;

  /// Throws Errc::Config on any out-of-range field.
  void validate() const;
  int resolved_steps() const;
  int resolved_rank() const;
};

/// Unknown keys and wrongly typed values throw Errc::Config.
RunConfig from_json(const nlohmann::json& j);
nlohmann::json to_json(const RunConfig& cfg);

/// Reads a JSON config file; Errc::Io if unreadable, Errc::Config if invalid.
RunConfig load(const std::filesystem::path& path);

/// FNV-1a over the canonical JSON dump; stable key for run records.
std::uint64_t config_hash(const RunConfig& cfg);
std::string hash_hex(std::uint64_t h);

std::string to_string(netgdp::Backend b);
netgdp::Backend parse_backend(const std::string& s);
std::string to_string(select::LossMode mode);
select::LossMode parse_loss_mode(const std::string& s);

}  // namespace gdp::config
