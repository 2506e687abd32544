#include <cmath>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "gdp/checkpoint.hpp"
#include "gdp/config.hpp"
#include "gdp/emit.hpp"
#include "gdp/error.hpp"
#include "gdp/harness.hpp"
#include "gdp/ntk.hpp"
#include "gdp/select.hpp"
#include "gdp/svg_plot.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Command-line values that replace the corresponding config fields when set.
struct Overrides {
  std::string config_path;
  std::optional<std::string> output;
  std::string format = "csv";
  int jobs = 0;

  std::optional<int> d, k0, n, m, steps, rank, n_mc;
  std::optional<double> kappa, eta, sigma0, gamma0;
  std::optional<std::string> backend;
  std::vector<double> energies;
  std::optional<std::uint64_t> seed_data, seed_init, seed_noise, seed_mc, seed_poles;

  std::vector<int> n_grid;
  std::optional<int> seeds_per_n;
  std::optional<int> start_degree;
  std::optional<double> beta0, step_scale;
  std::optional<std::string> loss_mode;
  std::vector<int> m_grid;
  std::optional<int> probes, audit_seeds;
  std::vector<double> bands;
  std::vector<int> dims;
  std::optional<int> max_degree;
};

template <class T>
void assign(T& field, const std::optional<T>& value) {
  if (value) field = *value;
}

template <class T>
void assign(std::vector<T>& field, const std::vector<T>& value) {
  if (!value.empty()) field = value;
}

gdp::config::RunConfig resolve_config(const Overrides& o) {
  gdp::config::RunConfig c =
      o.config_path.empty() ? gdp::config::RunConfig{} : gdp::config::load(o.config_path);
  assign(c.d, o.d);
  assign(c.k0, o.k0);
  assign(c.n, o.n);
  assign(c.m, o.m);
  if (o.steps) c.steps = o.steps;
  if (o.rank) c.rank = o.rank;
  assign(c.n_mc, o.n_mc);
  assign(c.kappa, o.kappa);
  assign(c.eta, o.eta);
  assign(c.sigma0, o.sigma0);
  assign(c.gamma0, o.gamma0);
  if (o.backend) c.backend = gdp::config::parse_backend(*o.backend);
  assign(c.degree_energies, o.energies);
  assign(c.seeds.data, o.seed_data);
  assign(c.seeds.init, o.seed_init);
  assign(c.seeds.noise, o.seed_noise);
  assign(c.seeds.mc, o.seed_mc);
  assign(c.seeds.poles, o.seed_poles);
  assign(c.output_path, o.output);
  assign(c.sweep.n_grid, o.n_grid);
  assign(c.sweep.seeds_per_n, o.seeds_per_n);
  assign(c.select.start_degree, o.start_degree);
  assign(c.select.beta0, o.beta0);
  assign(c.select.step_scale, o.step_scale);
  if (o.loss_mode) c.select.loss_mode = gdp::config::parse_loss_mode(*o.loss_mode);
  assign(c.audit.m_grid, o.m_grid);
  assign(c.audit.n_probes, o.probes);
  assign(c.audit.seeds, o.audit_seeds);
  assign(c.audit.bands, o.bands);
  assign(c.spectrum.dims, o.dims);
  assign(c.spectrum.max_degree, o.max_degree);
  c.validate();
  return c;
}

class Output {
 public:
  Output(const fs::path& dir, gdp::emit::Format format) : dir_(dir), format_(format) {
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec) throw gdp::Error(gdp::Errc::Io, "cannot create " + dir_.string() + ": " + ec.message());
  }

  fs::path path(const std::string& name) const { return dir_ / name; }

  void table(const gdp::emit::Table& t, const std::string& stem) const {
    const bool csv = format_ == gdp::emit::Format::Csv;
    gdp::emit::write(t, path(stem + (csv ? ".csv" : ".json")), format_);
  }

  void json_file(const json& j, const std::string& name) const {
    const fs::path p = path(name);
    std::ofstream os(p, std::ios::trunc);
    os << j.dump(2) << '\n';
    if (!os) throw gdp::Error(gdp::Errc::Io, "write to " + p.string() + " failed");
  }

 private:
  fs::path dir_;
  gdp::emit::Format format_;
};

void echo_config(const gdp::config::RunConfig& cfg, const Output& out) {
  out.json_file(gdp::config::to_json(cfg), "config.json");
}

json seeds_json(const gdp::SeedStreams& s) {
  return {{"data", s.data}, {"init", s.init}, {"noise", s.noise}, {"mc", s.mc}, {"poles", s.poles}};
}

void cmd_spectrum(const gdp::config::RunConfig& cfg, const Output& out) {
  gdp::emit::Table table({"d", "degree", "lambda0", "lambda1", "mu_closed", "mu_quad", "rel_err"});
  for (int d : cfg.spectrum.dims) {
    const gdp::harmonics::SphereDim dim(d);
    const auto closed = gdp::ntk::spectrum_closed_form(dim, cfg.spectrum.max_degree);
    const auto quad = gdp::ntk::spectrum_quadrature(dim, cfg.spectrum.max_degree);
    for (int k = 0; k <= cfg.spectrum.max_degree; ++k) {
      const double rel = std::abs(quad.mu[k] - closed.mu[k]) / std::abs(closed.mu[k]);
      table.add_row({d, k, closed.lambda0[k], closed.lambda1[k], closed.mu[k], quad.mu[k], rel});
    }
  }
  out.table(table, "spectrum");
  std::cout << "spectrum: " << table.rows().size() << " rows -> " << out.path("spectrum").string()
            << '\n';
}

void cmd_train(const gdp::config::RunConfig& cfg, const Output& out) {
  const auto run = gdp::harness::run_detailed(cfg);
  out.table(gdp::harness::records_table({run.record}), "records");
  out.table(gdp::harness::trace_table(run.trace), "trace");
  if (run.net) gdp::checkpoint::save(*run.net, out.path("checkpoint.bin"));
  const auto& r = run.record;
  std::cout << "train [" << r.config_hash << "]: T=" << r.steps << " r=" << r.rank
            << " train_loss=" << gdp::emit::format_double(r.final_train_loss)
            << " risk=" << gdp::emit::format_double(r.risk_mean) << " +- "
            << gdp::emit::format_double(r.risk_se)
            << " reference=" << gdp::emit::format_double(r.reference) << '\n';
}

void cmd_sweep(const gdp::config::RunConfig& cfg, int jobs, const Output& out) {
  const auto res = gdp::harness::rate_sweep(cfg, cfg.sweep.n_grid, cfg.sweep.seeds_per_n, jobs);
  out.table(gdp::harness::records_table(res.records), "records");
  out.table(res.points_table(), "sweep");
  gdp::svg::Series risk{"risk", {}, {}}, reference{"d^k0 / n", {}, {}};
  for (const auto& p : res.points) {
    risk.x.push_back(p.n);
    risk.y.push_back(p.mean_risk);
    reference.x.push_back(p.n);
    reference.y.push_back(p.reference);
  }
  gdp::svg::write_loglog_plot(out.path("risk_vs_n.svg"), {risk, reference}, "population risk",
                              "n", "risk");
  out.json_file({{"slope", res.fit.slope}, {"intercept", res.fit.intercept}}, "sweep_summary.json");
  std::cout << "sweep: " << res.records.size() << " runs, fitted slope "
            << gdp::emit::format_double(res.fit.slope) << '\n';
}

void cmd_select(const gdp::config::RunConfig& cfg, const Output& out) {
  const auto rep = gdp::harness::run_selection(cfg);
  {
    const fs::path p = out.path("loss_ratio.csv");
    std::ofstream os(p, std::ios::trunc);
    gdp::select::loss_ratio_table(rep, os);
    if (!os) throw gdp::Error(gdp::Errc::Io, "write to " + p.string() + " failed");
  }
  json summary;
  summary["chosen_degree"] = rep.chosen_degree ? json(*rep.chosen_degree) : json(nullptr);
  summary["triggered_level"] = rep.triggered_level ? json(*rep.triggered_level) : json(nullptr);
  summary["seeds"] = seeds_json(cfg.seeds);
  summary["beta0"] = rep.thresholds.beta0;
  summary["lower_threshold"] = rep.thresholds.lower;
  summary["upper_threshold"] = rep.thresholds.upper;
  out.json_file(summary, "selection.json");
  std::cout << "select-degree: "
            << (rep.chosen_degree ? "chose degree " + std::to_string(*rep.chosen_degree)
                                  : std::string("no degree selected"))
            << '\n';
}

void cmd_check_uniform(const gdp::config::RunConfig& cfg, int jobs, const Output& out) {
  const auto& a = cfg.audit;
  const auto res = gdp::harness::uniform_convergence_audit(cfg.d, a.m_grid, a.n_probes, a.seeds,
                                                           cfg.kappa, a.bands, cfg.seeds, jobs);
  out.table(res.kernel_table, "kernel_error");
  out.table(res.band_table, "band");
  gdp::svg::Series err{"mean sup error", {}, res.mean_sup_error}, ref{"sqrt(d log m / m)", {}, {}};
  for (int m : res.m_grid) {
    err.x.push_back(m);
    ref.x.push_back(m);
    ref.y.push_back(std::sqrt(cfg.d * std::log(static_cast<double>(m)) / m));
  }
  gdp::svg::write_loglog_plot(out.path("width_error.svg"), {err, ref}, "kernel estimate error",
                              "m", "sup error");
  std::cout << "check-uniform:";
  for (std::size_t i = 0; i < res.m_grid.size(); ++i) {
    std::cout << " m=" << res.m_grid[i] << ":" << gdp::emit::format_double(res.mean_sup_error[i]);
  }
  std::cout << '\n';
}

void add_options(CLI::App& app, Overrides& o) {
  app.add_option("-c,--config", o.config_path, "JSON run configuration");
  app.add_option("-o,--output", o.output, "Output directory (overrides output_path)");
  app.add_option("--format", o.format, "Table format")->check(CLI::IsMember({"csv", "json"}));
  app.add_option("-j,--jobs", o.jobs, "Worker threads (0: GDP_SPHERE_JOBS or all cores)")
      ->check(CLI::NonNegativeNumber);

  app.add_option("--d", o.d, "Ambient dimension");
  app.add_option("--k0", o.k0, "Target degree");
  app.add_option("--n", o.n, "Training samples");
  app.add_option("--m", o.m, "Network width (even)");
  app.add_option("--kappa", o.kappa, "Initialization scale");
  app.add_option("--eta", o.eta, "Step size");
  app.add_option("--steps,--T", o.steps, "Gradient steps");
  app.add_option("--rank,--r", o.rank, "Projection rank");
  app.add_option("--sigma0", o.sigma0, "Label noise standard deviation");
  app.add_option("--gamma0", o.gamma0, "RKHS norm budget");
  app.add_option("--energies", o.energies, "Degree energies c_0 ... c_k0");
  app.add_option("--backend", o.backend, "kernel_exact or finite_width");
  app.add_option("--n-mc", o.n_mc, "Monte Carlo points for the population risk");
  app.add_option("--seed-data", o.seed_data, "Seed of the training-feature stream");
  app.add_option("--seed-init", o.seed_init, "Seed of the initialization stream");
  app.add_option("--seed-noise", o.seed_noise, "Seed of the label-noise stream");
  app.add_option("--seed-mc", o.seed_mc, "Seed of the Monte Carlo stream");
  app.add_option("--seed-poles", o.seed_poles, "Seed of the target-pole stream");

  app.add_option("--n-grid", o.n_grid, "Sample sizes of a sweep");
  app.add_option("--seeds-per-n", o.seeds_per_n, "Replicates per sweep point");
  app.add_option("--start-degree", o.start_degree, "Highest degree tried by select-degree");
  app.add_option("--beta0", o.beta0, "Amplitude constant of the selection test");
  app.add_option("--step-scale", o.step_scale, "Multiplier in T_l = round(scale n / d^l)");
  app.add_option("--loss-mode", o.loss_mode, "clean or debiased");
  app.add_option("--m-grid", o.m_grid, "Widths audited by check-uniform");
  app.add_option("--probes", o.probes, "Probe points per audit seed");
  app.add_option("--audit-seeds", o.audit_seeds, "Seeds per audited width");
  app.add_option("--bands", o.bands, "Band half-widths R for the audit");
  app.add_option("--dims", o.dims, "Dimensions tabulated by spectrum");
  app.add_option("--max-degree", o.max_degree, "Highest degree tabulated by spectrum");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Projected gradient descent for spherical polynomial regression"};
  app.require_subcommand(1);
  app.fallthrough();
  Overrides o;
  add_options(app, o);
  auto* spectrum = app.add_subcommand("spectrum", "Tabulate NTK eigenvalues, closed form vs quadrature");
  auto* train = app.add_subcommand("train", "Train one model and report its risk");
  auto* sweep = app.add_subcommand("sweep", "Risk versus sample size with a log-log slope fit");
  auto* select = app.add_subcommand("select-degree", "Choose the target degree from data");
  auto* uniform = app.add_subcommand("check-uniform", "Finite-width kernel convergence audit");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    const auto cfg = resolve_config(o);
    const auto format = o.format == "json" ? gdp::emit::Format::Json : gdp::emit::Format::Csv;
    const Output out(cfg.output_path, format);
    echo_config(cfg, out);
    const int jobs = gdp::harness::resolve_jobs(o.jobs);
    if (*spectrum) cmd_spectrum(cfg, out);
    if (*train) cmd_train(cfg, out);
    if (*sweep) cmd_sweep(cfg, jobs, out);
    if (*select) cmd_select(cfg, out);
    if (*uniform) cmd_check_uniform(cfg, jobs, out);
  } catch (const gdp::Error& e) {
    std::cerr << "gdp_sphere: " << e.what() << '\n';
    return gdp::exit_code_for(e.code());
  } catch (const fs::filesystem_error& e) {
    std::cerr << "gdp_sphere: " << e.what() << '\n';
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "gdp_sphere: internal error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
