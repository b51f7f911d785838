// Command-line front end: configuration-driven validation, verification and
// sweep experiments. Commands: validate | constants | carleman-verify |
// mellin-check | energy-check | sweep.

#include <cinttypes>
#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "resolab/angular.hpp"
#include "resolab/carleman.hpp"
#include "resolab/config.hpp"
#include "resolab/energy.hpp"
#include "resolab/mellin.hpp"
#include "resolab/potentials.hpp"
#include "resolab/resolvent.hpp"

namespace {

using nlohmann::json;
namespace rl = resolab;

json report_header(const rl::config::ExperimentConfig& cfg) {
  char hex[32];
  std::snprintf(hex, sizeof(hex), "%016" PRIx64, rl::config::config_hash(cfg));
  json j;
  j["config_hash"] = hex;
  j["versions"] = {{"resolab", rl::config::version()},
                   {"modules", {"potentials", "angular", "carleman", "mellin", "energy",
                                "resolvent", "cli"}}};
  return j;
}

void write_file(const std::string& dir, const std::string& name, const std::string& text) {
  std::filesystem::create_directories(dir);
  std::ofstream out(dir + "/" + name, std::ios::binary);
  out << text;
}

int run_validate(const rl::config::ExperimentConfig& cfg) {
  const auto pot = rl::config::make_potential(cfg);
  const auto grid = rl::potentials::log_grid(1e-6, std::max(1e3, cfg.grid.r_inf), 10000);
  const auto rep = rl::potentials::validate(pot, grid);

  json j = report_header(cfg);
  j["command"] = "validate";
  j["family"] = rl::potentials::family_name(pot.family);
  j["pass"] = rep.pass;
  j["m_integral_converges"] = rep.m_integral_converges;
  j["m_integral_values"] = rep.m_integral_values;
  j["entries"] = json::array();
  for (const auto& e : rep.entries) {
    j["entries"].push_back({{"name", e.name},
                            {"worst_margin", e.worst_margin},
                            {"at_r", e.at_r},
                            {"pass", e.pass}});
    std::printf("%-36s margin %+.3e at r = %.6g  %s\n", e.name.c_str(), e.worst_margin, e.at_r,
                e.pass ? "ok" : "FAIL");
  }
  write_file(cfg.output.directory, "report.json", j.dump(2));
  std::printf("validate: %s\n", rep.pass ? "pass" : "FAIL");
  return rep.pass ? 0 : 1;
}

int run_constants(const rl::config::ExperimentConfig& cfg) {
  const auto pot = rl::config::make_potential(cfg);
  const auto p = rl::carleman::derive_constants(pot, cfg.eta, cfg.s);
  std::printf("K  = %.12g\nb  = %.12g\nM  = %.12g\nh0 = %.12g\n", p.K, p.b, p.M, p.h0);

  json j = report_header(cfg);
  j["command"] = "constants";
  j["K"] = p.K;
  j["K1"] = p.K1;
  j["b"] = p.b;
  j["M"] = p.M;
  j["h0"] = p.h0;
  j["eta"] = p.eta;
  j["s"] = p.s;
  j["delta"] = p.delta;
  write_file(cfg.output.directory, "report.json", j.dump(2));
  return 0;
}

int run_carleman_verify(const rl::config::ExperimentConfig& cfg) {
  const auto pot = rl::config::make_potential(cfg);
  const auto params = rl::carleman::derive_constants(pot, cfg.eta, cfg.s);
  const rl::carleman::PhaseWeight pw(params, pot.m);

  json reports = json::array();
  bool all_pass = true;
  for (double h : {params.h0, params.h0 / 2.0, params.h0 / 10.0}) {
    const auto grid = rl::carleman::margin_grid(pw, 1e-6, 10.0 * params.M, 10000);
    const auto rep = rl::carleman::verify_lemma31(pw, pot, h, grid);
    all_pass = all_pass && rep.pass;
    std::printf("h = %-10.4g min margin %+.6e at r = %.6g  %s\n", h, rep.min_margin, rep.argmin_r,
                rep.pass ? "ok" : "FAIL");
    json jr = json::parse(rl::carleman::to_json(rep));
    jr["h"] = h;
    reports.push_back(jr);
  }

  json j = report_header(cfg);
  j["command"] = "carleman-verify";
  j["pass"] = all_pass;
  j["margins"] = reports;
  write_file(cfg.output.directory, "margins.json", j.dump(2));
  std::printf("carleman-verify: %s\n", all_pass ? "pass" : "FAIL");
  return all_pass ? 0 : 1;
}

int run_mellin_check(const rl::config::ExperimentConfig& cfg) {
  using rl::mellin::Complex;
  const rl::mellin::LogGrid grid;
  const auto radii = grid.nodes();
  std::vector<Complex> u(grid.count);
  for (std::size_t k = 0; k < grid.count; ++k) {
    const double x = std::log(radii[k]);
    u[k] = Complex(std::exp(-x * x), 0.0);
  }

  json j = report_header(cfg);
  j["command"] = "mellin-check";
  bool pass = true;

  j["plancherel"] = json::array();
  for (double t : {-0.4, -0.1, 0.0, 0.3}) {
    const auto spec = rl::mellin::forward(u, grid, t);
    double lhs = 0.0;
    const double dtau = 2.0 * spec.sigma_max / static_cast<double>(spec.values.size() - 1);
    for (std::size_t i = 0; i < spec.values.size(); ++i) {
      const double w = (i == 0 || i + 1 == spec.values.size()) ? 0.5 : 1.0;
      lhs += w * std::norm(spec.values[i]) * dtau;
    }
    double rhs = 0.0;
    const double dx = grid.step();
    for (std::size_t k = 0; k < grid.count; ++k) {
      const double w = (k == 0 || k + 1 == grid.count) ? 0.5 * dx : dx;
      const double x = std::log(radii[k]);
      rhs += w * std::exp(-2.0 * t * x) * std::norm(u[k]);
    }
    rhs *= 2.0 * M_PI;
    const double err = std::abs(lhs - rhs) / rhs;
    pass = pass && err <= 1e-6;
    j["plancherel"].push_back({{"t", t}, {"relative_error", err}});
    std::printf("plancherel t = %+.2f  rel err %.3e\n", t, err);
  }

  j["derivative_identity"] = json::array();
  for (int nd : {1, 2}) {
    const double err = rl::mellin::derivative_identity_check(u, grid, nd, 0.0);
    pass = pass && err <= (nd == 1 ? 1e-6 : 1e-5);
    j["derivative_identity"].push_back({{"nderiv", nd}, {"relative_error", err}});
    std::printf("derivative identity n = %d  rel err %.3e\n", nd, err);
  }

  j["pass"] = pass;
  write_file(cfg.output.directory, "report.json", j.dump(2));
  std::printf("mellin-check: %s\n", pass ? "pass" : "FAIL");
  return pass ? 0 : 1;
}

int run_energy_check(const rl::config::ExperimentConfig& cfg) {
  using rl::energy::Complex;
  const auto pot = rl::config::make_potential(cfg);
  const auto params = rl::carleman::derive_constants(pot, cfg.eta, cfg.s);
  const rl::carleman::PhaseWeight pw(params, pot.m);

  // Smooth bumps supported inside (1.2, 0.9*M/2), clear of every kink.
  std::mt19937 rng(12345);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const double lo = 1.2, hi = std::min(6.0, 0.45 * params.M);

  json runs = json::array();
  bool pass = true;
  for (int trial = 0; trial < 20; ++trial) {
    const double c = lo + (hi - lo) * (0.25 + 0.5 * unif(rng));
    const double width = (hi - lo) * (0.05 + 0.05 * unif(rng));
    const double k_osc = 3.0 * unif(rng) / width * 0.1;
    rl::energy::UniformGrid grid{lo, hi, 1601};
    auto value = [&](double r) {
      const double z = (r - c) / width;
      return Complex(std::exp(-z * z), 0.0) * std::polar(1.0, k_osc * r);
    };
    auto deriv = [&](double r) {
      const double z = (r - c) / width;
      const Complex phase = std::polar(1.0, k_osc * r);
      return Complex(-2.0 * z / width * std::exp(-z * z), 0.0) * phase +
             Complex(std::exp(-z * z), 0.0) * phase * Complex(0.0, k_osc);
    };
    const auto u = rl::energy::make_mode_function(0, grid, value, deriv, true);
    const auto rep = rl::energy::wF_derivative_residual(pw, pot, params.h0, 0.5,
                                                        rl::energy::Sign::Plus, u);
    const bool ok = rep.convergence_ratio >= 3.0 && rep.convergence_ratio <= 5.0;
    pass = pass && ok;
    runs.push_back(json::parse(rl::energy::to_json(rep)));
  }

  json j = report_header(cfg);
  j["command"] = "energy-check";
  j["pass"] = pass;
  j["runs"] = runs;
  write_file(cfg.output.directory, "report.json", j.dump(2));
  std::printf("energy-check: %s\n", pass ? "pass" : "FAIL");
  return pass ? 0 : 1;
}

int run_sweep(const rl::config::ExperimentConfig& cfg, int threads) {
  const auto pot = rl::config::make_potential(cfg);

  double window = cfg.sweep.window_M;
  if (window <= 0.0) window = rl::carleman::derive_constants(pot, cfg.eta, cfg.s).M;

  std::vector<double> h_values = cfg.sweep.h_values;
  rl::resolvent::SweepConfig sc = rl::config::make_sweep_config(cfg, window, h_values, threads);

  if (cfg.sweep.lock.enabled) {
    const auto& lk = cfg.sweep.lock;
    const double span = cfg.grid.r_inf - cfg.grid.r_min;
    const double dr_req = lk.h_min / (10.0 * std::sqrt(cfg.E));
    const std::size_t shared =
        std::max(cfg.grid.nodes, static_cast<std::size_t>(std::ceil(span / dr_req)));
    rl::resolvent::RadialGrid grid{cfg.grid.r_min, cfg.grid.r_inf, shared};
    h_values = rl::resolvent::locked_h_lattice(pot, cfg.n, lk.mode, grid, lk.well_cut, lk.h_min,
                                               lk.h_max, lk.count);
    sc.base_nodes = shared;
    sc.locked = true;
    sc.lock_well_cut = lk.well_cut;
    sc.lock_mode = lk.mode;
  } else if (h_values.empty()) {
    if (!(cfg.sweep.h_geom_max > 0.0))
      throw rl::config::ParseError("sweep: need h_values, h_geometric or a lock block");
    h_values = rl::config::geometric_lattice(cfg.sweep.h_geom_min, cfg.sweep.h_geom_max,
                                             cfg.sweep.h_geom_count);
  }
  sc.h_values = h_values;

  const auto result = rl::resolvent::sweep(pot, sc);

  json j = report_header(cfg);
  j["command"] = "sweep";
  j["window_M"] = window;
  json summary = json::parse(rl::resolvent::summary_json(result));
  for (auto& [key, value] : summary.items()) j[key] = value;

  bool any_flag = false;
  for (const auto& row : result.rows) any_flag = any_flag || row.flagged;
  j["pass"] = !any_flag;

  for (const auto& fmt : cfg.output.formats) {
    if (fmt == "csv") write_file(cfg.output.directory, "sweep.csv", rl::resolvent::to_csv(result));
    if (fmt == "json") write_file(cfg.output.directory, "report.json", j.dump(2));
    if (fmt == "gnuplot")
      write_file(cfg.output.directory, "plot.gp", rl::resolvent::gnuplot_script("sweep.csv"));
  }

  std::printf("rows %zu  C3 slope %.4g (R2 %.4f)  exterior exponent %.4g (R2 %.4f)%s\n",
              result.rows.size(), result.exp_fit.slope, result.exp_fit.r_squared,
              result.power_fit.slope, result.power_fit.r_squared,
              any_flag ? "  [flagged rows]" : "");
  return any_flag ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"resolvent-estimate laboratory"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  int threads = 0;

  const char* names[] = {"validate", "constants", "carleman-verify",
                         "mellin-check", "energy-check", "sweep"};
  for (const char* name : names) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "experiment config file")->required();
    sub->add_option("--out", out_dir, "output directory override");
    sub->add_option("--threads", threads, "worker thread cap");
  }

  CLI11_PARSE(app, argc, argv);
  const std::string command = app.get_subcommands().front()->get_name();

  try {
    std::ifstream in(config_path, std::ios::binary);
    if (!in) {
      std::fprintf(stderr, "cannot open config '%s'\n", config_path.c_str());
      return 2;
    }
    std::stringstream buffer;
    buffer << in.rdbuf();
    auto cfg = rl::config::parse_config(buffer.str());
    if (!out_dir.empty()) cfg.output.directory = out_dir;

    if (command == "validate") return run_validate(cfg);
    if (command == "constants") return run_constants(cfg);
    if (command == "carleman-verify") return run_carleman_verify(cfg);
    if (command == "mellin-check") return run_mellin_check(cfg);
    if (command == "energy-check") return run_energy_check(cfg);
    if (command == "sweep") return run_sweep(cfg, threads);
  } catch (const rl::config::ParseError& e) {
    std::fprintf(stderr, "%s\n", e.what());
    return 2;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "%s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "%s\n", e.what());
    return 1;
  }
  return 2;
}
