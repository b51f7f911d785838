#include "resolab/config.hpp"

#include <cmath>

#include <nlohmann/json.hpp>

namespace resolab::config {

using nlohmann::json;

const char* version() { return "0.1.0"; }

namespace {

template <typename T>
void read_if(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(std::string("config: ") + e.what());
  }

  ExperimentConfig cfg;
  try {
    read_if(j, "n", cfg.n);
    read_if(j, "E", cfg.E);
    read_if(j, "s", cfg.s);
    read_if(j, "eta", cfg.eta);

    if (j.contains("potential")) {
      const json& p = j.at("potential");
      read_if(p, "family", cfg.potential.family);
      read_if(p, "delta", cfg.potential.delta);
      read_if(p, "amplitude", cfg.potential.amplitude);
      read_if(p, "center", cfg.potential.center);
      read_if(p, "width", cfg.potential.width);
      read_if(p, "rho", cfg.potential.rho);
      if (p.contains("c0")) cfg.potential.c0 = p.at("c0").get<double>();
      if (p.contains("c1")) cfg.potential.c1 = p.at("c1").get<double>();
    }
    if (j.contains("grid")) {
      const json& g = j.at("grid");
      read_if(g, "r_min", cfg.grid.r_min);
      read_if(g, "r_inf", cfg.grid.r_inf);
      read_if(g, "N", cfg.grid.nodes);
    }
    if (j.contains("sweep")) {
      const json& s = j.at("sweep");
      if (s.contains("h_values")) cfg.sweep.h_values = s.at("h_values").get<std::vector<double>>();
      if (s.contains("h_geometric")) {
        const json& g = s.at("h_geometric");
        read_if(g, "min", cfg.sweep.h_geom_min);
        read_if(g, "max", cfg.sweep.h_geom_max);
        read_if(g, "count", cfg.sweep.h_geom_count);
      }
      read_if(s, "eps_schedule", cfg.sweep.eps_schedule);
      read_if(s, "eps", cfg.sweep.eps);
      read_if(s, "window_M", cfg.sweep.window_M);
      read_if(s, "robustness", cfg.sweep.robustness);
      if (s.contains("lock")) {
        const json& l = s.at("lock");
        cfg.sweep.lock.enabled = true;
        read_if(l, "enabled", cfg.sweep.lock.enabled);
        read_if(l, "well_cut", cfg.sweep.lock.well_cut);
        read_if(l, "h_min", cfg.sweep.lock.h_min);
        read_if(l, "h_max", cfg.sweep.lock.h_max);
        read_if(l, "count", cfg.sweep.lock.count);
        read_if(l, "mode", cfg.sweep.lock.mode);
      }
    }
    if (j.contains("output")) {
      const json& o = j.at("output");
      read_if(o, "directory", cfg.output.directory);
      if (o.contains("formats"))
        cfg.output.formats = o.at("formats").get<std::vector<std::string>>();
    }
  } catch (const json::exception& e) {
    throw ParseError(std::string("config: ") + e.what());
  }

  if (cfg.n < 2) throw ParseError("config: n must be >= 2");
  if (!(cfg.E > 0.0)) throw ParseError("config: E must be positive");
  if (!(cfg.s > 0.5) || !(cfg.s < 1.0)) throw ParseError("config: s must lie in (1/2, 1)");
  if (!(cfg.grid.r_inf > cfg.grid.r_min)) throw ParseError("config: grid bounds out of order");
  const char* schedules[] = {"fixed", "proportional", "plateau"};
  bool ok = false;
  for (const char* sch : schedules) ok = ok || cfg.sweep.eps_schedule == sch;
  if (!ok) throw ParseError("config: eps_schedule must be fixed|proportional|plateau");
  return cfg;
}

std::string serialize_config(const ExperimentConfig& cfg) {
  json p;
  p["family"] = cfg.potential.family;
  p["delta"] = cfg.potential.delta;
  p["amplitude"] = cfg.potential.amplitude;
  p["center"] = cfg.potential.center;
  p["width"] = cfg.potential.width;
  p["rho"] = cfg.potential.rho;
  if (cfg.potential.c0) p["c0"] = *cfg.potential.c0;
  if (cfg.potential.c1) p["c1"] = *cfg.potential.c1;

  json sweep;
  if (!cfg.sweep.h_values.empty()) sweep["h_values"] = cfg.sweep.h_values;
  if (cfg.sweep.h_geom_max > 0.0)
    sweep["h_geometric"] = {{"min", cfg.sweep.h_geom_min},
                            {"max", cfg.sweep.h_geom_max},
                            {"count", cfg.sweep.h_geom_count}};
  sweep["eps_schedule"] = cfg.sweep.eps_schedule;
  sweep["eps"] = cfg.sweep.eps;
  sweep["window_M"] = cfg.sweep.window_M;
  sweep["robustness"] = cfg.sweep.robustness;
  if (cfg.sweep.lock.enabled)
    sweep["lock"] = {{"enabled", true},
                     {"well_cut", cfg.sweep.lock.well_cut},
                     {"h_min", cfg.sweep.lock.h_min},
                     {"h_max", cfg.sweep.lock.h_max},
                     {"count", cfg.sweep.lock.count},
                     {"mode", cfg.sweep.lock.mode}};

  json j;
  j["potential"] = p;
  j["n"] = cfg.n;
  j["E"] = cfg.E;
  j["s"] = cfg.s;
  j["eta"] = cfg.eta;
  j["grid"] = {{"r_min", cfg.grid.r_min}, {"r_inf", cfg.grid.r_inf}, {"N", cfg.grid.nodes}};
  j["sweep"] = sweep;
  j["output"] = {{"directory", cfg.output.directory}, {"formats", cfg.output.formats}};
  return j.dump(2);
}

std::uint64_t config_hash(const ExperimentConfig& cfg) {
  const std::string text = serialize_config(cfg);
  std::uint64_t hash = 1469598103934665603ull;
  for (unsigned char c : text) {
    hash ^= c;
    hash *= 1099511628211ull;
  }
  return hash;
}

potentials::PotentialSpec make_potential(const ExperimentConfig& cfg) {
  const PotentialConfig& p = cfg.potential;
  potentials::PotentialSpec pot;
  if (p.family == "zero") {
    pot = potentials::make_zero(cfg.n, cfg.E);
  } else if (p.family == "singular-power") {
    pot = potentials::make_singular_power(cfg.n, cfg.E, p.amplitude, p.delta);
  } else if (p.family == "coulomb-like") {
    pot = potentials::make_coulomb_like(cfg.n, cfg.E, p.amplitude);
  } else if (p.family == "barrier-bump") {
    pot = potentials::make_barrier_bump(cfg.n, cfg.E, p.amplitude, p.center, p.width);
  } else if (p.family == "long-range") {
    pot = potentials::make_long_range(cfg.n, cfg.E, p.amplitude, p.rho);
  } else {
    throw ParseError("config: unknown potential family '" + p.family + "'");
  }
  if (p.c0) pot.c0 = *p.c0;
  if (p.c1) pot.c1 = *p.c1;
  return pot;
}

resolvent::SweepConfig make_sweep_config(const ExperimentConfig& cfg, double window_radius,
                                         const std::vector<double>& h_values, int threads) {
  resolvent::SweepConfig sc;
  sc.n = cfg.n;
  sc.s = cfg.s;
  sc.h_values = h_values;
  if (cfg.sweep.eps_schedule == "fixed")
    sc.schedule = resolvent::EpsSchedule::Fixed;
  else if (cfg.sweep.eps_schedule == "plateau")
    sc.schedule = resolvent::EpsSchedule::PlateauDetect;
  else
    sc.schedule = resolvent::EpsSchedule::ProportionalToH;
  sc.eps_value = cfg.sweep.eps;
  sc.window_radius = window_radius;
  sc.r_min = cfg.grid.r_min;
  sc.r_max = cfg.grid.r_inf;
  sc.base_nodes = cfg.grid.nodes;
  sc.robustness_checks = cfg.sweep.robustness;
  sc.threads = threads;
  return sc;
}

std::vector<double> geometric_lattice(double lo, double hi, std::size_t count) {
  if (!(lo > 0.0) || !(hi > lo) || count < 2)
    throw std::invalid_argument("geometric_lattice: need 0 < lo < hi and count >= 2");
  std::vector<double> v(count);
  for (std::size_t i = 0; i < count; ++i)
    v[i] = lo * std::pow(hi / lo, static_cast<double>(i) / static_cast<double>(count - 1));
  return v;
}

}  // namespace resolab::config
