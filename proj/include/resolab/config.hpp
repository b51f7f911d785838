#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "resolab/potentials.hpp"
#include "resolab/resolvent.hpp"

namespace resolab::config {

struct PotentialConfig {
  std::string family = "zero";
  double delta = 1.0;      // singular-power exponent
  double amplitude = 1.0;  // coulomb-like / barrier-bump / long-range scale
  double center = 1.0;     // barrier-bump
  double width = 8.0;      // barrier-bump
  double rho = 0.5;        // long-range decay exponent
  std::optional<double> c0;  // overrides for the declared envelope constants
  std::optional<double> c1;
};

struct GridConfig {
  double r_min = 1e-3;
  double r_inf = 48.0;
  std::size_t nodes = 1024;
};

struct LockConfig {
  bool enabled = false;
  double well_cut = 1.0;
  double h_min = 0.02;
  double h_max = 0.4;
  std::size_t count = 10;
  int mode = 0;
};

struct SweepBlock {
  std::vector<double> h_values;  // explicit lattice; wins over the geometric spec
  double h_geom_min = 0.0;
  double h_geom_max = 0.0;
  std::size_t h_geom_count = 8;
  std::string eps_schedule = "proportional";  // fixed | proportional | plateau
  double eps = 1e-3;
  double window_M = 0.0;  // 0 = take M from the derived constants
  bool robustness = true;
  LockConfig lock;
};

struct OutputConfig {
  std::string directory = "out";
  std::vector<std::string> formats = {"csv", "json", "gnuplot"};
};

struct ExperimentConfig {
  PotentialConfig potential;
  int n = 3;
  double E = 1.0;
  double s = 0.75;
  double eta = 1.0;
  GridConfig grid;
  SweepBlock sweep;
  OutputConfig output;
};

class ParseError : public std::runtime_error {
 public:
  explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

ExperimentConfig parse_config(const std::string& text);
std::string serialize_config(const ExperimentConfig& cfg);

// FNV-1a of the canonical serialization.
std::uint64_t config_hash(const ExperimentConfig& cfg);

potentials::PotentialSpec make_potential(const ExperimentConfig& cfg);

// Expands the sweep block into solver settings; the window radius must
// already be resolved (config override or derived constants).
resolvent::SweepConfig make_sweep_config(const ExperimentConfig& cfg, double window_radius,
                                         const std::vector<double>& h_values, int threads);

std::vector<double> geometric_lattice(double lo, double hi, std::size_t count);

const char* version();

}  // namespace resolab::config
