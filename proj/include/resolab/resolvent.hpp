#pragma once

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "resolab/potentials.hpp"

namespace resolab::resolvent {

using Complex = std::complex<double>;

enum class Sign { Plus, Minus };
enum class Window { Full, Exterior };

// Interior nodes of [r_min, r_max]; the operator carries Dirichlet conditions
// at both ends, so node k sits at r_min + (k+1) step.
struct RadialGrid {
  double r_min = 0.0;
  double r_max = 1.0;
  std::size_t count = 256;

  double step() const { return (r_max - r_min) / static_cast<double>(count + 1); }
  double node(std::size_t k) const { return r_min + step() * static_cast<double>(k + 1); }
  std::vector<double> nodes() const;
};

class ConfigurationError : public std::runtime_error {
 public:
  explicit ConfigurationError(const std::string& what) : std::runtime_error(what) {}
};

class NearSingularError : public std::runtime_error {
 public:
  NearSingularError(const std::string& what, double distance) : std::runtime_error(what), distance_(distance) {}
  double distance_estimate() const { return distance_; }

 private:
  double distance_;
};

// Tridiagonal single-mode operator -h^2 d_r^2 + h^2 lambda_j r^{-2} + V - E +- i eps.
struct ModeOperator {
  int j = 0;
  double h = 0.1;
  double eps = 0.0;
  Sign sign = Sign::Plus;
  RadialGrid grid;
  std::vector<Complex> diagonal;
  Complex off_diagonal{0.0, 0.0};  // -h^2/step^2
};

ModeOperator discretize(const potentials::PotentialSpec& pot, int n, int j, double h, double eps,
                        Sign sign, const RadialGrid& grid);

// LU factorization with partial pivoting of a tridiagonal matrix with constant
// off-diagonals, for repeated solves.
class TridiagonalLU {
 public:
  TridiagonalLU(const std::vector<Complex>& diagonal, Complex off);
  explicit TridiagonalLU(const ModeOperator& op) : TridiagonalLU(op.diagonal, op.off_diagonal) {}

  std::size_t size() const { return d_.size(); }
  void solve(std::vector<Complex>& x) const;       // T x = b, in place
  void solve_conj(std::vector<Complex>& x) const;  // conj(T) x = b

 private:
  std::vector<Complex> dl_, d_, du_, du2_;
  std::vector<int> pivot_;
};

struct NormResult {
  double value = 0.0;
  bool converged = false;
  std::size_t iterations = 0;
};

// Largest singular value of D R D with D = diag(<r>^{-s} * window indicator)
// and R the inverse of the mode operator; power iteration on (DRD)*(DRD) with
// two tridiagonal solves per step.
NormResult weighted_resolvent_norm(const ModeOperator& op, double s, Window window,
                                   double window_radius = 0.0, double tol = 1e-8,
                                   std::size_t max_iterations = 10000);

// Dense SVD route for cross-checking; restricted to count <= 500.
double weighted_resolvent_norm_dense(const ModeOperator& op, double s, Window window,
                                     double window_radius = 0.0);

struct ModeScanPolicy {
  int decrease_streak = 3;    // consecutive decreases required
  double fraction = 0.01;     // and below this fraction of the running max
  int long_streak = 12;       // alternative stop for slowly decaying tails
  int j_cap = 512;
};

struct ModeScan {
  double norm_full = 0.0;
  int j_full = 0;
  double norm_exterior = 0.0;
  int j_exterior = 0;
  std::vector<double> per_mode_full;
  std::vector<double> per_mode_exterior;
  bool cutoff_warning = false;
  bool converged = true;
};

// Sup over angular modes of both windowed norms; the two windows share each
// mode's factorization.
ModeScan scan_modes(const potentials::PotentialSpec& pot, int n, double h, double eps, Sign sign,
                    double s, double window_radius, const RadialGrid& grid,
                    const ModeScanPolicy& policy = {});

struct FullNorm {
  double value = 0.0;
  int j_attained = 0;
  bool cutoff_warning = false;
};

FullNorm full_norm(const potentials::PotentialSpec& pot, int n, double h, double eps, Sign sign,
                   double s, Window window, double window_radius, const RadialGrid& grid,
                   const ModeScanPolicy& policy = {});

enum class EpsSchedule { Fixed, ProportionalToH, PlateauDetect };

struct SweepConfig {
  int n = 3;
  double s = 0.75;
  std::vector<double> h_values;
  EpsSchedule schedule = EpsSchedule::ProportionalToH;
  double eps_value = 1e-3;  // fixed epsilon, or the coefficient of h
  double window_radius = 0.0;
  double r_min = 1e-3;
  double r_max = 0.0;
  std::size_t base_nodes = 256;
  bool robustness_checks = true;
  int threads = 0;  // 0 = hardware concurrency
  ModeScanPolicy policy;
  // Resonance-locked lattices: each h pins a well level at E, so the grid
  // refinement gate re-locks h on the finer grid before comparing norms. The
  // domain-extension gate does not apply row-wise (the peak height scales
  // with the box mode density); it is checked at the fitted-slope level.
  bool locked = false;
  double lock_well_cut = 0.0;
  int lock_mode = 0;
};

struct SweepRow {
  double h = 0.0;
  double eps = 0.0;
  std::size_t nodes = 0;
  int j_full = 0;
  int j_exterior = 0;
  double norm_full = 0.0;
  double norm_exterior = 0.0;
  bool flagged = false;
  std::string flag_reason;
  // Relative changes under the robustness gates (NaN when not run).
  double n_doubling_change = 0.0;
  double r_inf_change = 0.0;
  double eps_halving_change = 0.0;
};

struct FitResult {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  std::size_t points = 0;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  FitResult exp_fit;    // log norm_full vs 1/h over the smallest half of the lattice
  FitResult power_fit;  // log norm_exterior vs log(1/h) over all unflagged rows
};

SweepResult sweep(const potentials::PotentialSpec& pot, const SweepConfig& config);

// h values in [h_min, h_max] at which the interior well operator (grid nodes
// below well_cut, Dirichlet ends) has an eigenvalue pinned at E. Used to drive
// trapping sweeps through their resonances.
std::vector<double> locked_h_lattice(const potentials::PotentialSpec& pot, int n, int j,
                                     const RadialGrid& grid, double well_cut, double h_min,
                                     double h_max, std::size_t max_count);

// Nearest eigenvalue of the interior well operator to E (inverse iteration).
double well_eigenvalue_near_E(const potentials::PotentialSpec& pot, int n, int j,
                              const RadialGrid& grid, double well_cut, double h);

// Re-pins a locked h on a different grid; NaN when no root sits nearby.
double relock_near(const potentials::PotentialSpec& pot, int n, int j, const RadialGrid& grid,
                   double well_cut, double h_guess);

std::string to_csv(const SweepResult& result);
std::string summary_json(const SweepResult& result);
std::string gnuplot_script(const std::string& csv_path);

FitResult fit_line(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace resolab::resolvent
