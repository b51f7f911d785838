#pragma once

#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace resolab::potentials {

// Largest admissible near-origin exponent, 4(sqrt(2)-1) ~ 1.6569.
double max_delta();

enum class Family { Zero, SingularPower, CoulombLike, BarrierBump, LongRange };

const char* family_name(Family f);

// A radial potential together with the structural data the weight/phase
// construction consumes: near-origin bound c1*r^{-delta}, a monotone far-field
// envelope y on [1,inf), and the derivative envelope c0*r^{-1}*m(r) with
// m: (0,inf) -> [0,1], m -> 0 and (r+1)^{-1} m(r) integrable.
struct PotentialSpec {
  Family family = Family::Zero;
  int n = 3;         // ambient dimension, >= 2
  double E = 1.0;    // energy under study, > 0
  double delta = 0.0;
  double c1 = 0.0;   // near-origin constant
  double c0 = 0.0;   // far-field derivative constant
  double p = 2.0;    // L^p exponent; recorded, nothing consumes it
  std::function<double(double)> V;
  std::function<double(double)> Vprime;
  std::function<double(double)> y;  // envelope for |V| on [1,inf)
  std::function<double(double)> m;  // envelope shape for r|V'| beyond 1
  std::vector<double> breakpoints;  // radii where V' is one-sided only
};

// Thrown by eval_radial_derivative at a piecewise breakpoint; carries both
// one-sided derivative values.
class BreakpointError : public std::runtime_error {
 public:
  BreakpointError(double r, double left, double right);
  double radius() const { return r_; }
  double left() const { return left_; }
  double right() const { return right_; }

 private:
  double r_, left_, right_;
};

double eval(const PotentialSpec& pot, double r);
double eval_radial_derivative(const PotentialSpec& pot, double r);

struct ValidationEntry {
  std::string name;
  double worst_margin = 0.0;  // bound - |value|; negative means violated
  double at_r = 0.0;
  bool pass = true;
};

struct ValidationReport {
  std::vector<ValidationEntry> entries;
  // Quadrature of (r+1)^{-1} m(r) over (0, R), R doubling each step.
  std::vector<double> m_integral_values;
  bool m_integral_converges = true;
  bool pass = true;
};

// Log-uniform sample grid, endpoints included.
std::vector<double> log_grid(double r_min, double r_max, std::size_t count);

ValidationReport validate(const PotentialSpec& pot, const std::vector<double>& grid);

// b := sup{ r > 1 : V + (1/2) r V' >= E/4 and V >= E/4 }, or 1 when the set
// is empty. Bracketed by a dense scan, then bisected to 1e-8 relative.
double compute_b(const PotentialSpec& pot);

PotentialSpec make_zero(int n, double E);
PotentialSpec make_singular_power(int n, double E, double c1, double delta);
PotentialSpec make_coulomb_like(int n, double E, double amplitude);
PotentialSpec make_barrier_bump(int n, double E, double amplitude, double center, double width);
PotentialSpec make_long_range(int n, double E, double amplitude, double exponent);

// The five families at their default parameters for the given (n, E).
std::vector<PotentialSpec> shipped_families(int n, double E);

}  // namespace resolab::potentials
