#pragma once

#include <complex>
#include <functional>
#include <vector>

#include "resolab/carleman.hpp"
#include "resolab/potentials.hpp"

namespace resolab::energy {

using Complex = std::complex<double>;

enum class Sign { Plus, Minus };

struct UniformGrid {
  double r_min = 0.5;
  double r_max = 4.0;
  std::size_t count = 1024;

  double step() const { return (r_max - r_min) / static_cast<double>(count - 1); }
  std::vector<double> nodes() const;
};

// Single-angular-mode radial profile with its derivative samples.
struct ModeFunction {
  int j = 0;
  UniformGrid grid;
  std::vector<Complex> values;
  std::vector<Complex> derivative;
  bool declared_compact = false;
};

// Builds a mode function from callables (analytic derivative) or samples
// (fourth-order differences). Checks the compact-support decay when declared.
ModeFunction make_mode_function(int j, const UniformGrid& grid,
                                const std::function<Complex(double)>& value,
                                const std::function<Complex(double)>& derivative,
                                bool declared_compact);
ModeFunction mode_function_from_samples(int j, const UniformGrid& grid,
                                        std::vector<Complex> values, bool declared_compact);

// P_{phi,E,eps}^{+-} applied per mode:
//   -h^2 u'' + h^2 lambda_j r^{-2} u + 2 h phi' u' + (V - phi'^2 + h phi'' - E +- i eps) u.
ModeFunction apply_conjugated(const carleman::PhaseWeight& pw,
                              const potentials::PotentialSpec& pot, double h, double eps,
                              Sign sign, const ModeFunction& u);

// F[u](r_k) = |h u'|^2 - (h^2 lambda_j r^{-2} + V - phi'^2 - E) |u|^2.
double energy_F(const carleman::PhaseWeight& pw, const potentials::PotentialSpec& pot, double h,
                const ModeFunction& u, std::size_t node_index);

struct ResidualReport {
  double max_residual = 0.0;         // on the full grid
  double max_residual_coarse = 0.0;  // same computation at doubled spacing
  double convergence_ratio = 0.0;    // coarse / fine, ~4 at second order
  bool support_touches_breakpoint = false;
};

// Checks the distributional identity for (wF)' pointwise: the left side by
// central differencing of w*F, the right side from the identity with all
// coefficient derivatives analytic.
ResidualReport wF_derivative_residual(const carleman::PhaseWeight& pw,
                                      const potentials::PotentialSpec& pot, double h, double eps,
                                      Sign sign, const ModeFunction& u);

std::string to_json(const ResidualReport& report);

}  // namespace resolab::energy
