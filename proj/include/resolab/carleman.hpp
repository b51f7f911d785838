#pragma once

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "resolab/potentials.hpp"

namespace resolab::carleman {

// Upper end of the admissible eta interval, (16 - 8 delta - delta^2)/delta^2;
// +inf when delta = 0.
double eta_upper_bound(double delta);

struct CarlemanParams {
  int n = 3;
  double E = 1.0;
  double s = 0.75;     // weight exponent, in (1/2, 1)
  double delta = 0.0;
  double eta = 1.0;
  double c1 = 0.0;     // near-origin constant of the potential
  double c0 = 0.0;     // far-field derivative constant of the potential
  double K = 0.0;      // phase scale
  double K1 = 1.0;     // weight scale; nothing downstream depends on it
  double b = 1.0;      // outer radius of the {V and V + rV'/2 >= E/4} set
  double M = 0.0;      // phase support radius
  double h0 = 0.0;     // semiclassical cap, < 27E/(4(1+eta)K)
};

// Core constant pipeline in terms of the potential's structural envelopes.
CarlemanParams derive_constants_from_envelopes(int n, double E, double delta, double c1, double c0,
                                               const std::function<double(double)>& y,
                                               const std::function<double(double)>& m, double b,
                                               double eta, double s);

CarlemanParams derive_constants(const potentials::PotentialSpec& pot, double eta, double s);

struct PhaseValues {
  double phi, dphi, d2phi;
};

struct WeightValues {
  double w, wprime, script_w, q;
};

// Piecewise phase phi and weight w of the energy estimate, with the derived
// quantities script-W = w/w' and q = 2/r - w'/w. The phase pieces are
//   K r^{-delta/2}                on [0,1]
//   2K/(1+r)                      on [1, M/2]
//   8K (M-r)^2 / (M^2 (1+M/2))    on [M/2, M)
//   0                             on [M, inf)
// and w = K1 r^2 below M, continued by exp(int_M^r 1/W) above it.
class PhaseWeight {
 public:
  PhaseWeight(const CarlemanParams& params, std::function<double(double)> m_envelope);

  const CarlemanParams& params() const { return params_; }

  PhaseValues phase(double r) const;
  double phi(double r) const { return phase(r).phi; }
  double phi_prime(double r) const;
  double phi_second(double r) const;

  WeightValues weight(double r) const;
  // Ascending bulk evaluation; accumulates the exponent integral once.
  std::vector<WeightValues> weight_profile(const std::vector<double>& radii) const;

  double script_w(double r) const;

  // phi' piece edges {1, M/2, M}.
  std::array<double, 3> breakpoints() const;

 private:
  double exponent_integral(double lo, double hi) const;

  CarlemanParams params_;
  std::function<double(double)> m_;
  double phi_at_1_, phi_at_mid_, phi_at_M_, cubic_coef_;
};

struct MarginValue {
  double value = 0.0;
  bool at_breakpoint = false;
};

// A(r) - (1+eta) B(r) - (E/2) w'(r), the pointwise excess of the weighted
// energy lower bound. The derivative inside A is expanded analytically:
//   A = w'(E + phi'^2 - V) + w (2 phi' phi'' - V') - h^2 w q/(4 r^2).
MarginValue lower_bound_margin(const PhaseWeight& pw, const potentials::PotentialSpec& pot,
                               double h, double r);

struct PieceMinimum {
  std::string piece;
  double min_margin = 0.0;
  double argmin_r = 0.0;
  bool any = false;
};

struct MarginReport {
  double min_margin = 0.0;
  double argmin_r = 0.0;
  double max_wprime = 0.0;
  std::vector<PieceMinimum> per_piece;
  bool h_exceeds_h0 = false;
  bool pass = false;
};

MarginReport verify_lemma31(const PhaseWeight& pw, const potentials::PotentialSpec& pot, double h,
                            const std::vector<double>& grid);

std::string to_json(const MarginReport& report);

// Log-uniform grid on [lo, hi] with nodes nudged off the phi' breakpoints.
std::vector<double> margin_grid(const PhaseWeight& pw, double lo, double hi, std::size_t count);

}  // namespace resolab::carleman
