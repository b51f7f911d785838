#pragma once

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace resolab::mellin {

using Complex = std::complex<double>;

// Log-uniform radial grid r_k = r_min * exp(k*step), k = 0..count-1.
struct LogGrid {
  double r_min = 1e-4;
  double r_max = 1e4;
  std::size_t count = 8192;

  double step() const { return std::log(r_max / r_min) / static_cast<double>(count - 1); }
  std::vector<double> nodes() const;
  std::vector<double> log_nodes() const;
};

// Samples of M[u](tau + i t) on a uniform frequency grid over [-sigma_max, sigma_max].
struct MellinSpectrum {
  double t = 0.0;
  double sigma_max = 40.0;
  std::vector<Complex> values;
  bool truncation_warning = false;  // endpoints of u were not decayed

  std::vector<double> frequencies() const;
};

MellinSpectrum forward(const std::vector<Complex>& u, const LogGrid& grid, double t,
                       double sigma_max = 40.0, std::size_t count = 4096);

// Contour quadrature of the inverse transform back onto the grid. Sets
// *tail_warning when the spectrum has not decayed at +-sigma_max.
std::vector<Complex> inverse(const MellinSpectrum& spec, const LogGrid& grid,
                             bool* tail_warning = nullptr);

// Single-point transform at an arbitrary complex sigma.
Complex mellin_at(const std::vector<Complex>& u, const LogGrid& grid, Complex sigma);

// (-1)^n Gamma(i sigma + n)/Gamma(i sigma) as the telescoping product
// (-1)^n prod_{k=0}^{n-1} (i sigma + k).
Complex gamma_ratio(Complex sigma, int nderiv);

// r^n d_r^n u via fourth-order differences in x = log r (r d_r = d_x).
std::vector<Complex> radial_derivative_term(const std::vector<Complex>& u, const LogGrid& grid,
                                            int nderiv);

// Peak-relative error of M[r^n d^n u] against gamma_ratio * M[u] over the
// frequencies where |M u| >= 1e-6 of its peak.
double derivative_identity_check(const std::vector<Complex>& u, const LogGrid& grid, int nderiv,
                                 double t, double sigma_max = 40.0, std::size_t count = 4096);

// r^2 Q u for a single angular mode: -(d_x^2 - d_x) u + lambda_j u.
std::vector<Complex> r2_Q_apply(const std::vector<Complex>& u, const LogGrid& grid, int n, int j);

class ContourError : public std::runtime_error {
 public:
  explicit ContourError(const std::string& what) : std::runtime_error(what) {}
};

struct PoleTerm {
  Complex sigma;  // pole location, purely imaginary i*t
  Complex theta;  // coefficient of r^{t}
};

struct Decomposition {
  std::vector<Complex> e_part;
  std::vector<PoleTerm> pi_part;
  std::vector<Complex> pi_sum;  // sampled sum of the pole terms
  double reconstruction_residual = 0.0;
};

// u = E_{t0}(r^2 Q u) + Pi_{t0}(r^2 Q u) for one angular mode. N_support is
// the caller's support exponent; residues are collected over simple poles
// with -N_support-1 < Im sigma < t0.
Decomposition decompose(const std::vector<Complex>& u, const LogGrid& grid, int n, int j,
                        double t0, double N_support, double sigma_max = 40.0,
                        std::size_t count = 4096);

// Diagnostic constants of the near-origin machinery. The constant C of the
// decomposition estimate is existential in the source material and enters
// here as an explicit input.
struct NearOriginConstants {
  double upsilon_t0 = 0.0;
  double alpha0_max = 0.0;  // (2 C Upsilon(t0))^{-1/2}
  double alpha0 = 0.0;
  double alpha = 0.0;       // alpha0 * h
  double alpha1 = 0.0;      // max(alpha, 1/2)
  double a = 0.0;           // min(alpha, (h^2/(2 C c1 Upsilon(t0)))^{1/(2-delta)})
  double chi_support_hi = 0.0;  // cutoff support [0, 2 alpha1]
};

NearOriginConstants near_origin_constants(int n, double t0, double h, double C, double c1,
                                          double delta, double alpha0_fraction = 0.5);

// CSV export (tau, Re, Im).
std::string to_csv(const MellinSpectrum& spec);

}  // namespace resolab::mellin
