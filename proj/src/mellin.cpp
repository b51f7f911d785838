#include "resolab/mellin.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "resolab/angular.hpp"

namespace resolab::mellin {

std::vector<double> LogGrid::nodes() const {
  std::vector<double> r(count);
  const double d = step();
  for (std::size_t k = 0; k < count; ++k) r[k] = r_min * std::exp(d * static_cast<double>(k));
  return r;
}

std::vector<double> LogGrid::log_nodes() const {
  std::vector<double> x(count);
  const double d = step();
  const double x0 = std::log(r_min);
  for (std::size_t k = 0; k < count; ++k) x[k] = x0 + d * static_cast<double>(k);
  return x;
}

std::vector<double> MellinSpectrum::frequencies() const {
  std::vector<double> taus(values.size());
  const double dt = values.size() > 1
                        ? 2.0 * sigma_max / static_cast<double>(values.size() - 1)
                        : 0.0;
  for (std::size_t i = 0; i < values.size(); ++i)
    taus[i] = -sigma_max + dt * static_cast<double>(i);
  return taus;
}

namespace {

double max_abs(const std::vector<Complex>& v) {
  double m = 0.0;
  for (const auto& z : v) m = std::max(m, std::abs(z));
  return m;
}

}  // namespace

MellinSpectrum forward(const std::vector<Complex>& u, const LogGrid& grid, double t,
                       double sigma_max, std::size_t count) {
  if (u.size() != grid.count) throw std::invalid_argument("forward: sample/grid size mismatch");
  if (count < 2) throw std::invalid_argument("forward: need at least 2 frequencies");

  MellinSpectrum spec;
  spec.t = t;
  spec.sigma_max = sigma_max;
  spec.values.assign(count, Complex(0.0, 0.0));

  const double peak = max_abs(u);
  if (peak > 0.0 &&
      (std::abs(u.front()) > 1e-10 * peak || std::abs(u.back()) > 1e-10 * peak))
    spec.truncation_warning = true;

  const auto x = grid.log_nodes();
  const double dx = grid.step();
  const double dtau = 2.0 * sigma_max / static_cast<double>(count - 1);

  // M u(tau + i t) = int e^{i tau x} [e^{-t x} u(e^x)] dx, trapezoid in x.
  for (std::size_t k = 0; k < u.size(); ++k) {
    const double wk = (k == 0 || k + 1 == u.size()) ? 0.5 * dx : dx;
    const Complex g = u[k] * std::exp(-t * x[k]) * wk;
    if (g == Complex(0.0, 0.0)) continue;
    const Complex rot = std::polar(1.0, dtau * x[k]);
    Complex phase = std::polar(1.0, -sigma_max * x[k]);
    for (std::size_t i = 0; i < count; ++i) {
      spec.values[i] += g * phase;
      phase *= rot;
    }
  }
  return spec;
}

std::vector<Complex> inverse(const MellinSpectrum& spec, const LogGrid& grid,
                             bool* tail_warning) {
  const std::size_t count = spec.values.size();
  if (count < 2) throw std::invalid_argument("inverse: empty spectrum");

  const double peak = max_abs(spec.values);
  const bool tails =
      peak > 0.0 && (std::abs(spec.values.front()) > 1e-8 * peak ||
                     std::abs(spec.values.back()) > 1e-8 * peak);
  if (tail_warning) *tail_warning = tails;

  const auto x = grid.log_nodes();
  const double dtau = 2.0 * spec.sigma_max / static_cast<double>(count - 1);
  std::vector<Complex> u(grid.count, Complex(0.0, 0.0));

  // u(r) = (1/2pi) r^{t} int e^{-i tau x} v(tau + i t) dtau, trapezoid in tau.
  for (std::size_t l = 0; l < grid.count; ++l) {
    const Complex rot = std::polar(1.0, -dtau * x[l]);
    Complex phase = std::polar(1.0, spec.sigma_max * x[l]);
    Complex acc(0.0, 0.0);
    for (std::size_t i = 0; i < count; ++i) {
      const double wi = (i == 0 || i + 1 == count) ? 0.5 : 1.0;
      acc += wi * spec.values[i] * phase;
      phase *= rot;
    }
    u[l] = acc * dtau / (2.0 * M_PI) * std::exp(spec.t * x[l]);
  }
  return u;
}

Complex mellin_at(const std::vector<Complex>& u, const LogGrid& grid, Complex sigma) {
  if (u.size() != grid.count) throw std::invalid_argument("mellin_at: size mismatch");
  const auto x = grid.log_nodes();
  const double dx = grid.step();
  Complex acc(0.0, 0.0);
  for (std::size_t k = 0; k < u.size(); ++k) {
    const double wk = (k == 0 || k + 1 == u.size()) ? 0.5 * dx : dx;
    // r^{i sigma} = e^{i sigma x}
    acc += u[k] * std::exp(Complex(0.0, 1.0) * sigma * x[k]) * wk;
  }
  return acc;
}

Complex gamma_ratio(Complex sigma, int nderiv) {
  if (nderiv < 1) throw std::invalid_argument("gamma_ratio: nderiv must be >= 1");
  Complex prod(1.0, 0.0);
  const Complex is = Complex(0.0, 1.0) * sigma;
  for (int k = 0; k < nderiv; ++k) prod *= is + static_cast<double>(k);
  return (nderiv % 2 == 0 ? 1.0 : -1.0) * prod;
}

namespace {

// Fourth-order central differences in x with zero extension beyond the grid.
std::vector<Complex> dx_fd4(const std::vector<Complex>& u, double dx) {
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(u.size());
  auto at = [&](std::ptrdiff_t i) { return (i < 0 || i >= n) ? Complex(0.0) : u[i]; };
  std::vector<Complex> d(u.size());
  for (std::ptrdiff_t i = 0; i < n; ++i)
    d[i] = (at(i - 2) - 8.0 * at(i - 1) + 8.0 * at(i + 1) - at(i + 2)) / (12.0 * dx);
  return d;
}

std::vector<Complex> dxx_fd4(const std::vector<Complex>& u, double dx) {
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(u.size());
  auto at = [&](std::ptrdiff_t i) { return (i < 0 || i >= n) ? Complex(0.0) : u[i]; };
  std::vector<Complex> d(u.size());
  for (std::ptrdiff_t i = 0; i < n; ++i)
    d[i] = (-at(i - 2) + 16.0 * at(i - 1) - 30.0 * at(i) + 16.0 * at(i + 1) - at(i + 2)) /
           (12.0 * dx * dx);
  return d;
}

}  // namespace

std::vector<Complex> radial_derivative_term(const std::vector<Complex>& u, const LogGrid& grid,
                                            int nderiv) {
  if (nderiv != 1 && nderiv != 2)
    throw std::invalid_argument("radial_derivative_term: nderiv must be 1 or 2");
  const double dx = grid.step();
  if (nderiv == 1) return dx_fd4(u, dx);  // r u' = u_x
  auto d1 = dx_fd4(u, dx);
  auto d2 = dxx_fd4(u, dx);
  for (std::size_t i = 0; i < u.size(); ++i) d2[i] -= d1[i];  // r^2 u'' = u_xx - u_x
  return d2;
}

double derivative_identity_check(const std::vector<Complex>& u, const LogGrid& grid, int nderiv,
                                 double t, double sigma_max, std::size_t count) {
  const auto lhs_samples = radial_derivative_term(u, grid, nderiv);
  const auto lhs = forward(lhs_samples, grid, t, sigma_max, count);
  const auto base = forward(u, grid, t, sigma_max, count);

  const double base_peak = max_abs(base.values);
  if (base_peak == 0.0) return 0.0;

  const auto taus = base.frequencies();
  double rhs_peak = 0.0;
  std::vector<Complex> rhs(count);
  for (std::size_t i = 0; i < count; ++i) {
    rhs[i] = gamma_ratio(Complex(taus[i], t), nderiv) * base.values[i];
    rhs_peak = std::max(rhs_peak, std::abs(rhs[i]));
  }

  double worst = 0.0;
  for (std::size_t i = 0; i < count; ++i) {
    if (std::abs(base.values[i]) < 1e-6 * base_peak) continue;
    worst = std::max(worst, std::abs(lhs.values[i] - rhs[i]) / rhs_peak);
  }
  return worst;
}

std::vector<Complex> r2_Q_apply(const std::vector<Complex>& u, const LogGrid& grid, int n,
                                int j) {
  const double lam = angular::lambda(n, j);
  const double dx = grid.step();
  auto d1 = dx_fd4(u, dx);
  auto d2 = dxx_fd4(u, dx);
  std::vector<Complex> v(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) v[i] = -(d2[i] - d1[i]) + lam * u[i];
  return v;
}

namespace {

double l2_dr_norm(const std::vector<Complex>& f, const LogGrid& grid) {
  // int |f|^2 dr = int |f(e^x)|^2 e^x dx, trapezoid in x.
  const auto x = grid.log_nodes();
  const double dx = grid.step();
  double acc = 0.0;
  for (std::size_t k = 0; k < f.size(); ++k) {
    const double wk = (k == 0 || k + 1 == f.size()) ? 0.5 * dx : dx;
    acc += std::norm(f[k]) * std::exp(x[k]) * wk;
  }
  return std::sqrt(acc);
}

}  // namespace

Decomposition decompose(const std::vector<Complex>& u, const LogGrid& grid, int n, int j,
                        double t0, double N_support, double sigma_max, std::size_t count) {
  if (angular::is_in_T(n, t0)) throw ContourError("decompose: contour level t0 lies in T");
  if (angular::is_in_T(n, -N_support - 1.0))
    throw ContourError("decompose: -N-1 lies in T");

  const double g = static_cast<double>(n - 2 + 2 * j);
  const double t_minus = (1.0 - g) / 2.0;
  const double t_plus = (1.0 + g) / 2.0;
  const double strip_lo = -N_support - 1.0;

  for (double tp : {t_minus, t_plus}) {
    if (std::abs(tp - t0) < 1e-6)
      throw ContourError("decompose: pole within 1e-6 of the contour");
  }
  if (g == 0.0 && t_minus > strip_lo && t_minus < t0)
    throw ContourError("decompose: non-simple pole inside the residue strip");

  Decomposition dec;
  dec.pi_sum.assign(grid.count, Complex(0.0, 0.0));

  const double u_norm = l2_dr_norm(u, grid);
  if (u_norm == 0.0) {
    dec.e_part.assign(grid.count, Complex(0.0, 0.0));
    dec.reconstruction_residual = 0.0;
    return dec;
  }

  const auto v = r2_Q_apply(u, grid, n, j);
  auto spec = forward(v, grid, t0, sigma_max, count);

  const double lam = angular::lambda(n, j);
  const auto taus = spec.frequencies();
  for (std::size_t i = 0; i < spec.values.size(); ++i) {
    const Complex sigma(taus[i], t0);
    spec.values[i] /= sigma * sigma - Complex(0.0, 1.0) * sigma + lam;
  }
  dec.e_part = inverse(spec, grid);

  const auto x = grid.log_nodes();
  for (double tp : {t_minus, t_plus}) {
    if (!(tp > strip_lo && tp < t0)) continue;
    const Complex coeff = mellin_at(v, grid, Complex(0.0, tp)) / (2.0 * tp - 1.0);
    dec.pi_part.push_back({Complex(0.0, tp), coeff});
    for (std::size_t l = 0; l < grid.count; ++l)
      dec.pi_sum[l] += coeff * std::exp(tp * x[l]);
  }

  std::vector<Complex> err(grid.count);
  for (std::size_t l = 0; l < grid.count; ++l)
    err[l] = u[l] - dec.e_part[l] - dec.pi_sum[l];
  dec.reconstruction_residual = l2_dr_norm(err, grid) / u_norm;
  return dec;
}

NearOriginConstants near_origin_constants(int n, double t0, double h, double C, double c1,
                                          double delta, double alpha0_fraction) {
  if (!(C > 0.0)) throw std::invalid_argument("near_origin_constants: C must be positive");
  if (!(h > 0.0)) throw std::invalid_argument("near_origin_constants: h must be positive");
  NearOriginConstants k;
  k.upsilon_t0 = angular::upsilon(n, t0);
  k.alpha0_max = 1.0 / std::sqrt(2.0 * C * k.upsilon_t0);
  k.alpha0 = alpha0_fraction * k.alpha0_max;
  k.alpha = k.alpha0 * h;
  k.alpha1 = std::max(k.alpha, 0.5);
  if (c1 > 0.0) {
    const double cap = std::pow(h * h / (2.0 * C * c1 * k.upsilon_t0), 1.0 / (2.0 - delta));
    k.a = std::min(k.alpha, cap);
  } else {
    k.a = k.alpha;
  }
  k.chi_support_hi = 2.0 * k.alpha1;
  return k;
}

std::string to_csv(const MellinSpectrum& spec) {
  std::string out = "tau,re,im\n";
  const auto taus = spec.frequencies();
  char line[96];
  for (std::size_t i = 0; i < spec.values.size(); ++i) {
    std::snprintf(line, sizeof(line), "%.17g,%.17g,%.17g\n", taus[i], spec.values[i].real(),
                  spec.values[i].imag());
    out += line;
  }
  return out;
}

}  // namespace resolab::mellin
