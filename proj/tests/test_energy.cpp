#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>

#include "resolab/carleman.hpp"
#include "resolab/energy.hpp"
#include "resolab/potentials.hpp"

using namespace resolab;
using energy::Complex;
using energy::ModeFunction;
using energy::Sign;
using energy::UniformGrid;

namespace {

// Phase-free parameter set: K = 0 freezes the conjugation, w = r^2 below M.
carleman::CarlemanParams phase_free_params(double E) {
  carleman::CarlemanParams p;
  p.n = 3;
  p.E = E;
  p.s = 0.75;
  p.delta = 0.0;
  p.eta = 1.0;
  p.K = 0.0;
  p.K1 = 1.0;
  p.b = 1.0;
  p.M = 50.0;
  p.h0 = 1.0;
  return p;
}

ModeFunction gaussian_mode(int j, const UniformGrid& grid, double center, double width,
                           double k_osc, bool declared_compact = true) {
  auto value = [=](double r) {
    const double z = (r - center) / width;
    return Complex(std::exp(-z * z), 0.0) * std::polar(1.0, k_osc * r);
  };
  auto deriv = [=](double r) {
    const double z = (r - center) / width;
    const Complex phase = std::polar(1.0, k_osc * r);
    return phase * Complex(-2.0 * z / width * std::exp(-z * z), 0.0) +
           phase * Complex(0.0, k_osc) * std::exp(-z * z);
  };
  return energy::make_mode_function(j, grid, value, deriv, declared_compact);
}

}  // namespace

TEST_CASE("conjugated operator annihilates the Dirichlet eigenfunction") {
  // -u'' - E u with E = pi^2, u = sin(pi r) on [0,1] extended by zero.
  const double E = M_PI * M_PI;
  const auto pot = potentials::make_zero(3, E);
  const auto params = phase_free_params(E);
  const carleman::PhaseWeight pw(params, pot.m);

  UniformGrid grid{0.0, 2.0, 2001};
  auto value = [](double r) { return r <= 1.0 ? Complex(std::sin(M_PI * r), 0.0) : Complex(0.0); };
  auto deriv = [](double r) {
    return r <= 1.0 ? Complex(M_PI * std::cos(M_PI * r), 0.0) : Complex(0.0);
  };
  const auto u = energy::make_mode_function(0, grid, value, deriv, true);
  const auto pu = energy::apply_conjugated(pw, pot, 1.0, 0.0, Sign::Plus, u);

  const double dr = grid.step();
  const auto r = grid.nodes();
  for (std::size_t k = 0; k < grid.count; ++k) {
    if (r[k] < 5.0 * dr || r[k] > 1.0 - 5.0 * dr) continue;  // away from the kink at 1
    CHECK(std::abs(pu.values[k]) <= 1e-8);
  }
}

TEST_CASE("conjugation consistency against the exponential-factor oracle") {
  const auto pot = potentials::make_zero(3, 1.0);
  const auto params = carleman::derive_constants(pot, 1.0, 0.75);
  const carleman::PhaseWeight pw(params, pot.m);
  const double h = params.h0, eps = 0.3;

  UniformGrid grid{0.5, 4.0, 2001};
  const auto u = gaussian_mode(1, grid, 2.0, 0.25, 2.0);
  const auto lhs = energy::apply_conjugated(pw, pot, h, eps, Sign::Minus, u);

  // rhs = e^{phi/h} (P - E - i eps)(e^{-phi/h} u), with the per-mode P applied
  // by fourth-order differences to the damped samples.
  const auto r = grid.nodes();
  std::vector<Complex> damped(grid.count);
  for (std::size_t k = 0; k < grid.count; ++k)
    damped[k] = std::exp(-pw.phi(r[k]) / h) * u.values[k];
  const auto v = energy::mode_function_from_samples(1, grid, damped, false);

  const double lam = 3.0;  // lambda(3, 1) = 2? no: j^2+(n-2)j = 1+1 = 2. use angular value
  (void)lam;
  const double lam31 = 2.0;
  const double dr = grid.step();
  auto at = [&](std::ptrdiff_t i) {
    return (i < 0 || i >= static_cast<std::ptrdiff_t>(grid.count)) ? Complex(0.0) : v.values[i];
  };
  double worst = 0.0, scale = 0.0;
  for (std::size_t k = 0; k < grid.count; ++k) {
    const std::ptrdiff_t i = static_cast<std::ptrdiff_t>(k);
    const Complex d2 = (-at(i - 2) + 16.0 * at(i - 1) - 30.0 * at(i) + 16.0 * at(i + 1) -
                        at(i + 2)) /
                       (12.0 * dr * dr);
    const Complex pv = -h * h * d2 + h * h * lam31 / (r[k] * r[k]) * v.values[k] +
                       (Complex(pot.V(r[k]) - pot.E, 0.0) - Complex(0.0, eps)) * v.values[k];
    const Complex rhs = std::exp(pw.phi(r[k]) / h) * pv;
    worst = std::max(worst, std::abs(lhs.values[k] - rhs));
    scale = std::max(scale, std::abs(lhs.values[k]));
  }
  CHECK(worst <= 1e-4 * scale);
}

TEST_CASE("energy functional on known profiles") {
  const double E = M_PI * M_PI;
  const auto pot = potentials::make_zero(3, E);
  const auto params = phase_free_params(E);
  const carleman::PhaseWeight pw(params, pot.m);

  UniformGrid grid{0.1, 0.9, 801};
  auto value = [](double r) { return Complex(std::sin(M_PI * r), 0.0); };
  auto deriv = [](double r) { return Complex(M_PI * std::cos(M_PI * r), 0.0); };
  const auto u = energy::make_mode_function(0, grid, value, deriv, false);

  for (std::size_t k : {std::size_t(0), std::size_t(250), std::size_t(600)}) {
    CHECK(energy::energy_F(pw, pot, 1.0, u, k) == doctest::Approx(E).epsilon(1e-12));
  }

  // zero profile
  auto zero = energy::make_mode_function(0, grid, [](double) { return Complex(0.0); },
                                         [](double) { return Complex(0.0); }, false);
  CHECK(energy::energy_F(pw, pot, 1.0, zero, 100) == 0.0);

  // global phase invariance
  ModeFunction rotated = u;
  const Complex phase = std::polar(1.0, 1.234);
  for (auto& z : rotated.values) z *= phase;
  for (auto& z : rotated.derivative) z *= phase;
  for (std::size_t k : {std::size_t(17), std::size_t(444)}) {
    CHECK(energy::energy_F(pw, pot, 1.0, rotated, k) ==
          doctest::Approx(energy::energy_F(pw, pot, 1.0, u, k)).epsilon(1e-12));
  }
}

TEST_CASE("(wF)' identity: zero input, convergence order, sign symmetry") {
  const auto pot = potentials::make_zero(3, 1.0);
  const auto params = carleman::derive_constants(pot, 1.0, 0.75);
  const carleman::PhaseWeight pw(params, pot.m);
  const double h = params.h0;

  UniformGrid grid{0.6, 3.4, 1601};
  auto zero = energy::make_mode_function(0, grid, [](double) { return Complex(0.0); },
                                         [](double) { return Complex(0.0); }, true);
  const auto rep0 = energy::wF_derivative_residual(pw, pot, h, 0.0, Sign::Plus, zero);
  CHECK(rep0.max_residual == 0.0);

  const auto u = gaussian_mode(0, grid, 2.0, 0.25, 3.0);
  const auto rep = energy::wF_derivative_residual(pw, pot, h, 0.0, Sign::Plus, u);
  CHECK(rep.max_residual > 0.0);
  CHECK(rep.convergence_ratio >= 3.0);
  CHECK(rep.convergence_ratio <= 5.0);

  // epsilon term flips sign with the branch; the residual does not care.
  const auto rp = energy::wF_derivative_residual(pw, pot, h, 1.0, Sign::Plus, u);
  const auto rm = energy::wF_derivative_residual(pw, pot, h, 1.0, Sign::Minus, u);
  CHECK(rp.max_residual == doctest::Approx(rm.max_residual).epsilon(1e-10));

  // support running into the phase kink at r = 1 is flagged
  UniformGrid tight{0.5, 2.0, 1201};
  const auto touching = gaussian_mode(0, tight, 1.05, 0.2, 0.0, false);
  const auto rept = energy::wF_derivative_residual(pw, pot, h, 0.0, Sign::Plus, touching);
  CHECK(rept.support_touches_breakpoint);
}

TEST_CASE("(wF)' convergence across shipped families and random bumps") {
  std::mt19937 rng(99);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (const auto& pot : potentials::shipped_families(3, 1.0)) {
    const double eta = pot.delta > 0.0 ? 0.5 * carleman::eta_upper_bound(pot.delta) : 1.0;
    const auto params = carleman::derive_constants(pot, std::min(eta, 4.0), 0.75);
    const carleman::PhaseWeight pw(params, pot.m);
    for (int trial = 0; trial < 4; ++trial) {
      const double c = 2.3 + 0.8 * unif(rng);
      const double width = 0.08 + 0.08 * unif(rng);
      const double k_osc = 4.0 * unif(rng);
      UniformGrid grid{1.2, 4.2, 1601};
      const auto u = gaussian_mode(0, grid, c, width, k_osc);
      const auto rep =
          energy::wF_derivative_residual(pw, pot, params.h0, 0.2, Sign::Plus, u);
      INFO(potentials::family_name(pot.family) << " trial " << trial << " ratio "
                                               << rep.convergence_ratio);
      CHECK(rep.convergence_ratio >= 3.0);
      CHECK(rep.convergence_ratio <= 5.0);
    }
  }
}

TEST_CASE("compact-support declaration is enforced") {
  UniformGrid grid{0.5, 2.0, 301};
  CHECK_THROWS_AS(
      energy::make_mode_function(0, grid, [](double) { return Complex(1.0); },
                                 [](double) { return Complex(0.0); }, true),
      std::invalid_argument);
}
