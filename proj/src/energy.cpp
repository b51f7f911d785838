#include "resolab/energy.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "resolab/angular.hpp"

namespace resolab::energy {

std::vector<double> UniformGrid::nodes() const {
  std::vector<double> r(count);
  const double d = step();
  for (std::size_t k = 0; k < count; ++k)
    r[k] = r_min + d * static_cast<double>(k);
  return r;
}

namespace {

std::vector<Complex> second_derivative_fd4(const std::vector<Complex>& u, double dr) {
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(u.size());
  auto at = [&](std::ptrdiff_t i) { return (i < 0 || i >= n) ? Complex(0.0) : u[i]; };
  std::vector<Complex> d(u.size());
  for (std::ptrdiff_t i = 0; i < n; ++i)
    d[i] = (-at(i - 2) + 16.0 * at(i - 1) - 30.0 * at(i) + 16.0 * at(i + 1) - at(i + 2)) /
           (12.0 * dr * dr);
  return d;
}

std::vector<Complex> first_derivative_fd4(const std::vector<Complex>& u, double dr) {
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(u.size());
  auto at = [&](std::ptrdiff_t i) { return (i < 0 || i >= n) ? Complex(0.0) : u[i]; };
  std::vector<Complex> d(u.size());
  for (std::ptrdiff_t i = 0; i < n; ++i)
    d[i] = (at(i - 2) - 8.0 * at(i - 1) + 8.0 * at(i + 1) - at(i + 2)) / (12.0 * dr);
  return d;
}

void check_compact(const ModeFunction& u) {
  if (!u.declared_compact || u.values.empty()) return;
  double peak = 0.0;
  for (const auto& z : u.values) peak = std::max(peak, std::abs(z));
  if (peak == 0.0) return;
  if (std::abs(u.values.front()) > 1e-10 * peak || std::abs(u.values.back()) > 1e-10 * peak)
    throw std::invalid_argument(
        "mode function declared compactly supported but does not vanish at the grid ends");
}

}  // namespace

ModeFunction make_mode_function(int j, const UniformGrid& grid,
                                const std::function<Complex(double)>& value,
                                const std::function<Complex(double)>& derivative,
                                bool declared_compact) {
  ModeFunction u;
  u.j = j;
  u.grid = grid;
  u.values.resize(grid.count);
  const auto r = grid.nodes();
  for (std::size_t k = 0; k < grid.count; ++k) u.values[k] = value(r[k]);
  if (derivative) {
    u.derivative.resize(grid.count);
    for (std::size_t k = 0; k < grid.count; ++k) u.derivative[k] = derivative(r[k]);
  } else {
    u.derivative = first_derivative_fd4(u.values, grid.step());
  }
  u.declared_compact = declared_compact;
  check_compact(u);
  return u;
}

ModeFunction mode_function_from_samples(int j, const UniformGrid& grid,
                                        std::vector<Complex> values, bool declared_compact) {
  if (values.size() != grid.count)
    throw std::invalid_argument("mode_function_from_samples: size mismatch");
  ModeFunction u;
  u.j = j;
  u.grid = grid;
  u.values = std::move(values);
  u.derivative = first_derivative_fd4(u.values, grid.step());
  u.declared_compact = declared_compact;
  check_compact(u);
  return u;
}

ModeFunction apply_conjugated(const carleman::PhaseWeight& pw,
                              const potentials::PotentialSpec& pot, double h, double eps,
                              Sign sign, const ModeFunction& u) {
  if (!(h > 0.0)) throw std::invalid_argument("apply_conjugated: h must be positive");
  if (eps < 0.0) throw std::invalid_argument("apply_conjugated: eps must be >= 0");

  const double lam = angular::lambda(pw.params().n, u.j);
  const Complex shift(0.0, sign == Sign::Plus ? eps : -eps);
  const auto r = u.grid.nodes();
  const auto d2 = second_derivative_fd4(u.values, u.grid.step());

  ModeFunction out;
  out.j = u.j;
  out.grid = u.grid;
  out.values.resize(u.grid.count);
  for (std::size_t k = 0; k < u.grid.count; ++k) {
    const carleman::PhaseValues ph = pw.phase(r[k]);
    const double angular_term = lam == 0.0 ? 0.0 : h * h * lam / (r[k] * r[k]);
    out.values[k] = -h * h * d2[k] + angular_term * u.values[k] +
                    2.0 * h * ph.dphi * u.derivative[k] +
                    (Complex(pot.V(r[k]) - ph.dphi * ph.dphi + h * ph.d2phi - pw.params().E) + shift) *
                        u.values[k];
  }
  out.derivative = first_derivative_fd4(out.values, u.grid.step());
  return out;
}

double energy_F(const carleman::PhaseWeight& pw, const potentials::PotentialSpec& pot, double h,
                const ModeFunction& u, std::size_t node_index) {
  if (node_index >= u.grid.count) throw std::out_of_range("energy_F: node index out of range");
  const double r = u.grid.r_min + u.grid.step() * static_cast<double>(node_index);
  const double lam = angular::lambda(pw.params().n, u.j);
  const double dphi = pw.phi_prime(r);
  const double angular_term = lam == 0.0 ? 0.0 : h * h * lam / (r * r);
  const double coeff = angular_term + pot.V(r) - dphi * dphi - pw.params().E;
  return std::norm(h * u.derivative[node_index]) - coeff * std::norm(u.values[node_index]);
}

namespace {

struct IdentityData {
  std::vector<double> lhs, rhs;
  std::vector<bool> usable;
};

IdentityData identity_sides(const carleman::PhaseWeight& pw,
                            const potentials::PotentialSpec& pot, double h, double eps,
                            Sign sign, const ModeFunction& u) {
  const std::size_t n = u.grid.count;
  const double dr = u.grid.step();
  const auto r = u.grid.nodes();
  const double lam = angular::lambda(pw.params().n, u.j);
  const double sgn = sign == Sign::Plus ? 1.0 : -1.0;

  const auto weights = pw.weight_profile(r);
  const ModeFunction pu = apply_conjugated(pw, pot, h, eps, sign, u);

  std::vector<double> wF(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double dphi = pw.phi_prime(r[k]);
    const double angular_term = lam == 0.0 ? 0.0 : h * h * lam / (r[k] * r[k]);
    const double coeff = angular_term + pot.V(r[k]) - dphi * dphi - pw.params().E;
    const double F = std::norm(h * u.derivative[k]) - coeff * std::norm(u.values[k]);
    wF[k] = weights[k].w * F;
  }

  IdentityData data;
  data.lhs.assign(n, 0.0);
  data.rhs.assign(n, 0.0);
  data.usable.assign(n, false);

  // Nodes near the grid ends or any coefficient kink are excluded.
  std::vector<double> kinks(pw.breakpoints().begin(), pw.breakpoints().end());
  kinks.insert(kinks.end(), pot.breakpoints.begin(), pot.breakpoints.end());

  for (std::size_t k = 4; k + 4 < n; ++k) {
    bool near_kink = false;
    for (double bp : kinks)
      if (std::abs(r[k] - bp) <= 2.0 * dr) near_kink = true;
    if (near_kink) continue;

    data.lhs[k] = (wF[k + 1] - wF[k - 1]) / (2.0 * dr);

    const carleman::PhaseValues ph = pw.phase(r[k]);
    const carleman::WeightValues& wt = weights[k];
    const Complex u_k = u.values[k];
    const Complex du_k = u.derivative[k];
    const double angular_term = lam == 0.0 ? 0.0 : h * h * lam / (r[k] * r[k]);

    const double rhs = -2.0 * wt.w * std::real(pu.values[k] * std::conj(du_k)) -
                       sgn * 2.0 * eps * wt.w * std::imag(u_k * std::conj(du_k)) +
                       (2.0 * wt.w / r[k] - wt.wprime) * angular_term * std::norm(u_k) +
                       (4.0 / h * wt.w * ph.dphi + wt.wprime) * std::norm(h * du_k) +
                       (wt.wprime * (pw.params().E + ph.dphi * ph.dphi - pot.V(r[k])) +
                        wt.w * (2.0 * ph.dphi * ph.d2phi - pot.Vprime(r[k]))) *
                           std::norm(u_k) +
                       2.0 * wt.w * std::real(h * ph.d2phi * u_k * std::conj(du_k));
    data.rhs[k] = rhs;
    data.usable[k] = true;
  }
  return data;
}

double max_abs_diff(const IdentityData& d) {
  double worst = 0.0;
  for (std::size_t k = 0; k < d.lhs.size(); ++k)
    if (d.usable[k]) worst = std::max(worst, std::abs(d.lhs[k] - d.rhs[k]));
  return worst;
}

ModeFunction subsample(const ModeFunction& u) {
  ModeFunction c;
  c.j = u.j;
  c.grid.r_min = u.grid.r_min;
  c.grid.count = (u.grid.count + 1) / 2;
  c.grid.r_max = u.grid.r_min + u.grid.step() * 2.0 * static_cast<double>(c.grid.count - 1);
  c.values.reserve(c.grid.count);
  c.derivative.reserve(c.grid.count);
  for (std::size_t k = 0; k < u.grid.count; k += 2) {
    c.values.push_back(u.values[k]);
    c.derivative.push_back(u.derivative[k]);
  }
  c.declared_compact = false;
  return c;
}

}  // namespace

ResidualReport wF_derivative_residual(const carleman::PhaseWeight& pw,
                                      const potentials::PotentialSpec& pot, double h, double eps,
                                      Sign sign, const ModeFunction& u) {
  ResidualReport rep;

  // Flag support running into a kink; those nodes are excluded pointwise.
  double peak = 0.0;
  for (const auto& z : u.values) peak = std::max(peak, std::abs(z));
  std::vector<double> kinks(pw.breakpoints().begin(), pw.breakpoints().end());
  kinks.insert(kinks.end(), pot.breakpoints.begin(), pot.breakpoints.end());
  const auto r = u.grid.nodes();
  for (std::size_t k = 0; k < u.grid.count && peak > 0.0; ++k) {
    if (std::abs(u.values[k]) <= 1e-12 * peak) continue;
    for (double bp : kinks)
      if (std::abs(r[k] - bp) <= 2.0 * u.grid.step()) rep.support_touches_breakpoint = true;
  }

  rep.max_residual = max_abs_diff(identity_sides(pw, pot, h, eps, sign, u));
  rep.max_residual_coarse = max_abs_diff(identity_sides(pw, pot, h, eps, sign, subsample(u)));
  rep.convergence_ratio =
      rep.max_residual > 0.0 ? rep.max_residual_coarse / rep.max_residual : 0.0;
  return rep;
}

std::string to_json(const ResidualReport& rep) {
  nlohmann::json j;
  j["max_residual"] = rep.max_residual;
  j["max_residual_coarse"] = rep.max_residual_coarse;
  j["convergence_ratio"] = rep.convergence_ratio;
  j["support_touches_breakpoint"] = rep.support_touches_breakpoint;
  return j.dump(2);
}

}  // namespace resolab::energy
