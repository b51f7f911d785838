#include "resolab/carleman.hpp"

#include <cmath>
#include <limits>

#include <nlohmann/json.hpp>

#include "resolab/detail/numerics.hpp"

namespace resolab::carleman {

double eta_upper_bound(double delta) {
  if (delta == 0.0) return std::numeric_limits<double>::infinity();
  return (16.0 - 8.0 * delta - delta * delta) / (delta * delta);
}

CarlemanParams derive_constants_from_envelopes(int n, double E, double delta, double c1, double c0,
                                               const std::function<double(double)>& y,
                                               const std::function<double(double)>& m, double b,
                                               double eta, double s) {
  if (n < 2) throw std::invalid_argument("derive_constants: n must be >= 2");
  if (!(E > 0.0)) throw std::invalid_argument("derive_constants: E must be positive");
  if (delta < 0.0 || delta >= potentials::max_delta())
    throw std::invalid_argument("derive_constants: delta out of [0, 4(sqrt2-1))");
  if (c1 < 0.0 || c0 < 0.0) throw std::invalid_argument("derive_constants: c0, c1 must be >= 0");
  if (!(b >= 1.0)) throw std::invalid_argument("derive_constants: b must be >= 1");
  if (!(eta > 0.0) || !(eta < eta_upper_bound(delta)))
    throw std::invalid_argument("derive_constants: eta outside (0, (16-8d-d^2)/d^2)");
  if (!(s > 0.5) || !(s < 1.0)) throw std::invalid_argument("derive_constants: s outside (1/2, 1)");

  CarlemanParams p;
  p.n = n;
  p.E = E;
  p.s = s;
  p.delta = delta;
  p.eta = eta;
  p.c1 = c1;
  p.c0 = c0;
  p.b = b;
  p.K1 = 1.0;

  const double denom = 16.0 - 8.0 * delta - (1.0 + eta) * delta * delta;
  const double bound1 = c1 > 0.0 ? std::sqrt(24.0 * c1 / denom) : 0.0;
  const double bound2 = detail::sup_on_interval(
      [&](double r) {
        return 0.5 * std::pow(1.0 + r, 1.5) * std::sqrt(1.0 + y(r) + c0 * m(r));
      },
      1.0, b);
  p.K = std::max(bound1, bound2);
  p.M = 2.0 * std::max({b, 6.0 * std::sqrt(3.0), 8.0 * p.K / std::sqrt(E)});
  p.h0 = std::min(1.0, 0.9 * 27.0 * E / (4.0 * (1.0 + eta) * p.K));
  return p;
}

CarlemanParams derive_constants(const potentials::PotentialSpec& pot, double eta, double s) {
  return derive_constants_from_envelopes(pot.n, pot.E, pot.delta, pot.c1, pot.c0, pot.y, pot.m,
                                         potentials::compute_b(pot), eta, s);
}

PhaseWeight::PhaseWeight(const CarlemanParams& params, std::function<double(double)> m_envelope)
    : params_(params), m_(std::move(m_envelope)) {
  if (!m_) m_ = [](double) { return 0.0; };
  const double K = params_.K, M = params_.M, delta = params_.delta;
  cubic_coef_ = 8.0 * K / (M * M * (1.0 + M / 2.0));
  phi_at_1_ = K / (1.0 - delta / 2.0);
  phi_at_mid_ = phi_at_1_ + 2.0 * K * std::log((1.0 + M / 2.0) / 2.0);
  phi_at_M_ = phi_at_mid_ + cubic_coef_ * std::pow(M / 2.0, 3) / 3.0;
}

std::array<double, 3> PhaseWeight::breakpoints() const {
  return {1.0, params_.M / 2.0, params_.M};
}

double PhaseWeight::phi_prime(double r) const {
  const double K = params_.K, M = params_.M, delta = params_.delta;
  if (r < 0.0) throw std::domain_error("phi' evaluated at r < 0");
  if (r <= 1.0) return K * std::pow(r, -delta / 2.0);
  if (r <= M / 2.0) return 2.0 * K / (1.0 + r);
  if (r < M) return cubic_coef_ * (M - r) * (M - r);
  return 0.0;
}

double PhaseWeight::phi_second(double r) const {
  const double K = params_.K, M = params_.M, delta = params_.delta;
  if (r <= 1.0) {
    if (delta == 0.0) return 0.0;
    if (!(r > 0.0)) throw std::domain_error("phi'' needs r > 0 when delta > 0");
    return -(delta / 2.0) * K * std::pow(r, -delta / 2.0 - 1.0);
  }
  if (r <= M / 2.0) return -2.0 * K / ((1.0 + r) * (1.0 + r));
  if (r < M) return -2.0 * cubic_coef_ * (M - r);
  return 0.0;
}

PhaseValues PhaseWeight::phase(double r) const {
  const double K = params_.K, M = params_.M, delta = params_.delta;
  if (r < 0.0) throw std::domain_error("phase evaluated at r < 0");
  PhaseValues v{};
  v.dphi = phi_prime(r);
  v.d2phi =
      (r > 0.0 || delta == 0.0) ? phi_second(r) : std::numeric_limits<double>::quiet_NaN();
  if (r <= 1.0) {
    const double e = 1.0 - delta / 2.0;
    v.phi = K * std::pow(r, e) / e;
  } else if (r <= M / 2.0) {
    v.phi = phi_at_1_ + 2.0 * K * std::log((1.0 + r) / 2.0);
  } else if (r < M) {
    v.phi = phi_at_mid_ + cubic_coef_ * (std::pow(M / 2.0, 3) - std::pow(M - r, 3)) / 3.0;
  } else {
    v.phi = phi_at_M_;
  }
  return v;
}

double PhaseWeight::script_w(double r) const {
  const double M = params_.M;
  if (!(r > 0.0)) throw std::domain_error("script-W evaluated at r <= 0");
  if (r < M) return 0.5 * r;
  const double far = params_.E * r * r * r / (4.0 * (params_.c0 * r * r * m_(r) + 1.0));
  const double cap = std::pow(1.0 + r * r, params_.s);
  return std::min(far, cap);
}

double PhaseWeight::exponent_integral(double lo, double hi) const {
  if (hi <= lo) return 0.0;
  return detail::adaptive_simpson([&](double rho) { return 1.0 / script_w(rho); }, lo, hi, 1e-10);
}

WeightValues PhaseWeight::weight(double r) const {
  const double M = params_.M, K1 = params_.K1;
  if (!(r > 0.0)) throw std::domain_error("weight evaluated at r <= 0");
  if (r < M) {
    // script-W = r/2 here, which makes q vanish identically.
    return {K1 * r * r, 2.0 * K1 * r, 0.5 * r, 0.0};
  }
  const double W = script_w(r);
  const double w = K1 * M * M * std::exp(exponent_integral(M, r));
  return {w, w / W, W, 2.0 / r - 1.0 / W};
}

std::vector<WeightValues> PhaseWeight::weight_profile(const std::vector<double>& radii) const {
  std::vector<WeightValues> out;
  out.reserve(radii.size());
  const double M = params_.M, K1 = params_.K1;
  double acc = 0.0, last = M;
  bool ascending = true;
  for (std::size_t i = 1; i < radii.size(); ++i)
    if (radii[i] < radii[i - 1]) {
      ascending = false;
      break;
    }
  for (double r : radii) {
    if (r < M || !ascending) {
      out.push_back(weight(r));
      continue;
    }
    acc += exponent_integral(last, r);
    last = r;
    const double W = script_w(r);
    const double w = K1 * M * M * std::exp(acc);
    out.push_back({w, w / W, W, 2.0 / r - 1.0 / W});
  }
  return out;
}

namespace {

double margin_from_values(const CarlemanParams& p, const PhaseValues& ph, const WeightValues& wt,
                          double V, double Vp, double h, double r) {
  const double A = wt.wprime * (p.E + ph.dphi * ph.dphi - V) +
                   wt.w * (2.0 * ph.dphi * ph.d2phi - Vp) -
                   h * h * wt.w * wt.q / (4.0 * r * r);
  const double denom = wt.wprime + 4.0 / h * ph.dphi * wt.w;
  const double wphi2 = wt.w * ph.d2phi;
  const double B = wphi2 == 0.0 ? 0.0 : wphi2 * wphi2 / denom;
  return A - (1.0 + p.eta) * B - 0.5 * p.E * wt.wprime;
}

}  // namespace

MarginValue lower_bound_margin(const PhaseWeight& pw, const potentials::PotentialSpec& pot,
                               double h, double r) {
  if (!(r > 0.0)) throw std::domain_error("margin evaluated at r <= 0");
  if (!(h > 0.0)) throw std::invalid_argument("margin needs h > 0");

  MarginValue mv;
  for (double bp : pw.breakpoints())
    if (r == bp) mv.at_breakpoint = true;
  for (double bp : pot.breakpoints)
    if (r == bp) mv.at_breakpoint = true;

  // V' is taken one-sided at a kink; grids are built to avoid them anyway.
  mv.value = margin_from_values(pw.params(), pw.phase(r), pw.weight(r), pot.V(r), pot.Vprime(r),
                                h, r);
  return mv;
}

std::vector<double> margin_grid(const PhaseWeight& pw, double lo, double hi, std::size_t count) {
  auto grid = potentials::log_grid(lo, hi, count);
  for (double& r : grid) {
    for (double bp : pw.breakpoints()) {
      if (std::abs(r - bp) <= 1e-9 * bp) r = bp * (1.0 + 1e-7);
    }
  }
  return grid;
}

namespace {

int piece_index(const CarlemanParams& p, double r) {
  if (r <= 1.0) return 0;
  if (r <= p.M / 2.0) return 1;
  if (r < p.M) return 2;
  return 3;
}

}  // namespace

MarginReport verify_lemma31(const PhaseWeight& pw, const potentials::PotentialSpec& pot, double h,
                            const std::vector<double>& grid) {
  MarginReport rep;
  rep.h_exceeds_h0 = h > pw.params().h0;
  rep.per_piece = {{"0<r<=1", 0, 0, false},
                   {"1<r<=M/2", 0, 0, false},
                   {"M/2<r<M", 0, 0, false},
                   {"r>=M", 0, 0, false}};
  rep.min_margin = std::numeric_limits<double>::infinity();

  const auto weights = pw.weight_profile(grid);
  const CarlemanParams& p = pw.params();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double r = grid[i];
    const WeightValues& wt = weights[i];
    rep.max_wprime = std::max(rep.max_wprime, wt.wprime);

    const double margin =
        margin_from_values(p, pw.phase(r), wt, pot.V(r), pot.Vprime(r), h, r);

    auto& piece = rep.per_piece[static_cast<std::size_t>(piece_index(p, r))];
    if (!piece.any || margin < piece.min_margin) {
      piece.min_margin = margin;
      piece.argmin_r = r;
      piece.any = true;
    }
    if (margin < rep.min_margin) {
      rep.min_margin = margin;
      rep.argmin_r = r;
    }
  }
  rep.pass = rep.min_margin >= -1e-9 * rep.max_wprime && !rep.h_exceeds_h0;
  return rep;
}

std::string to_json(const MarginReport& rep) {
  nlohmann::json j;
  j["min_margin"] = rep.min_margin;
  j["argmin_r"] = rep.argmin_r;
  j["max_wprime"] = rep.max_wprime;
  j["h_exceeds_h0"] = rep.h_exceeds_h0;
  j["pass"] = rep.pass;
  j["per_piece"] = nlohmann::json::array();
  for (const auto& pc : rep.per_piece) {
    if (!pc.any) continue;
    j["per_piece"].push_back(
        {{"piece", pc.piece}, {"min_margin", pc.min_margin}, {"argmin_r", pc.argmin_r}});
  }
  return j.dump(2);
}

}  // namespace resolab::carleman
