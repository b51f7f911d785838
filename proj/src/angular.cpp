#include "resolab/angular.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace resolab::angular {

double lambda(int n, int j) {
  if (n < 2) throw std::invalid_argument("lambda: dimension n must be >= 2");
  if (j < 0) throw std::invalid_argument("lambda: mode index j must be >= 0");
  const double jd = static_cast<double>(j);
  const double nd = static_cast<double>(n);
  return jd * jd + (nd - 2.0) * jd + (nd - 1.0) * (nd - 3.0) / 4.0;
}

std::vector<PolePair> pole_set(int n, int jmax) {
  if (n < 2) throw std::invalid_argument("pole_set: dimension n must be >= 2");
  std::vector<PolePair> poles;
  poles.reserve(static_cast<std::size_t>(jmax) + 1);
  for (int j = 0; j <= jmax; ++j) {
    const double g = static_cast<double>(n - 2 + 2 * j);
    poles.push_back({j, (1.0 - g) / 2.0, (1.0 + g) / 2.0});
  }
  return poles;
}

bool is_in_T(int n, double t) {
  const double u = 2.0 * t - 1.0;
  const double au = std::abs(u);
  if (au != std::floor(au)) return false;
  if (au > 1e15) return true;  // beyond exact integer range; lambda_j unbounded
  const long long k = static_cast<long long>(au);
  if (k < n - 2) return false;
  return (k - (n - 2)) % 2 == 0;
}

PoleAtT::PoleAtT(double t)
    : std::runtime_error([&] {
        std::ostringstream os;
        os << "Upsilon evaluated at a pole level t = " << t;
        return os.str();
      }()),
      t_(t) {}

double upsilon(int n, double t) {
  if (n < 2) throw std::invalid_argument("upsilon: dimension n must be >= 2");
  if (!std::isfinite(t)) throw std::invalid_argument("upsilon: t must be finite");
  const double x = t * t - t;
  // lambda_j is strictly increasing in j; once it passes x the distance grows,
  // so the scan terminates at the first eigenvalue beyond x.
  double best = std::numeric_limits<double>::infinity();
  for (int j = 0;; ++j) {
    const double lam = lambda(n, j);
    const double d = std::abs(x - lam);
    if (d < best) best = d;
    if (lam > x) break;
  }
  if (best == 0.0) throw PoleAtT(t);
  return 1.0 / best;
}

}  // namespace resolab::angular
