#pragma once

#include <stdexcept>
#include <vector>

namespace resolab::angular {

// Eigenvalues of the sphere operator, lambda_j = j^2 + (n-2) j + (n-1)(n-3)/4,
// bounded below by -1/4 for every n >= 2.
double lambda(int n, int j);

struct PolePair {
  int j;
  double t_minus;  // (1 - ((n-2)+2j)) / 2
  double t_plus;   // (1 + ((n-2)+2j)) / 2
};

// Imaginary parts of the poles of sigma -> (sigma^2 - i sigma + Lambda)^{-1}
// for j = 0..jmax.
std::vector<PolePair> pole_set(int n, int jmax);

// Exact membership test for the pole-level set T: t is in T iff 2t-1 is an
// integer of the same parity as n with |2t-1| >= n-2.
bool is_in_T(int n, double t);

class PoleAtT : public std::runtime_error {
 public:
  explicit PoleAtT(double t);
  double level() const { return t_; }

 private:
  double t_;
};

// Upsilon(t) = 1 / min_j |t^2 - t - lambda_j|. Throws PoleAtT when the
// distance vanishes (t in T).
double upsilon(int n, double t);

}  // namespace resolab::angular
