#pragma once

// Test-side reference computations, independent of the library internals.

#include <array>
#include <cmath>
#include <cstdint>
#include <random>

namespace oracle {

using M = std::array<double, 4>;

inline M mul(const M& x, const M& y) {
  return {x[0] * y[0] + x[1] * y[2], x[0] * y[1] + x[1] * y[3], x[2] * y[0] + x[3] * y[2],
          x[2] * y[1] + x[3] * y[3]};
}

inline M rot(double t) { return {std::cos(t), -std::sin(t), std::sin(t), std::cos(t)}; }

// Largest singular value from the eigenvalues of x^T x.
inline double norm(const M& x) {
  const double p = x[0] * x[0] + x[2] * x[2], q = x[0] * x[1] + x[2] * x[3], r = x[1] * x[1] + x[3] * x[3];
  const double tr = p + r, det = p * r - q * q;
  return std::sqrt(tr / 2 + std::sqrt(std::max(0.0, tr * tr / 4 - det)));
}

// Spectral radius of a determinant-one matrix from its characteristic polynomial.
inline double rho(const M& x) {
  const double t = std::abs(x[0] + x[3]);
  return t <= 2 ? 1.0 : (t + std::sqrt(t * t - 4)) / 2;
}

// Random determinant-one matrix R_a diag(s, 1/s) R_b with s in [1, smax].
template <class Rng>
M random_sl2(Rng& rng, double smax) {
  std::uniform_real_distribution<double> ang(0.0, 3.141592653589793), st(1.0, smax);
  const double a = ang(rng), s = st(rng), b = ang(rng);
  return mul(mul(rot(a), M{s, 0, 0, 1 / s}), rot(b));
}

}  // namespace oracle
