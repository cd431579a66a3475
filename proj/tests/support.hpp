#pragma once

// Shared helpers for the unit and acceptance tests. Loops are assembled here
// from closed-form series so the library is not its own reference.

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "psurf/loop.hpp"

namespace psurf::testing {

inline constexpr Complex kI{0.0, 1.0};

inline Mat2 pauli(int k) {
  Mat2 m;
  if (k == 1) m << 0.0, 1.0, 1.0, 0.0;
  else if (k == 2) m << 0.0, -kI, kI, 0.0;
  else m << 1.0, 0.0, 0.0, -1.0;
  return m;
}

/// exp(lambda^degree x) for x traceless skew-Hermitian, from
/// x^2 = -theta^2 I: sum_n (-theta^2)^m / (2m)! lambda^{2m d} I + ... x,
/// summed until terms are negligible on |lambda| = 4.
inline LaurentLoop series_exp(int degree, const Mat2& x, int terms = 400) {
  const double theta2 = std::real((x * x)(0, 0)) * -1.0;
  std::vector<std::pair<int, Mat2>> parts;
  double fact = 1.0;
  Mat2 pw = Mat2::Identity();
  const double theta = std::sqrt(std::max(theta2, 0.0));
  double mag = 1.0;
  for (int n = 0; n < terms; ++n) {
    if (n > 0) {
      mag *= theta * std::ldexp(1.0, 2 * std::abs(degree)) / n;
      if (n > 2 && mag < 1e-22) break;
      fact *= n;
      pw = (n % 2 == 1) ? Mat2(x * (std::pow(-theta2, (n - 1) / 2))) : Mat2(Mat2::Identity() * std::pow(-theta2, n / 2));
    }
    parts.emplace_back(n * degree, pw / fact);
  }
  int lo = 0, hi = 0;
  for (const auto& [d, m] : parts) lo = std::min(lo, d), hi = std::max(hi, d);
  std::vector<Mat2> c(hi - lo + 1, Mat2::Zero());
  for (const auto& [d, m] : parts) c[d - lo] += m;
  return LaurentLoop(lo, c);
}

/// Twisted su(2) element for the degree's parity with norm <= scale.
inline Mat2 random_twisted_su2(int degree, std::mt19937_64& rng, double scale = 1.0) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Mat2 x = Mat2::Zero();
  if (degree % 2 == 0) {
    const double t = u(rng);
    x(0, 0) = kI * t;
    x(1, 1) = -kI * t;
  } else {
    const Complex z(u(rng), u(rng));
    x(0, 1) = z;
    x(1, 0) = -std::conj(z);
  }
  const double n = x.norm();
  return n > 0.0 ? Mat2(x * (scale * std::abs(u(rng)) / n)) : x;
}

/// D * prod_m exp(lambda^{k_m} X_m), k_m in [-4, 4] \ {0}, |X_m| <= 2^-|k_m|,
/// D a constant diagonal unitary. The scaling keeps values on |lambda| = 2
/// of order one.
inline LaurentLoop random_twisted_unitary(std::mt19937_64& rng, int factors = 3) {
  std::uniform_int_distribution<int> deg(1, 4);
  std::bernoulli_distribution neg(0.5);
  std::uniform_real_distribution<double> ang(-3.0, 3.0);
  const double a = ang(rng);
  LaurentLoop g = LaurentLoop::constant(diag2(std::polar(1.0, a), std::polar(1.0, -a)));
  for (int m = 0; m < factors; ++m) {
    const int k = neg(rng) ? -deg(rng) : deg(rng);
    g = (g * series_exp(k, random_twisted_su2(k, rng, std::ldexp(1.0, -std::abs(k))))).trimmed(1e-17, 2.0);
  }
  return g;
}

inline double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double d = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) d = std::max(d, std::abs(a[k] - b[k]));
  return d;
}

inline double soliton_phi(double x, double y) { return 4.0 * std::atan(std::exp(x + y)); }

}  // namespace psurf::testing
