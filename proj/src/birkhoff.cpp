#include "psurf/birkhoff.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <string>

#include "psurf/errors.hpp"

namespace psurf {

namespace {

// Noise-level trim, weighted for evaluation out to |lambda| = 2.
constexpr double kFactorTrim = 1e-17;
constexpr double kTrimRadius = 2.0;
constexpr int kRefineSteps = 4;

std::vector<Complex> make_samples() {
  std::vector<Complex> s;
  for (int k = 0; k < 64; ++k) s.push_back(std::polar(1.0, 2.0 * std::numbers::pi * k / 64.0));
  s.emplace_back(0.5);
  s.emplace_back(2.0);
  return s;
}

void measure(SplitResult& r, const LaurentLoop& g, const LaurentLoop& left, const LaurentLoop& right) {
  r.residual = 0.0;
  r.scaled_residual = 0.0;
  for (Complex l : birkhoff_sample_points()) {
    const double rad = std::abs(l);
    const double d = (g.evaluate(l) - left.evaluate(l) * right.evaluate(l)).norm();
    const double scale = std::max({1.0, coefficient_mass(g, rad), coefficient_mass(left, rad) * coefficient_mass(right, rad)});
    r.residual = std::max(r.residual, d);
    r.scaled_residual = std::max(r.scaled_residual, d / scale);
  }
}

// Solves for h = I + sum_{j=1..T} h_j lambda^j with every positive-degree
// coefficient of h * g equal to zero. Twisted structure is built in: row r of
// h_j is nonzero only in column r (j even) or 1 - r (j odd), so each row of h
// is a T-unknown least-squares problem over the degrees k = 1..T + deg+(g).
// For det g = 1 the exact h has degree <= deg+(g), so T is capped there; more
// unknowns only worsen the conditioning.
// The system is posed for g(kTrimRadius * lambda): solver noise then lands on
// the coefficients relative to their size at the outer sample radius. That
// system is worse conditioned than on |lambda| = 1, hence extended precision.
LaurentLoop left_plus_multiplier(const LaurentLoop& g, int requested) {
  const int top = std::max(g.max_degree(), 0);
  const int trunc = std::max(1, std::min(requested, top));
  const int rows = trunc + top;
  std::vector<Mat2> h(static_cast<std::size_t>(trunc) + 1, Mat2::Zero());
  h[0] = Mat2::Identity();

  using CL = std::complex<long double>;
  using MatL = Eigen::Matrix<CL, Eigen::Dynamic, Eigen::Dynamic>;
  using VecL = Eigen::Matrix<CL, Eigen::Dynamic, 1>;
  MatL a(rows, trunc);
  VecL rhs(rows);
  for (int r = 0; r < 2; ++r) {
    a.setZero();
    for (int k = 1; k <= rows; ++k) {
      const int dk = (k % 2 == 0) ? r : 1 - r;
      rhs(k - 1) = CL(-g.coeff(k)(r, dk)) * static_cast<long double>(std::pow(kTrimRadius, k));
      for (int j = 1; j <= trunc; ++j) {
        const int cj = (j % 2 == 0) ? r : 1 - r;
        a(k - 1, j - 1) = CL(g.coeff(k - j)(cj, dk)) * static_cast<long double>(std::pow(kTrimRadius, k - j));
      }
    }
    // Double-precision factorization, refined against extended-precision residuals.
    const Eigen::MatrixXcd ad = a.unaryExpr([](const CL& z) { return Complex(z); });
    Eigen::ColPivHouseholderQR<Eigen::MatrixXcd> qr(ad);
    qr.setThreshold(1e-13);
    if (qr.rank() < trunc) {
      throw FactorizationFailure("Birkhoff solve is rank deficient (rank " + std::to_string(qr.rank()) +
                                     " of " + std::to_string(trunc) + ")",
                                 std::numeric_limits<double>::infinity(), 0.0);
    }
    VecL u = VecL::Zero(trunc);
    for (int it = 0; it < kRefineSteps; ++it) {
      const VecL res = rhs - a * u;
      const Eigen::VectorXcd rd = res.unaryExpr([](const CL& z) { return Complex(z); });
      const Eigen::VectorXcd du = qr.solve(rd);
      u += du.unaryExpr([](const Complex& z) { return CL(z); });
    }
    for (int j = 1; j <= trunc; ++j) {
      const int cj = (j % 2 == 0) ? r : 1 - r;
      h[static_cast<std::size_t>(j)](r, cj) = Complex(u(j - 1) * static_cast<long double>(std::pow(kTrimRadius, -j)));
    }
  }
  return LaurentLoop(0, std::move(h));
}

// Two highest retained degrees when the solve was truncated below the exact
// degree; zero otherwise.
double top_tail(const LaurentLoop& h, const LaurentLoop& g, int trunc) {
  if (trunc >= g.max_degree()) return 0.0;
  return std::max(h.coeff(trunc).norm(), h.coeff(trunc - 1).norm());
}

template <typename Solve>
SplitResult adaptive(const LaurentLoop& g, const BirkhoffOptions& opt, Solve solve, const char* name) {
  if (opt.trunc < 2) throw DomainError(std::string(name) + ": trunc must be >= 2");
  const double twist = check_twist(g);
  if (twist > 1e-8 * std::max(1.0, g.max_coeff_norm())) {
    throw DomainError(std::string(name) + ": input loop is not twisted (residual " + fmt_num(twist) + ")");
  }
  int trunc = opt.trunc;
  SplitResult res;
  for (;;) {
    res = solve(trunc);
    res.trunc_used = trunc;
    const bool ok = res.tail_norm <= opt.tail_tol && res.scaled_residual <= opt.residual_tol;
    if (ok || trunc >= opt.max_trunc) break;
    trunc = std::min(2 * trunc, opt.max_trunc);
  }
  if (res.tail_norm > opt.tail_tol) {
    throw FactorizationFailure(std::string(name) + ": truncation tail " + fmt_num(res.tail_norm) +
                                   " above tolerance at trunc " + std::to_string(trunc),
                               res.residual, res.tail_norm);
  }
  if (!(res.scaled_residual <= opt.residual_tol)) {
    throw FactorizationFailure(std::string(name) + ": multiply-back residual " + fmt_num(res.residual) + " (scaled " + fmt_num(res.scaled_residual) + ")" +
                                   " above tolerance",
                               res.residual, res.tail_norm);
  }
  return res;
}

}  // namespace

std::span<const Complex> birkhoff_sample_points() {
  static const std::vector<Complex> samples = make_samples();
  return samples;
}

double coefficient_mass(const LaurentLoop& g, double radius) {
  double s = 0.0;
  for (int k = g.min_degree(); k <= g.max_degree(); ++k) s += g.coeff(k).norm() * std::pow(radius, std::abs(k));
  return s;
}

double sample_distance(const LaurentLoop& a, const LaurentLoop& b) {
  double r = 0.0;
  for (Complex l : birkhoff_sample_points()) r = std::max(r, (a.evaluate(l) - b.evaluate(l)).norm());
  return r;
}

SplitResult split_plus_star_minus(const LaurentLoop& g, const BirkhoffOptions& opt) {
  return adaptive(g, opt, [&](int trunc) {
    const LaurentLoop h = left_plus_multiplier(g, trunc);
    SplitResult r;
    r.tail_norm = top_tail(h, g, trunc);
    r.plus = h.adjugate().truncated(0, std::max(0, g.max_degree())).trimmed(kFactorTrim, kTrimRadius);
    r.minus = (h * g).truncated(std::min(0, g.min_degree()), 0).trimmed(kFactorTrim, kTrimRadius);
    measure(r, g, r.plus, r.minus);
    return r;
  }, "split_plus_star_minus");
}

SplitResult split_minus_star_plus(const LaurentLoop& g, const BirkhoffOptions& opt) {
  const LaurentLoop gr = g.reflected();
  return adaptive(g, opt, [&](int trunc) {
    // h = minus^{-1} in Lambda^-_*; reflect(h) * reflect(g) has no positive degrees.
    const LaurentLoop hr = left_plus_multiplier(gr, trunc);
    const LaurentLoop h = hr.reflected();
    SplitResult r;
    r.tail_norm = top_tail(hr, gr, trunc);
    r.minus = h.adjugate().truncated(std::min(0, g.min_degree()), 0).trimmed(kFactorTrim, kTrimRadius);
    r.plus = (h * g).truncated(0, std::max(0, g.max_degree())).trimmed(kFactorTrim, kTrimRadius);
    measure(r, g, r.minus, r.plus);
    return r;
  }, "split_minus_star_plus");
}

SplitResult split_plus_minusfree(const LaurentLoop& g, const BirkhoffOptions& opt) {
  const LaurentLoop gtr = g.transposed().reflected();
  return adaptive(g, opt, [&](int trunc) {
    // m = minus in Lambda^-_* with g m in Lambda^+; transposing and reflecting
    // turns this into a left multiplier problem.
    const LaurentLoop mtr = left_plus_multiplier(gtr, trunc);
    const LaurentLoop m = mtr.reflected().transposed();
    SplitResult r;
    r.tail_norm = top_tail(mtr, gtr, trunc);
    r.minus = m.truncated(std::min(0, g.min_degree()), 0).trimmed(kFactorTrim, kTrimRadius);
    r.plus = (g * m).truncated(0, std::max(0, g.max_degree())).trimmed(kFactorTrim, kTrimRadius);
    measure(r, g, r.plus, r.minus.adjugate());
    return r;
  }, "split_plus_minusfree");
}

}  // namespace psurf
