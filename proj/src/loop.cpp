#include "psurf/loop.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>
#include <utility>

#include "psurf/errors.hpp"

namespace psurf {

namespace {

const Complex kI{0.0, 1.0};

Mat2 adj2(const Mat2& m) {
  Mat2 r;
  r << m(1, 1), -m(0, 1), -m(1, 0), m(0, 0);
  return r;
}

}  // namespace

LaurentLoop::LaurentLoop() : min_degree_(0), coeffs_{Mat2::Zero()} {}

LaurentLoop::LaurentLoop(int min_degree, std::vector<Mat2> coeffs)
    : min_degree_(min_degree), coeffs_(std::move(coeffs)) {
  if (coeffs_.empty()) {
    min_degree_ = 0;
    coeffs_.push_back(Mat2::Zero());
  }
}

LaurentLoop LaurentLoop::identity() { return constant(Mat2::Identity()); }

LaurentLoop LaurentLoop::constant(const Mat2& c) { return LaurentLoop(0, {c}); }

LaurentLoop LaurentLoop::monomial(int degree, const Mat2& c) { return LaurentLoop(degree, {c}); }

Mat2 LaurentLoop::coeff(int k) const {
  if (k < min_degree_ || k > max_degree()) return Mat2::Zero();
  return coeffs_[static_cast<std::size_t>(k - min_degree_)];
}

Mat2 LaurentLoop::evaluate(Complex lambda) const {
  if (lambda == Complex(0.0) && min_degree_ < 0) {
    throw DomainError("evaluate: lambda = 0 with negative degrees present");
  }
  // Horner separately on the non-negative and negative parts.
  Mat2 pos = Mat2::Zero();
  for (int k = max_degree(); k >= std::max(min_degree_, 0); --k) {
    pos = pos * lambda + coeffs_[static_cast<std::size_t>(k - min_degree_)];
  }
  if (min_degree_ > 0) pos *= std::pow(lambda, min_degree_);
  if (min_degree_ >= 0) return pos;

  const Complex inv = 1.0 / lambda;
  Mat2 neg = Mat2::Zero();
  for (int k = min_degree_; k <= std::min(max_degree(), -1); ++k) {
    neg = (neg + coeffs_[static_cast<std::size_t>(k - min_degree_)]) * inv;
  }
  // neg now holds sum_{k<0} c_k lambda^k * lambda^{-(min(max,-1)+1)}.
  const int top_neg = std::min(max_degree(), -1);
  if (top_neg < -1) neg *= std::pow(lambda, top_neg + 1);
  return pos + neg;
}

LaurentLoop LaurentLoop::trimmed(double rel, double radius) const {
  std::vector<double> w(coeffs_.size());
  double mx = 0.0;
  for (std::size_t k = 0; k < coeffs_.size(); ++k) {
    w[k] = coeffs_[k].norm() * std::pow(radius, std::abs(min_degree_ + static_cast<int>(k)));
    mx = std::max(mx, w[k]);
  }
  if (mx == 0.0) return LaurentLoop();
  const double cut = rel * mx;
  std::size_t lo = 0;
  std::size_t hi = coeffs_.size();
  while (lo + 1 < hi && w[lo] < cut) ++lo;
  while (hi - 1 > lo && w[hi - 1] < cut) --hi;
  return LaurentLoop(min_degree_ + static_cast<int>(lo),
                     std::vector<Mat2>(coeffs_.begin() + static_cast<std::ptrdiff_t>(lo),
                                       coeffs_.begin() + static_cast<std::ptrdiff_t>(hi)));
}

LaurentLoop LaurentLoop::truncated(int lo, int hi) const {
  const int a = std::max(lo, min_degree_);
  const int b = std::min(hi, max_degree());
  if (a > b) return LaurentLoop(std::clamp(0, lo, hi), {Mat2::Zero()});
  std::vector<Mat2> c(coeffs_.begin() + (a - min_degree_), coeffs_.begin() + (b - min_degree_ + 1));
  return LaurentLoop(a, std::move(c));
}

LaurentLoop LaurentLoop::reflected() const {
  std::vector<Mat2> c(coeffs_.rbegin(), coeffs_.rend());
  return LaurentLoop(-max_degree(), std::move(c));
}

LaurentLoop LaurentLoop::transposed() const {
  std::vector<Mat2> c;
  c.reserve(coeffs_.size());
  for (const auto& m : coeffs_) c.push_back(m.transpose());
  return LaurentLoop(min_degree_, std::move(c));
}

LaurentLoop LaurentLoop::adjugate() const {
  std::vector<Mat2> c;
  c.reserve(coeffs_.size());
  for (const auto& m : coeffs_) c.push_back(adj2(m));
  return LaurentLoop(min_degree_, std::move(c));
}

double LaurentLoop::max_coeff_norm() const {
  double mx = 0.0;
  for (const auto& m : coeffs_) mx = std::max(mx, m.norm());
  return mx;
}

LaurentLoop LaurentLoop::operator+(const LaurentLoop& o) const {
  const int lo = std::min(min_degree_, o.min_degree_);
  const int hi = std::max(max_degree(), o.max_degree());
  std::vector<Mat2> c(static_cast<std::size_t>(hi - lo + 1), Mat2::Zero());
  for (int k = min_degree_; k <= max_degree(); ++k) c[k - lo] += coeffs_[k - min_degree_];
  for (int k = o.min_degree_; k <= o.max_degree(); ++k) c[k - lo] += o.coeffs_[k - o.min_degree_];
  return LaurentLoop(lo, std::move(c));
}

LaurentLoop LaurentLoop::operator-(const LaurentLoop& o) const { return *this + o * Complex(-1.0); }

LaurentLoop LaurentLoop::operator*(Complex s) const {
  std::vector<Mat2> c = coeffs_;
  for (auto& m : c) m *= s;
  return LaurentLoop(min_degree_, std::move(c));
}

LaurentLoop LaurentLoop::operator*(const Mat2& m) const {
  std::vector<Mat2> c = coeffs_;
  for (auto& x : c) x = x * m;
  return LaurentLoop(min_degree_, std::move(c));
}

LaurentLoop operator*(const Mat2& m, const LaurentLoop& g) {
  std::vector<Mat2> c = g.coeffs_;
  for (auto& x : c) x = m * x;
  return LaurentLoop(g.min_degree_, std::move(c));
}

LaurentLoop multiply(const LaurentLoop& a, const LaurentLoop& b) {
  const auto ca = a.coeffs();
  const auto cb = b.coeffs();
  std::vector<Mat2> c(ca.size() + cb.size() - 1, Mat2::Zero());
  for (std::size_t i = 0; i < ca.size(); ++i) {
    const Mat2& x = ca[i];
    if (x.isZero(0.0)) continue;
    for (std::size_t j = 0; j < cb.size(); ++j) c[i + j].noalias() += x * cb[j];
  }
  return LaurentLoop(a.min_degree() + b.min_degree(), std::move(c));
}

LaurentLoop inverse_unitary(const LaurentLoop& g, double tol) {
  for (double l : {0.5, 1.0, 2.0}) {
    const Complex d = g.evaluate(l).determinant();
    if (std::abs(d - 1.0) > tol) {
      throw DomainError("inverse_unitary: det g(" + fmt_num(l) +
                        ") deviates from 1 by " + fmt_num(std::abs(d - 1.0)));
    }
  }
  return g.adjugate();
}

double check_twist(const LaurentLoop& g) {
  double r = 0.0;
  for (int k = g.min_degree(); k <= g.max_degree(); ++k) {
    const Mat2 c = g.coeff(k);
    const double v = (k % 2 == 0) ? std::hypot(std::abs(c(0, 1)), std::abs(c(1, 0)))
                                  : std::hypot(std::abs(c(0, 0)), std::abs(c(1, 1)));
    r = std::max(r, v);
  }
  return r;
}

double unitarity_residual(const LaurentLoop& g, std::span<const double> lambdas) {
  double r = 0.0;
  for (double l : lambdas) {
    const Mat2 m = g.evaluate(l);
    r = std::max(r, (m.adjoint() * m - Mat2::Identity()).norm());
    r = std::max(r, std::abs(m.determinant() - 1.0));
  }
  return r;
}

double unitarity_residual(const LaurentLoop& g) {
  static constexpr std::array<double, 5> kSamples{0.25, 0.5, 1.0, 2.0, 4.0};
  return unitarity_residual(g, kSamples);
}

double su2_algebra_residual(const LaurentLoop& x, std::span<const double> lambdas) {
  double r = 0.0;
  for (double l : lambdas) {
    const Mat2 m = x.evaluate(l);
    r = std::max(r, (m + m.adjoint()).norm());
    r = std::max(r, std::abs(m.trace()));
  }
  return r;
}

LaurentLoop log_lambda_derivative(const LaurentLoop& g) {
  std::vector<Mat2> c(g.coeffs().begin(), g.coeffs().end());
  for (std::size_t i = 0; i < c.size(); ++i) c[i] *= static_cast<double>(g.min_degree() + static_cast<int>(i));
  return LaurentLoop(g.min_degree(), std::move(c));
}

Mat2 su2_basis(int axis) {
  Mat2 m;
  switch (axis) {
    case 0:
      m << 0.0, kI, kI, 0.0;
      break;
    case 1:
      m << 0.0, -1.0, 1.0, 0.0;
      break;
    case 2:
      m << kI, 0.0, 0.0, -kI;
      break;
    default:
      throw DomainError("su2_basis: axis must be 0, 1 or 2");
  }
  return 0.5 * m;
}

Vec3 su2_to_r3(const Mat2& m, double tol) {
  const double dev = std::max((m + m.adjoint()).norm(), std::abs(m.trace()));
  if (dev > tol * (1.0 + m.norm())) {
    throw DomainError("su2_to_r3: matrix is not traceless skew-Hermitian (deviation " +
                      fmt_num(dev) + ")");
  }
  // m = (1/2) [[i z, i x - y], [i x + y, -i z]]
  return Vec3((m(0, 1) + m(1, 0)).imag(), (m(1, 0) - m(0, 1)).real(), 2.0 * m(0, 0).imag());
}

Mat2 r3_to_su2(const Vec3& v) {
  return v.x() * su2_basis(0) + v.y() * su2_basis(1) + v.z() * su2_basis(2);
}

Mat2 bracket(const Mat2& a, const Mat2& b) { return a * b - b * a; }

Mat3 adjoint_rotation(const Mat2& g, double tol) {
  const double dev = std::max((g.adjoint() * g - Mat2::Identity()).norm(),
                              std::abs(g.determinant() - 1.0));
  if (dev > tol) {
    throw DomainError("adjoint_rotation: input is not in SU(2) (deviation " + fmt_num(dev) + ")");
  }
  const Mat2 gi = g.adjoint();
  Mat3 r;
  for (int k = 0; k < 3; ++k) r.col(k) = su2_to_r3(g * su2_basis(k) * gi, 1e-6);
  return r;
}

Mat2 su2_lift(const Mat3& r) {
  // 2*basis matrices multiply like quaternion units i, j, k, so the lift of
  // the rotation with unit quaternion (w, x, y, z) is w I + 2(x Ib + y Jb + z Kb).
  const Eigen::Quaterniond q(r);
  return q.w() * Mat2::Identity() + 2.0 * (q.x() * su2_basis(0) + q.y() * su2_basis(1) + q.z() * su2_basis(2));
}

double rotation_angle(const Mat3& r) {
  return std::acos(std::clamp((r.trace() - 1.0) / 2.0, -1.0, 1.0));
}

Vec3 rotation_axis(const Mat3& r) {
  const Eigen::AngleAxisd aa(r);
  return aa.axis();
}

Mat2 diag2(Complex a, Complex b) {
  Mat2 m;
  m << a, 0.0, 0.0, b;
  return m;
}

LaurentLoop exp_single_degree(int degree, const Mat2& x, double tol) {
  if (degree == 0) {
    // constant: cos(theta) I + sin(theta)/theta x
    const Complex th = std::sqrt(x.determinant());
    const Complex s = std::abs(th) < 1e-300 ? Complex(1.0) : std::sin(th) / th;
    return LaurentLoop::constant(std::cos(th) * Mat2::Identity() + s * x);
  }
  // x^(2n) = (-det x)^n I, x^(2n+1) = (-det x)^n x
  const Complex mdet = -x.determinant();
  std::vector<std::pair<int, Mat2>> terms;
  Complex pw = 1.0;
  double fact = 1.0;
  // Terms are weighted by their size on |lambda| = 2, where the values are used.
  const double xn = std::max(1.0, x.norm());
  const double r = std::pow(2.0, std::abs(degree));
  double rw = 1.0;
  for (int n = 0;; ++n) {
    if (n > 0) fact *= (2.0 * n - 1.0) * (2.0 * n);
    const Mat2 even = (pw / fact) * Mat2::Identity();
    const Mat2 odd = (pw / (fact * (2.0 * n + 1.0))) * x;
    terms.emplace_back(2 * n * degree, even);
    terms.emplace_back((2 * n + 1) * degree, odd);
    if (n > 2 && even.norm() * rw < tol && odd.norm() * rw * r < tol * xn) break;
    if (n > 200) break;
    pw *= mdet;
    rw *= r * r;
  }
  int lo = 0;
  int hi = 0;
  for (const auto& [k, m] : terms) {
    lo = std::min(lo, k);
    hi = std::max(hi, k);
  }
  std::vector<Mat2> c(static_cast<std::size_t>(hi - lo + 1), Mat2::Zero());
  for (const auto& [k, m] : terms) c[static_cast<std::size_t>(k - lo)] += m;
  return LaurentLoop(lo, std::move(c));
}

}  // namespace psurf
