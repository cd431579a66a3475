#include "psurf/spline.hpp"

#include <algorithm>

#include "psurf/errors.hpp"

namespace psurf {

namespace {

using Vec = Eigen::VectorXcd;

// Derivative at t[0] from the cubic through the first four knots.
Vec end_slope(const std::vector<double>& t, const std::vector<Vec>& v, bool front) {
  const std::size_t n = t.size();
  const std::size_t m = std::min<std::size_t>(4, n);
  std::vector<std::size_t> idx(m);
  for (std::size_t k = 0; k < m; ++k) idx[k] = front ? k : n - 1 - k;
  const double x0 = t[idx[0]];
  Vec d = Vec::Zero(v[0].size());
  // d/dx of the Lagrange basis at x0.
  for (std::size_t a = 0; a < m; ++a) {
    double w = 0.0;
    if (a == 0) {
      for (std::size_t b = 1; b < m; ++b) w += 1.0 / (x0 - t[idx[b]]);
    } else {
      w = 1.0 / (t[idx[a]] - t[idx[0]]);
      for (std::size_t b = 1; b < m; ++b) {
        if (b != a) w *= (x0 - t[idx[b]]) / (t[idx[a]] - t[idx[b]]);
      }
    }
    d += w * v[idx[a]];
  }
  return d;
}

}  // namespace

CubicSpline::CubicSpline(std::vector<double> t, std::vector<Vec> values) : t_(std::move(t)), v_(std::move(values)) {
  const std::size_t n = t_.size();
  if (n < 2 || v_.size() != n) throw DomainError("CubicSpline: need >= 2 knots with matching values");
  for (std::size_t k = 1; k < n; ++k) {
    if (!(t_[k] > t_[k - 1])) throw DomainError("CubicSpline: knots must be strictly increasing");
  }
  const Eigen::Index dim = v_[0].size();
  m_.assign(n, Vec::Zero(dim));
  m_[0] = end_slope(t_, v_, true);
  m_[n - 1] = end_slope(t_, v_, false);
  if (n == 2) return;

  // Tridiagonal system for interior slopes (C2 continuity).
  const std::size_t k = n - 2;
  std::vector<double> sub(k), diag(k), sup(k);
  std::vector<Vec> rhs(k);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double h0 = t_[i] - t_[i - 1];
    const double h1 = t_[i + 1] - t_[i];
    sub[i - 1] = h1;
    diag[i - 1] = 2.0 * (h0 + h1);
    sup[i - 1] = h0;
    rhs[i - 1] = 3.0 * (h1 * (v_[i] - v_[i - 1]) / h0 + h0 * (v_[i + 1] - v_[i]) / h1);
  }
  rhs[0] -= sub[0] * m_[0];
  rhs[k - 1] -= sup[k - 1] * m_[n - 1];
  for (std::size_t i = 1; i < k; ++i) {
    const double w = sub[i] / diag[i - 1];
    diag[i] -= w * sup[i - 1];
    rhs[i] -= w * rhs[i - 1];
  }
  m_[k] = rhs[k - 1] / diag[k - 1];
  for (std::size_t i = k - 1; i-- > 0;) m_[i + 1] = (rhs[i] - sup[i] * m_[i + 2]) / diag[i];
}

CubicSpline CubicSpline::from_real(std::vector<double> t, const std::vector<double>& v) {
  std::vector<Vec> vals;
  vals.reserve(v.size());
  for (double x : v) {
    Vec e(1);
    e(0) = x;
    vals.push_back(e);
  }
  return CubicSpline(std::move(t), std::move(vals));
}

std::size_t CubicSpline::segment(double t) const {
  if (t_.empty()) throw DomainError("CubicSpline: empty spline");
  auto it = std::upper_bound(t_.begin(), t_.end(), t);
  std::size_t i = it == t_.begin() ? 0 : static_cast<std::size_t>(it - t_.begin()) - 1;
  return std::min(i, t_.size() - 2);
}

Vec CubicSpline::operator()(double t) const {
  const std::size_t i = segment(t);
  const double h = t_[i + 1] - t_[i];
  const double s = (t - t_[i]) / h;
  const double h00 = (1 + 2 * s) * (1 - s) * (1 - s);
  const double h10 = s * (1 - s) * (1 - s);
  const double h01 = s * s * (3 - 2 * s);
  const double h11 = s * s * (s - 1);
  return h00 * v_[i] + h10 * h * m_[i] + h01 * v_[i + 1] + h11 * h * m_[i + 1];
}

Vec CubicSpline::derivative(double t) const {
  const std::size_t i = segment(t);
  const double h = t_[i + 1] - t_[i];
  const double s = (t - t_[i]) / h;
  const double d00 = 6 * s * s - 6 * s;
  const double d10 = 3 * s * s - 4 * s + 1;
  const double d01 = -d00;
  const double d11 = 3 * s * s - 2 * s;
  return (d00 * v_[i] + d01 * v_[i + 1]) / h + d10 * m_[i] + d11 * m_[i + 1];
}

}  // namespace psurf
