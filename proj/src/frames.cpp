#include "psurf/frames.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "psurf/errors.hpp"

namespace psurf {

namespace {

constexpr std::array<double, 3> kDriftLambdas{0.5, 1.0, 2.0};

LaurentLoop cap_degree(const LaurentLoop& g, int cap, double& dropped) {
  if (g.min_degree() >= -cap && g.max_degree() <= cap) return g;
  for (int k = g.min_degree(); k < -cap; ++k) dropped = std::max(dropped, g.coeff(k).norm());
  for (int k = cap + 1; k <= g.max_degree(); ++k) dropped = std::max(dropped, g.coeff(k).norm());
  return g.truncated(-cap, cap);
}

// Cubic Lagrange value of samples v at positions s, evaluated at x, using the
// four nodes around segment k (shifted inwards at the ends).
double lagrange4(const std::vector<double>& s, const std::vector<double>& v, std::size_t k, double x) {
  const std::size_t n = s.size();
  if (n < 4) {
    const double w = (x - s[k]) / (s[k + 1] - s[k]);
    return (1 - w) * v[k] + w * v[k + 1];
  }
  std::size_t lo = k == 0 ? 0 : k - 1;
  lo = std::min(lo, n - 4);
  double r = 0.0;
  for (std::size_t a = lo; a < lo + 4; ++a) {
    double w = 1.0;
    for (std::size_t b = lo; b < lo + 4; ++b) {
      if (b != a) w *= (x - s[b]) / (s[a] - s[b]);
    }
    r += w * v[a];
  }
  return r;
}

Mat2 offdiag_phase(Complex scale, double phase) {
  Mat2 m;
  m << 0.0, scale * std::polar(1.0, phase), scale * std::polar(1.0, -phase), 0.0;
  return m;
}

Mat2 rk4_matrix(const Mat2& u, const Mat2& m0, const Mat2& mh, const Mat2& m1, double h) {
  const Mat2 k1 = u * m0;
  const Mat2 k2 = (u + 0.5 * h * k1) * mh;
  const Mat2 k3 = (u + 0.5 * h * k2) * mh;
  const Mat2 k4 = (u + h * k3) * m1;
  return u + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

}  // namespace

LaurentLoop rk4_step(const LoopFunction& eta, const LaurentLoop& g, double t, double h) {
  const LaurentLoop e0 = eta(t);
  const LaurentLoop em = eta(t + 0.5 * h);
  const LaurentLoop e1 = eta(t + h);
  const LaurentLoop k1 = g * e0;
  const LaurentLoop k2 = (g + k1 * Complex(0.5 * h)) * em;
  const LaurentLoop k3 = (g + k2 * Complex(0.5 * h)) * em;
  const LaurentLoop k4 = (g + k3 * Complex(h)) * e1;
  return g + (k1 + k2 * Complex(2.0) + k3 * Complex(2.0) + k4) * Complex(h / 6.0);
}

AxisFramePath integrate_axis(const LoopFunction& eta, double start, const std::vector<double>& targets,
                             const LaurentLoop& init, Axis axis, double interval_length,
                             const IntegrationOptions& opt) {
  if (!std::is_sorted(targets.begin(), targets.end())) throw DomainError("integrate_axis: targets must be sorted");
  const double max_step = opt.max_step > 0.0 ? opt.max_step : interval_length / 256.0;
  if (!(max_step > 0.0)) throw DomainError("integrate_axis: step must be positive");
  if (unitarity_residual(init, kDriftLambdas) > 1e-8) throw DomainError("integrate_axis: init is not unitary");
  if (check_twist(init) > 1e-10) throw DomainError("integrate_axis: init is not twisted");

  AxisFramePath path;
  path.axis = axis;
  path.start = start;
  path.init = init;
  path.t = targets;
  path.G.assign(targets.size(), init);

  const double base_drift = unitarity_residual(init, kDriftLambdas);
  auto march = [&](std::size_t idx, LaurentLoop& g, double& t) {
    const double target = targets[idx];
    const double span = target - t;
    if (span != 0.0) {
      const int n = std::max(1, static_cast<int>(std::ceil(std::abs(span) / max_step - 1e-9)));
      const double h = span / n;
      path.max_step_used = std::max(path.max_step_used, std::abs(h));
      for (int s = 0; s < n; ++s) {
        g = cap_degree(rk4_step(eta, g, t + s * h, h).trimmed(opt.trim, opt.trim_radius), opt.max_degree, path.max_dropped);
      }
      t = target;
    }
    const double drift = unitarity_residual(g, kDriftLambdas) - base_drift;
    path.max_drift = std::max(path.max_drift, drift);
    if (drift > opt.drift_tol) {
      throw IntegrationDrift("integrate_axis: unitarity drift " + fmt_num(drift) + " at t = " +
                                 fmt_num(target) + "; use a smaller step",
                             drift);
    }
    path.G[idx] = g;
  };

  const auto first_fwd = std::lower_bound(targets.begin(), targets.end(), start) - targets.begin();
  {
    LaurentLoop g = init;
    double t = start;
    for (std::size_t i = static_cast<std::size_t>(first_fwd); i < targets.size(); ++i) march(i, g, t);
  }
  {
    LaurentLoop g = init;
    double t = start;
    for (std::size_t i = static_cast<std::size_t>(first_fwd); i-- > 0;) march(i, g, t);
  }
  return path;
}

AxisFramePath integrate_axis(const LoopFunction& eta, Interval interval, const LaurentLoop& init, double step,
                             Axis axis, const IntegrationOptions& opt) {
  if (!(step > 0.0)) throw DomainError("integrate_axis: step must be positive");
  const int n = std::max(1, static_cast<int>(std::ceil(interval.length() / step - 1e-9)));
  std::vector<double> t(static_cast<std::size_t>(n) + 1);
  for (int k = 0; k <= n; ++k) t[static_cast<std::size_t>(k)] = interval.lo + interval.length() * k / n;
  IntegrationOptions o = opt;
  o.max_step = step;
  return integrate_axis(eta, interval.lo, t, init, axis, interval.length(), o);
}

DirectFrameResult direct_frame_solve(const std::vector<double>& phi, const std::vector<double>& xs,
                                     const std::vector<double>& ys, const std::vector<double>& a,
                                     const std::vector<double>& b, double lambda0, std::size_t i0,
                                     std::size_t j0) {
  const std::size_t nx = xs.size();
  const std::size_t ny = ys.size();
  if (nx < 2 || ny < 2 || phi.size() != nx * ny || a.size() != nx || b.size() != ny) {
    throw DomainError("direct_frame_solve: inconsistent grid sizes");
  }
  if (lambda0 == 0.0) throw DomainError("direct_frame_solve: lambda0 must be nonzero");
  if (i0 >= nx || j0 >= ny) throw DomainError("direct_frame_solve: basepoint outside the grid");
  const Complex ci{0.0, 1.0};
  auto at = [&](std::size_t i, std::size_t j) { return phi[i + nx * j]; };
  auto dgauge = [](double p) { return diag2(std::polar(1.0, -p / 2), std::polar(1.0, p / 2)); };

  // Coefficient matrices of the two systems.
  auto ax = [&](double aa, double p) { return offdiag_phase(0.5 * ci * aa * lambda0, -p); };
  auto by = [&](double bb, double p) { return offdiag_phase(-0.5 * ci * bb / lambda0, p); };

  // Integrate U along row j from column i0; u0 = U(i0, j).
  auto row = [&](std::size_t j, const Mat2& u0, std::vector<Mat2>& out) {
    std::vector<double> line(nx);
    for (std::size_t i = 0; i < nx; ++i) line[i] = at(i, j);
    out[i0 + nx * j] = u0;
    for (int dir : {1, -1}) {
      Mat2 ut = u0 * dgauge(line[i0]).inverse();
      for (std::size_t i = i0;;) {
        if (dir > 0 && i + 1 >= nx) break;
        if (dir < 0 && i == 0) break;
        const std::size_t n = dir > 0 ? i + 1 : i - 1;
        const std::size_t k = std::min(i, n);
        const double xm = 0.5 * (xs[i] + xs[n]);
        const double h = xs[n] - xs[i];
        ut = rk4_matrix(ut, ax(a[i], line[i]), ax(lagrange4(xs, a, k, xm), lagrange4(xs, line, k, xm)),
                        ax(a[n], line[n]), h);
        out[n + nx * j] = ut * dgauge(line[n]);
        i = n;
      }
    }
  };
  auto col = [&](std::size_t i, const Mat2& u0, std::vector<Mat2>& out) {
    std::vector<double> line(ny);
    for (std::size_t j = 0; j < ny; ++j) line[j] = at(i, j);
    out[i + nx * j0] = u0;
    for (int dir : {1, -1}) {
      Mat2 u = u0;
      for (std::size_t j = j0;;) {
        if (dir > 0 && j + 1 >= ny) break;
        if (dir < 0 && j == 0) break;
        const std::size_t n = dir > 0 ? j + 1 : j - 1;
        const std::size_t k = std::min(j, n);
        const double ym = 0.5 * (ys[j] + ys[n]);
        const double h = ys[n] - ys[j];
        u = rk4_matrix(u, by(b[j], line[j]), by(lagrange4(ys, b, k, ym), lagrange4(ys, line, k, ym)),
                       by(b[n], line[n]), h);
        out[i + nx * n] = u;
        j = n;
      }
    }
  };

  DirectFrameResult res;
  res.nx = nx;
  res.ny = ny;
  // x along the base row, then y along every column.
  std::vector<Mat2> base_row(nx * ny, Mat2::Identity());
  row(j0, Mat2::Identity(), base_row);
  res.U.assign(nx * ny, Mat2::Identity());
  for (std::size_t i = 0; i < nx; ++i) col(i, base_row[i + nx * j0], res.U);

  // y along the base column, then x along every row.
  std::vector<Mat2> base_col(nx * ny, Mat2::Identity());
  col(i0, Mat2::Identity(), base_col);
  std::vector<Mat2> other(nx * ny, Mat2::Identity());
  for (std::size_t j = 0; j < ny; ++j) row(j, base_col[i0 + nx * j], other);

  for (std::size_t k = 0; k < nx * ny; ++k) res.path_residual = std::max(res.path_residual, (res.U[k] - other[k]).norm());
  return res;
}

}  // namespace psurf
