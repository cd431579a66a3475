#include "psurf/surface.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include "parallel.hpp"
#include "psurf/errors.hpp"

namespace psurf {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kLoopTrim = 1e-17;

double wrap_near(double value, double reference) {
  return value + 2.0 * kPi * std::round((reference - value) / (2.0 * kPi));
}

std::size_t nearest(const std::vector<double>& v, double t) {
  std::size_t best = 0;
  for (std::size_t k = 1; k < v.size(); ++k) {
    if (std::abs(v[k] - t) < std::abs(v[best] - t)) best = k;
  }
  return best;
}

// Unwraps raw angles along v from index k0 outward.
std::vector<double> unwrap_from(const std::vector<double>& raw, std::size_t k0) {
  std::vector<double> out = raw;
  for (std::size_t k = k0 + 1; k < raw.size(); ++k) out[k] = wrap_near(raw[k], out[k - 1]);
  for (std::size_t k = k0; k-- > 0;) out[k] = wrap_near(raw[k], out[k + 1]);
  return out;
}

void check_axis(const std::vector<double>& v, const Interval& dom, const char* name) {
  if (v.size() < 2) throw DomainError(std::string("reconstruct_frames: need >= 2 nodes along ") + name);
  for (std::size_t k = 0; k < v.size(); ++k) {
    if (k > 0 && !(v[k] > v[k - 1])) throw DomainError(std::string("reconstruct_frames: ") + name + " nodes not increasing");
    if (!dom.contains(v[k], 1e-9)) throw DomainError(std::string("reconstruct_frames: ") + name + " node outside the domain");
  }
}

double sine_flag(double phi) { return std::abs(std::sin(phi)); }

}  // namespace

GridSpec GridSpec::uniform(Interval x, std::size_t nx, Interval y, std::size_t ny) {
  if (nx < 2 || ny < 2) throw DomainError("GridSpec: nx and ny must be >= 2");
  GridSpec g;
  g.xs.resize(nx);
  g.ys.resize(ny);
  for (std::size_t i = 0; i < nx; ++i) g.xs[i] = x.lo + x.length() * static_cast<double>(i) / static_cast<double>(nx - 1);
  for (std::size_t j = 0; j < ny; ++j) g.ys[j] = y.lo + y.length() * static_cast<double>(j) / static_cast<double>(ny - 1);
  return g;
}

FrameGrid reconstruct_frames(const PotentialPair& p, const GridSpec& grid, const ReconstructOptions& opt) {
  check_axis(grid.xs, p.domain_x, "x");
  check_axis(grid.ys, p.domain_y, "y");
  const bool normalized = p.kind == PotentialKind::Normalized;
  if (normalized && (!p.alpha || !p.beta)) throw DomainError("reconstruct_frames: normalized pair without boundary angles");

  FrameGrid f;
  f.grid = grid;
  f.kind = p.kind;
  const double dx = p.domain_x.contains(0.0) && p.domain_y.contains(0.0) ? 0.0 : p.domain_x.lo;
  const double dy = p.domain_x.contains(0.0) && p.domain_y.contains(0.0) ? 0.0 : p.domain_y.lo;
  f.base_x = opt.base_x.value_or(dx);
  f.base_y = opt.base_y.value_or(dy);
  if (!p.domain_x.contains(f.base_x) || !p.domain_y.contains(f.base_y)) {
    throw DomainError("reconstruct_frames: basepoint outside the domain");
  }
  f.base_i = nearest(grid.xs, f.base_x);
  f.base_j = nearest(grid.ys, f.base_y);

  const std::size_t nx = grid.nx();
  const std::size_t ny = grid.ny();

  // Axis frames.
  const AxisFramePath px = integrate_axis(p.eta_x, f.base_x, grid.xs, opt.init_x, Axis::X, p.domain_x.length(), opt.integration);
  const AxisFramePath py = integrate_axis(p.eta_y, f.base_y, grid.ys, opt.init_y, Axis::Y, p.domain_y.length(), opt.integration);
  f.Gx = px.G;
  f.Gy = py.G;
  f.max_drift = std::max(px.max_drift, py.max_drift);

  // Boundary angles and speeds.
  f.a.resize(nx);
  f.alpha.resize(nx);
  f.b.resize(ny);
  f.beta.resize(ny);
  if (normalized) {
    for (std::size_t i = 0; i < nx; ++i) {
      f.alpha[i] = p.alpha(grid.xs[i]);
      f.a[i] = p.speed_x ? p.speed_x(grid.xs[i]) : 1.0;
    }
    for (std::size_t j = 0; j < ny; ++j) {
      f.beta[j] = p.beta(grid.ys[j]);
      f.b[j] = p.speed_y ? p.speed_y(grid.ys[j]) : 1.0;
    }
  } else {
    std::vector<double> raw(nx);
    for (std::size_t i = 0; i < nx; ++i) {
      const Complex z = p.eta_x(grid.xs[i]).coeff(1)(0, 1);
      f.a[i] = 2.0 * std::abs(z);
      raw[i] = -std::arg(Complex(0.0, -1.0) * z);
    }
    f.alpha = unwrap_from(raw, f.base_i);
    raw.assign(ny, 0.0);
    for (std::size_t j = 0; j < ny; ++j) {
      const Complex rho = Complex(0.0, -2.0) * p.eta_y(grid.ys[j]).coeff(-1)(0, 1);
      f.b[j] = std::abs(rho);
      raw[j] = std::arg(-rho);
    }
    f.beta = unwrap_from(raw, f.base_j);
  }
  for (std::size_t i = 0; i < nx; ++i) {
    if (!(f.a[i] > 0.0)) throw DomainError("reconstruct_frames: x speed vanishes at x = " + fmt_num(grid.xs[i]));
  }
  for (std::size_t j = 0; j < ny; ++j) {
    if (!(f.b[j] > 0.0)) throw DomainError("reconstruct_frames: y speed vanishes at y = " + fmt_num(grid.ys[j]));
  }
  f.Tx.resize(nx);
  for (std::size_t i = 0; i < nx; ++i) {
    f.Tx[i] = LaurentLoop::constant(diag2(std::polar(1.0, -f.alpha[i] / 2), std::polar(1.0, f.alpha[i] / 2)));
  }

  // Per-node splitting.
  const std::size_t n = nx * ny;
  f.U.resize(n);
  f.plus.resize(n);
  std::vector<double> psi_raw(n);
  std::vector<double> residual(n), tail(n);
  std::vector<LaurentLoop> gyinv(ny);
  for (std::size_t j = 0; j < ny; ++j) gyinv[j] = inverse_unitary(f.Gy[j], 1e-6);
  std::vector<LaurentLoop> gxt(nx);
  for (std::size_t i = 0; i < nx; ++i) gxt[i] = f.Gx[i] * f.Tx[i];

  detail::parallel_for(n, opt.threads, [&](std::size_t k) {
    const std::size_t i = k % nx;
    const std::size_t j = k / nx;
    SplitResult s;
    try {
      s = split_plus_minusfree(gyinv[j] * gxt[i], opt.birkhoff);
    } catch (const FactorizationFailure& e) {
      throw e.at_node(i, j, grid.xs[i], grid.ys[j]);
    }
    f.U[k] = (gxt[i] * s.minus).trimmed(kLoopTrim, 2.0);
    psi_raw[k] = std::arg(s.plus.coeff(0)(0, 0));
    f.plus[k] = std::move(s.plus);
    residual[k] = s.residual;
    tail[k] = s.tail_norm;
  });
  for (std::size_t k = 0; k < n; ++k) {
    f.max_split_residual = std::max(f.max_split_residual, residual[k]);
    f.max_tail = std::max(f.max_tail, tail[k]);
  }

  // psi unwrapped up and down the base column, then along rows.
  f.psi.assign(n, 0.0);
  {
    std::vector<double> colraw(ny);
    for (std::size_t j = 0; j < ny; ++j) colraw[j] = psi_raw[grid.index(f.base_i, j)];
    const std::vector<double> col = unwrap_from(colraw, f.base_j);
    for (std::size_t j = 0; j < ny; ++j) {
      std::vector<double> rowraw(nx);
      for (std::size_t i = 0; i < nx; ++i) rowraw[i] = psi_raw[grid.index(i, j)];
      rowraw[f.base_i] = col[j];
      const std::vector<double> row = unwrap_from(rowraw, f.base_i);
      for (std::size_t i = 0; i < nx; ++i) f.psi[grid.index(i, j)] = row[i];
    }
  }
  f.phi.resize(n);
  for (std::size_t j = 0; j < ny; ++j) {
    for (std::size_t i = 0; i < nx; ++i) f.phi[grid.index(i, j)] = f.beta[j] - 2.0 * f.psi[grid.index(i, j)];
  }
  return f;
}

SurfaceGrid sym_immersion(const FrameGrid& f, double lambda0) {
  if (!(lambda0 > 0.0)) throw DomainError("sym_immersion: lambda0 must be positive");
  SurfaceGrid s;
  s.nx = f.nx();
  s.ny = f.ny();
  s.xs = f.grid.xs;
  s.ys = f.grid.ys;
  s.lambda = lambda0;
  const std::size_t n = f.U.size();
  s.points.resize(n);
  s.normals.resize(n);
  s.fx.resize(n);
  s.fy.resize(n);
  s.phi = f.phi;
  s.degenerate.resize(n);
  for (std::size_t j = 0; j < s.ny; ++j) {
    for (std::size_t i = 0; i < s.nx; ++i) {
      const std::size_t k = s.index(i, j);
      const LaurentLoop& u = f.U[k];
      const Mat2 ul = u.evaluate(lambda0);
      const Mat2 du = log_lambda_derivative(u).evaluate(lambda0);
      s.points[k] = su2_to_r3(du * ul.adjoint(), 1e-7);
      const Mat3 r = adjoint_rotation(ul, 1e-6);
      s.normals[k] = r.col(2);
      const double ph = f.phi[k];
      s.fx[k] = lambda0 * f.a[i] * r.col(0);
      s.fy[k] = (f.b[j] / lambda0) * (std::cos(ph) * r.col(0) + std::sin(ph) * r.col(1));
      s.degenerate[k] = sine_flag(ph) < kDegenerateSine;
    }
  }
  return s;
}

std::vector<SurfaceGrid> associated_family(const FrameGrid& f, const std::vector<double>& lambdas) {
  std::vector<SurfaceGrid> out;
  out.reserve(lambdas.size());
  for (double l : lambdas) out.push_back(sym_immersion(f, l));
  return out;
}

GeometryReport geometry_report(const SurfaceGrid& s, const FrameGrid& f) {
  GeometryReport r;
  r.lambda = s.lambda;
  r.nodes = s.points.size();
  const std::size_t nx = s.nx;
  const std::size_t ny = s.ny;
  if (nx < 3 || ny < 3) throw DomainError("geometry_report: grid too small for central differences");
  for (std::size_t k = 0; k < r.nodes; ++k) {
    if (s.degenerate[k]) ++r.degenerate_nodes;
    const Vec3 c = s.fx[k].cross(s.fy[k]);
    const bool rank_deficient = c.norm() < kDegenerateSine * s.fx[k].norm() * s.fy[k].norm();
    if (rank_deficient != s.degenerate[k]) ++r.rank_mismatches;
  }
  r.all_degenerate = r.degenerate_nodes == r.nodes;

  const auto& X = s.xs;
  const auto& Y = s.ys;
  auto P = [&](std::size_t i, std::size_t j) -> const Vec3& { return s.points[s.index(i, j)]; };
  for (std::size_t j = 1; j + 1 < ny; ++j) {
    for (std::size_t i = 1; i + 1 < nx; ++i) {
      const std::size_t k = s.index(i, j);
      const double hxm = X[i] - X[i - 1], hxp = X[i + 1] - X[i];
      const double hym = Y[j] - Y[j - 1], hyp = Y[j + 1] - Y[j];
      const Vec3 fx = (P(i + 1, j) - P(i - 1, j)) / (hxm + hxp);
      const Vec3 fy = (P(i, j + 1) - P(i, j - 1)) / (hym + hyp);
      const Vec3 fxx = 2.0 * ((P(i + 1, j) - P(i, j)) / hxp - (P(i, j) - P(i - 1, j)) / hxm) / (hxm + hxp);
      const Vec3 fyy = 2.0 * ((P(i, j + 1) - P(i, j)) / hyp - (P(i, j) - P(i, j - 1)) / hym) / (hym + hyp);
      const Vec3 fxy = (P(i + 1, j + 1) - P(i + 1, j - 1) - P(i - 1, j + 1) + P(i - 1, j - 1)) /
                       ((hxm + hxp) * (hym + hyp));

      r.max_speed_x_error = std::max(r.max_speed_x_error, std::abs(fx.norm() - s.lambda * f.a[i]));
      r.max_speed_y_error = std::max(r.max_speed_y_error, std::abs(fy.norm() - f.b[j] / s.lambda));
      r.tangent_mismatch = std::max(r.tangent_mismatch, std::max((fx - s.fx[k]).norm(), (fy - s.fy[k]).norm()));

      const double phxy = (s.phi[s.index(i + 1, j + 1)] - s.phi[s.index(i + 1, j - 1)] -
                           s.phi[s.index(i - 1, j + 1)] + s.phi[s.index(i - 1, j - 1)]) /
                          ((hxm + hxp) * (hym + hyp));
      r.sine_gordon_residual =
          std::max(r.sine_gordon_residual, std::abs(phxy - f.a[i] * f.b[j] * std::sin(s.phi[k])));

      if (s.degenerate[k]) continue;
      // Frame normal; a differenced normal loses the order near sin(phi) = 0.
      const Vec3& n = s.normals[k];
      const double E = fx.dot(fx), F = fx.dot(fy), G = fy.dot(fy);
      const double L = fxx.dot(n), M = fxy.dot(n), N = fyy.dot(n);
      const double K = (L * N - M * M) / (E * G - F * F);
      r.max_k_residual = std::max(r.max_k_residual, std::abs(K + 1.0));
      r.max_ii_xx = std::max(r.max_ii_xx, std::abs(L));
      r.max_ii_yy = std::max(r.max_ii_yy, std::abs(N));
      ++r.interior_checked;
    }
  }
  return r;
}

std::vector<std::optional<Mat3>> darboux_frame(const FrameGrid& f, double lambda0) {
  std::vector<std::optional<Mat3>> out(f.U.size());
  for (std::size_t k = 0; k < f.U.size(); ++k) {
    if (sine_flag(f.phi[k]) < kDegenerateSine) continue;
    const double th = f.phi[k] / 2.0;
    Mat3 rz;
    rz << std::cos(th), -std::sin(th), 0.0, std::sin(th), std::cos(th), 0.0, 0.0, 0.0, 1.0;
    out[k] = adjoint_rotation(f.U[k].evaluate(lambda0), 1e-6) * rz;
  }
  return out;
}

double two_splitting_residual(const FrameGrid& f, const std::vector<std::size_t>& sample) {
  double r = 0.0;
  for (std::size_t k : sample) {
    const std::size_t j = k / f.nx();
    const LaurentLoop alt = f.Gy[j] * f.plus[k];
    for (double l : {0.5, 1.0, 2.0}) r = std::max(r, (f.U[k].evaluate(l) - alt.evaluate(l)).norm());
  }
  return r;
}

}  // namespace psurf
