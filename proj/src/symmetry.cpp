#include "psurf/symmetry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

#include "psurf/errors.hpp"

namespace psurf {

namespace {

std::pair<double, double> image_of(const SymmetryDescriptor& d, double x, double y) {
  if (d.switches_axes) return {d.gamma1.map(y), d.gamma2.map(x)};
  return {d.gamma1.map(x), d.gamma2.map(y)};
}

// Index of v in sorted values (exact match up to tol), or npos.
std::size_t find_value(const std::vector<double>& values, double v, double tol) {
  auto it = std::lower_bound(values.begin(), values.end(), v - tol);
  if (it != values.end() && std::abs(*it - v) <= tol) return static_cast<std::size_t>(it - values.begin());
  return std::numeric_limits<std::size_t>::max();
}

std::vector<double> sorted_unique(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  std::vector<double> out;
  for (double x : v) {
    if (out.empty() || x - out.back() > 1e-13 * std::max(1.0, std::abs(x))) out.push_back(x);
  }
  return out;
}

// 4-point Lagrange weights around the cell of sorted s containing x.
std::pair<std::size_t, std::array<double, 4>> cubic_weights(const std::vector<double>& s, double x) {
  const std::size_t n = s.size();
  std::size_t cell = static_cast<std::size_t>(std::upper_bound(s.begin(), s.end(), x) - s.begin());
  cell = cell == 0 ? 0 : cell - 1;
  std::size_t lo = cell == 0 ? 0 : cell - 1;
  lo = std::min(lo, n - 4);
  std::array<double, 4> w{};
  for (std::size_t a = 0; a < 4; ++a) {
    double v = 1.0;
    for (std::size_t b = 0; b < 4; ++b) {
      if (b != a) v *= (x - s[lo + b]) / (s[lo + a] - s[lo + b]);
    }
    w[a] = v;
  }
  return {lo, w};
}

Mat3 frame_at(const LaurentLoop& u, double lambda) { return adjoint_rotation(u.evaluate(lambda), 1e-6); }

double off_block(const Mat3& k) {
  return std::max({std::abs(k(0, 2)), std::abs(k(1, 2)), std::abs(k(2, 0)), std::abs(k(2, 1))});
}

// Nearest SU(2) matrix of the form [[a, b], [-conj b, conj a]].
Mat2 project_su2(const Mat2& m) {
  Complex a = 0.5 * (m(0, 0) + std::conj(m(1, 1)));
  Complex b = 0.5 * (m(0, 1) - std::conj(m(1, 0)));
  const double n = std::sqrt(std::norm(a) + std::norm(b));
  a /= n;
  b /= n;
  Mat2 r;
  r << a, b, -std::conj(b), std::conj(a);
  return r;
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(10);
  os << v;
  return os.str();
}

}  // namespace

SymmetryDescriptor compose_with_itself(const SymmetryDescriptor& d) {
  if (d.switches_axes) throw DomainError("compose_with_itself: switching maps are not supported");
  SymmetryDescriptor c;
  auto comp = [](const AxisMap& g) {
    AxisMap m;
    m.map = [g](double t) { return g.map(g.map(t)); };
    m.derivative = [g](double t) { return g.derivative(g.map(t)) * g.derivative(t); };
    return m;
  };
  auto gauge = [](const Gauge& w, const AxisMap& g) {
    Gauge r;
    r.q = [w, g](double t) { return w.q(t) * w.q(g.map(t)); };
    return r;
  };
  c.gamma1 = comp(d.gamma1);
  c.gamma2 = comp(d.gamma2);
  c.wx = gauge(d.wx, d.gamma1);
  c.wy = gauge(d.wy, d.gamma2);
  c.R_linear = d.R_linear * d.R_linear;
  c.R_translation = d.R_linear * d.R_translation + d.R_translation;
  return c;
}

GammaLattice gamma_lattice(const PotentialPair& p, const FrameGrid& f, const SymmetryDescriptor& d,
                           const ReconstructOptions& opt, double lambda0) {
  const std::size_t nx = f.nx();
  const std::size_t ny = f.ny();
  std::vector<std::pair<double, double>> img(nx * ny);
  std::vector<bool> ok(nx * ny, false);
  std::vector<double> X, Y;
  for (std::size_t j = 0; j < ny; ++j) {
    for (std::size_t i = 0; i < nx; ++i) {
      const std::size_t k = f.grid.index(i, j);
      img[k] = image_of(d, f.grid.xs[i], f.grid.ys[j]);
      ok[k] = std::isfinite(img[k].first) && std::isfinite(img[k].second) && p.domain_x.contains(img[k].first, 0.0) &&
              p.domain_y.contains(img[k].second, 0.0);
      if (ok[k]) {
        X.push_back(img[k].first);
        Y.push_back(img[k].second);
      }
    }
  }
  GammaLattice g;
  if (X.empty()) throw DomainError("gamma_lattice: no grid node maps into the domain");
  GridSpec grid{sorted_unique(X), sorted_unique(Y)};
  if (grid.nx() < 2 || grid.ny() < 2) throw DomainError("gamma_lattice: image lattice has fewer than 2 nodes per axis");
  for (std::size_t k = 0; k < nx * ny; ++k) {
    if (!ok[k]) continue;
    const std::size_t a = find_value(grid.xs, img[k].first, 1e-12 * std::max(1.0, std::abs(img[k].first)));
    const std::size_t b = find_value(grid.ys, img[k].second, 1e-12 * std::max(1.0, std::abs(img[k].second)));
    if (a >= grid.nx() || b >= grid.ny()) continue;
    g.node.push_back(k);
    g.image.push_back(grid.index(a, b));
  }
  ReconstructOptions o = opt;
  o.base_x = f.base_x;
  o.base_y = f.base_y;
  g.frames = reconstruct_frames(p, grid, o);
  g.surface = sym_immersion(g.frames, lambda0);
  g.coverage = static_cast<double>(g.node.size()) / static_cast<double>(nx * ny);
  return g;
}

RigidFit fit_symmetry_motion(const SurfaceGrid& s, const GammaLattice& g) {
  std::vector<Vec3> a, b;
  for (std::size_t n = 0; n < g.node.size(); ++n) {
    a.push_back(s.points[g.node[n]]);
    b.push_back(g.surface.points[g.image[n]]);
  }
  return register_rigid(a, b);
}

SurfaceSymmetryResult check_surface_symmetry(const SurfaceGrid& s, const SymmetryDescriptor& d) {
  if (s.nx < 4 || s.ny < 4) throw DomainError("check_surface_symmetry: need >= 4 nodes per axis");
  SurfaceSymmetryResult r;
  for (std::size_t j = 0; j < s.ny; ++j) {
    for (std::size_t i = 0; i < s.nx; ++i) {
      const auto [X, Y] = image_of(d, s.xs[i], s.ys[j]);
      if (!std::isfinite(X) || !std::isfinite(Y)) continue;
      if (X < s.xs.front() || X > s.xs.back() || Y < s.ys.front() || Y > s.ys.back()) continue;
      const auto [ix, wx] = cubic_weights(s.xs, X);
      const auto [iy, wy] = cubic_weights(s.ys, Y);
      Vec3 v = Vec3::Zero();
      for (std::size_t b = 0; b < 4; ++b) {
        for (std::size_t a = 0; a < 4; ++a) v += wx[a] * wy[b] * s.points[s.index(ix + a, iy + b)];
      }
      const Vec3 target = d.R_linear * s.points[s.index(i, j)] + d.R_translation;
      r.residual = std::max(r.residual, (v - target).norm());
      ++r.covered;
    }
  }
  r.coverage = static_cast<double>(r.covered) / static_cast<double>(s.nx * s.ny);
  return r;
}

KResult compute_K(const SurfaceGrid& s, const FrameGrid& f, const GammaLattice& g, const SymmetryDescriptor& d) {
  KResult r;
  const double lambda = s.lambda;
  const std::size_t nx = f.nx();
  std::map<std::size_t, std::size_t> slot;
  for (std::size_t n = 0; n < g.node.size(); ++n) {
    KNode kn;
    kn.node = g.node[n];
    kn.image = g.image[n];
    if (s.degenerate[kn.node] || g.surface.degenerate[kn.image]) {
      ++r.skipped;
      r.nodes.push_back(kn);
      continue;
    }
    const Mat3 F = frame_at(f.U[kn.node], lambda);
    const Mat3 Fg = frame_at(g.frames.U[kn.image], lambda);
    kn.K = F.transpose() * d.R_linear.transpose() * Fg;
    kn.valid = true;

    auto zmat = [](const Mat3& fr, const Vec3& fx, const Vec3& fy) {
      Eigen::Matrix2d z;
      z << fr.col(0).dot(fx), fr.col(0).dot(fy), fr.col(1).dot(fx), fr.col(1).dot(fy);
      return z;
    };
    const Eigen::Matrix2d Z = zmat(F, s.fx[kn.node], s.fy[kn.node]);
    const Eigen::Matrix2d Zg = zmat(Fg, g.surface.fx[kn.image], g.surface.fy[kn.image]);
    const std::size_t i = kn.node % nx, j = kn.node / nx;
    const double x = f.grid.xs[i], y = f.grid.ys[j];
    Eigen::Matrix2d J;
    if (d.switches_axes) {
      J << 0.0, d.gamma1.derivative(y), d.gamma2.derivative(x), 0.0;
    } else {
      J << d.gamma1.derivative(x), 0.0, 0.0, d.gamma2.derivative(y);
    }
    if (std::abs(Zg.determinant()) < 1e-12 || std::abs(J.determinant()) < 1e-14) {
      kn.valid = false;
      ++r.skipped;
      r.nodes.push_back(kn);
      continue;
    }
    const Eigen::Matrix2d K2 = Z * J.inverse() * Zg.inverse();
    const double eps = (d.R_linear * s.normals[kn.node]).dot(g.surface.normals[kn.image]) >= 0.0 ? 1.0 : -1.0;
    Mat3 Kf = Mat3::Zero();
    Kf.topLeftCorner<2, 2>() = K2;
    Kf(2, 2) = eps;
    r.formula_residual = std::max(r.formula_residual, (Kf - kn.K).norm());
    r.orthogonality = std::max(r.orthogonality, (Kf.transpose() * Kf - Mat3::Identity()).norm());
    r.block_residual = std::max(r.block_residual, off_block(kn.K));
    slot[kn.node] = r.nodes.size();
    r.nodes.push_back(kn);
  }
  // Maurer-Cartan form along x and variation along y.
  for (const auto& [node, idx] : slot) {
    const std::size_t i = node % nx, j = node / nx;
    if (i + 1 < nx) {
      auto it = slot.find(node + 1);
      if (it != slot.end()) {
        const double h = f.grid.xs[i + 1] - f.grid.xs[i];
        const Mat3 dk = r.nodes[idx].K.transpose() * (r.nodes[it->second].K - r.nodes[idx].K) / h;
        r.subalgebra_residual = std::max(r.subalgebra_residual, off_block(dk));
      }
    }
    if (!d.switches_axes && j + 1 < f.ny()) {
      auto it = slot.find(node + nx);
      if (it != slot.end()) {
        const double h = f.grid.ys[j + 1] - f.grid.ys[j];
        r.y_variation = std::max(r.y_variation, (r.nodes[it->second].K - r.nodes[idx].K).norm() / h);
      }
    }
  }
  return r;
}

MonodromyResult measure_monodromy(const FrameGrid& f, const GammaLattice& g, const KResult& k) {
  MonodromyResult m;
  std::vector<LaurentLoop> chis;
  Mat2 first = Mat2::Zero();
  for (const KNode& kn : k.nodes) {
    if (!kn.valid) continue;
    const Mat2 kl = su2_lift(kn.K);
    LaurentLoop c = (g.frames.U[kn.image] * kl.adjoint() * f.U[kn.node].adjugate()).trimmed(1e-16);
    const Mat2 c1 = c.evaluate(1.0);
    if (chis.empty()) {
      first = c1;
    } else if ((c1 + first).norm() < (c1 - first).norm()) {
      c = c * Complex(-1.0);
    }
    chis.push_back(std::move(c));
  }
  if (chis.empty()) throw DomainError("measure_monodromy: no valid nodes");
  LaurentLoop sum = chis.front();
  for (std::size_t n = 1; n < chis.size(); ++n) sum = sum + chis[n];
  m.chi = (sum * Complex(1.0 / static_cast<double>(chis.size()))).trimmed(1e-16);
  m.nodes = chis.size();
  for (double l : {0.5, 1.0, 2.0}) {
    const Mat2 avg = m.chi.evaluate(l);
    for (const auto& c : chis) m.spread = std::max(m.spread, (c.evaluate(l) - avg).norm());
  }
  m.rotation = adjoint_rotation(project_su2(m.chi.evaluate(1.0)));
  m.rotation_angle = rotation_angle(m.rotation);
  return m;
}

Mat3 fit_rotation(const std::vector<Vec3>& a, const std::vector<Vec3>& b) {
  Mat3 h = Mat3::Zero();
  for (std::size_t k = 0; k < a.size(); ++k) h += a[k] * b[k].transpose();
  Eigen::JacobiSVD<Mat3> svd(h, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Mat3 d = Mat3::Identity();
  if ((svd.matrixV() * svd.matrixU().transpose()).determinant() < 0.0) d(2, 2) = -1.0;
  return svd.matrixV() * d * svd.matrixU().transpose();
}

double check_axis_switch(const FrameGrid& f, const SymmetryDescriptor& d) {
  if (!d.switches_axes) throw DomainError("check_axis_switch: descriptor does not switch axes");
  const auto& xs = f.grid.xs;
  const auto& ys = f.grid.ys;
  if (xs.size() != ys.size()) throw DomainError("check_axis_switch: grid is not square");
  for (std::size_t k = 0; k < xs.size(); ++k) {
    if (std::abs(xs[k] - ys[k]) > 1e-12) throw DomainError("check_axis_switch: domain is not square");
  }
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t j = 0; j < ys.size(); ++j) {
    for (std::size_t i = 0; i < xs.size(); ++i) {
      const auto [X, Y] = image_of(d, xs[i], ys[j]);
      if (!std::isfinite(X) || !std::isfinite(Y)) continue;
      const std::size_t a = find_value(xs, X, 1e-9);
      const std::size_t b = find_value(ys, Y, 1e-9);
      if (a < xs.size() && b < ys.size()) pairs.emplace_back(f.grid.index(i, j), f.grid.index(a, b));
    }
  }
  if (pairs.size() < 3) throw DomainError("check_axis_switch: gamma does not map enough nodes onto nodes");

  double worst = 0.0;
  for (double l : {0.5, 1.0, 2.0}) {
    std::vector<Mat3> Fl(f.U.size()), Fi(f.U.size());
    for (const auto& [src, dst] : pairs) {
      Fi[src] = frame_at(f.U[src].reflected(), l);   // F^{1/lambda}
      Fl[dst] = frame_at(f.U[dst], l);
    }
    double best = std::numeric_limits<double>::infinity();
    for (double eps : {1.0, -1.0}) {
      std::vector<Vec3> a, b;
      for (const auto& [src, dst] : pairs) {
        a.push_back(Fi[src].col(2));
        b.push_back(eps * Fl[dst].col(2));
      }
      const Mat3 chi = fit_rotation(a, b);
      double r = 0.0;
      for (const auto& [src, dst] : pairs) {
        const Mat3 K = Fi[src].transpose() * chi.transpose() * Fl[dst];
        r = std::max({r, off_block(K), std::abs(std::abs(K(2, 2)) - 1.0)});
      }
      best = std::min(best, r);
    }
    worst = std::max(worst, best);
  }
  return worst;
}

std::vector<std::pair<std::string, std::string>> CertificationReport::key_values() const {
  auto b = [](bool v) { return std::string(v ? "true" : "false"); };
  std::vector<std::pair<std::string, std::string>> kv{
      {"equivariance_x", fmt(equivariance_x)},
      {"equivariance_y", fmt(equivariance_y)},
      {"equivariance_pass", b(equivariance_pass)},
      {"monodromy_ran", b(monodromy_ran)},
      {"monodromy_spread", fmt(monodromy_spread)},
      {"monodromy_pass", b(monodromy_pass)},
      {"surface_residual", fmt(surface_residual)},
      {"surface_coverage", fmt(surface_coverage)},
      {"surface_pass", b(surface_pass)},
      {"rotation_angle_measured_rad", fmt(rotation_angle_measured_rad)},
      {"chi_rotation_angle_rad", fmt(chi_rotation_angle_rad)},
      {"chi_vs_fitted_rotation", fmt(chi_vs_fit)},
      {"registration_rms", fmt(registration_rms)},
      {"certified", b(certified)},
  };
  return kv;
}

CertificationReport certify_from_potentials(const PotentialPair& p, const SymmetryDescriptor& d, const GridSpec& grid,
                                            const ReconstructOptions& opt, const CertificationThresholds& th) {
  if (d.switches_axes) throw DomainError("certify_from_potentials: switching symmetries are checked at frame level only");
  const EquivarianceResidual eq = check_equivariance(p, d.gamma1, d.gamma2, d.wx, d.wy);
  if (!(eq.x < th.equivariance && eq.y < th.equivariance)) {
    CertificationReport rep;
    rep.equivariance_x = eq.x;
    rep.equivariance_y = eq.y;
    return rep;
  }
  return certify_with_frames(p, d, reconstruct_frames(p, grid, opt), opt, th);
}

CertificationReport certify_with_frames(const PotentialPair& p, const SymmetryDescriptor& d, const FrameGrid& f,
                                        const ReconstructOptions& opt, const CertificationThresholds& th) {
  if (d.switches_axes) throw DomainError("certify_with_frames: switching symmetries are checked at frame level only");
  CertificationReport rep;
  const EquivarianceResidual eq = check_equivariance(p, d.gamma1, d.gamma2, d.wx, d.wy);
  rep.equivariance_x = eq.x;
  rep.equivariance_y = eq.y;
  rep.equivariance_pass = eq.x < th.equivariance && eq.y < th.equivariance;
  if (!rep.equivariance_pass) return rep;

  const SurfaceGrid s = sym_immersion(f, 1.0);
  const GammaLattice g = gamma_lattice(p, f, d, opt, 1.0);
  if (g.node.size() < 3) {
    rep.surface_coverage = g.coverage;
    return rep;
  }
  const RigidFit fit = fit_symmetry_motion(s, g);
  rep.registration_rms = fit.rms;
  SymmetryDescriptor fitted = d;
  fitted.R_linear = fit.rotation;
  fitted.R_translation = fit.translation;

  const KResult k = compute_K(s, f, g, fitted);
  const MonodromyResult mono = measure_monodromy(f, g, k);
  rep.monodromy_ran = true;
  rep.monodromy_spread = mono.spread;
  rep.monodromy_pass = mono.spread < th.monodromy_spread;
  rep.chi_rotation_angle_rad = mono.rotation_angle;
  rep.chi_vs_fit = (mono.rotation - fit.rotation).norm();

  const SurfaceSymmetryResult sr = check_surface_symmetry(s, fitted);
  rep.surface_residual = sr.residual;
  rep.surface_coverage = sr.coverage;
  rep.surface_pass = sr.covered > 0 && sr.residual < th.surface_residual;
  rep.rotation_angle_measured_rad = rotation_angle(fit.rotation);
  rep.rotation_axis = rotation_axis(fit.rotation);
  rep.certified = rep.equivariance_pass && rep.monodromy_pass && rep.surface_pass;
  return rep;
}

namespace {

double segment_distance(const Vec3& p, const Vec3& a, const Vec3& b) {
  const Vec3 ab = b - a;
  const double l2 = ab.squaredNorm();
  const double t = l2 > 0.0 ? std::clamp((p - a).dot(ab) / l2, 0.0, 1.0) : 0.0;
  return (a + t * ab - p).norm();
}

}  // namespace

ConePointCheck check_cone_point(const SurfaceGrid& s) {
  ConePointCheck c;
  for (std::size_t k = 0; k < s.points.size(); ++k) {
    if (!s.degenerate[k]) continue;
    c.point += s.points[k];
    ++c.nodes;
  }
  double h = 0.0;
  for (std::size_t i = 1; i < s.nx; ++i) h = std::max(h, s.xs[i] - s.xs[i - 1]);
  for (std::size_t j = 1; j < s.ny; ++j) h = std::max(h, s.ys[j] - s.ys[j - 1]);
  c.threshold = 10.0 * h;
  if (c.nodes == 0) return c;
  c.found = true;
  c.point /= static_cast<double>(c.nodes);
  for (std::size_t k = 0; k < s.points.size(); ++k)
    if (s.degenerate[k]) c.spread = std::max(c.spread, (s.points[k] - c.point).norm());

  auto line = [&](std::size_t count, auto at) {
    double d = (at(0) - c.point).norm();
    for (std::size_t m = 1; m < count; ++m) d = std::min(d, segment_distance(c.point, at(m - 1), at(m)));
    return d;
  };
  for (std::size_t j = 0; j < s.ny; ++j)
    c.max_line_distance = std::max(c.max_line_distance, line(s.nx, [&](std::size_t i) { return s.points[s.index(i, j)]; }));
  for (std::size_t i = 0; i < s.nx; ++i)
    c.max_line_distance = std::max(c.max_line_distance, line(s.ny, [&](std::size_t j) { return s.points[s.index(i, j)]; }));
  c.pass = c.max_line_distance <= c.threshold;
  return c;
}

}  // namespace psurf
