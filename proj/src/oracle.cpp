#include "psurf/oracle.hpp"

#include <cmath>
#include <string>

#include "psurf/errors.hpp"

namespace psurf {

std::vector<double> goursat_solve(const GoursatProblem& g, const GoursatOptions& opt) {
  const std::size_t nx = g.xs.size();
  const std::size_t ny = g.ys.size();
  if (nx < 2 || ny < 2 || g.boundary_x.size() != nx || g.boundary_y.size() != ny) {
    throw DomainError("goursat_solve: inconsistent grid and boundary sizes");
  }
  if (std::abs(g.boundary_x[0] - g.boundary_y[0]) > 1e-10) {
    throw DomainError("goursat_solve: boundary data disagree at the corner");
  }
  auto a = [&](double x) { return g.a ? g.a(x) : 1.0; };
  auto b = [&](double y) { return g.b ? g.b(y) : 1.0; };
  std::vector<double> ax(nx), by(ny), am(nx - 1), bm(ny - 1);
  for (std::size_t i = 0; i < nx; ++i) ax[i] = a(g.xs[i]);
  for (std::size_t j = 0; j < ny; ++j) by[j] = b(g.ys[j]);
  for (std::size_t i = 0; i + 1 < nx; ++i) am[i] = a(0.5 * (g.xs[i] + g.xs[i + 1]));
  for (std::size_t j = 0; j + 1 < ny; ++j) bm[j] = b(0.5 * (g.ys[j] + g.ys[j + 1]));

  std::vector<double> phi(nx * ny, 0.0);
  auto P = [&](std::size_t i, std::size_t j) -> double& { return phi[i + nx * j]; };
  for (std::size_t i = 0; i < nx; ++i) P(i, 0) = g.boundary_x[i];
  for (std::size_t j = 0; j < ny; ++j) P(0, j) = g.boundary_y[j];

  for (std::size_t j = 0; j + 1 < ny; ++j) {
    const double hy = g.ys[j + 1] - g.ys[j];
    for (std::size_t i = 0; i + 1 < nx; ++i) {
      const double hx = g.xs[i + 1] - g.xs[i];
      const double sw = P(i, j), se = P(i + 1, j), nw = P(i, j + 1);
      const double known = ax[i] * by[j] * std::sin(sw) + ax[i + 1] * by[j] * std::sin(se) +
                           ax[i] * by[j + 1] * std::sin(nw);
      auto update = [&](double ne) {
        const double c = 0.25 * (sw + se + nw + ne);
        const double corners = 0.25 * (known + ax[i + 1] * by[j + 1] * std::sin(ne));
        return nw + se - sw + hx * hy * ((2.0 / 3.0) * am[i] * bm[j] * std::sin(c) + corners / 3.0);
      };
      double ne = nw + se - sw;
      bool converged = false;
      for (int it = 0; it < opt.max_iterations; ++it) {
        const double next = update(ne);
        const double diff = std::abs(next - ne);
        ne = next;
        if (diff <= opt.fixed_point_tol * (1.0 + std::abs(ne))) {
          converged = true;
          break;
        }
      }
      if (!converged) {
        throw StiffnessError("goursat_solve: fixed-point correction did not converge in cell (" +
                             std::to_string(i) + ", " + std::to_string(j) + ")");
      }
      P(i + 1, j + 1) = ne;
    }
  }
  return phi;
}

RigidFit register_rigid(const std::vector<Vec3>& a, const std::vector<Vec3>& b) {
  if (a.size() != b.size()) throw RegistrationError("register_rigid: point sets differ in size");
  if (a.size() < 3) throw RegistrationError("register_rigid: need at least 3 points");
  const double n = static_cast<double>(a.size());
  Vec3 ca = Vec3::Zero(), cb = Vec3::Zero();
  for (std::size_t k = 0; k < a.size(); ++k) {
    ca += a[k];
    cb += b[k];
  }
  ca /= n;
  cb /= n;
  Mat3 h = Mat3::Zero();
  Mat3 spread = Mat3::Zero();
  for (std::size_t k = 0; k < a.size(); ++k) {
    h += (a[k] - ca) * (b[k] - cb).transpose();
    spread += (a[k] - ca) * (a[k] - ca).transpose();
  }
  Eigen::SelfAdjointEigenSolver<Mat3> es(spread);
  const Eigen::Vector3d ev = es.eigenvalues();
  if (!(ev(1) > 1e-12 * std::max(1.0, ev(2)))) throw RegistrationError("register_rigid: points are collinear or coincident");

  Eigen::JacobiSVD<Mat3> svd(h, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Mat3 u = svd.matrixU();
  const Mat3 v = svd.matrixV();
  Mat3 d = Mat3::Identity();
  if ((v * u.transpose()).determinant() < 0.0) d(2, 2) = -1.0;
  RigidFit fit;
  fit.rotation = v * d * u.transpose();
  fit.translation = cb - fit.rotation * ca;
  double ss = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) ss += (fit.rotation * a[k] + fit.translation - b[k]).squaredNorm();
  fit.rms = std::sqrt(ss / n);
  return fit;
}

}  // namespace psurf
