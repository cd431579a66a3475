#pragma once

// Loop-group-free references: a characteristic Goursat solver for
// phi_xy = a(x) b(y) sin(phi), and rigid registration of point sets.

#include <vector>

#include "psurf/loop.hpp"
#include "psurf/potentials.hpp"

namespace psurf {

struct GoursatProblem {
  std::vector<double> xs;
  std::vector<double> ys;
  std::vector<double> boundary_x;  // phi(x_i, y_0)
  std::vector<double> boundary_y;  // phi(x_0, y_j)
  RealFunction a;                  // empty means 1
  RealFunction b;
};

struct GoursatOptions {
  double fixed_point_tol = 1e-14;
  int max_iterations = 20;
};

/// phi on the lattice, index i + nx j. Each cell uses
/// phi_NE = phi_NW + phi_SE - phi_SW + hx hy [2/3 a_m b_m sin(phi_c) + 1/3 mean of corner a b sin(phi)]
/// with a_m, b_m at the cell midpoints and phi_c the corner average, solved by
/// fixed-point iteration.
std::vector<double> goursat_solve(const GoursatProblem& g, const GoursatOptions& opt = {});

struct RigidFit {
  Mat3 rotation = Mat3::Identity();
  Vec3 translation = Vec3::Zero();
  double rms = 0.0;
};

/// Proper rigid motion minimizing sum |R a_k + t - b_k|^2.
RigidFit register_rigid(const std::vector<Vec3>& a, const std::vector<Vec3>& b);

}  // namespace psurf
