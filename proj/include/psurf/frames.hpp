#pragma once

// Maurer-Cartan integration dG/dt = G eta(t) on Laurent coefficients.

#include <vector>

#include "psurf/loop.hpp"
#include "psurf/potentials.hpp"

namespace psurf {

enum class Axis { X, Y };

struct IntegrationOptions {
  double max_step = 0.0;        // 0: interval length / 256
  int max_degree = 128;         // |degree| cap on the integrated loop
  double drift_tol = 1e-6;      // unitarity drift raising IntegrationDrift
  double trim = 1e-18;          // relative noise trim after each step
  double trim_radius = 2.0;     // trim weights |c_k| by radius^|k|
};

struct AxisFramePath {
  Axis axis = Axis::X;
  double start = 0.0;           // parameter where G = init
  LaurentLoop init;
  std::vector<double> t;        // sorted sample parameters
  std::vector<LaurentLoop> G;
  double max_step_used = 0.0;
  double max_drift = 0.0;
  double max_dropped = 0.0;     // largest coefficient lost to the degree cap
};

/// Integrates from start (where G = init) to each of the sorted targets,
/// forwards and backwards as needed, with at most max_step per RK4 step.
AxisFramePath integrate_axis(const LoopFunction& eta, double start, const std::vector<double>& targets,
                             const LaurentLoop& init, Axis axis, double interval_length,
                             const IntegrationOptions& opt = {});

/// Uniform sampling of [t0, t1] with the given step, starting from init at t0.
AxisFramePath integrate_axis(const LoopFunction& eta, Interval interval, const LaurentLoop& init, double step,
                             Axis axis = Axis::X, const IntegrationOptions& opt = {});

/// Single classical RK4 step for dG/dt = G eta(t), without trimming.
LaurentLoop rk4_step(const LoopFunction& eta, const LaurentLoop& g, double t, double h);

struct DirectFrameResult {
  std::vector<Mat2> U;          // index i + nx * j
  std::size_t nx = 0;
  std::size_t ny = 0;
  double path_residual = 0.0;   // x-then-y vs y-then-x at the far corner
};

/// Frames at a single lambda0 from phi on the lattice xs x ys, with
/// U = I at node (i0, j0). The x-direction uses the gauge U D^-1 with
/// D = diag(e^{-i phi/2}, e^{i phi/2}) so that phi_x is not needed; phi at
/// half steps comes from cubic Lagrange interpolation along the line.
DirectFrameResult direct_frame_solve(const std::vector<double>& phi, const std::vector<double>& xs,
                                     const std::vector<double>& ys, const std::vector<double>& a,
                                     const std::vector<double>& b, double lambda0, std::size_t i0 = 0,
                                     std::size_t j0 = 0);

}  // namespace psurf
