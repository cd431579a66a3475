#pragma once

// Frame reconstruction on a lattice, the Sym formula and geometric checks.

#include <optional>
#include <vector>

#include "psurf/birkhoff.hpp"
#include "psurf/frames.hpp"
#include "psurf/potentials.hpp"

namespace psurf {

inline constexpr double kDegenerateSine = 1e-6;

struct GridSpec {
  std::vector<double> xs;
  std::vector<double> ys;

  static GridSpec uniform(Interval x, std::size_t nx, Interval y, std::size_t ny);
  std::size_t nx() const { return xs.size(); }
  std::size_t ny() const { return ys.size(); }
  std::size_t size() const { return xs.size() * ys.size(); }
  std::size_t index(std::size_t i, std::size_t j) const { return i + xs.size() * j; }
};

struct ReconstructOptions {
  BirkhoffOptions birkhoff;
  IntegrationOptions integration;
  LaurentLoop init_x = LaurentLoop::identity();
  LaurentLoop init_y = LaurentLoop::identity();
  // Where the axis frames equal their init loops. Default: (0, 0) when inside
  // the domain, else the lower-left corner of the domain.
  std::optional<double> base_x;
  std::optional<double> base_y;
  unsigned threads = 1;
};

struct FrameGrid {
  GridSpec grid;
  PotentialKind kind = PotentialKind::Normalized;
  double base_x = 0.0;
  double base_y = 0.0;
  std::size_t base_i = 0;     // node nearest to the basepoint
  std::size_t base_j = 0;
  std::vector<LaurentLoop> U;       // per node, index i + nx j
  std::vector<LaurentLoop> plus;    // V+ (resp. L+) per node
  std::vector<double> phi;
  std::vector<double> psi;
  std::vector<LaurentLoop> Gx;      // per x node
  std::vector<LaurentLoop> Gy;      // per y node
  std::vector<LaurentLoop> Tx;      // per x node
  std::vector<double> a;            // speeds per x node
  std::vector<double> b;            // speeds per y node
  std::vector<double> alpha;        // per x node
  std::vector<double> beta;         // per y node
  double max_split_residual = 0.0;
  double max_tail = 0.0;
  double max_drift = 0.0;

  std::size_t nx() const { return grid.nx(); }
  std::size_t ny() const { return grid.ny(); }
  const LaurentLoop& u(std::size_t i, std::size_t j) const { return U[grid.index(i, j)]; }
  double phi_at(std::size_t i, std::size_t j) const { return phi[grid.index(i, j)]; }
};

/// One Birkhoff split per node of (G^y)^-1 G^x T^x = V+ T-^-1, U = G^x T^x T-,
/// phi = beta(y) - 2 psi with psi = arg of the (1,1) entry of V+'s lambda^0
/// coefficient. Normalized pairs use the exact boundary angles; generalized
/// pairs read a, alpha from the lambda coefficient of eta_x and b, beta from
/// the lambda^-1 coefficient of eta_y.
FrameGrid reconstruct_frames(const PotentialPair& p, const GridSpec& grid, const ReconstructOptions& opt = {});

struct SurfaceGrid {
  std::size_t nx = 0;
  std::size_t ny = 0;
  std::vector<double> xs;
  std::vector<double> ys;
  std::vector<Vec3> points;
  std::vector<Vec3> normals;
  std::vector<Vec3> fx;   // analytic tangents
  std::vector<Vec3> fy;
  std::vector<double> phi;
  std::vector<bool> degenerate;
  double lambda = 1.0;

  std::size_t index(std::size_t i, std::size_t j) const { return i + nx * j; }
};

/// f = (lambda d/dlambda U) U^-1 at lambda0, normal = Ad(U) k-hat.
SurfaceGrid sym_immersion(const FrameGrid& f, double lambda0);

std::vector<SurfaceGrid> associated_family(const FrameGrid& f, const std::vector<double>& lambdas);

struct GeometryReport {
  double lambda = 1.0;
  std::size_t nodes = 0;
  std::size_t degenerate_nodes = 0;
  std::size_t interior_checked = 0;       // interior non-degenerate nodes
  bool all_degenerate = false;
  double max_k_residual = 0.0;            // |K + 1|
  double max_speed_x_error = 0.0;         // | |f_x| - lambda a |
  double max_speed_y_error = 0.0;         // | |f_y| - b / lambda |
  double max_ii_xx = 0.0;
  double max_ii_yy = 0.0;
  double sine_gordon_residual = 0.0;      // |phi_xy - a b sin phi|
  double tangent_mismatch = 0.0;          // difference vs analytic tangents
  std::size_t rank_mismatches = 0;        // rank([f_x, f_y]) < 2 disagreeing with the flag
};

/// Second-order central differences on interior nodes. The second fundamental
/// form pairs the differenced second derivatives with the frame normal;
/// degenerate nodes are skipped for curvature.
GeometryReport geometry_report(const SurfaceGrid& s, const FrameGrid& f);

/// F~ = Ad(U(lambda0)) rotated about the normal by phi/2 (first column the
/// bisector of f_x and f_y). Empty at degenerate nodes.
std::vector<std::optional<Mat3>> darboux_frame(const FrameGrid& f, double lambda0 = 1.0);

/// Per-node residual |U - G^x T^x T-|-style consistency: max over nodes in
/// `sample` of |U - G^y V+| at lambda in {1/2, 1, 2}.
double two_splitting_residual(const FrameGrid& f, const std::vector<std::size_t>& sample);

}  // namespace psurf
