#pragma once

// Surface symmetries f o gamma = R f + t and their loop-group counterparts
// U o gamma = chi U K.

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "psurf/oracle.hpp"
#include "psurf/surface.hpp"

namespace psurf {

struct SymmetryDescriptor {
  AxisMap gamma1 = AxisMap::identity();
  AxisMap gamma2 = AxisMap::identity();
  // When set, gamma(x, y) = (gamma1(y), gamma2(x)); otherwise (gamma1(x), gamma2(y)).
  bool switches_axes = false;
  Mat3 R_linear = Mat3::Identity();
  Vec3 R_translation = Vec3::Zero();
  std::optional<LaurentLoop> chi;
  Gauge wx = Gauge::identity();
  Gauge wy = Gauge::identity();
};

/// Composition gamma o gamma (gauges multiplied); non-switching only.
SymmetryDescriptor compose_with_itself(const SymmetryDescriptor& d);

/// Frames and surface re-evaluated at the exact image parameters
/// gamma(x_i, y_j) of the covered nodes, with the basepoint and init loops of
/// the original build.
struct GammaLattice {
  std::vector<std::size_t> node;      // covered node index in the original grid
  std::vector<std::size_t> image;     // matching index in `frames`
  FrameGrid frames;
  SurfaceGrid surface;
  double coverage = 0.0;              // covered / total nodes
};

GammaLattice gamma_lattice(const PotentialPair& p, const FrameGrid& f, const SymmetryDescriptor& d,
                           const ReconstructOptions& opt, double lambda0 = 1.0);

/// Rigid motion taking f to f o gamma over the covered nodes.
RigidFit fit_symmetry_motion(const SurfaceGrid& s, const GammaLattice& g);

struct SurfaceSymmetryResult {
  double residual = 0.0;
  double coverage = 0.0;
  std::size_t covered = 0;
};

/// max |f(gamma(x, y)) - (R f(x, y) + t)|, f o gamma from bicubic
/// interpolation of the grid.
SurfaceSymmetryResult check_surface_symmetry(const SurfaceGrid& s, const SymmetryDescriptor& d);

struct KNode {
  std::size_t node = 0;
  std::size_t image = 0;
  Mat3 K = Mat3::Identity();      // F^T R^T (F o gamma)
  bool valid = false;
};

struct KResult {
  std::vector<KNode> nodes;
  double formula_residual = 0.0;   // |K - blockdiag(Z J^-1 (Z o gamma)^-1, eps)|
  double orthogonality = 0.0;      // |K^T K - I| of the formula matrix
  double block_residual = 0.0;     // off-block entries of K
  double subalgebra_residual = 0.0;  // off-block entries of K^-1 dK / h along x
  double y_variation = 0.0;        // max |dK/dy| (non-switching case)
  std::size_t skipped = 0;
};

KResult compute_K(const SurfaceGrid& s, const FrameGrid& f, const GammaLattice& g, const SymmetryDescriptor& d);

struct MonodromyResult {
  LaurentLoop chi;
  double spread = 0.0;
  double rotation_angle = 0.0;     // of Ad(chi(1))
  Mat3 rotation = Mat3::Identity();
  std::size_t nodes = 0;
};

/// chi = (U o gamma) K_lift^-1 U^-1 averaged over valid nodes.
MonodromyResult measure_monodromy(const FrameGrid& f, const GammaLattice& g, const KResult& k);

/// Residual of F^lambda o gamma = chi F^{1/lambda} K at lambda in {1/2, 1, 2},
/// with chi fitted from the normals and K required to be block-diagonal.
double check_axis_switch(const FrameGrid& f, const SymmetryDescriptor& d);

struct CertificationThresholds {
  double equivariance = 1e-6;
  double monodromy_spread = 1e-4;
  double surface_residual = 1e-3;
};

struct CertificationReport {
  double equivariance_x = 0.0;
  double equivariance_y = 0.0;
  bool equivariance_pass = false;
  bool monodromy_ran = false;
  double monodromy_spread = 0.0;
  bool monodromy_pass = false;
  double surface_residual = 0.0;
  double surface_coverage = 0.0;
  bool surface_pass = false;
  double rotation_angle_measured_rad = 0.0;   // of the fitted rigid motion
  double chi_rotation_angle_rad = 0.0;        // of Ad(chi(1))
  double chi_vs_fit = 0.0;                    // |Ad(chi(1)) - R|
  double registration_rms = 0.0;
  Vec3 rotation_axis = Vec3::UnitZ();
  bool certified = false;
  std::vector<std::pair<std::string, std::string>> key_values() const;
};

/// Equivariance, then (only if it passes) frames, monodromy and surface
/// symmetry. The rigid motion is fitted, never taken from d.
CertificationReport certify_from_potentials(const PotentialPair& p, const SymmetryDescriptor& d, const GridSpec& grid,
                                            const ReconstructOptions& opt = {}, const CertificationThresholds& th = {});

/// Same chain on frames already built from p with opt.
CertificationReport certify_with_frames(const PotentialPair& p, const SymmetryDescriptor& d, const FrameGrid& f,
                                        const ReconstructOptions& opt = {}, const CertificationThresholds& th = {});

struct ConePointCheck {
  bool found = false;              // any degenerate node
  Vec3 point = Vec3::Zero();       // centroid of the degenerate nodes
  std::size_t nodes = 0;
  double spread = 0.0;             // max distance of a degenerate node to the centroid
  double max_line_distance = 0.0;  // worst coordinate line, distance of its polyline to the point
  double threshold = 0.0;          // 10 h, h the largest parameter spacing
  bool pass = false;
};

/// Every lattice row and column polyline should pass within 10 h of the
/// measured cone point.
ConePointCheck check_cone_point(const SurfaceGrid& s);

/// Rotation-only least-squares fit b_k ~ Q a_k.
Mat3 fit_rotation(const std::vector<Vec3>& a, const std::vector<Vec3>& b);

}  // namespace psurf
