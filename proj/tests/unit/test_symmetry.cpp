#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <numbers>

#include <Eigen/Geometry>

#include "psurf/config.hpp"
#include "psurf/errors.hpp"
#include "psurf/symmetry.hpp"
#include "support.hpp"

using namespace psurf;

namespace {

constexpr double kPi = std::numbers::pi;

struct AmslerRun {
  BuiltProblem b;
  FrameGrid f;
  SurfaceGrid s;
};

const AmslerRun& amsler() {
  static const AmslerRun run = [] {
    std::istringstream in("[potential]\nkind = amsler3\n[grid]\nnx = 41\nny = 41\n");
    AmslerRun r;
    r.b = build_problem(parse_config(in));
    r.f = reconstruct_frames(r.b.pair, r.b.grid, r.b.options);
    r.s = sym_immersion(r.f, 1.0);
    return r;
  }();
  return run;
}

SymmetryDescriptor with_fit(const SymmetryDescriptor& d, const RigidFit& fit) {
  SymmetryDescriptor r = d;
  r.R_linear = fit.rotation;
  r.R_translation = fit.translation;
  return r;
}

// chi is fixed up to sign by the SU(2) lift of K.
double chi_distance(const LaurentLoop& a, const LaurentLoop& b) {
  double plus = 0.0, minus = 0.0;
  for (int k = 0; k < 16; ++k) {
    const Complex l = std::polar(1.0, 2.0 * kPi * k / 16.0);
    plus = std::max(plus, (a.evaluate(l) - b.evaluate(l)).norm());
    minus = std::max(minus, (a.evaluate(l) + b.evaluate(l)).norm());
  }
  return std::min(plus, minus);
}

}  // namespace

TEST_CASE("Amsler certification on a coarse lattice") {
  const AmslerRun& r = amsler();
  REQUIRE(r.b.symmetry.has_value());
  // Bicubic resampling on 41 x 41 nodes is good to ~2e-2 only.
  CertificationThresholds th;
  th.surface_residual = 5e-2;
  const CertificationReport c = certify_with_frames(r.b.pair, *r.b.symmetry, r.f, r.b.options, th);
  CHECK(c.equivariance_pass);
  CHECK(c.equivariance_x < 1e-8);
  CHECK(c.monodromy_ran);
  CHECK(c.monodromy_spread < 1e-4);
  CHECK(c.surface_residual < 5e-2);
  CHECK(c.certified);
  // The rigid motion comes from the fit and agrees with Ad(chi(1)).
  CHECK(c.chi_vs_fit < 1e-6);
  CHECK(std::abs(c.rotation_angle_measured_rad - c.chi_rotation_angle_rad) < 1e-6);
  bool has_angle = false;
  for (const auto& [k, v] : c.key_values()) has_angle = has_angle || k == "rotation_angle_measured_rad";
  CHECK(has_angle);
}

MonodromyResult monodromy(const PotentialPair& p, const FrameGrid& f, const SurfaceGrid& s,
                          const SymmetryDescriptor& d, const ReconstructOptions& opt) {
  const GammaLattice g = gamma_lattice(p, f, d, opt);
  return measure_monodromy(f, g, compute_K(s, f, g, with_fit(d, fit_symmetry_motion(s, g))));
}

TEST_CASE("monodromy composes along a translation symmetry") {
  // The same T-periodic potential on both axes gives G(t + T) = G(T) G(t), so
  // gamma(x, y) = (x + T, y + T) is a symmetry with trivial gauges. On
  // [0, 3T] both gamma and gamma o gamma stay inside.
  const double T = 0.5;
  const LoopFunction eta = [T](double t) {
    const Complex q = 0.3 + 0.2 * std::polar(1.0, 2.0 * kPi * t / T);
    Mat2 m;
    m << 0.0, q, -std::conj(q), 0.0;
    return LaurentLoop(-1, {m, Mat2::Zero(), m});
  };
  PotentialPair p;
  p.eta_x = p.eta_y = eta;
  p.kind = PotentialKind::Generalized;
  p.domain_x = p.domain_y = {0.0, 3.0 * T};
  ReconstructOptions opt;
  opt.integration.max_step = T / 256.0;
  const FrameGrid f = reconstruct_frames(p, GridSpec::uniform(p.domain_x, 25, p.domain_y, 25), opt);
  const SurfaceGrid s = sym_immersion(f, 1.0);
  SymmetryDescriptor d;
  d.gamma1 = d.gamma2 = {[T](double t) { return t + T; }, [](double) { return 1.0; }};
  const EquivarianceResidual eq = check_equivariance(p, d.gamma1, d.gamma2, d.wx, d.wy);
  CHECK(std::max(eq.x, eq.y) < 1e-12);
  const MonodromyResult m1 = monodromy(p, f, s, d, opt);
  const MonodromyResult m2 = monodromy(p, f, s, compose_with_itself(d), opt);
  CHECK(m1.spread < 1e-4);
  CHECK(m2.spread < 1e-4);
  CHECK(chi_distance(m1.chi, LaurentLoop::identity()) > 1e-2);
  CHECK(chi_distance(m2.chi, m1.chi * m1.chi) < 1e-4);
}

TEST_CASE("Amsler: gamma o gamma is gamma^-1") {
  // No node has x, gamma(x) and gamma(gamma(x)) all in [-0.8, 0.8]; the
  // intermediate image crosses t = infinity, so chi_{gamma o gamma} is not
  // chi^2 here. Since gamma^3 = id and w^3 = -I it is -chi^-1.
  const AmslerRun& r = amsler();
  const SymmetryDescriptor& d = *r.b.symmetry;
  const MonodromyResult m1 = monodromy(r.b.pair, r.f, r.s, d, r.b.options);
  const MonodromyResult m2 = monodromy(r.b.pair, r.f, r.s, compose_with_itself(d), r.b.options);
  CHECK(m1.spread < 1e-4);
  CHECK(m2.spread < 1e-4);
  CHECK(chi_distance(m2.chi, m1.chi.adjugate()) < 1e-4);
}

TEST_CASE("the fitted motion maps f to f o gamma") {
  const AmslerRun& r = amsler();
  const GammaLattice g = gamma_lattice(r.b.pair, r.f, *r.b.symmetry, r.b.options);
  CHECK(g.coverage > 0.0);
  const RigidFit fit = fit_symmetry_motion(r.s, g);
  CHECK(fit.rms < 1e-6);
  for (std::size_t k = 0; k < g.node.size(); k += 7) {
    CHECK((fit.rotation * r.s.points[g.node[k]] + fit.translation - g.surface.points[g.image[k]]).norm() < 1e-5);
  }
}

TEST_CASE("the cone point") {
  const AmslerRun& r = amsler();
  const ConePointCheck c = check_cone_point(r.s);
  CHECK(c.found);
  CHECK(c.nodes > 0);
  CHECK(c.spread < c.threshold);
  CHECK(c.pass);
  CHECK(c.threshold == doctest::Approx(10.0 * 1.6 / 40.0));

  // A grid without degenerate nodes has no cone point.
  SurfaceGrid flat;
  flat.nx = flat.ny = 3;
  flat.xs = flat.ys = {0.0, 0.5, 1.0};
  for (double y : flat.ys)
    for (double x : flat.xs) flat.points.emplace_back(x, y, 0.0);
  flat.degenerate.assign(9, false);
  CHECK_FALSE(check_cone_point(flat).found);
}

TEST_CASE("a mismatched symmetry is rejected") {
  BoundaryAngles b;
  b.alpha = builtin_function("soliton_alpha");
  b.beta = builtin_function("soliton_beta");
  b.domain_x = b.domain_y = {-0.8, 0.8};
  const PotentialPair p = normalized_from_boundary(b);
  const GridSpec grid = GridSpec::uniform({-0.8, 0.8}, 17, {-0.8, 0.8}, 17);
  const CertificationReport c = certify_from_potentials(p, amsler3_symmetry(), grid);
  CHECK_FALSE(c.equivariance_pass);
  CHECK_FALSE(c.monodromy_ran);
  CHECK_FALSE(c.certified);
}

TEST_CASE("rotation fit") {
  const Mat3 q = Eigen::AngleAxisd(0.9, Vec3(1.0, 1.0, 0.0).normalized()).toRotationMatrix();
  std::vector<Vec3> a{Vec3::UnitX(), Vec3::UnitY(), Vec3::UnitZ(), Vec3(1.0, 2.0, 3.0)};
  std::vector<Vec3> b;
  for (const Vec3& v : a) b.push_back(q * v);
  CHECK((fit_rotation(a, b) - q).norm() < 1e-12);
}
