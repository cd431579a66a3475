// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.
// Reference values come from closed forms, the Goursat scheme, direct frame
// integration and loops assembled in tests/support.hpp.

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>

#include "psurf/config.hpp"
#include "psurf/oracle.hpp"
#include "psurf/spline.hpp"
#include "psurf/symmetry.hpp"
#include "support.hpp"

using namespace psurf;

namespace {

constexpr double kPi = std::numbers::pi;

// Pinned tolerances.
constexpr double kPhiError = 1e-5;
constexpr double kCurvature = 5e-3;
constexpr double kRuntimeSoliton = 60.0;
constexpr double kMultiplyBack = 1e-9;
constexpr double kNormalization = 1e-10;
constexpr double kTwist = 1e-10;
constexpr double kRuntimeBirkhoff = 30.0;
constexpr double kBoundary = 1e-7;
constexpr double kRegistration = 1e-5;
constexpr double kOraclePhi = 1e-5;
constexpr double kOracleFrames = 1e-5;
constexpr double kEquivariance = 1e-8;
constexpr double kMonodromy = 1e-4;
constexpr double kSurfaceSymmetry = 1e-3;
constexpr double kSpeed = 1e-3;
constexpr double kOrderRk4 = 4.0;
constexpr double kOrderSecond = 2.0;
constexpr double kOrderBand = 0.3;

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void below(const std::string& what, double value, double bound) {
    const bool ok = value < bound;
    detail << " " << what << "=" << value << (ok ? "<" : ">=") << bound << ";";
    pass = pass && ok;
  }
  void order(const std::string& what, double value, double target) {
    const bool ok = std::abs(value - target) <= kOrderBand;
    detail << " " << what << "=" << value << (ok ? " within " : " outside ") << target << "+-" << kOrderBand << ";";
    pass = pass && ok;
  }
  void note(const std::string& what, double value) { detail << " " << what << "=" << value << ";"; }
  void flag(bool ok, const std::string& what) {
    detail << " " << what << (ok ? "" : " FAILED") << ";";
    pass = pass && ok;
  }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

PotentialPair soliton_pair(Interval d = {0.0, 1.0}) {
  BoundaryAngles b;
  b.alpha = builtin_function("soliton_alpha");
  b.beta = builtin_function("soliton_beta");
  b.domain_x = b.domain_y = d;
  return normalized_from_boundary(b);
}

double phi_error(const FrameGrid& f) {
  double e = 0.0;
  for (std::size_t j = 0; j < f.ny(); ++j)
    for (std::size_t i = 0; i < f.nx(); ++i)
      e = std::max(e, std::abs(f.phi_at(i, j) - testing::soliton_phi(f.grid.xs[i], f.grid.ys[j])));
  return e;
}

// Speeds as seen by the potential itself: 2 |upper-right entry| of the top terms.
double speed_x(const PotentialPair& p, double x) { return 2.0 * std::abs(p.eta_x(x).coeff(1)(0, 1)); }
double speed_y(const PotentialPair& p, double y) { return 2.0 * std::abs(p.eta_y(y).coeff(-1)(0, 1)); }

struct OracleDiff {
  double phi = 0.0;
  double frames = 0.0;
};

OracleDiff oracle_difference(const PotentialPair& p, const FrameGrid& f) {
  GoursatProblem g;
  g.xs = f.grid.xs;
  g.ys = f.grid.ys;
  for (std::size_t i = 0; i < f.nx(); ++i) g.boundary_x.push_back(f.phi_at(i, 0));
  for (std::size_t j = 0; j < f.ny(); ++j) g.boundary_y.push_back(f.phi_at(0, j));
  g.a = [&p](double x) { return speed_x(p, x); };
  g.b = [&p](double y) { return speed_y(p, y); };
  const std::vector<double> phi = goursat_solve(g);
  OracleDiff d;
  for (std::size_t k = 0; k < phi.size(); ++k) d.phi = std::max(d.phi, std::abs(phi[k] - f.phi[k]));

  std::vector<double> a, b;
  for (double x : f.grid.xs) a.push_back(speed_x(p, x));
  for (double y : f.grid.ys) b.push_back(speed_y(p, y));
  const DirectFrameResult dir = direct_frame_solve(f.phi, f.grid.xs, f.grid.ys, a, b, 1.0);
  const Mat2 c0 = f.u(0, 0).evaluate(1.0);
  for (std::size_t k = 0; k < dir.U.size(); ++k) d.frames = std::max(d.frames, (c0 * dir.U[k] - f.U[k].evaluate(1.0)).norm());
  return d;
}

// Interior nodes whose flag disagrees with the rank of central-differenced
// tangents, rank < 2 when sigma_min / sigma_max < 1e-6. Differencing error is
// O(h^2), so this only resolves exact rank drops; it is reported, not asserted.
std::size_t differenced_rank_mismatches(const SurfaceGrid& s) {
  std::size_t bad = 0;
  for (std::size_t j = 1; j + 1 < s.ny; ++j)
    for (std::size_t i = 1; i + 1 < s.nx; ++i) {
      Eigen::Matrix<double, 3, 2> m;
      m << s.points[s.index(i + 1, j)] - s.points[s.index(i - 1, j)], s.points[s.index(i, j + 1)] - s.points[s.index(i, j - 1)];
      const Eigen::Vector2d sv = Eigen::JacobiSVD<Eigen::Matrix<double, 3, 2>>(m).singularValues();
      const bool deficient = !(sv(1) >= 1e-6 * sv(0));
      bad += deficient != s.degenerate[s.index(i, j)];
    }
  return bad;
}

double registration_rms(const SurfaceGrid& a, const SurfaceGrid& b) { return register_rigid(a.points, b.points).rms; }

// ---------------------------------------------------------------------------

void ac1(Outcome& o) {
  // The closed form solves phi_xy = sin(phi): check by differencing.
  double sub = 0.0;
  const double h = 1e-3;
  for (double x : {0.1, 0.5, 0.9})
    for (double y : {0.2, 0.7}) {
      const double pxy = (testing::soliton_phi(x + h, y + h) - testing::soliton_phi(x + h, y - h) -
                          testing::soliton_phi(x - h, y + h) + testing::soliton_phi(x - h, y - h)) / (4.0 * h * h);
      sub = std::max(sub, std::abs(pxy - std::sin(testing::soliton_phi(x, y))));
    }
  o.below("closed_form_substitution", sub, 1e-5);

  const auto t0 = std::chrono::steady_clock::now();
  ReconstructOptions opt;
  opt.birkhoff.trunc = 24;
  opt.threads = 1;
  const FrameGrid f = reconstruct_frames(soliton_pair(), GridSpec::uniform({0.0, 1.0}, 64, {0.0, 1.0}, 64), opt);
  const GeometryReport g = geometry_report(sym_immersion(f, 1.0), f);
  const double elapsed = seconds_since(t0);
  o.below("phi_error", phi_error(f), kPhiError);
  o.below("k_residual", g.max_k_residual, kCurvature);
  o.flag(g.interior_checked > 0, "interior_nodes_checked");
  o.below("runtime_s", elapsed, kRuntimeSoliton);
}

void ac2(Outcome& o) {
  std::mt19937_64 rng(20240611);
  std::vector<Complex> pts;
  for (double r : {0.5, 1.0, 2.0})
    for (int k = 0; k < 12; ++k) pts.push_back(std::polar(r, 2.0 * kPi * (k + 0.5) / 12.0));
  auto product_error = [&](const LaurentLoop& g, const LaurentLoop& a, const LaurentLoop& b) {
    double e = 0.0;
    for (Complex l : pts) e = std::max(e, (g.evaluate(l) - a.evaluate(l) * b.evaluate(l)).norm());
    return e;
  };
  double resid = 0.0, norm = 0.0, twist = 0.0, elapsed = 0.0;
  for (int n = 0; n < 200; ++n) {
    const LaurentLoop g = testing::random_twisted_unitary(rng);
    const auto t0 = std::chrono::steady_clock::now();
    const SplitResult pm = split_plus_star_minus(g);
    const SplitResult mp = split_minus_star_plus(g);
    elapsed += seconds_since(t0);
    resid = std::max({resid, product_error(g, pm.plus, pm.minus), product_error(g, mp.minus, mp.plus)});
    norm = std::max({norm, (pm.plus.coeff(0) - Mat2::Identity()).norm(), (mp.minus.coeff(0) - Mat2::Identity()).norm()});
    for (const LaurentLoop* l : {&pm.plus, &pm.minus, &mp.plus, &mp.minus}) twist = std::max(twist, check_twist(*l));
    if (pm.plus.min_degree() < 0 || pm.minus.max_degree() > 0 || mp.plus.min_degree() < 0 || mp.minus.max_degree() > 0)
      o.flag(false, "factor_degrees");
  }
  o.below("multiply_back", resid, kMultiplyBack);
  o.below("normalization", norm, kNormalization);
  o.below("twist", twist, kTwist);
  o.below("runtime_s", elapsed, kRuntimeBirkhoff);
}

void ac3(Outcome& o) {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(-0.6, 0.6);
  std::vector<double> knots, va, vb;
  for (int k = 0; k <= 8; ++k) {
    knots.push_back(k / 8.0);
    va.push_back(k == 0 ? 0.0 : u(rng));
    vb.push_back(1.2 + u(rng));
  }
  const CubicSpline sa = CubicSpline::from_real(knots, va), sb = CubicSpline::from_real(knots, vb);

  struct Pair {
    const char* name;
    RealFunction alpha, beta, a, b;
  };
  const std::vector<Pair> pairs = {
      {"soliton", builtin_function("soliton_alpha"), builtin_function("soliton_beta"), {}, {}},
      {"trigonometric", [](double x) { return 0.8 * std::sin(2.0 * x); }, [](double y) { return 1.0 + 0.5 * std::cos(y); }, {}, {}},
      {"polynomial", [](double x) { return 0.5 * x * x; }, [](double y) { return kPi / 2.0 + 0.3 * y; }, {}, {}},
      {"with_speeds", [](double x) { return x - x * x * x / 3.0; }, [](double y) { return 2.0 - y; },
       [](double x) { return 1.0 + 0.3 * x; }, [](double y) { return 1.2 - 0.2 * y; }},
      {"random_spline", [sa](double x) { return sa.real_at(x); }, [sb](double y) { return sb.real_at(y); }, {}, {}},
  };
  for (const Pair& pr : pairs) {
    BoundaryAngles b;
    b.alpha = pr.alpha;
    b.beta = pr.beta;
    b.a = pr.a;
    b.b = pr.b;
    b.domain_x = b.domain_y = {0.0, 1.0};
    const FrameGrid f = reconstruct_frames(normalized_from_boundary(b), GridSpec::uniform({0.0, 1.0}, 33, {0.0, 1.0}, 33));
    double e = 0.0;
    for (std::size_t i = 0; i < f.nx(); ++i) e = std::max(e, std::abs(f.phi_at(i, 0) - pr.alpha(f.grid.xs[i]) - pr.beta(0.0)));
    for (std::size_t j = 0; j < f.ny(); ++j) e = std::max(e, std::abs(f.phi_at(0, j) - pr.beta(f.grid.ys[j])));
    o.below(std::string("boundary_") + pr.name, e, kBoundary);
  }
}

void ac4(Outcome& o) {
  const PotentialPair p = soliton_pair();
  const GridSpec grid = GridSpec::uniform({0.0, 1.0}, 21, {0.0, 1.0}, 21);
  const SurfaceGrid ref = sym_immersion(reconstruct_frames(p, grid), 1.0);

  struct Choice {
    const char* name;
    Gauge qx, qy;
  };
  const Mat2 off = 0.5 * su2_basis(0), off2 = 0.5 * su2_basis(1), dia = 0.5 * su2_basis(2);
  const std::vector<Choice> gauges = {
      {"constant", Gauge::constant(LaurentLoop::constant(diag2(std::polar(1.0, 0.4), std::polar(1.0, -0.4)))),
       Gauge::constant(LaurentLoop::constant(diag2(std::polar(1.0, -0.9), std::polar(1.0, 0.9))))},
      {"minus_degree1", exponential_gauge(-1, off, [](double t) { return std::sin(2.0 * t); }, [](double t) { return 2.0 * std::cos(2.0 * t); }),
       Gauge::identity()},
      {"mixed", exponential_gauge(-2, dia, [](double t) { return t * t; }, [](double t) { return 2.0 * t; }),
       exponential_gauge(1, off2, [](double t) { return std::cos(t); }, [](double t) { return -std::sin(t); })},
  };
  for (const Choice& c : gauges) {
    ReconstructOptions opt;
    opt.init_x = c.qx.q(0.0);
    opt.init_y = c.qy.q(0.0);
    const FrameGrid f = reconstruct_frames(gauge_transform(p, c.qx, c.qy), grid, opt);
    o.below(std::string("rms_") + c.name, registration_rms(ref, sym_immersion(f, 1.0)), kRegistration);
  }
}

void ac5(Outcome& o) {
  const GridSpec grid = GridSpec::uniform({0.0, 1.0}, 33, {0.0, 1.0}, 33);
  const FrameGrid f = reconstruct_frames(soliton_pair(), grid);
  const SurfaceGrid ref = sym_immersion(f, 1.0);
  const FrameGrid g = reconstruct_frames(extract_diagonal_potentials(f), grid);
  o.below("diagonal_rms", registration_rms(ref, sym_immersion(g, 1.0)), kRegistration);
  // Not part of the criterion: the restriction to the lines through the
  // basepoint, which is a gauge of the normalized pair.
  ReconstructOptions opt;
  opt.init_x = opt.init_y = f.u(0, 0);
  const FrameGrid l = reconstruct_frames(extract_line_potentials(f, 0, 0), grid, opt);
  o.note("line_restriction_rms", registration_rms(ref, sym_immersion(l, 1.0)));
}

void ac6(Outcome& o) {
  {
    const PotentialPair p = soliton_pair();
    const FrameGrid f = reconstruct_frames(p, GridSpec::uniform({0.0, 1.0}, 65, {0.0, 1.0}, 65));
    const OracleDiff d = oracle_difference(p, f);
    o.below("soliton_goursat", d.phi, kOraclePhi);
    o.below("soliton_direct_frames", d.frames, kOracleFrames);
  }
  // Pole-free patches of the generalized Amsler potential, away from the
  // degenerate line, with the axis frames anchored at the patch corner.
  for (const Interval patch : {Interval{4.0, 5.0}, Interval{-5.0, -4.0}}) {
    PotentialPair p = generalized_amsler_example(patch).pair;
    p.domain_y = patch;
    ReconstructOptions opt;
    opt.base_x = opt.base_y = patch.lo;
    opt.integration.max_step = 1.0 / 1024.0;
    opt.birkhoff.trunc = 32;
    const FrameGrid f = reconstruct_frames(p, GridSpec::uniform(patch, 65, patch, 65), opt);
    const OracleDiff d = oracle_difference(p, f);
    const std::string tag = patch.lo > 0.0 ? "amsler_plus" : "amsler_minus";
    o.below(tag + "_goursat", d.phi, kOraclePhi);
    o.below(tag + "_direct_frames", d.frames, kOracleFrames);
  }
}

struct AmslerRun {
  BuiltProblem b;
  FrameGrid f;
  SurfaceGrid s;
};

const AmslerRun& amsler_101() {
  static const AmslerRun run = [] {
    std::istringstream in("[potential]\nkind = amsler3\n[grid]\nnx = 101\nny = 101\n");
    AmslerRun r;
    r.b = build_problem(parse_config(in));
    r.f = reconstruct_frames(r.b.pair, r.b.grid, r.b.options);
    r.s = sym_immersion(r.f, 1.0);
    return r;
  }();
  return run;
}

void ac7(Outcome& o) {
  const AmslerRun& r = amsler_101();
  CertificationThresholds th;
  th.equivariance = kEquivariance;
  th.monodromy_spread = kMonodromy;
  th.surface_residual = kSurfaceSymmetry;
  const CertificationReport c = certify_with_frames(r.b.pair, *r.b.symmetry, r.f, r.b.options, th);
  o.below("equivariance", std::max(c.equivariance_x, c.equivariance_y), kEquivariance);
  o.flag(c.monodromy_ran, "monodromy_ran");
  o.below("monodromy_spread", c.monodromy_spread, kMonodromy);
  o.below("surface_residual", c.surface_residual, kSurfaceSymmetry);
  o.flag(c.certified, "certified");
  o.note("rotation_angle_rad", c.rotation_angle_measured_rad);
  const ConePointCheck cone = check_cone_point(r.s);
  o.note("cone_point_found", cone.found);
  o.note("cone_line_max_distance", cone.max_line_distance);
  o.note("cone_line_threshold", cone.threshold);
  o.note("cone_line_pass", cone.pass);
}

void ac8(Outcome& o) {
  const FrameGrid f = reconstruct_frames(soliton_pair(), GridSpec::uniform({0.0, 1.0}, 64, {0.0, 1.0}, 64));
  for (double l : {0.5, 1.0, 2.0}) {
    const GeometryReport g = geometry_report(sym_immersion(f, l), f);
    const std::string tag = "l" + std::to_string(l).substr(0, 3);
    o.below(tag + "_speed_x", g.max_speed_x_error, kSpeed);
    o.below(tag + "_speed_y", g.max_speed_y_error, kSpeed);
    o.below(tag + "_k_residual", g.max_k_residual, kCurvature);
  }
}

void ac9(Outcome& o) {
  BoundaryAngles b;
  b.alpha = b.beta = builtin_function("zero");
  b.domain_x = b.domain_y = {-1.0, 1.0};
  const FrameGrid flat = reconstruct_frames(normalized_from_boundary(b), GridSpec::uniform({-1.0, 1.0}, 17, {-1.0, 1.0}, 17));
  const SurfaceGrid sf = sym_immersion(flat, 1.0);
  const GeometryReport gf = geometry_report(sf, flat);
  o.flag(gf.degenerate_nodes == sf.points.size(), "flat_all_flagged");
  std::size_t parallel = 0;
  for (std::size_t k = 0; k < sf.points.size(); ++k) parallel += sf.fx[k].cross(sf.fy[k]).norm() < 1e-12;
  o.flag(parallel == sf.points.size(), "flat_tangents_parallel");
  o.flag(gf.rank_mismatches == 0, "flat_rank_consistent");
  o.note("flat_differenced_rank_mismatches", static_cast<double>(differenced_rank_mismatches(sf)));

  const FrameGrid sol = reconstruct_frames(soliton_pair(), GridSpec::uniform({0.0, 1.0}, 64, {0.0, 1.0}, 64));
  const SurfaceGrid ss = sym_immersion(sol, 1.0);
  std::size_t flagged = 0;
  for (std::size_t j = 1; j + 1 < ss.ny; ++j)
    for (std::size_t i = 1; i + 1 < ss.nx; ++i) flagged += ss.degenerate[ss.index(i, j)];
  o.flag(flagged == 0, "soliton_interior_unflagged");
  o.flag(geometry_report(ss, sol).rank_mismatches == 0, "soliton_rank_consistent");
  o.note("soliton_differenced_rank_mismatches", static_cast<double>(differenced_rank_mismatches(ss)));

  const AmslerRun& r = amsler_101();
  std::size_t deg = 0;
  for (bool d : r.s.degenerate) deg += d;
  o.note("amsler_flagged_nodes", static_cast<double>(deg));
  o.flag(geometry_report(r.s, r.f).rank_mismatches == 0, "amsler_rank_consistent");
  o.note("amsler_differenced_rank_mismatches", static_cast<double>(differenced_rank_mismatches(r.s)));
}

void ac10(Outcome& o) {
  // Richardson on the x-axis frame of the soliton potential.
  const PotentialPair p = soliton_pair();
  auto end_frame = [&](double step) {
    return integrate_axis(p.eta_x, Interval{0.0, 1.0}, LaurentLoop::identity(), step).G.back();
  };
  const LaurentLoop g1 = end_frame(1.0 / 8.0), g2 = end_frame(1.0 / 16.0), g3 = end_frame(1.0 / 32.0);
  const double rk = std::log2(sample_distance(g1, g2) / sample_distance(g2, g3));
  o.order("rk4_order", rk, kOrderRk4);

  auto goursat_error = [](std::size_t n) {
    GoursatProblem g;
    for (std::size_t k = 0; k < n; ++k) g.xs.push_back(static_cast<double>(k) / (n - 1));
    g.ys = g.xs;
    for (double x : g.xs) g.boundary_x.push_back(testing::soliton_phi(x, 0.0));
    for (double y : g.ys) g.boundary_y.push_back(testing::soliton_phi(0.0, y));
    const std::vector<double> phi = goursat_solve(g);
    double e = 0.0;
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t i = 0; i < n; ++i) e = std::max(e, std::abs(phi[i + n * j] - testing::soliton_phi(g.xs[i], g.ys[j])));
    return e;
  };
  const double go = std::log2(goursat_error(33) / goursat_error(65));
  o.order("goursat_order", go, kOrderSecond);

  auto k_residual = [&](std::size_t n) {
    const FrameGrid f = reconstruct_frames(p, GridSpec::uniform({0.0, 1.0}, n, {0.0, 1.0}, n));
    return geometry_report(sym_immersion(f, 1.0), f).max_k_residual;
  };
  const double ko = std::log2(k_residual(17) / k_residual(33));
  o.order("curvature_order", ko, kOrderSecond);
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<void(Outcome&)>>> criteria = {
      {"AC1 soliton round trip", ac1},
      {"AC2 Birkhoff factorization of random loops", ac2},
      {"AC3 boundary contract", ac3},
      {"AC4 gauge invariance", ac4},
      {"AC5 diagonal potentials", ac5},
      {"AC6 oracle equivalence", ac6},
      {"AC7 generalized Amsler symmetry", ac7},
      {"AC8 associated family", ac8},
      {"AC9 degeneracy detection", ac9},
      {"AC10 convergence orders", ac10},
  };
  int failed = 0;
  for (const auto& [name, run] : criteria) {
    Outcome o;
    o.detail.precision(4);
    const auto t0 = std::chrono::steady_clock::now();
    try {
      run(o);
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << " exception: " << e.what();
    }
    std::cout << (o.pass ? "PASS " : "FAIL ") << name << " (" << seconds_since(t0) << " s):" << o.detail.str() << std::endl;
    failed += !o.pass;
  }
  std::cout << (failed == 0 ? "all criteria pass" : std::to_string(failed) + " criteria failed") << std::endl;
  return failed == 0 ? 0 : 1;
}
