#include "psurf/commands.hpp"

#include <algorithm>
#include <fstream>
#include <ostream>
#include <random>
#include <set>

#include "psurf/errors.hpp"
#include "psurf/oracle.hpp"

namespace psurf {

namespace {

void note(const CommandOptions& opt, const std::string& msg) {
  if (opt.log) *opt.log << msg << "\n";
}

std::string lambda_tag(double l) { return "l" + format_number(l); }

double speed_from_eta_x(const PotentialPair& p, double x) { return 2.0 * std::abs(p.eta_x(x).coeff(1)(0, 1)); }
double speed_from_eta_y(const PotentialPair& p, double y) { return 2.0 * std::abs(p.eta_y(y).coeff(-1)(0, 1)); }

bool geometry_pass(const GeometryReport& r, const Tolerances& t) {
  const bool speeds = r.max_speed_x_error <= t.speed && r.max_speed_y_error <= t.speed;
  const bool curvature =
      r.all_degenerate || (r.max_k_residual <= t.curvature && r.sine_gordon_residual <= t.sine_gordon);
  return speeds && curvature && r.rank_mismatches == 0;
}

void add_geometry(Report& rep, const GeometryReport& r, const std::string& prefix) {
  rep.add(prefix + "nodes", r.nodes);
  rep.add(prefix + "degenerate_nodes", r.degenerate_nodes);
  rep.add(prefix + "interior_checked", r.interior_checked);
  rep.add(prefix + "all_degenerate", r.all_degenerate);
  rep.add(prefix + "k_residual", r.max_k_residual);
  rep.add(prefix + "speed_x_error", r.max_speed_x_error);
  rep.add(prefix + "speed_y_error", r.max_speed_y_error);
  rep.add(prefix + "sine_gordon_residual", r.sine_gordon_residual);
  rep.add(prefix + "tangent_mismatch", r.tangent_mismatch);
  rep.add(prefix + "rank_mismatches", r.rank_mismatches);
}

bool suite_potential(const RunConfig& c, const BuiltProblem& b, Report& rep) {
  const auto [su2, twist] = potential_invariant_residuals(b.pair);
  rep.add("potential_su2_residual", su2);
  rep.add("potential_twist_residual", twist);
  return su2 <= c.tol.unitarity && twist <= c.tol.twist;
}

bool suite_birkhoff(const RunConfig& c, const FrameGrid& f, Report& rep) {
  std::mt19937_64 rng(c.seed);
  std::uniform_int_distribution<std::size_t> pick(0, f.U.size() - 1);
  std::vector<std::size_t> sample;
  for (int k = 0; k < 9; ++k) sample.push_back(pick(rng));
  const double two = two_splitting_residual(f, sample);
  rep.add("birkhoff_max_split_residual", f.max_split_residual);
  rep.add("birkhoff_max_tail", f.max_tail);
  rep.add("integration_max_drift", f.max_drift);
  rep.add("two_splitting_residual", two);
  rep.add("two_splitting_nodes", sample.size());
  return two <= c.tol.two_splitting && f.max_tail <= c.tol.birkhoff_tail && f.max_drift <= c.tol.drift;
}

bool suite_geometry(const RunConfig& c, const FrameGrid& f, const std::vector<SurfaceGrid>& surfaces, Report& rep) {
  bool pass = true;
  bool all_degenerate = true;
  for (const SurfaceGrid& s : surfaces) {
    const GeometryReport r = geometry_report(s, f);
    const bool ok = geometry_pass(r, c.tol);
    add_geometry(rep, r, lambda_tag(s.lambda) + ".");
    rep.add(lambda_tag(s.lambda) + ".pass", ok);
    pass = pass && ok;
    all_degenerate = all_degenerate && r.all_degenerate;
  }
  rep.add("all_degenerate", all_degenerate);
  return pass;
}

bool suite_oracle(const RunConfig& c, const BuiltProblem& b, const FrameGrid& f, Report& rep) {
  const std::size_t nx = f.nx(), ny = f.ny();
  GoursatProblem gp;
  gp.xs = f.grid.xs;
  gp.ys = f.grid.ys;
  for (std::size_t i = 0; i < nx; ++i) gp.boundary_x.push_back(f.phi_at(i, 0));
  for (std::size_t j = 0; j < ny; ++j) gp.boundary_y.push_back(f.phi_at(0, j));
  gp.a = [p = b.pair](double x) { return speed_from_eta_x(p, x); };
  gp.b = [p = b.pair](double y) { return speed_from_eta_y(p, y); };
  const std::vector<double> phi = goursat_solve(gp);
  double dphi = 0.0;
  for (std::size_t k = 0; k < phi.size(); ++k) dphi = std::max(dphi, std::abs(phi[k] - f.phi[k]));

  const DirectFrameResult d = direct_frame_solve(f.phi, f.grid.xs, f.grid.ys, f.a, f.b, 1.0, f.base_i, f.base_j);
  const Mat2 c0 = f.u(f.base_i, f.base_j).evaluate(1.0);
  double dframe = 0.0;
  for (std::size_t k = 0; k < d.U.size(); ++k) dframe = std::max(dframe, (c0 * d.U[k] - f.U[k].evaluate(1.0)).norm());

  rep.add("oracle_goursat_phi_difference", dphi);
  rep.add("oracle_direct_frame_difference", dframe);
  rep.add("oracle_direct_path_residual", d.path_residual);
  return dphi <= c.tol.oracle_phi && dframe <= c.tol.oracle_frames;
}

bool suite_symmetry(const RunConfig& c, const BuiltProblem& b, const FrameGrid& f,
                    const std::vector<SurfaceGrid>& surfaces, Report& rep) {
  if (!b.symmetry) throw ConfigError("symmetry.gamma: the symmetry suite needs a gamma (e.g. amsler3)");
  CertificationThresholds th;
  th.equivariance = c.tol.equivariance;
  th.monodromy_spread = c.tol.monodromy_spread;
  th.surface_residual = c.tol.surface_residual;
  const CertificationReport cr = certify_with_frames(b.pair, *b.symmetry, f, b.options, th);
  rep.append(cr.key_values());

  const auto unit = std::find_if(surfaces.begin(), surfaces.end(), [](const SurfaceGrid& s) { return s.lambda == 1.0; });
  const SurfaceGrid s1 = unit != surfaces.end() ? *unit : sym_immersion(f, 1.0);
  const ConePointCheck cone = check_cone_point(s1);
  rep.add("cone_point_found", cone.found);
  if (cone.found) {
    rep.add("cone_point_nodes", cone.nodes);
    rep.add("cone_point_spread", cone.spread);
    rep.add("cone_line_max_distance", cone.max_line_distance);
    rep.add("cone_line_threshold", cone.threshold);
    rep.add("cone_line_pass", cone.pass);
  }
  return cr.certified;
}

void describe(const RunConfig& c, const BuiltProblem& b, const std::string& command, Report& rep) {
  rep.add("command", command);
  rep.add("potential", b.description);
  rep.add("kind", c.kind == ConfigKind::Normalized ? "normalized" : c.kind == ConfigKind::Generalized ? "generalized" : "amsler3");
  rep.add("grid_nx", c.nx);
  rep.add("grid_ny", c.ny);
  std::string ls;
  for (double l : c.lambdas) ls += (ls.empty() ? "" : ",") + format_number(l);
  rep.add("lambdas", ls);
  rep.add("trunc", c.trunc);
  rep.add("seed", std::to_string(c.seed));
}

FrameGrid build_frames(const BuiltProblem& b, const CommandOptions& opt) {
  note(opt, "reconstructing frames on " + std::to_string(b.grid.nx()) + " x " + std::to_string(b.grid.ny()) + " nodes");
  FrameGrid f = reconstruct_frames(b.pair, b.grid, b.options);
  note(opt, "max split residual " + format_number(f.max_split_residual) + ", max drift " + format_number(f.max_drift));
  return f;
}

void write_meshes(const RunConfig& c, const CommandOptions& opt, const std::vector<SurfaceGrid>& surfaces) {
  ObjOptions oo;
  oo.drop_degenerate_faces = c.drop_degenerate_faces;
  for (const SurfaceGrid& s : surfaces) {
    const std::string stem = c.prefix + "_" + lambda_tag(s.lambda);
    if (c.write_obj) write_obj(opt.output_dir / (stem + ".obj"), s, oo);
    if (c.write_csv) write_csv(opt.output_dir / (stem + ".csv"), s);
  }
}

std::vector<std::string> with_geometry(std::vector<std::string> v) {
  if (std::find(v.begin(), v.end(), "geometry") == v.end()) v.insert(v.begin(), "geometry");
  return v;
}

}  // namespace

SuiteOutcome run_suites(const RunConfig& c, const BuiltProblem& b, const FrameGrid& f,
                        const std::vector<SurfaceGrid>& surfaces) {
  SuiteOutcome out;
  std::set<std::string> done;
  for (const std::string& name : c.verify) {
    if (!done.insert(name).second) continue;
    bool ok = false;
    if (name == "potential") ok = suite_potential(c, b, out.report);
    else if (name == "birkhoff") ok = suite_birkhoff(c, f, out.report);
    else if (name == "geometry") ok = suite_geometry(c, f, surfaces, out.report);
    else if (name == "oracle") ok = suite_oracle(c, b, f, out.report);
    else if (name == "symmetry") ok = suite_symmetry(c, b, f, surfaces, out.report);
    else throw ConfigError("run.verify: unknown suite '" + name + "'");
    out.report.add(name + "_pass", ok);
    out.pass = out.pass && ok;
  }
  return out;
}

int cmd_build(const RunConfig& c, const CommandOptions& opt) {
  const BuiltProblem b = build_problem(c);
  const FrameGrid f = build_frames(b, opt);
  const std::vector<SurfaceGrid> surfaces = associated_family(f, c.lambdas);
  write_meshes(c, opt, surfaces);

  Report rep;
  describe(c, b, "build", rep);
  RunConfig geo = c;
  geo.verify = with_geometry(c.verify);
  const SuiteOutcome all = run_suites(geo, b, f, surfaces);
  rep.append(all.report.entries());
  bool pass = true;
  for (const std::string& name : c.verify) pass = pass && *all.report.find(name + "_pass") == "true";
  rep.add("verification_pass", pass);
  rep.save(opt.output_dir / "report.txt", opt.output_dir / "report.json");
  note(opt, pass ? "build: pass" : "build: verification failed");
  return pass ? kExitPass : kExitVerificationFailure;
}

int cmd_verify(const RunConfig& c, const CommandOptions& opt) {
  const BuiltProblem b = build_problem(c);
  if (c.verify.empty()) throw ConfigError("run.verify: no suites requested");
  const FrameGrid f = build_frames(b, opt);
  const std::vector<SurfaceGrid> surfaces = associated_family(f, c.lambdas);
  Report rep;
  describe(c, b, "verify", rep);
  const SuiteOutcome out = run_suites(c, b, f, surfaces);
  rep.append(out.report.entries());
  rep.add("verification_pass", out.pass);
  rep.save(opt.output_dir / "verify_report.txt", opt.output_dir / "verify_report.json");
  note(opt, out.pass ? "verify: pass" : "verify: verification failed");
  return out.pass ? kExitPass : kExitVerificationFailure;
}

int cmd_sweep(const RunConfig& c, const CommandOptions& opt) {
  if (c.lambdas.empty()) throw ConfigError("run.lambdas: at least one lambda is required");
  const BuiltProblem b = build_problem(c);
  const FrameGrid f = build_frames(b, opt);
  const std::vector<SurfaceGrid> surfaces = associated_family(f, c.lambdas);
  write_meshes(c, opt, surfaces);

  Report rep;
  describe(c, b, "sweep", rep);
  std::filesystem::create_directories(opt.output_dir);
  std::ofstream table(opt.output_dir / "family.csv", std::ios::binary);
  if (!table) throw Error("cannot open family.csv for writing");
  table << "lambda,max_k_residual,max_speed_x_error,max_speed_y_error,all_degenerate,pass\r\n";
  bool pass = true;
  for (const SurfaceGrid& s : surfaces) {
    const GeometryReport r = geometry_report(s, f);
    const bool ok = geometry_pass(r, c.tol);
    pass = pass && ok;
    table << format_number(s.lambda) << ',' << format_number(r.max_k_residual) << ','
          << format_number(r.max_speed_x_error) << ',' << format_number(r.max_speed_y_error) << ','
          << (r.all_degenerate ? "true" : "false") << ',' << (ok ? "true" : "false") << "\r\n";
    add_geometry(rep, r, lambda_tag(s.lambda) + ".");
    rep.add(lambda_tag(s.lambda) + ".pass", ok);
  }
  rep.add("verification_pass", pass);
  rep.save(opt.output_dir / "sweep_report.txt", opt.output_dir / "sweep_report.json");
  note(opt, pass ? "sweep: pass" : "sweep: verification failed");
  return pass ? kExitPass : kExitVerificationFailure;
}

int run_command(const std::string& command, const std::filesystem::path& config, const CommandOptions& opt) {
  auto fail = [&](int code, const std::string& what) {
    note(opt, "error: " + what);
    return code;
  };
  try {
    RunConfig c = load_config(config);
    if (opt.threads) c.threads = *opt.threads;
    if (opt.trunc) {
      if (*opt.trunc < 2) throw ConfigError("--trunc must be >= 2");
      c.trunc = *opt.trunc;
      c.max_trunc = std::max(c.max_trunc, c.trunc);
    }
    if (opt.seed) c.seed = *opt.seed;
    if (command == "build") return cmd_build(c, opt);
    if (command == "verify") return cmd_verify(c, opt);
    if (command == "sweep") return cmd_sweep(c, opt);
    throw ConfigError("unknown command '" + command + "'");
  } catch (const ConfigError& e) {
    return fail(kExitConfigError, e.what());
  } catch (const FactorizationFailure& e) {
    return fail(kExitNumericalFailure, e.what());
  } catch (const IntegrationDrift& e) {
    return fail(kExitNumericalFailure, e.what());
  } catch (const Error& e) {
    return fail(kExitNumericalFailure, e.what());
  } catch (const std::exception& e) {
    return fail(kExitNumericalFailure, e.what());
  }
}

}  // namespace psurf
