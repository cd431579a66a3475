#pragma once

// Run configuration: a sectioned key = value text format.
//
//   [potential]   kind = normalized | generalized | amsler3
//   [x], [y]      function = builtin:<name> | table:<csv>   (t,value header)
//                 domain = [lo, hi]
//                 speed = builtin:<name> | table:<csv>      (optional)
//   [gauge]       x = <function>, y = <function>            (generalized only)
//   [grid]        nx, ny, x = [lo, hi], y = [lo, hi]
//   [run]         lambdas = [..], verify = [..], threads, seed
//   [birkhoff]    trunc, max_trunc
//   [integration] steps   (maximum RK4 step = axis length / steps)
//   [tolerances]  any key of Tolerances
//   [outputs]     obj, csv, drop_degenerate_faces, prefix
//   [symmetry]    gamma = none | amsler3
//
// '#' and ';' start comments. Table paths are relative to the config file.

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "psurf/potentials.hpp"
#include "psurf/surface.hpp"
#include "psurf/symmetry.hpp"

namespace psurf {

enum class ConfigKind { Normalized, Generalized, Amsler3 };

struct AxisConfig {
  std::string function;   // "builtin:<name>" or "table:<path>"
  std::string speed;      // empty: unit speed
  Interval domain{0.0, 1.0};
  bool has_domain = false;
};

struct Tolerances {
  double twist = 1e-10;
  double unitarity = 1e-12;
  double birkhoff_residual = 1e-10;
  double birkhoff_tail = 1e-8;
  double two_splitting = 1e-8;
  double drift = 1e-6;
  double curvature = 5e-3;
  double speed = 1e-3;
  double sine_gordon = 5e-3;
  double oracle_phi = 1e-5;
  double oracle_frames = 1e-5;
  double equivariance = 1e-6;
  double monodromy_spread = 1e-4;
  double surface_residual = 1e-3;
};

struct RunConfig {
  ConfigKind kind = ConfigKind::Normalized;
  AxisConfig x;
  AxisConfig y;
  std::string gauge_x;   // theta(t) for q_x = exp(lambda^-1 theta X)
  std::string gauge_y;   // theta(t) for q_y = exp(lambda theta X)

  std::size_t nx = 33;
  std::size_t ny = 33;
  Interval grid_x{0.0, 1.0};
  Interval grid_y{0.0, 1.0};
  bool has_grid_x = false;
  bool has_grid_y = false;

  std::vector<double> lambdas{1.0};
  std::vector<std::string> verify;
  unsigned threads = 1;
  unsigned long long seed = 1;

  int trunc = 24;
  int max_trunc = 96;
  int steps = 256;
  Tolerances tol;

  bool write_obj = true;
  bool write_csv = true;
  bool drop_degenerate_faces = false;
  std::string prefix = "surface";

  std::string gamma = "none";
  std::filesystem::path base_dir;   // directory of the config file
};

/// Throws ConfigError with the offending line.
RunConfig parse_config(std::istream& is, const std::filesystem::path& base_dir = {});
RunConfig load_config(const std::filesystem::path& path);

/// "builtin:<name>" or "table:<path>" (cubic spline through the table).
RealFunction resolve_function(const std::string& spec, const std::filesystem::path& base_dir);

/// Two-column t,value table with a header row.
std::pair<std::vector<double>, std::vector<double>> read_table(const std::filesystem::path& path);

struct BuiltProblem {
  PotentialPair pair;
  GridSpec grid;
  ReconstructOptions options;
  std::optional<SymmetryDescriptor> symmetry;
  std::string description;
};

/// Potential pair, grid, reconstruction options (init loops follow the gauge)
/// and the symmetry candidate named by [symmetry] gamma.
BuiltProblem build_problem(const RunConfig& c);

/// The amsler3 symmetry candidate: 2 pi / 3 Cayley-conjugated axis maps and
/// the gauge diag(e^{i pi/3}, e^{-i pi/3}).
SymmetryDescriptor amsler3_symmetry();

}  // namespace psurf
