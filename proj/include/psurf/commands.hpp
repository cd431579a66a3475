#pragma once

// build / verify / sweep drivers behind the psurf executable.

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "psurf/config.hpp"
#include "psurf/export.hpp"

namespace psurf {

enum ExitCode : int {
  kExitPass = 0,
  kExitVerificationFailure = 1,
  kExitConfigError = 2,
  kExitNumericalFailure = 3,
};

struct CommandOptions {
  std::filesystem::path output_dir = ".";
  std::optional<unsigned> threads;
  std::optional<int> trunc;
  std::optional<unsigned long long> seed;
  std::ostream* log = nullptr;   // progress and diagnostics; null for silence
};

struct SuiteOutcome {
  Report report;
  bool pass = true;
};

/// Runs the named suites (potential, birkhoff, geometry, oracle, symmetry) on
/// built frames and their Sym surfaces at c.lambdas.
SuiteOutcome run_suites(const RunConfig& c, const BuiltProblem& b, const FrameGrid& f,
                        const std::vector<SurfaceGrid>& surfaces);

/// Frames, surfaces per lambda, OBJ/CSV per lambda, report.txt/report.json.
int cmd_build(const RunConfig& c, const CommandOptions& opt);
/// As build without meshes; writes verify_report.txt/.json.
int cmd_verify(const RunConfig& c, const CommandOptions& opt);
/// One mesh per lambda plus family.csv (lambda, max |K + 1|, speed errors).
int cmd_sweep(const RunConfig& c, const CommandOptions& opt);

/// Loads the config, applies flag overrides, dispatches, and maps exceptions
/// to exit codes.
int run_command(const std::string& command, const std::filesystem::path& config, const CommandOptions& opt);

}  // namespace psurf
