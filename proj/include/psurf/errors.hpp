#pragma once

#include <cstddef>
#include <stdexcept>
#include <cstdio>
#include <string>

namespace psurf {

// Shortest readable form for messages; std::to_string rounds small values to 0.
inline std::string fmt_num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Precondition violated by an argument (non-unitary input, bad grid, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Birkhoff splitting left the numerically resolvable regime.
class FactorizationFailure : public Error {
 public:
  FactorizationFailure(const std::string& what, double residual, double tail_norm)
      : Error(what), residual_(residual), tail_norm_(tail_norm) {}

  double residual() const noexcept { return residual_; }
  double tail_norm() const noexcept { return tail_norm_; }

  // Set when the failure is re-raised by the grid reconstruction.
  bool has_node() const noexcept { return has_node_; }
  std::size_t node_i() const noexcept { return node_i_; }
  std::size_t node_j() const noexcept { return node_j_; }

  FactorizationFailure at_node(std::size_t i, std::size_t j, double x, double y) const {
    FactorizationFailure f(std::string(what()) + " at node (" + std::to_string(i) + ", " +
                               std::to_string(j) + ") = (" + fmt_num(x) + ", " +
                               fmt_num(y) + ")",
                           residual_, tail_norm_);
    f.has_node_ = true;
    f.node_i_ = i;
    f.node_j_ = j;
    return f;
  }

 private:
  double residual_;
  double tail_norm_;
  bool has_node_ = false;
  std::size_t node_i_ = 0;
  std::size_t node_j_ = 0;
};

/// Unitarity drift of an integrated frame exceeded the threshold.
class IntegrationDrift : public Error {
 public:
  IntegrationDrift(const std::string& what, double drift) : Error(what), drift_(drift) {}
  double drift() const noexcept { return drift_; }

 private:
  double drift_;
};

/// Fixed-point correction of the Goursat scheme did not converge.
class StiffnessError : public Error {
 public:
  using Error::Error;
};

class RegistrationError : public Error {
 public:
  using Error::Error;
};

/// Configuration file problem; carries the offending line when known.
class ConfigError : public Error {
 public:
  ConfigError(const std::string& what, int line = 0)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  int line() const noexcept { return line_; }

 private:
  int line_;
};

}  // namespace psurf
