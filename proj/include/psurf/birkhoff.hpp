#pragma once

#include "psurf/loop.hpp"

namespace psurf {

struct BirkhoffOptions {
  int trunc = 24;            // initial truncation degree of the solved factor
  int max_trunc = 96;        // adaptive doubling stops here
  double tail_tol = 1e-8;    // norm of the two highest retained degrees
  double residual_tol = 1e-10;  // bound on SplitResult::scaled_residual
};

/// Factors of a Birkhoff splitting. Which factor is star-normalized (lambda^0
/// coefficient = I) depends on the operation that produced it.
struct SplitResult {
  LaurentLoop plus;    // degrees >= 0
  LaurentLoop minus;   // degrees <= 0
  double residual = 0.0;   // max over the sample set of |g - recombined|
  // Same difference at each sample divided by the rounding scale there:
  // max(1, mass(g), mass(left factor) * mass(right factor)), mass = coefficient_mass.
  double scaled_residual = 0.0;
  double tail_norm = 0.0;
  int trunc_used = 0;
};

/// g = plus * minus with plus(0) = I.
SplitResult split_plus_star_minus(const LaurentLoop& g, const BirkhoffOptions& opt = {});

/// g = minus * plus with minus(infinity) = I.
SplitResult split_minus_star_plus(const LaurentLoop& g, const BirkhoffOptions& opt = {});

/// g = plus * minus^{-1} with minus(infinity) = I and plus unnormalized.
SplitResult split_plus_minusfree(const LaurentLoop& g, const BirkhoffOptions& opt = {});

/// 64 equispaced points on |lambda| = 1 plus lambda in {1/2, 2}.
std::span<const Complex> birkhoff_sample_points();

/// max over birkhoff_sample_points of |a(l) - b(l)|.
double sample_distance(const LaurentLoop& a, const LaurentLoop& b);

/// sum_k |c_k| r^|k| (Frobenius norms).
double coefficient_mass(const LaurentLoop& g, double radius);

}  // namespace psurf
