#pragma once

// Potential pairs (eta_x, eta_y) along the two asymptotic axes, gauges, and the
// built-in catalogue.

#include <functional>
#include <string>
#include <utility>

#include "psurf/loop.hpp"

namespace psurf {

struct FrameGrid;

using RealFunction = std::function<double(double)>;
using LoopFunction = std::function<LaurentLoop(double)>;

struct Interval {
  double lo = 0.0;
  double hi = 1.0;
  bool contains(double t, double slack = 1e-12) const { return t >= lo - slack && t <= hi + slack; }
  double length() const { return hi - lo; }
};

enum class PotentialKind { Normalized, Generalized };

struct PotentialPair {
  LoopFunction eta_x;
  LoopFunction eta_y;
  PotentialKind kind = PotentialKind::Generalized;
  Interval domain_x;
  Interval domain_y;
  // Normalized pairs keep their boundary data; empty otherwise.
  RealFunction alpha;
  RealFunction beta;
  RealFunction speed_x;
  RealFunction speed_y;
};

struct BoundaryAngles {
  RealFunction alpha;
  RealFunction beta;
  RealFunction a;  // empty means 1
  RealFunction b;
  Interval domain_x;
  Interval domain_y;
};

/// A parametrized gauge loop with optional analytic derivative.
struct Gauge {
  LoopFunction q;
  LoopFunction dq;  // empty: central difference with step 1e-5

  static Gauge identity();
  static Gauge constant(const LaurentLoop& c);
  LaurentLoop derivative(double t) const;
};

/// A reparametrization of one axis with its derivative.
struct AxisMap {
  RealFunction map;
  RealFunction derivative;

  static AxisMap identity();
};

/// q(t) = exp(lambda^degree theta(t) x) with x in su(2), twisted for the
/// degree's parity; dq from theta'.
Gauge exponential_gauge(int degree, const Mat2& x, RealFunction theta, RealFunction dtheta);

/// lambda (i/2) a [[0, e^{-i alpha}], [e^{i alpha}, 0]] and
/// -lambda^{-1} (i/2) b [[0, e^{i beta}], [e^{-i beta}, 0]].
PotentialPair normalized_from_boundary(const BoundaryAngles& b);

LaurentLoop normalized_eta_x(double alpha, double a = 1.0);
LaurentLoop normalized_eta_y(double beta, double b = 1.0);

/// eta~ = q^-1 eta q + q^-1 q'. qx must be Lambda^- valued and qy Lambda^+
/// valued, both SU(2) on real lambda.
PotentialPair gauge_transform(const PotentialPair& p, const Gauge& qx, const Gauge& qy);

/// eta_x = U^-1 U_x along y = x and eta_y = U^-1 U_y along x = y, from
/// fourth-order differences on the grid, interpolated by cubic splines.
PotentialPair extract_diagonal_potentials(const FrameGrid& f);

/// eta_x = U^-1 U_x along the row y = y_j0 and eta_y = U^-1 U_y along the
/// column x = x_i0. On these lines the restriction is a gauge of the
/// normalized pair, so rebuilding with init U(x_i0, y_j0) at that node gives
/// the same frame.
PotentialPair extract_line_potentials(const FrameGrid& f, std::size_t i0, std::size_t j0);

struct EquivarianceResidual {
  double x = 0.0;
  double y = 0.0;
  int samples_x = 0;
  int samples_y = 0;
};

/// max over samples of |(eta o gamma) gamma' - (w^-1 eta w + w^-1 w')| per
/// axis. Samples are 33 points of the part of each domain that gamma maps
/// into the domain.
EquivarianceResidual check_equivariance(const PotentialPair& p, const AxisMap& g1, const AxisMap& g2,
                                        const Gauge& wx, const Gauge& wy);

struct AmslerExample {
  PotentialPair pair;
  Gauge wx;
  Gauge wy;
  AxisMap gamma1;
  AxisMap gamma2;
};

Complex cayley(double t);
Complex cayley_inverse(Complex w);
/// p(t) = d/dt (Q(w)/w), Q(w) = w^3 + w^-3, w = cayley(t).
Complex amsler_p(double t);
/// The real map conjugate to rotation by angle on the circle, with derivative.
AxisMap cayley_rotation(double angle);

/// Potentials (lambda + 1/lambda) [[0, p], [-conj p, 0]] on both axes, the
/// gauge diag(e^{i pi/3}, e^{-i pi/3}) and the 2 pi / 3 axis maps. Beyond
/// |t| = 0.8 the corner frames outgrow double precision at lambda = 1/2, 2.
AmslerExample generalized_amsler_example(Interval domain = {-0.8, 0.8});

/// Built-in real functions by name: soliton_alpha, soliton_beta, zero, one,
/// sine, ...; throws DomainError for unknown names.
RealFunction builtin_function(const std::string& name);
/// Derivative of a built-in or sampled function.
RealFunction numeric_derivative(RealFunction f, double h);

/// Samples of the x/y potential in a sampled real-lambda check: max
/// su(2) and twist residuals over 33 parameter values.
std::pair<double, double> potential_invariant_residuals(const PotentialPair& p);

}  // namespace psurf
