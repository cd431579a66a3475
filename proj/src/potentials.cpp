#include "psurf/potentials.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "psurf/errors.hpp"
#include "psurf/spline.hpp"
#include "psurf/surface.hpp"

namespace psurf {

namespace {

constexpr double kPi = std::numbers::pi;
const Complex kI{0.0, 1.0};

Mat2 offdiag(Complex upper, Complex lower) {
  Mat2 m;
  m << 0.0, upper, lower, 0.0;
  return m;
}

std::vector<Complex> equivariance_lambdas() {
  std::vector<Complex> l;
  for (int k = 0; k < 16; ++k) l.push_back(std::polar(1.0, 2.0 * kPi * k / 16.0));
  l.emplace_back(0.5);
  l.emplace_back(2.0);
  return l;
}

double loop_distance(const LaurentLoop& a, const LaurentLoop& b, const std::vector<Complex>& lambdas) {
  double r = 0.0;
  for (Complex l : lambdas) r = std::max(r, (a.evaluate(l) - b.evaluate(l)).norm());
  return r;
}

// Up to 33 equispaced samples of the longest run of t in dom with g(t) in dom.
std::vector<double> admissible_samples(const Interval& dom, const AxisMap& g) {
  constexpr int kScan = 2000;
  int best_lo = -1, best_hi = -1, cur_lo = -1;
  for (int k = 0; k <= kScan + 1; ++k) {
    bool ok = false;
    if (k <= kScan) {
      const double t = dom.lo + dom.length() * k / kScan;
      const double v = g.map(t);
      ok = std::isfinite(v) && dom.contains(v, 1e-12);
    }
    if (ok && cur_lo < 0) cur_lo = k;
    if (!ok && cur_lo >= 0) {
      if (k - 1 - cur_lo > best_hi - best_lo) {
        best_lo = cur_lo;
        best_hi = k - 1;
      }
      cur_lo = -1;
    }
  }
  std::vector<double> s;
  if (best_lo < 0) return s;
  const double a = dom.lo + dom.length() * best_lo / kScan;
  const double b = dom.lo + dom.length() * best_hi / kScan;
  if (best_hi == best_lo) return {a};
  for (int k = 0; k < 33; ++k) s.push_back(a + (b - a) * k / 32.0);
  return s;
}

double axis_equivariance(const LoopFunction& eta, const Interval& dom, const AxisMap& g, const Gauge& w,
                         int& count) {
  static const std::vector<Complex> lambdas = equivariance_lambdas();
  const std::vector<double> ts = admissible_samples(dom, g);
  if (ts.empty()) throw DomainError("check_equivariance: axis map leaves the domain everywhere");
  double r = 0.0;
  for (double t : ts) {
    const double d = g.derivative(t);
    if (std::abs(d) < 1e-14) throw DomainError("check_equivariance: axis map derivative vanishes at t = " + fmt_num(t));
    const LaurentLoop lhs = eta(g.map(t)) * Complex(d);
    const LaurentLoop wt = w.q(t);
    const LaurentLoop wi = wt.adjugate();
    const LaurentLoop rhs = wi * eta(t) * wt + wi * w.derivative(t);
    r = std::max(r, loop_distance(lhs, rhs, lambdas));
  }
  count = static_cast<int>(ts.size());
  return r;
}

void check_gauge(const LaurentLoop& q, bool minus, const char* name) {
  if (minus ? q.max_degree() > 0 : q.min_degree() < 0) {
    throw DomainError(std::string("gauge_transform: ") + name + (minus ? " must be Lambda^- valued" : " must be Lambda^+ valued"));
  }
  // Same annulus as the factorization; exp_single_degree is not accurate beyond it.
  const double ls[] = {0.5, 1.0, 2.0};
  if (unitarity_residual(q, ls) > 1e-8) throw DomainError(std::string("gauge_transform: ") + name + " is not unitary");
  if (check_twist(q) > 1e-10) throw DomainError(std::string("gauge_transform: ") + name + " is not twisted");
}

LoopFunction gauged(LoopFunction eta, Gauge q) {
  return [eta = std::move(eta), q = std::move(q)](double t) {
    const LaurentLoop qt = q.q(t);
    const LaurentLoop qi = qt.adjugate();
    return (qi * eta(t) * qt + qi * q.derivative(t)).trimmed(1e-16);
  };
}

// Fourth-order first derivative at index k of equispaced samples v.
template <typename T>
T diff5(const std::vector<T>& v, std::size_t k, double h) {
  const std::size_t n = v.size();
  auto c = [&](std::size_t i) -> const T& { return v[i]; };
  if (k >= 2 && k + 2 < n) return (c(k - 2) * Complex(1.0) - c(k - 1) * Complex(8.0) + c(k + 1) * Complex(8.0) - c(k + 2) * Complex(1.0)) * Complex(1.0 / (12.0 * h));
  if (k == 0) return (c(0) * Complex(-25.0) + c(1) * Complex(48.0) - c(2) * Complex(36.0) + c(3) * Complex(16.0) - c(4) * Complex(3.0)) * Complex(1.0 / (12.0 * h));
  if (k == 1) return (c(0) * Complex(-3.0) - c(1) * Complex(10.0) + c(2) * Complex(18.0) - c(3) * Complex(6.0) + c(4) * Complex(1.0)) * Complex(1.0 / (12.0 * h));
  if (k == n - 1) return (c(n - 1) * Complex(25.0) - c(n - 2) * Complex(48.0) + c(n - 3) * Complex(36.0) - c(n - 4) * Complex(16.0) + c(n - 5) * Complex(3.0)) * Complex(1.0 / (12.0 * h));
  return (c(n - 1) * Complex(3.0) + c(n - 2) * Complex(10.0) - c(n - 3) * Complex(18.0) + c(n - 4) * Complex(6.0) - c(n - 5) * Complex(1.0)) * Complex(1.0 / (12.0 * h));
}

}  // namespace

Gauge Gauge::identity() { return constant(LaurentLoop::identity()); }

Gauge Gauge::constant(const LaurentLoop& c) {
  Gauge g;
  g.q = [c](double) { return c; };
  g.dq = [](double) { return LaurentLoop(); };
  return g;
}

LaurentLoop Gauge::derivative(double t) const {
  if (dq) return dq(t);
  constexpr double h = 1e-5;
  return (q(t + h) - q(t - h)) * Complex(1.0 / (2.0 * h));
}

AxisMap AxisMap::identity() {
  return {[](double t) { return t; }, [](double) { return 1.0; }};
}

LaurentLoop normalized_eta_x(double alpha, double a) {
  return LaurentLoop::monomial(1, offdiag(0.5 * kI * a * std::polar(1.0, -alpha), 0.5 * kI * a * std::polar(1.0, alpha)));
}

LaurentLoop normalized_eta_y(double beta, double b) {
  return LaurentLoop::monomial(-1, offdiag(-0.5 * kI * b * std::polar(1.0, beta), -0.5 * kI * b * std::polar(1.0, -beta)));
}

PotentialPair normalized_from_boundary(const BoundaryAngles& b) {
  if (!b.alpha || !b.beta) throw DomainError("normalized_from_boundary: alpha and beta are required");
  if (std::abs(b.alpha(0.0)) > 1e-12) throw DomainError("normalized_from_boundary: alpha(0) must vanish");
  PotentialPair p;
  p.kind = PotentialKind::Normalized;
  p.domain_x = b.domain_x;
  p.domain_y = b.domain_y;
  p.alpha = b.alpha;
  p.beta = b.beta;
  p.speed_x = b.a;
  p.speed_y = b.b;
  p.eta_x = [al = b.alpha, a = b.a](double x) { return normalized_eta_x(al(x), a ? a(x) : 1.0); };
  p.eta_y = [be = b.beta, bb = b.b](double y) { return normalized_eta_y(be(y), bb ? bb(y) : 1.0); };
  return p;
}

Gauge exponential_gauge(int degree, const Mat2& x, RealFunction theta, RealFunction dtheta) {
  Gauge g;
  g.q = [=](double t) { return exp_single_degree(degree, theta(t) * x); };
  g.dq = [=](double t) {
    return LaurentLoop::monomial(degree, dtheta(t) * x) * exp_single_degree(degree, theta(t) * x);
  };
  return g;
}

PotentialPair gauge_transform(const PotentialPair& p, const Gauge& qx, const Gauge& qy) {
  for (double t : {p.domain_x.lo, 0.5 * (p.domain_x.lo + p.domain_x.hi), p.domain_x.hi}) check_gauge(qx.q(t), true, "qx");
  for (double t : {p.domain_y.lo, 0.5 * (p.domain_y.lo + p.domain_y.hi), p.domain_y.hi}) check_gauge(qy.q(t), false, "qy");
  PotentialPair r;
  r.kind = PotentialKind::Generalized;
  r.domain_x = p.domain_x;
  r.domain_y = p.domain_y;
  r.eta_x = gauged(p.eta_x, qx);
  r.eta_y = gauged(p.eta_y, qy);
  return r;
}

namespace {

// eta_x = U^-1 U_x at the nodes (k, row(k)) and eta_y = U^-1 U_y at (col(k), k).
template <typename Row, typename Col>
PotentialPair extract_restricted(const FrameGrid& f, const char* name, Row row_of, Col col_of) {
  const auto& xs = f.grid.xs;
  const auto& ys = f.grid.ys;
  const std::size_t nx = xs.size(), ny = ys.size();
  if (nx < 5 || ny < 5) throw DomainError(std::string(name) + ": need >= 5 nodes per axis");
  auto uniform = [&](const std::vector<double>& v) {
    const double h = (v.back() - v.front()) / static_cast<double>(v.size() - 1);
    for (std::size_t k = 1; k < v.size(); ++k) {
      if (std::abs(v[k] - v[k - 1] - h) > 1e-9 * h) throw DomainError(std::string(name) + ": grid must be uniform");
    }
    return h;
  };
  const double hx = uniform(xs), hy = uniform(ys);

  std::vector<Eigen::VectorXcd> vx(nx), vy(ny);
  for (std::size_t k = 0; k < nx; ++k) {
    const std::size_t j = row_of(k);
    std::vector<LaurentLoop> row(nx);
    for (std::size_t m = 0; m < nx; ++m) row[m] = f.u(m, j);
    const LaurentLoop ex = (f.u(k, j).adjugate() * diff5(row, k, hx)).truncated(0, 1);
    Eigen::VectorXcd a(4);
    a << ex.coeff(0)(0, 0), ex.coeff(0)(1, 1), ex.coeff(1)(0, 1), ex.coeff(1)(1, 0);
    vx[k] = a;
  }
  for (std::size_t k = 0; k < ny; ++k) {
    const std::size_t i = col_of(k);
    std::vector<LaurentLoop> col(ny);
    for (std::size_t m = 0; m < ny; ++m) col[m] = f.u(i, m);
    const LaurentLoop ey = (f.u(i, k).adjugate() * diff5(col, k, hy)).truncated(-1, 0);
    Eigen::VectorXcd b(4);
    b << ey.coeff(0)(0, 0), ey.coeff(0)(1, 1), ey.coeff(-1)(0, 1), ey.coeff(-1)(1, 0);
    vy[k] = b;
  }
  const CubicSpline sx(xs, vx);
  const CubicSpline sy(ys, vy);
  PotentialPair p;
  p.kind = PotentialKind::Generalized;
  p.domain_x = {xs.front(), xs.back()};
  p.domain_y = {ys.front(), ys.back()};
  p.eta_x = [sx](double t) {
    const Eigen::VectorXcd v = sx(t);
    return LaurentLoop(0, {diag2(v(0), v(1)), offdiag(v(2), v(3))});
  };
  p.eta_y = [sy](double t) {
    const Eigen::VectorXcd v = sy(t);
    return LaurentLoop(-1, {offdiag(v(2), v(3)), diag2(v(0), v(1))});
  };
  return p;
}

}  // namespace

PotentialPair extract_diagonal_potentials(const FrameGrid& f) {
  const auto& xs = f.grid.xs;
  const auto& ys = f.grid.ys;
  if (ys.size() != xs.size()) throw DomainError("extract_diagonal_potentials: grid is not square");
  for (std::size_t k = 0; k < xs.size(); ++k) {
    if (std::abs(xs[k] - ys[k]) > 1e-12) throw DomainError("extract_diagonal_potentials: grid is not square");
  }
  return extract_restricted(f, "extract_diagonal_potentials", [](std::size_t k) { return k; },
                            [](std::size_t k) { return k; });
}

PotentialPair extract_line_potentials(const FrameGrid& f, std::size_t i0, std::size_t j0) {
  if (i0 >= f.nx() || j0 >= f.ny()) throw DomainError("extract_line_potentials: node outside the grid");
  return extract_restricted(f, "extract_line_potentials", [j0](std::size_t) { return j0; },
                            [i0](std::size_t) { return i0; });
}

EquivarianceResidual check_equivariance(const PotentialPair& p, const AxisMap& g1, const AxisMap& g2,
                                        const Gauge& wx, const Gauge& wy) {
  EquivarianceResidual r;
  r.x = axis_equivariance(p.eta_x, p.domain_x, g1, wx, r.samples_x);
  r.y = axis_equivariance(p.eta_y, p.domain_y, g2, wy, r.samples_y);
  return r;
}

Complex cayley(double t) { return Complex(t, -1.0) / Complex(t, 1.0); }

Complex cayley_inverse(Complex w) { return kI * (1.0 + w) / (1.0 - w); }

Complex amsler_p(double t) {
  const Complex w = cayley(t);
  const Complex dw = 2.0 * kI / (Complex(t, 1.0) * Complex(t, 1.0));
  return (2.0 * w - 4.0 * std::pow(w, -5)) * dw;
}

AxisMap cayley_rotation(double angle) {
  const Complex z = std::polar(1.0, angle);
  AxisMap m;
  m.map = [z](double t) {
    const Complex w = z * cayley(t);
    if (std::abs(1.0 - w) < 1e-300) return std::numeric_limits<double>::infinity();
    return cayley_inverse(w).real();
  };
  m.derivative = [z](double t) {
    const Complex w = z * cayley(t);
    const Complex dc = 2.0 * kI / (Complex(t, 1.0) * Complex(t, 1.0));
    return (2.0 * kI / ((1.0 - w) * (1.0 - w)) * z * dc).real();
  };
  return m;
}

AmslerExample generalized_amsler_example(Interval domain) {
  AmslerExample ex;
  auto eta = [](double t) {
    const Complex p = amsler_p(t);
    const Mat2 m = offdiag(p, -std::conj(p));
    return LaurentLoop(-1, {m, Mat2::Zero(), m});
  };
  ex.pair.kind = PotentialKind::Generalized;
  ex.pair.domain_x = domain;
  ex.pair.domain_y = domain;
  ex.pair.eta_x = eta;
  ex.pair.eta_y = eta;
  const LaurentLoop w = LaurentLoop::constant(diag2(std::polar(1.0, kPi / 3), std::polar(1.0, -kPi / 3)));
  ex.wx = Gauge::constant(w);
  ex.wy = Gauge::constant(w);
  ex.gamma1 = cayley_rotation(2.0 * kPi / 3.0);
  ex.gamma2 = ex.gamma1;
  return ex;
}

RealFunction builtin_function(const std::string& name) {
  if (name == "zero") return [](double) { return 0.0; };
  if (name == "one") return [](double) { return 1.0; };
  if (name == "soliton_alpha") return [](double t) { return 4.0 * std::atan(std::exp(t)) - kPi; };
  if (name == "soliton_beta") return [](double t) { return 4.0 * std::atan(std::exp(t)); };
  if (name == "sine") return [](double t) { return 0.5 * std::sin(2.0 * t); };
  if (name == "quadratic") return [](double t) { return 0.4 * t * t; };
  if (name == "cubic") return [](double t) { return t * t * t / 3.0 + 0.2 * t; };
  if (name == "cosine") return [](double t) { return 1.0 + 0.5 * std::cos(t); };
  if (name == "half_pi") return [](double) { return kPi / 2.0; };
  if (name == "gentle_speed") return [](double t) { return 1.0 + 0.25 * std::sin(t); };
  throw DomainError("unknown builtin function '" + name + "'");
}

RealFunction numeric_derivative(RealFunction f, double h) {
  return [f = std::move(f), h](double t) {
    return (f(t - 2 * h) - 8.0 * f(t - h) + 8.0 * f(t + h) - f(t + 2 * h)) / (12.0 * h);
  };
}

std::pair<double, double> potential_invariant_residuals(const PotentialPair& p) {
  static constexpr std::array<double, 5> kLambdas{0.25, 0.5, 1.0, 2.0, 4.0};
  double su2 = 0.0, twist = 0.0;
  for (int k = 0; k < 33; ++k) {
    const double tx = p.domain_x.lo + p.domain_x.length() * k / 32.0;
    const double ty = p.domain_y.lo + p.domain_y.length() * k / 32.0;
    for (const LaurentLoop& e : {p.eta_x(tx), p.eta_y(ty)}) {
      su2 = std::max(su2, su2_algebra_residual(e, kLambdas));
      twist = std::max(twist, check_twist(e));
    }
  }
  return {su2, twist};
}

}  // namespace psurf
