#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Geometry>

#include "psurf/errors.hpp"
#include "psurf/loop.hpp"
#include "support.hpp"

using namespace psurf;
using psurf::testing::kI;

namespace {

LaurentLoop random_loop(std::mt19937_64& rng, int lo, int hi) {
  std::normal_distribution<double> n(0.0, 1.0);
  std::vector<Mat2> c;
  for (int k = lo; k <= hi; ++k) {
    Mat2 m;
    m << Complex(n(rng), n(rng)), Complex(n(rng), n(rng)), Complex(n(rng), n(rng)), Complex(n(rng), n(rng));
    c.push_back(m);
  }
  return LaurentLoop(lo, c);
}

Mat2 naive_eval(const LaurentLoop& g, Complex l) {
  Mat2 s = Mat2::Zero();
  for (int k = g.min_degree(); k <= g.max_degree(); ++k) s += g.coeff(k) * std::pow(l, k);
  return s;
}

}  // namespace

TEST_CASE("multiply agrees with pointwise products") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const LaurentLoop g = random_loop(rng, -8, 5);
    const LaurentLoop h = random_loop(rng, -3, 8);
    const LaurentLoop gh = g * h;
    CHECK(gh.min_degree() == -11);
    CHECK(gh.max_degree() == 13);
    for (double l : {0.5, 1.0, 2.0}) {
      const Mat2 ref = naive_eval(g, l) * naive_eval(h, l);
      CHECK((gh.evaluate(l) - ref).norm() <= 1e-12 * (1.0 + ref.norm()));
    }
    const Complex z = std::polar(1.0, 0.7);
    CHECK((gh.evaluate(z) - naive_eval(g, z) * naive_eval(h, z)).norm() <= 1e-10);
  }
}

TEST_CASE("evaluation at zero") {
  CHECK_THROWS_AS(LaurentLoop::monomial(-1, Mat2::Identity()).evaluate(0.0), DomainError);
  CHECK((LaurentLoop::monomial(2, Mat2::Identity()).evaluate(0.0)).norm() == 0.0);
  CHECK((LaurentLoop::identity().evaluate(0.0) - Mat2::Identity()).norm() == 0.0);
}

TEST_CASE("coefficient access and structural maps") {
  Mat2 a, b;
  a << 1.0, 2.0, 3.0, 4.0;
  b << 0.0, kI, 1.0, 0.0;
  const LaurentLoop g(-1, {a, Mat2::Zero(), b});
  CHECK(g.coeff(-1) == a);
  CHECK(g.coeff(1) == b);
  CHECK(g.coeff(5).norm() == 0.0);
  CHECK(g.reflected().coeff(1) == a);
  CHECK(g.reflected().coeff(-1) == b);
  CHECK(g.transposed().coeff(-1) == a.transpose());
  CHECK(g.truncated(0, 3).min_degree() == 0);
  CHECK(g.truncated(0, 3).coeff(-1).norm() == 0.0);
  const LaurentLoop t = LaurentLoop(-3, {Mat2::Zero() * 1e-30, Mat2::Identity(), Mat2::Identity()}).trimmed();
  CHECK(t.min_degree() == -2);
}

TEST_CASE("inverse_unitary") {
  CHECK((inverse_unitary(LaurentLoop::identity()).evaluate(1.0) - Mat2::Identity()).norm() == 0.0);
  const double th = 0.4;
  const Mat2 d = diag2(std::polar(1.0, th), std::polar(1.0, -th));
  const Mat2 inv = inverse_unitary(LaurentLoop::constant(d)).coeff(0);
  CHECK(std::abs(inv(0, 0) - std::polar(1.0, -th)) < 1e-15);
  CHECK(std::abs(inv(1, 1) - std::polar(1.0, th)) < 1e-15);

  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const LaurentLoop g = testing::random_twisted_unitary(rng);
    const LaurentLoop e = g * inverse_unitary(g) - LaurentLoop::identity();
    CHECK(e.max_coeff_norm() < 1e-10);
  }
  Mat2 bad = Mat2::Identity() * 2.0;
  CHECK_THROWS_AS(inverse_unitary(LaurentLoop::constant(bad)), DomainError);
}

TEST_CASE("twist and unitarity residuals") {
  std::mt19937_64 rng(9);
  const LaurentLoop g = testing::random_twisted_unitary(rng);
  CHECK(check_twist(g) < 1e-15);
  const double ls[] = {0.5, 1.0, 2.0};
  CHECK(unitarity_residual(g, ls) < 1e-12);
  // g(-lambda) = Ad(sigma_3) g(lambda)
  const Mat2 s3 = testing::pauli(3);
  for (double l : {0.5, 1.3}) CHECK((g.evaluate(-l) - s3 * g.evaluate(l) * s3).norm() < 1e-12);
  const LaurentLoop bad = LaurentLoop::monomial(1, Mat2::Identity());
  CHECK(check_twist(bad) > 0.5);
}

TEST_CASE("exp_single_degree against the closed-form series") {
  std::mt19937_64 rng(3);
  for (int d : {-3, -2, -1, 1, 2, 4}) {
    const Mat2 x = testing::random_twisted_su2(d, rng, std::ldexp(1.0, -std::abs(d)));
    const LaurentLoop e = exp_single_degree(d, x);
    const LaurentLoop ref = testing::series_exp(d, x);
    for (double l : {0.5, 1.0, 2.0}) {
      const Mat2 r = ref.evaluate(l);
      CHECK((e.evaluate(l) - r).norm() < 1e-12 * (1.0 + r.norm()));
    }
    CHECK(check_twist(e) < 1e-15);
  }
  // exp(lambda t (i/2) sigma_1) at lambda = 1 is a rotation by t.
  const Mat2 x = 0.5 * kI * testing::pauli(1);
  const Mat2 v = exp_single_degree(1, x * 0.3).evaluate(1.0);
  CHECK(std::abs(v(0, 0) - std::cos(0.15)) < 1e-15);
  CHECK(std::abs(v(0, 1) - kI * std::sin(0.15)) < 1e-15);
}

TEST_CASE("log_lambda_derivative matches a finite difference in log lambda") {
  std::mt19937_64 rng(2);
  const LaurentLoop g = testing::random_twisted_unitary(rng);
  const LaurentLoop dg = log_lambda_derivative(g);
  const double l = 1.3, h = 1e-5;
  const Mat2 fd = (g.evaluate(l * std::exp(h)) - g.evaluate(l * std::exp(-h))) / (2.0 * h);
  CHECK((dg.evaluate(l) - fd).norm() < 1e-7 * (1.0 + fd.norm()));
}

TEST_CASE("su(2) and R^3") {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> n(0.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    const Vec3 v(n(rng), n(rng), n(rng)), w(n(rng), n(rng), n(rng));
    CHECK((su2_to_r3(r3_to_su2(v)) - v).norm() < 1e-14);
    // The identification turns the bracket into the cross product.
    CHECK((su2_to_r3(bracket(r3_to_su2(v), r3_to_su2(w))) - v.cross(w)).norm() < 1e-14 * (1.0 + v.norm() * w.norm()));
  }
  for (int k = 0; k < 3; ++k) CHECK((su2_to_r3(su2_basis(k)) - Vec3::Unit(k)).norm() < 1e-15);
  Mat2 bad = Mat2::Identity();
  CHECK_THROWS_AS(su2_to_r3(bad), DomainError);
}

TEST_CASE("adjoint rotations and lifts") {
  const Mat3 r = Eigen::AngleAxisd(1.1, Vec3(1.0, 2.0, -0.5).normalized()).toRotationMatrix();
  const Mat2 g = su2_lift(r);
  CHECK((adjoint_rotation(g) - r).norm() < 1e-13);
  CHECK((g.adjoint() * g - Mat2::Identity()).norm() < 1e-14);
  CHECK(std::abs(rotation_angle(r) - 1.1) < 1e-13);
  CHECK((rotation_axis(r) - Vec3(1.0, 2.0, -0.5).normalized()).norm() < 1e-13);
  // Ad(exp(t e_k)) rotates by t about the k axis.
  const Mat2 e = exp_single_degree(0, 0.7 * su2_basis(2)).evaluate(1.0);
  CHECK((adjoint_rotation(e) - Eigen::AngleAxisd(0.7, Vec3::UnitZ()).toRotationMatrix()).norm() < 1e-14);
  CHECK_THROWS_AS(adjoint_rotation(Mat2::Identity() * 2.0), DomainError);
}
