#pragma once

// Truncated matrix Laurent polynomials in the loop parameter lambda, and the
// su(2) <-> R^3 identification used throughout.

#include <complex>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace psurf {

using Complex = std::complex<double>;
using Mat2 = Eigen::Matrix2cd;
using Mat3 = Eigen::Matrix3d;
using Vec3 = Eigen::Vector3d;

inline constexpr double kDefaultTolerance = 1e-10;
inline constexpr double kTrimRelative = 1e-14;

/// sum_k c_k lambda^k for k in [min_degree, max_degree], each c_k a 2x2
/// complex matrix. Immutable value type.
class LaurentLoop {
 public:
  /// Zero loop supported at degree 0.
  LaurentLoop();
  LaurentLoop(int min_degree, std::vector<Mat2> coeffs);

  static LaurentLoop identity();
  static LaurentLoop constant(const Mat2& c);
  static LaurentLoop monomial(int degree, const Mat2& c);

  int min_degree() const noexcept { return min_degree_; }
  int max_degree() const noexcept { return min_degree_ + static_cast<int>(coeffs_.size()) - 1; }
  std::span<const Mat2> coeffs() const noexcept { return coeffs_; }

  /// Coefficient of lambda^k; zero outside the stored range.
  Mat2 coeff(int k) const;

  /// Throws DomainError for lambda == 0 when negative degrees are present.
  Mat2 evaluate(Complex lambda) const;

  /// Drops leading/trailing coefficients with |c_k| radius^|k| below
  /// rel * max_j |c_j| radius^|j|.
  LaurentLoop trimmed(double rel = kTrimRelative, double radius = 1.0) const;
  /// Keeps only degrees in [lo, hi].
  LaurentLoop truncated(int lo, int hi) const;
  /// lambda -> 1/lambda, i.e. c_k -> c_{-k}.
  LaurentLoop reflected() const;
  /// Coefficient-wise transpose.
  LaurentLoop transposed() const;
  /// Coefficient-wise adjugate; the inverse loop when det == 1 identically.
  LaurentLoop adjugate() const;
  /// Largest coefficient Frobenius norm.
  double max_coeff_norm() const;

  LaurentLoop operator+(const LaurentLoop& o) const;
  LaurentLoop operator-(const LaurentLoop& o) const;
  LaurentLoop operator*(Complex s) const;
  LaurentLoop operator*(const Mat2& m) const;
  friend LaurentLoop operator*(const Mat2& m, const LaurentLoop& g);
  friend LaurentLoop operator*(Complex s, const LaurentLoop& g) { return g * s; }

 private:
  int min_degree_;
  std::vector<Mat2> coeffs_;
};

/// Cauchy product of the coefficient sequences.
LaurentLoop multiply(const LaurentLoop& a, const LaurentLoop& b);
inline LaurentLoop operator*(const LaurentLoop& a, const LaurentLoop& b) { return multiply(a, b); }

/// Inverse of a loop that is SU(2)-valued on real lambda. Rejects the input
/// if det g(lambda) deviates from 1 by more than tol at lambda in {1/2, 1, 2}.
LaurentLoop inverse_unitary(const LaurentLoop& g, double tol = 1e-8);

/// Twist residual: max over k of the off-diagonal norm of even c_k and the
/// diagonal norm of odd c_k. Zero iff g(-lambda) = Ad(sigma_3) g(lambda).
double check_twist(const LaurentLoop& g);

/// max over the given real lambdas of max(|g^H g - I|, |det g - 1|).
double unitarity_residual(const LaurentLoop& g, std::span<const double> lambdas);
double unitarity_residual(const LaurentLoop& g);  // lambda in {1/4, 1/2, 1, 2, 4}

/// Residual of X(lambda) lying in su(2) (skew-Hermitian, traceless) at the
/// given real lambdas.
double su2_algebra_residual(const LaurentLoop& x, std::span<const double> lambdas);

/// lambda d/dlambda: c_k -> k c_k.
LaurentLoop log_lambda_derivative(const LaurentLoop& g);

/// The basis matrices identified with i-hat, j-hat, k-hat.
Mat2 su2_basis(int axis);

/// su(2) -> R^3. Throws DomainError if m is not traceless skew-Hermitian
/// within tol (relative to 1 + |m|).
Vec3 su2_to_r3(const Mat2& m, double tol = 1e-8);
Mat2 r3_to_su2(const Vec3& v);

/// Lie bracket [a, b] = ab - ba.
Mat2 bracket(const Mat2& a, const Mat2& b);

/// The rotation v -> su2_to_r3(g r3_to_su2(v) g^-1). Throws DomainError for
/// non-unitary input.
Mat3 adjoint_rotation(const Mat2& g, double tol = 1e-8);

/// One of the two SU(2) lifts of a rotation; adjoint_rotation(lift) == r.
Mat2 su2_lift(const Mat3& r);

/// Rotation angle in [0, pi] of a proper rotation matrix.
double rotation_angle(const Mat3& r);

/// Unit axis of a proper rotation (arbitrary for the identity).
Vec3 rotation_axis(const Mat3& r);

Mat2 diag2(Complex a, Complex b);

/// exp(lambda^degree * x) for traceless x with x^2 = -det(x) I, as a Laurent
/// series truncated once terms fall below tol. Twisted when x is diagonal for
/// even degree and off-diagonal for odd degree; SU(2) on real lambda when x
/// is skew-Hermitian.
LaurentLoop exp_single_degree(int degree, const Mat2& x, double tol = 1e-18);

}  // namespace psurf
