#pragma once

#include <vector>

#include <Eigen/Dense>

namespace psurf {

/// Clamped cubic spline through (t_k, v_k) with complex vector values. End
/// slopes are taken from one-sided four-point differences unless supplied.
class CubicSpline {
 public:
  CubicSpline() = default;
  CubicSpline(std::vector<double> t, std::vector<Eigen::VectorXcd> values);

  /// Scalar convenience: real samples stored as one-component vectors.
  static CubicSpline from_real(std::vector<double> t, const std::vector<double>& v);

  Eigen::VectorXcd operator()(double t) const;
  Eigen::VectorXcd derivative(double t) const;
  double real_at(double t) const { return (*this)(t)(0).real(); }
  double real_derivative(double t) const { return derivative(t)(0).real(); }

  double front() const { return t_.front(); }
  double back() const { return t_.back(); }

 private:
  std::size_t segment(double t) const;

  std::vector<double> t_;
  std::vector<Eigen::VectorXcd> v_;
  std::vector<Eigen::VectorXcd> m_;  // first derivatives at knots
};

}  // namespace psurf
