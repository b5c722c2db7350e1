#pragma once

#include "cset/common.hpp"

namespace cset {

// Translation-invariant Finsler metric with quadratic-norm Hamiltonian
// H(xi) = sqrt(xi^T Q xi), Q symmetric positive definite. Front speed in
// direction xi is |grad H|; Hamiltonian trajectories are straight lines
// x(t) = p + t * Q xi / H(xi).
class FinslerMetric {
 public:
  FinslerMetric() = default;
  explicit FinslerMetric(Mat Q);

  static FinslerMetric euclidean(int dim);
  // H = eta * |xi|, i.e. Q = eta^2 I.
  static FinslerMetric scaled_euclidean(int dim, double eta);

  int dim() const { return static_cast<int>(Q_.rows()); }
  const Mat& Q() const { return Q_; }
  const Mat& Qinv() const { return Qinv_; }

  double hamiltonian(const Vec& xi) const;
  // grad H(xi) = Q xi / H(xi); homogeneous of degree 0.
  Vec velocity(const Vec& xi) const;
  // Travel time to cover displacement d along the metric ray: sqrt(d^T Qinv d).
  double travel_time(const Vec& d) const;

 private:
  Mat Q_;
  Mat Qinv_;
};

}  // namespace cset
