#include "cset/metric.hpp"

#include <cmath>

namespace cset {

FinslerMetric::FinslerMetric(Mat Q) {
  const int n = static_cast<int>(Q.rows());
  if (Q.cols() != n || n < 1)
    throw ValidationError("metric Q must be a square matrix");
  const double scale = Q.cwiseAbs().maxCoeff();
  if (!Q.allFinite()) throw ValidationError("metric Q has non-finite entries");
  if ((Q - Q.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(scale, 1.0))
    throw ValidationError("metric Q must be symmetric");
  Q = 0.5 * (Q + Q.transpose());
  Eigen::SelfAdjointEigenSolver<Mat> es(Q);
  if (es.eigenvalues().minCoeff() <= 0.0)
    throw ValidationError("metric Q must be positive definite");
  Q_ = Q;
  Qinv_ = Q.inverse();
}

FinslerMetric FinslerMetric::euclidean(int dim) {
  return FinslerMetric(Mat::Identity(dim, dim));
}

FinslerMetric FinslerMetric::scaled_euclidean(int dim, double eta) {
  return FinslerMetric(eta * eta * Mat::Identity(dim, dim));
}

double FinslerMetric::hamiltonian(const Vec& xi) const {
  return std::sqrt(xi.dot(Q_ * xi));
}

Vec FinslerMetric::velocity(const Vec& xi) const {
  const double h = hamiltonian(xi);
  if (!(h > 0.0))
    throw DegenerateCovectorError("front_velocity: zero covector");
  return (Q_ * xi) / h;
}

double FinslerMetric::travel_time(const Vec& d) const {
  return std::sqrt(d.dot(Qinv_ * d));
}

}  // namespace cset
