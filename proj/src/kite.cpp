#include "cset/kite.hpp"

#include <cmath>

namespace cset {

KitePoint kite_point(const ConflictPoint& point, double condition_limit) {
  const int n = static_cast<int>(point.x.size());
  const int l = static_cast<int>(point.conormals.size());
  if (l != n)
    throw PreconditionError("kite_point requires l = n surfaces");
  Mat A(n, n);
  Vec b(n);
  for (int i = 0; i < n; ++i) {
    A.row(i) = point.conormals[i].transpose();
    b[i] = point.conormals[i].dot(point.x) - point.t;
  }
  Eigen::JacobiSVD<Mat> svd(A, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const double smax = svd.singularValues()(0);
  const double smin = svd.singularValues()(n - 1);
  const double cond = smin > 0 ? smax / smin : std::numeric_limits<double>::infinity();
  if (!(cond < condition_limit))
    throw DegenerateKiteError("tangent planes nearly parallel", cond);
  KitePoint kp;
  kp.y = svd.solve(b);
  kp.condition = cond;
  return kp;
}

std::vector<std::optional<KitePoint>> kite_curve(const ConflictTrace& trace,
                                                 double condition_limit) {
  std::vector<std::optional<KitePoint>> out;
  out.reserve(trace.points.size());
  for (const ConflictPoint& p : trace.points) {
    try {
      out.push_back(kite_point(p, condition_limit));
    } catch (const DegenerateKiteError&) {
      out.push_back(std::nullopt);
    }
  }
  return out;
}

std::vector<std::optional<SphereCovector>> gauss_image_of_lift(
    const ConflictTrace& trace) {
  std::vector<std::optional<SphereCovector>> out;
  out.reserve(trace.points.size());
  for (const ConflictPoint& p : trace.points) {
    const int n = static_cast<int>(p.x.size());
    Vec xibar = Vec::Zero(n + 1);
    for (const Vec& xi : p.conormals) {
      xibar[0] += -1.0;
      xibar.tail(n) += xi;
    }
    const double norm = xibar.norm();
    if (!(norm > 1e-14)) {
      out.push_back(std::nullopt);
      continue;
    }
    Vec xbar(n + 1);
    xbar[0] = p.t;
    xbar.tail(n) = p.x;
    SphereCovector sc;
    sc.v = xibar / norm;
    sc.mu = xbar - xbar.dot(xibar) * xibar / (norm * norm);
    out.push_back(std::move(sc));
  }
  return out;
}

double collinearity_residual(const std::vector<std::optional<KitePoint>>& kite) {
  std::vector<Vec> pts;
  for (const auto& k : kite)
    if (k) pts.push_back(k->y);
  if (pts.size() < 3) return 0.0;
  const int n = static_cast<int>(pts[0].size());
  Vec mean = Vec::Zero(n);
  for (const Vec& p : pts) mean += p;
  mean /= static_cast<double>(pts.size());
  Mat C = Mat::Zero(n, n);
  for (const Vec& p : pts) C += (p - mean) * (p - mean).transpose();
  Eigen::SelfAdjointEigenSolver<Mat> es(C);
  const Vec axis = es.eigenvectors().col(n - 1);
  double worst = 0;
  for (const Vec& p : pts) {
    const Vec d = (p - mean) - axis.dot(p - mean) * axis;
    worst = std::max(worst, d.norm());
  }
  return worst;
}

}  // namespace cset
