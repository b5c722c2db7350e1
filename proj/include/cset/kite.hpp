#pragma once

#include <optional>

#include "cset/conflict.hpp"

namespace cset {

// Intersection point of the footpoint tangent planes attached to a conflict
// point (l = n). Each tangent plane satisfies <x - y, xi_i> = t, the t = const
// section of the lifted-front tangent plane with time component xi_{i,0} = -1.
struct KitePoint {
  Vec y;
  double condition = 0;  // condition number of the n x n tangent-plane system
};

// [OP] kite_point. Throws DegenerateKiteError (carrying the condition number)
// when the spatial conormals are nearly dependent.
KitePoint kite_point(const ConflictPoint& point, double condition_limit = 1e8);

// [OP] kite_curve: per-vertex kite points; degenerate vertices become gaps
// (nullopt) rather than interpolated values.
std::vector<std::optional<KitePoint>> kite_curve(const ConflictTrace& trace,
                                                 double condition_limit = 1e8);

// Point of T*S^n: unit vector v and a covector mu tangent at v.
struct SphereCovector {
  Vec v;
  Vec mu;
};

// [OP] gauss_image_of_lift: Gauss image of the lifted conflict set in
// T*S^n. Per vertex, the fiber sum of the lifted conormals xibar_i = (-1, xi_i)
// is normalized to v, and mu is the tangential part of xbar = (t, x).
std::vector<std::optional<SphereCovector>> gauss_image_of_lift(
    const ConflictTrace& trace);

// Largest distance from the kite points to their best-fit line; the paper's
// sphere scenes make this vanish.
double collinearity_residual(const std::vector<std::optional<KitePoint>>& kite);

}  // namespace cset
