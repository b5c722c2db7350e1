#pragma once

#include "cset/scene.hpp"

namespace cset {

// Jet of the travel-time function F(x, s) = sqrt((x-gamma(s))^T Qinv (x-gamma(s)))
// at a fixed ambient point x. higher_s holds the directional derivatives
// F, F', F'', ... along `dir` (for curves, dir is the unit parameter direction).
struct TimeFunctionJet {
  double value = 0;
  Vec grad_s;           // dF/ds, size n-1
  Mat hess_s;           // d2F/ds2, (n-1)x(n-1)
  Vec grad_x;           // dF/dx, size n
  Mat hess_sx;          // d2F/(ds dx), (n-1) x n
  std::vector<double> higher_s;  // directional derivatives, orders 0..K
};

struct FrontSample {
  Vec x;       // gamma(s) + t * velocity
  double t;
  Vec s;
  Vec xi;      // unit conormal used, H(xi) = 1
  double branch;  // orientation sign of the branch
};

struct TimeGraphPoint {
  Vec x;
  double t;
  Vec hessian_eigenvalues;  // spectrum of hess_s, ascending
};

// [OP] travel_time_jet. `order` bounds the directional derivatives in
// higher_s (<= 5). Throws SingularTimeError at x = gamma(s).
TimeFunctionJet travel_time_jet(const ParametricHypersurface& surface,
                                const FinslerMetric& metric, const Vec& x,
                                const Vec& s, int order, const Vec* dir = nullptr);

// [OP] momental_front: flows `samples` uniformly spaced source points for time
// t along their conormal rays. With both_branches, each source point is
// emitted for both orientation signs.
std::vector<FrontSample> momental_front(const ParametricHypersurface& surface,
                                        const FinslerMetric& metric, double t,
                                        int samples, bool both_branches = false);

// [OP] time_graph_point: a point (x, F(x,s)) of the graph of the time
// function; requires s to be a critical footpoint of F(x, .).
TimeGraphPoint time_graph_point(const ParametricHypersurface& surface,
                                const FinslerMetric& metric, const Vec& x,
                                const Vec& s, double tolerance = 1e-6);

}  // namespace cset
