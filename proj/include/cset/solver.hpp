#pragma once

#include <functional>
#include <optional>
#include <string>

#include "cset/scene.hpp"

namespace cset {

// A smooth system r: R^u -> R^e with analytic jacobian. Residual/jacobian may
// throw DomainError for probes outside the admissible region; the solvers
// treat that as a failed step, not a fatal error.
struct NonlinearSystem {
  int unknown_dim = 0;
  int equation_dim = 0;
  std::function<Vec(const Vec&)> residual;
  std::function<Mat(const Vec&)> jacobian;
};

enum class NewtonStatus { converged, no_convergence, singular_jacobian, out_of_domain };

struct NewtonResult {
  NewtonStatus status = NewtonStatus::no_convergence;
  Vec u;
  double residual_norm = 0;
  int iterations = 0;
  double smallest_singular_value = 0;  // at the final jacobian
  bool ok() const { return status == NewtonStatus::converged; }
};

// Where a trace lives: per-axis periods (0 = not periodic) and an optional
// membership predicate (ambient bounding box, parameter domains, ...).
struct TraceDomain {
  std::vector<double> periods;  // size = unknown_dim, 0 for aperiodic axes
  std::function<bool(const Vec&)> inside;  // defaults to "everywhere"

  double distance(const Vec& a, const Vec& b) const;
};

enum class TraceStop { none, box_exit, closure, max_points, margin_collapse, stall };

struct TraceResult {
  std::vector<Vec> points;
  std::vector<double> margins;  // sigma_min of the row-normalized jacobian
  bool closed = false;
  TraceStop stop_backward = TraceStop::none;
  TraceStop stop_forward = TraceStop::none;
  bool singular_endpoint() const {
    return stop_backward == TraceStop::margin_collapse ||
           stop_forward == TraceStop::margin_collapse;
  }
};

// [OP] newton_refine: damped Newton with a least-squares/minimum-norm step for
// rectangular jacobians. Divergence over 5 consecutive damped steps reports
// no_convergence; a jacobian that damping cannot get past reports
// singular_jacobian with sigma_min attached.
NewtonResult newton_refine(const NonlinearSystem& system, const Vec& guess,
                           const ContinuationSettings& settings);

// [OP] trace_curve: pseudo-arclength predictor-corrector for systems with
// unknown_dim == equation_dim + 1. Both directions from the seed are traced
// and concatenated. Terminates on domain exit, closure, max_points, or margin
// collapse (recorded, not thrown).
TraceResult trace_curve(const NonlinearSystem& system, const Vec& seed,
                        const ContinuationSettings& settings,
                        const TraceDomain& domain);

struct AffineConstraint {
  Vec normal;   // unknown-space covector
  double value; // constraint normal . u = value
};

struct SliceTraces {
  int slice_index = 0;
  AffineConstraint constraint;
  std::vector<TraceResult> traces;
};

// [OP] slice_surface: reduces a 2-dof solution set to a stack of 1-dof slices.
// Empty slices are skipped (reported with an empty trace list).
std::vector<SliceTraces> slice_surface(const NonlinearSystem& system,
                                       const std::vector<AffineConstraint>& slicing,
                                       const Box& seed_box,
                                       const std::vector<int>& density,
                                       const ContinuationSettings& settings,
                                       const TraceDomain& domain);

// [OP] grid_seed: Newton refinement from every node of a rectangular grid.
// Converged solutions are sorted lexicographically and deduplicated at
// distance 10*newton_tol.
std::vector<Vec> grid_seed(const NonlinearSystem& system, const Box& box,
                           const std::vector<int>& density,
                           const ContinuationSettings& settings,
                           const TraceDomain* domain = nullptr);

// [OP] smallest_singular_value
double smallest_singular_value(const Mat& m);

// sigma_min after scaling every row to unit norm (rows that are numerically
// zero are left in place, forcing a zero margin).
double row_normalized_margin(const Mat& m);

// Distance from a point to a polyline (segments, not just vertices).
double distance_to_polyline(const Vec& p, const std::vector<Vec>& polyline);

}  // namespace cset
