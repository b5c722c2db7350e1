#pragma once

#include "cset/germ.hpp"
#include "cset/propagation.hpp"
#include "cset/solver.hpp"

namespace cset {

// A solved point of a conflict / symmetry construction: equal critical travel
// time t to all participating surfaces, with per-surface footpoints and unit
// conormals. margin and germs are filled by the classification pass.
struct ConflictPoint {
  Vec x;
  double t = 0;
  std::vector<Vec> footpoints;
  std::vector<Vec> conormals;
  double margin = 0;
  std::vector<GermLabel> germs;
  std::string multigerm;  // e.g. "A1A1", codims sorted descending
};

struct ConflictTrace {
  std::vector<ConflictPoint> points;
  TraceResult raw;        // polyline in solver unknowns
  bool oriented = false;
  int slice_index = -1;   // >= 0 when produced by slicing
};

// Unknown layout of the conflict systems.
//   unoriented: u = [x (n), t, s_1 (n-1), ..., s_l (n-1)]
//   oriented:   u = [t, s_1 (n-1), ..., s_l (n-1)], x = gamma_1 + t v_1
struct ConflictSystem {
  NonlinearSystem system;
  const Scene* scene = nullptr;
  bool oriented = false;
  int n = 0, l = 0;

  int x_offset() const { return oriented ? -1 : 0; }
  int t_offset() const { return oriented ? 0 : n; }
  int s_offset(int i) const { return t_offset() + 1 + i * (n - 1); }

  Vec ambient_position(const Vec& u) const;
  double time(const Vec& u) const { return u[t_offset()]; }
  Vec footpoint(const Vec& u, int i) const {
    return u.segment(s_offset(i), n - 1);
  }
  ConflictPoint decode(const Vec& u) const;
};

// [OP] build_conflict_system. Throws ValidationError for l > n+1 and for
// unoriented scenes with l < 2.
ConflictSystem build_conflict_system(const Scene& scene, bool oriented);

// [OP] conflict_set / oriented_conflict_set: seed, trace (or slice, for
// two-dimensional sets), classify. Traces are deterministic: seeds are sorted
// and consumed in order.
std::vector<ConflictTrace> conflict_set(const Scene& scene, const Box& ambient_box);
std::vector<ConflictTrace> oriented_conflict_set(const Scene& scene,
                                                 const Box& ambient_box);

// [OP] symmetry_set: l = 1 scene; double-critical-footpoint locus of a single
// surface, with a footpoint separation constraint.
std::vector<ConflictTrace> symmetry_set(const Scene& scene, const Box& ambient_box);

// Re-verifies |F_i(x, s_i) - |t|| for a point, independent of the solver path.
double conflict_residual(const Scene& scene, const ConflictPoint& p);

}  // namespace cset
