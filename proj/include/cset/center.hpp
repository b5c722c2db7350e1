#pragma once

#include "cset/solver.hpp"

namespace cset {

// A pair of footpoints with parallel tangent planes. sign records whether the
// Euclidean unit normals agree (+1) or oppose (-1).
struct ParallelPair {
  Vec s1, s2;
  Vec x1, x2;
  Vec v;        // common unit normal direction (that of surface 1)
  double sign = 1;
};

struct PairTrace {
  std::vector<ParallelPair> pairs;
  TraceResult raw;
  double sign = 1;  // constant along a branch
  int slice_index = -1;
};

// Point of T*S^{n-1}: direction v plus the Gauss covectors of both footpoints.
// normal_chord is set when the chord through x1, x2 runs along v itself
// (mu1 = mu2), i.e. the chord is a genuine common normal line.
struct ChordImagePoint {
  Vec v;
  Vec mu1, mu2;
  bool normal_chord = false;
};

// [OP] gauss_image: (v, mu) with v the Euclidean unit normal and mu the
// tangential part of the position; the metric plays no role here.
struct GaussImagePoint {
  Vec v;
  Vec mu;
};
GaussImagePoint gauss_image(const ParametricHypersurface& surface, const Vec& s);

// [OP] parallel_pairs: the variety of parallel-tangent-plane footpoint pairs
// of the scene's first two surfaces, traced by continuation (n = 2) or sliced
// (n = 3). Both sign branches are returned. A same-surface scene (for the
// center symmetry set) applies the footpoint separation constraint.
std::vector<PairTrace> parallel_pairs(const Scene& scene);

// Parallel tuples of all l surfaces; used by the weighted center set.
std::vector<PairTrace> parallel_tuples(const Scene& scene,
                                       const std::vector<double>& signs);

// [OP] center_set: midpoints (default weights 1/2, 1/2) or weighted combinations
// y = sum a_i x_i per pair/tuple. Zero weights are rejected.
struct CenterSetResult {
  std::vector<std::vector<Vec>> polylines;  // one per branch
  std::vector<double> signs;
};
CenterSetResult center_set(const Scene& scene,
                           const std::vector<double>& weights = {});

// [OP] normal_chord_set
std::vector<std::vector<ChordImagePoint>> normal_chord_set(
    const std::vector<PairTrace>& pairs);

// [OP] transversality_margin_chords: sigma_min of the row-normalized matrix
// d_{v,s1,s2}(d_{s1,s2} F) for F = <v, gamma_1(s1)> + <v, gamma_2(s2)>, with
// v-columns in sphere tangent coordinates.
double transversality_margin_chords(const ParallelPair& pair,
                                    const ParametricHypersurface& surf1,
                                    const ParametricHypersurface& surf2);

}  // namespace cset
