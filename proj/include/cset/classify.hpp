#pragma once

#include "cset/conflict.hpp"

namespace cset {

// [OP] classify_germ_1d: derivatives holds G', G'', ..., up to order 6, of the
// one-parameter time-function germ at a critical footpoint. scale is the local
// length scale in parameter units (curvature radius over speed). Order
// detection compares |G^(m)| scale^m / m! against tol_rel times the largest
// such magnitude; A_k is returned for the first passing order m = k+1.
GermLabel classify_germ_1d(const std::vector<double>& derivatives, double scale,
                           double criticality_tol = 1e-8, double tol_rel = 1e-6);

// [OP] classify_germ_2d: Hessian plus directional cubic/quartic terms along
// the Hessian kernel. corank 0 -> A1, corank 1 -> A2/A3/degenerate,
// corank 2 -> D4 flag (no subclassification).
GermLabel classify_germ_2d(const Mat& hessian, double third_along_kernel,
                           double fourth_along_kernel, double scale,
                           double tol_rel = 1e-6);

// Germ of the travel-time function of one scene entry at footpoint s, seen
// from x (|t| is the travel time there).
GermLabel classify_time_germ(const SceneEntry& entry, const Vec& x, const Vec& s);

// [OP] multigerm_label: per-surface germs plus the combined name (codims
// sorted descending). Sets the exceeds-generic-budget flag when the total
// codimension exceeds n+1.
struct MultigermLabel {
  std::vector<GermLabel> germs;   // in surface order
  std::string name;               // sorted by codimension, descending
  int total_codim = 0;
  bool exceeds_generic_budget = false;
};
MultigermLabel multigerm_label(const ConflictPoint& point, const Scene& scene);
MultigermLabel multigerm_label(const ConflictPoint& point,
                               const std::vector<const SceneEntry*>& entries, int n);

// Second-order data of one travel-time function, the ingredients of the
// maximal-rank criterion rows.
struct PhaseJetBlock {
  Vec grad_s;
  Mat hess_s;
  Mat hess_sx;
  Vec grad_x;
};

// [OP] transversality_margin_conflict: sigma_min of the row-normalized matrix
// of first derivatives (in s, lambda, x) of d_{s,lambda} F for the phase
// function F = sum_i lambda_i (F_i - F_{i+1}). Multipliers are normalized to
// |lambda| = 1.
double transversality_margin_conflict(const ConflictPoint& point, const Scene& scene);
double transversality_margin_conflict(const ConflictPoint& point,
                                      const std::vector<const SceneEntry*>& entries,
                                      int n);
double conflict_margin_from_blocks(const std::vector<PhaseJetBlock>& blocks, int n);

// Labels and margins for every vertex of a trace.
void annotate_conflict_trace(ConflictTrace& trace,
                             const std::vector<const SceneEntry*>& entries, int n);

// [OP] partition_table: admissible codimension tuples (mu_1..mu_l), each >= 1,
// sum <= n+1, sorted descending within a tuple and lexicographically across.
// new_cases lists the tuples with every part >= 2 that saturate the budget
// when padded with 1's to length l (parts equal to 1 only reduce n and l).
struct PartitionTable {
  int n = 0, l = 0;
  std::vector<std::vector<int>> partitions;
  std::vector<std::vector<int>> new_cases;
};
PartitionTable partition_table(int n, int l);

// [OP] nice_dimension_check: N = min(n-l+2, 6); nice iff n-l+2 <= 6.
struct NiceDimension {
  int N = 0;
  bool is_nice = false;
};
NiceDimension nice_dimension_check(int n, int l);

}  // namespace cset
