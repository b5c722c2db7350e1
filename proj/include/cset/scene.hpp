#pragma once

#include <memory>
#include <string>
#include <vector>

#include "cset/metric.hpp"
#include "cset/surface.hpp"

namespace cset {

// Settings for Newton refinement and pseudo-arclength continuation, plus the
// seeding densities used by the set constructions. Defaults follow the module
// contracts; scene files can override any of them under "options".
struct ContinuationSettings {
  double step_init = 1e-2;
  double step_min = 1e-6;
  double step_max = 1e-1;
  double newton_tol = 1e-10;
  int newton_max_iter = 25;
  double margin_floor = 1e-8;
  int max_points = 20000;

  // Seed grid densities per axis class.
  int density_ambient = 7;
  int density_time = 5;
  int density_param = 7;
  // Seeds closer than this (full unknown space) to an already traced branch
  // are consumed instead of starting a new trace.
  double consume_radius = 5e-2;
  // Footpoint separation for symmetry/self-center sets, as a fraction of the
  // parameter domain length.
  double separation_fraction = 1e-2;
  // Number of hyperplane slices used for 2-dimensional solution sets.
  int slice_count = 9;
  // Nonzero: deterministic jitter of grid-seed nodes (fraction of a cell).
  unsigned long long jitter_seed = 0;

  void validate() const;
};

struct SceneEntry {
  ParametricHypersurface surface;
  FinslerMetric metric;
  std::string label;
};

// An immutable collection of hypersurfaces with their metrics. All solver
// modules read scenes concurrently; nothing here mutates after construction.
class Scene {
 public:
  Scene(int ambient_dim, std::vector<SceneEntry> entries, ContinuationSettings options);

  int ambient_dim() const { return ambient_dim_; }
  int surface_count() const { return static_cast<int>(entries_.size()); }
  const SceneEntry& entry(int i) const { return entries_.at(i); }
  const std::vector<SceneEntry>& entries() const { return entries_; }
  const ContinuationSettings& options() const { return options_; }

  // Scene with the surface order permuted; used by invariance tests.
  Scene reordered(const std::vector<int>& perm) const;

 private:
  int ambient_dim_;
  std::vector<SceneEntry> entries_;
  ContinuationSettings options_;
};

}  // namespace cset
