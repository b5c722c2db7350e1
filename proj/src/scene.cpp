#include "cset/scene.hpp"

#include <set>

namespace cset {

void ContinuationSettings::validate() const {
  if (!(0 < step_min && step_min <= step_init && step_init <= step_max))
    throw ValidationError("require 0 < step_min <= step_init <= step_max");
  if (!(newton_tol > 0)) throw ValidationError("newton_tol must be positive");
  if (newton_max_iter < 1) throw ValidationError("newton_max_iter must be >= 1");
  if (max_points < 2) throw ValidationError("max_points must be >= 2");
  if (density_ambient < 2 || density_param < 2 || density_time < 2)
    throw ValidationError("seed densities must be >= 2");
}

Scene::Scene(int ambient_dim, std::vector<SceneEntry> entries,
             ContinuationSettings options)
    : ambient_dim_(ambient_dim), entries_(std::move(entries)), options_(options) {
  if (ambient_dim_ != 2 && ambient_dim_ != 3)
    throw ValidationError("ambient_dim must be 2 or 3");
  const int l = surface_count();
  if (l < 1 || l > ambient_dim_ + 1)
    throw ValidationError("scene must contain between 1 and n+1 surfaces");
  std::set<std::string> labels;
  for (const auto& e : entries_) {
    if (e.surface.ambient_dim() != ambient_dim_)
      throw ValidationError("surface '" + e.label + "' has wrong ambient dimension");
    if (e.metric.dim() != ambient_dim_)
      throw ValidationError("metric of '" + e.label + "' has wrong dimension");
    if (!labels.insert(e.label).second)
      throw ValidationError("duplicate surface label '" + e.label + "'");
    e.surface.validate_immersion();
    e.surface.validate_periodicity();
  }
  options_.validate();
}

Scene Scene::reordered(const std::vector<int>& perm) const {
  std::vector<SceneEntry> out;
  for (int i : perm) out.push_back(entries_.at(i));
  return Scene(ambient_dim_, std::move(out), options_);
}

}  // namespace cset
