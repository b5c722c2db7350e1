#include "cset/scene_io.hpp"

#include <fstream>
#include <set>

#include "json.hpp"

namespace cset {

namespace {

using nlohmann::json;

void require_keys(const json& obj, const std::set<std::string>& allowed,
                  const std::string& where) {
  for (auto it = obj.begin(); it != obj.end(); ++it)
    if (!allowed.count(it.key()))
      throw ValidationError("unknown key '" + it.key() + "' in " + where);
}

double finite_number(const json& v, const std::string& where) {
  if (!v.is_number())
    throw ValidationError("expected a number in " + where);
  const double d = v.get<double>();
  if (!std::isfinite(d))
    throw ValidationError("non-finite number in " + where);
  return d;
}

std::vector<double> number_list(const json& v, const std::string& where) {
  if (!v.is_array()) throw ValidationError("expected an array in " + where);
  std::vector<double> out;
  for (const auto& e : v) out.push_back(finite_number(e, where));
  return out;
}

ContinuationSettings parse_options(const json& o) {
  ContinuationSettings st;
  require_keys(o, {"step_init", "step_min", "step_max", "newton_tol",
                   "newton_max_iter", "margin_floor", "max_points",
                   "density_ambient", "density_time", "density_param",
                   "consume_radius", "separation_fraction", "slice_count"},
               "options");
  if (o.contains("step_init")) st.step_init = finite_number(o["step_init"], "options.step_init");
  if (o.contains("step_min")) st.step_min = finite_number(o["step_min"], "options.step_min");
  if (o.contains("step_max")) st.step_max = finite_number(o["step_max"], "options.step_max");
  if (o.contains("newton_tol")) st.newton_tol = finite_number(o["newton_tol"], "options.newton_tol");
  if (o.contains("newton_max_iter")) st.newton_max_iter = static_cast<int>(finite_number(o["newton_max_iter"], "options.newton_max_iter"));
  if (o.contains("margin_floor")) st.margin_floor = finite_number(o["margin_floor"], "options.margin_floor");
  if (o.contains("max_points")) st.max_points = static_cast<int>(finite_number(o["max_points"], "options.max_points"));
  if (o.contains("density_ambient")) st.density_ambient = static_cast<int>(finite_number(o["density_ambient"], "options.density_ambient"));
  if (o.contains("density_time")) st.density_time = static_cast<int>(finite_number(o["density_time"], "options.density_time"));
  if (o.contains("density_param")) st.density_param = static_cast<int>(finite_number(o["density_param"], "options.density_param"));
  if (o.contains("consume_radius")) st.consume_radius = finite_number(o["consume_radius"], "options.consume_radius");
  if (o.contains("separation_fraction")) st.separation_fraction = finite_number(o["separation_fraction"], "options.separation_fraction");
  if (o.contains("slice_count")) st.slice_count = static_cast<int>(finite_number(o["slice_count"], "options.slice_count"));
  return st;
}

}  // namespace

Scene load_scene_from_string(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("scene JSON parse error: ") + e.what());
  }
  if (!doc.is_object()) throw ValidationError("scene must be a JSON object");
  require_keys(doc, {"ambient_dim", "surfaces", "options"}, "scene");
  if (!doc.contains("ambient_dim") || !doc.contains("surfaces"))
    throw ValidationError("scene requires 'ambient_dim' and 'surfaces'");
  const int n = static_cast<int>(finite_number(doc["ambient_dim"], "ambient_dim"));

  ContinuationSettings st;
  if (doc.contains("options")) st = parse_options(doc["options"]);

  if (!doc["surfaces"].is_array() || doc["surfaces"].empty())
    throw ValidationError("'surfaces' must be a nonempty array");

  std::vector<SceneEntry> entries;
  for (const auto& s : doc["surfaces"]) {
    if (!s.is_object()) throw ValidationError("surface entries must be objects");
    require_keys(s, {"label", "kind", "coefficients", "domain", "periodic",
                     "orientation", "metric"},
                 "surface");
    for (const char* k : {"label", "kind", "coefficients", "domain", "periodic",
                          "orientation", "metric"})
      if (!s.contains(k))
        throw ValidationError(std::string("surface missing key '") + k + "'");
    const std::string label = s["label"].get<std::string>();
    const SurfaceKind kind = surface_kind_from_string(s["kind"].get<std::string>());
    const std::vector<double> coeffs = number_list(s["coefficients"], label + ".coefficients");

    std::vector<Interval> domain;
    if (!s["domain"].is_array())
      throw ValidationError("surface domain must be an array of [lo,hi] pairs");
    for (const auto& iv : s["domain"]) {
      const std::vector<double> pair = number_list(iv, label + ".domain");
      if (pair.size() != 2)
        throw ValidationError("domain intervals must be [lo, hi]");
      domain.push_back({pair[0], pair[1]});
    }
    std::vector<bool> periodic;
    if (!s["periodic"].is_array())
      throw ValidationError("surface periodic must be an array of booleans");
    for (const auto& b : s["periodic"]) {
      if (!b.is_boolean()) throw ValidationError("periodic flags must be booleans");
      periodic.push_back(b.get<bool>());
    }
    const double orientation = finite_number(s["orientation"], label + ".orientation");

    if (!s["metric"].is_object())
      throw ValidationError("surface metric must be an object");
    require_keys(s["metric"], {"Q"}, label + ".metric");
    if (!s["metric"].contains("Q"))
      throw ValidationError("metric requires 'Q'");
    const auto& qj = s["metric"]["Q"];
    if (!qj.is_array()) throw ValidationError("metric.Q must be a matrix");
    Mat Q(qj.size(), qj.size());
    for (size_t r = 0; r < qj.size(); ++r) {
      const std::vector<double> row = number_list(qj[r], label + ".metric.Q");
      if (row.size() != qj.size())
        throw ValidationError("metric.Q must be square");
      for (size_t c = 0; c < row.size(); ++c) Q(r, c) = row[c];
    }

    SceneEntry entry{
        ParametricHypersurface(kind, coeffs, domain, periodic, orientation),
        FinslerMetric(Q), label};
    entries.push_back(std::move(entry));
  }
  return Scene(n, std::move(entries), st);
}

Scene load_scene_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open scene file '" + path + "'");
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  return load_scene_from_string(text);
}

}  // namespace cset
