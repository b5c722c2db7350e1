#include "cset/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "cset/center.hpp"
#include "cset/classify.hpp"
#include "cset/conflict.hpp"
#include "cset/exporters.hpp"
#include "cset/kite.hpp"
#include "cset/scene_io.hpp"

namespace cset {

namespace {

namespace fs = std::filesystem;

Box parse_box(const std::string& text, int dim) {
  std::vector<double> vals;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      vals.push_back(std::stod(item));
    } catch (...) {
      throw ValidationError("cannot parse box value '" + item + "'");
    }
  }
  if (static_cast<int>(vals.size()) != 2 * dim)
    throw ValidationError("box needs " + std::to_string(2 * dim) +
                          " comma-separated values (min,max per axis)");
  Box box;
  for (int i = 0; i < dim; ++i) {
    if (!(vals[2 * i] < vals[2 * i + 1]))
      throw ValidationError("box axis " + std::to_string(i + 1) + " is empty");
    box.axes.push_back({vals[2 * i], vals[2 * i + 1]});
  }
  return box;
}

std::vector<double> parse_weights(const std::string& text) {
  std::vector<double> out;
  if (text.empty()) return out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ','))
    out.push_back(std::stod(item));
  return out;
}

void write_branches(const std::vector<ConflictTrace>& traces, const Scene& scene,
                    int footpoints, const Box& box, const fs::path& dir,
                    const std::string& stem) {
  fs::create_directories(dir);
  const CsvTable t = conflict_traces_to_csv(traces, scene, footpoints);
  export_csv(t, (dir / (stem + ".csv")).string());
  const auto branches = trace_positions(traces);
  if (scene.ambient_dim() == 2)
    export_svg(branches, box, (dir / (stem + ".svg")).string());
  else
    export_obj(branches, (dir / (stem + ".obj")).string());
}

int infer_footpoints(const CsvTable& t, int n) {
  const int extra = static_cast<int>(t.columns.size()) - 3 - n - 2;
  if (extra <= 0 || extra % (n - 1) != 0)
    throw ValidationError("trace CSV does not match the scene dimensions");
  return extra / (n - 1);
}

int run_impl(const std::vector<std::string>& args, std::ostream& out,
             std::ostream& err) {
  CLI::App app{"conflict sets, symmetry sets and kite curves of wavefronts"};
  app.require_subcommand(1);

  std::string scene_path, box_text, out_dir = ".", trace_path, weights_text;
  double front_time = 1.0;
  int front_samples = 256;
  bool both_branches = false;
  int part_n = 0, part_l = 0;
  bool new_cases = false;
  unsigned long long jitter_seed = 0;

  auto add_common = [&](CLI::App* cmd, bool needs_box) {
    cmd->add_option("--scene", scene_path, "scene JSON file")->required();
    auto* b = cmd->add_option("--box", box_text,
                              "ambient box: min,max per axis, comma separated");
    if (needs_box) b->required();
    cmd->add_option("--out", out_dir, "output directory (default .)");
    cmd->add_option("--seed", jitter_seed, "rng seed for grid jitter (0 = none)");
  };

  auto* c_conflict = app.add_subcommand("conflict", "unoriented conflict set");
  add_common(c_conflict, true);
  auto* c_oriented =
      app.add_subcommand("oriented-conflict", "oriented (signed time) conflict set");
  add_common(c_oriented, true);
  auto* c_symmetry = app.add_subcommand("symmetry", "symmetry set of one surface");
  add_common(c_symmetry, true);
  auto* c_center = app.add_subcommand("center", "center set of parallel pairs");
  add_common(c_center, false);
  c_center->add_option("--weights", weights_text, "weights a_i, comma separated");
  auto* c_chords = app.add_subcommand("chords", "normal chord set in T*S^{n-1}");
  add_common(c_chords, false);
  auto* c_kite = app.add_subcommand("kite", "kite curve of a conflict trace (l = n)");
  add_common(c_kite, true);
  auto* c_front = app.add_subcommand("front", "momental front at a fixed time");
  add_common(c_front, false);
  c_front->add_option("--t", front_time, "front time (signed)");
  c_front->add_option("--samples", front_samples, "sample count");
  c_front->add_flag("--both", both_branches, "emit both orientation branches");
  auto* c_classify = app.add_subcommand("classify", "germ labels along a trace");
  add_common(c_classify, false);
  c_classify->add_option("--trace", trace_path, "trace CSV from a previous run")
      ->required();
  auto* c_check = app.add_subcommand("check", "transversality margins along a trace");
  add_common(c_check, false);
  c_check->add_option("--trace", trace_path, "trace CSV from a previous run")
      ->required();
  auto* c_part = app.add_subcommand("partitions", "admissible codimension tuples");
  c_part->add_option("--n", part_n, "ambient dimension")->required();
  c_part->add_option("--l", part_l, "number of surfaces")->required();
  c_part->add_flag("--new-cases", new_cases, "only tuples with every part >= 2");

  std::vector<std::string> argv = args;
  std::reverse(argv.begin(), argv.end());
  try {
    app.parse(argv);
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n";
    return 2;
  }

  if (c_part->parsed()) {
    const PartitionTable t = partition_table(part_n, part_l);
    const auto& list = new_cases ? t.new_cases : t.partitions;
    for (const auto& tuple : list) {
      out << "(";
      for (size_t i = 0; i < tuple.size(); ++i)
        out << (i ? "," : "") << tuple[i];
      out << ")\n";
    }
    return 0;
  }

  Scene scene = load_scene_file(scene_path);
  if (jitter_seed != 0) {
    ContinuationSettings st = scene.options();
    st.jitter_seed = jitter_seed;
    std::vector<SceneEntry> entries = scene.entries();
    scene = Scene(scene.ambient_dim(), std::move(entries), st);
  }
  const fs::path dir(out_dir);

  if (c_front->parsed()) {
    const auto& e = scene.entry(0);
    const auto samples =
        momental_front(e.surface, e.metric, front_time, front_samples, both_branches);
    fs::create_directories(dir);
    export_csv(front_to_csv(samples), (dir / "front.csv").string());
    std::vector<std::vector<Vec>> branches(1);
    for (const auto& fsm : samples) branches[0].push_back(fsm.x);
    if (scene.ambient_dim() == 2) {
      Box b;
      for (int i = 0; i < 2; ++i) {
        double lo = 1e300, hi = -1e300;
        for (const Vec& p : branches[0]) {
          lo = std::min(lo, p[i]);
          hi = std::max(hi, p[i]);
        }
        if (!(hi > lo)) { hi = lo + 1; }
        b.axes.push_back({lo, hi});
      }
      export_svg(branches, b, (dir / "front.svg").string());
    } else {
      export_obj(branches, (dir / "front.obj").string(), true);
    }
    return 0;
  }

  if (c_classify->parsed() || c_check->parsed()) {
    const CsvTable t = read_csv_file(trace_path);
    const int fp = infer_footpoints(t, scene.ambient_dim());
    std::vector<ConflictTrace> traces = conflict_traces_from_csv(t, scene, fp);
    std::vector<const SceneEntry*> entries;
    for (int i = 0; i < fp; ++i)
      entries.push_back(&scene.entry(std::min(i, scene.surface_count() - 1)));
    for (auto& tr : traces) annotate_conflict_trace(tr, entries, scene.ambient_dim());
    fs::create_directories(dir);
    if (c_check->parsed()) {
      CsvTable rep;
      rep.columns = {"branch", "vertex", "margin"};
      for (size_t b = 0; b < traces.size(); ++b)
        for (size_t v = 0; v < traces[b].points.size(); ++v)
          rep.rows.push_back({std::to_string(b), std::to_string(v),
                              format_double(traces[b].points[v].margin)});
      export_csv(rep, (dir / "check.csv").string());
      for (size_t b = 0; b < traces.size(); ++b) {
        std::vector<double> ms;
        for (const auto& p : traces[b].points) ms.push_back(p.margin);
        if (ms.empty()) continue;
        std::sort(ms.begin(), ms.end());
        out << "branch " << b << ": min " << format_double(ms.front())
            << " median " << format_double(ms[ms.size() / 2]) << " max "
            << format_double(ms.back()) << "\n";
      }
    } else {
      export_csv(conflict_traces_to_csv(traces, scene, fp),
                 (dir / "classify.csv").string());
      const NiceDimension nd =
          nice_dimension_check(scene.ambient_dim(), scene.surface_count());
      out << "N = " << nd.N << (nd.is_nice ? " (nice dimensions)\n"
                                           : " (outside nice dimensions)\n");
      std::vector<std::pair<std::string, int>> counts;
      for (const auto& tr : traces)
        for (const auto& p : tr.points) {
          auto it = std::find_if(counts.begin(), counts.end(),
                                 [&](const auto& c) { return c.first == p.multigerm; });
          if (it == counts.end()) counts.push_back({p.multigerm, 1});
          else ++it->second;
        }
      std::sort(counts.begin(), counts.end());
      for (const auto& [name, cnt] : counts)
        out << (name.empty() ? "-" : name) << ": " << cnt << "\n";
    }
    return 0;
  }

  if (c_center->parsed() || c_chords->parsed()) {
    fs::create_directories(dir);
    if (c_center->parsed()) {
      const CenterSetResult r = center_set(scene, parse_weights(weights_text));
      std::vector<std::string> names;
      for (int i = 0; i < scene.ambient_dim(); ++i)
        names.push_back("y" + std::to_string(i + 1));
      export_csv(polylines_to_csv(r.polylines, names),
                 (dir / "center.csv").string());
      if (r.polylines.empty()) {
        err << "center: no parallel-pair branches found\n";
        return 3;
      }
      return 0;
    }
    const auto pairs = parallel_pairs(scene);
    const auto chords = normal_chord_set(pairs);
    CsvTable t;
    const int n = scene.ambient_dim();
    t.columns = {"branch"};
    for (int i = 0; i < n; ++i) t.columns.push_back("v" + std::to_string(i + 1));
    for (int i = 0; i < n; ++i) t.columns.push_back("mu1_" + std::to_string(i + 1));
    for (int i = 0; i < n; ++i) t.columns.push_back("mu2_" + std::to_string(i + 1));
    t.columns.push_back("normal_chord");
    for (size_t b = 0; b < chords.size(); ++b)
      for (const auto& c : chords[b]) {
        std::vector<std::string> row{std::to_string(b)};
        for (int i = 0; i < n; ++i) row.push_back(format_double(c.v[i]));
        for (int i = 0; i < n; ++i) row.push_back(format_double(c.mu1[i]));
        for (int i = 0; i < n; ++i) row.push_back(format_double(c.mu2[i]));
        row.push_back(c.normal_chord ? "1" : "0");
        t.rows.push_back(std::move(row));
      }
    export_csv(t, (dir / "chords.csv").string());
    if (chords.empty()) {
      err << "chords: no parallel-pair branches found\n";
      return 3;
    }
    return 0;
  }

  // set constructions over a box
  const Box box = parse_box(box_text, scene.ambient_dim());
  if (c_conflict->parsed() || c_oriented->parsed() || c_kite->parsed()) {
    const bool oriented = c_oriented->parsed();
    std::vector<ConflictTrace> traces =
        oriented ? oriented_conflict_set(scene, box) : conflict_set(scene, box);
    if (c_kite->parsed()) {
      if (scene.surface_count() != scene.ambient_dim())
        throw ValidationError("kite requires l = n surfaces");
      fs::create_directories(dir);
      double worst_col = 0;
      std::vector<std::vector<Vec>> kite_polys;
      std::vector<std::vector<Vec>> lift_polys;
      for (const auto& tr : traces) {
        const auto kc = kite_curve(tr);
        worst_col = std::max(worst_col, collinearity_residual(kc));
        std::vector<Vec> poly;
        for (const auto& k : kc) {
          if (k) poly.push_back(k->y);
          else if (!poly.empty()) {
            kite_polys.push_back(poly);
            poly.clear();
          }
        }
        if (!poly.empty()) kite_polys.push_back(poly);
        const auto lift = gauss_image_of_lift(tr);
        std::vector<Vec> lp;
        for (const auto& g : lift)
          if (g) {
            Vec row(g->v.size() + g->mu.size());
            row << g->v, g->mu;
            lp.push_back(row);
          }
        if (!lp.empty()) lift_polys.push_back(lp);
      }
      std::vector<std::string> names;
      for (int i = 0; i < scene.ambient_dim(); ++i)
        names.push_back("y" + std::to_string(i + 1));
      CsvTable kt = polylines_to_csv(kite_polys, names);
      std::string text = csv_to_string(kt);
      text += "# collinearity_max_residual " + format_double(worst_col) + "\n";
      std::ofstream kf((dir / "kite.csv").string(), std::ios::binary);
      kf << text;
      std::vector<std::string> lift_names;
      for (int i = 0; i <= scene.ambient_dim(); ++i)
        lift_names.push_back("v" + std::to_string(i));
      for (int i = 0; i <= scene.ambient_dim(); ++i)
        lift_names.push_back("mu" + std::to_string(i));
      export_csv(polylines_to_csv(lift_polys, lift_names),
                 (dir / "kite_lift.csv").string());
      if (traces.empty()) {
        err << "kite: no conflict branches found\n";
        return 3;
      }
      return 0;
    }
    write_branches(traces, scene, scene.surface_count(), box, dir,
                   oriented ? "oriented-conflict" : "conflict");
    if (traces.empty()) {
      err << "conflict: no branches found in the box\n";
      return 3;
    }
    return 0;
  }

  if (c_symmetry->parsed()) {
    std::vector<ConflictTrace> traces = symmetry_set(scene, box);
    write_branches(traces, scene, 2, box, dir, "symmetry");
    if (traces.empty()) {
      err << "symmetry: no branches found in the box\n";
      return 3;
    }
    return 0;
  }

  err << "unknown subcommand\n";
  return 2;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  try {
    return run_impl(args, out, err);
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const SolverError& e) {
    err << "solver error: " << e.what() << "\n";
    return 3;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 3;
  }
}

}  // namespace cset
