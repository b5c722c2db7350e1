#include "cset/exporters.hpp"

#include <fstream>
#include <sstream>

namespace cset {

namespace {

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write file '" + path + "'");
  out << text;
}

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace

std::string csv_to_string(const CsvTable& table) {
  std::string out;
  for (size_t i = 0; i < table.columns.size(); ++i) {
    if (i) out += ',';
    out += table.columns[i];
  }
  out += '\n';
  for (const auto& row : table.rows) {
    for (size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      out += row[i];
    }
    out += '\n';
  }
  return out;
}

void export_csv(const CsvTable& table, const std::string& path) {
  write_text(path, csv_to_string(table));
}

CsvTable read_csv_string(const std::string& text) {
  CsvTable t;
  std::istringstream in(text);
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    if (header) {
      t.columns = split_line(line);
      header = false;
    } else {
      t.rows.push_back(split_line(line));
    }
  }
  return t;
}

CsvTable read_csv_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open CSV file '" + path + "'");
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  return read_csv_string(text);
}

CsvTable conflict_traces_to_csv(const std::vector<ConflictTrace>& traces,
                                const Scene& scene, int footpoint_count) {
  const int n = scene.ambient_dim();
  CsvTable t;
  t.columns = {"branch", "slice", "t"};
  for (int i = 0; i < n; ++i) t.columns.push_back("x" + std::to_string(i + 1));
  for (int i = 0; i < footpoint_count; ++i)
    for (int a = 0; a < n - 1; ++a)
      t.columns.push_back("s" + std::to_string(i + 1) +
                          (n - 1 > 1 ? "_" + std::to_string(a + 1) : ""));
  t.columns.push_back("margin");
  t.columns.push_back("germ");

  for (size_t b = 0; b < traces.size(); ++b) {
    for (const ConflictPoint& p : traces[b].points) {
      std::vector<std::string> row;
      row.push_back(std::to_string(b));
      row.push_back(std::to_string(traces[b].slice_index));
      row.push_back(format_double(p.t));
      for (int i = 0; i < n; ++i) row.push_back(format_double(p.x[i]));
      for (int i = 0; i < footpoint_count; ++i)
        for (int a = 0; a < n - 1; ++a)
          row.push_back(format_double(p.footpoints[i][a]));
      row.push_back(format_double(p.margin));
      row.push_back(p.multigerm.empty() ? "-" : p.multigerm);
      t.rows.push_back(std::move(row));
    }
  }
  return t;
}

std::vector<ConflictTrace> conflict_traces_from_csv(const CsvTable& table,
                                                    const Scene& scene,
                                                    int footpoint_count) {
  const int n = scene.ambient_dim();
  const size_t expected = 3 + n + footpoint_count * (n - 1) + 2;
  if (table.columns.size() != expected)
    throw ValidationError("trace CSV has unexpected column count");
  std::vector<ConflictTrace> out;
  for (const auto& row : table.rows) {
    if (row.size() != expected)
      throw ValidationError("trace CSV row has unexpected cell count");
    const size_t branch = std::stoul(row[0]);
    while (out.size() <= branch) out.emplace_back();
    ConflictPoint p;
    out[branch].slice_index = std::stoi(row[1]);
    p.t = std::stod(row[2]);
    p.x = Vec(n);
    for (int i = 0; i < n; ++i) p.x[i] = std::stod(row[3 + i]);
    for (int i = 0; i < footpoint_count; ++i) {
      Vec s(n - 1);
      for (int a = 0; a < n - 1; ++a)
        s[a] = std::stod(row[3 + n + i * (n - 1) + a]);
      p.footpoints.push_back(s);
    }
    p.margin = std::stod(row[expected - 2]);
    p.multigerm = row[expected - 1] == "-" ? "" : row[expected - 1];
    // conormals along the recomputed critical rays
    for (int i = 0; i < footpoint_count; ++i) {
      const SceneEntry& e = scene.entry(std::min(i, scene.surface_count() - 1));
      const Vec d = p.x - e.surface.jet(p.footpoints[i], 0).position();
      const double ti = e.metric.travel_time(d);
      p.conormals.push_back(ti > 1e-14 ? Vec(e.metric.Qinv() * d / ti)
                                       : Vec(Vec::Zero(n)));
    }
    out[branch].points.push_back(std::move(p));
  }
  return out;
}

CsvTable front_to_csv(const std::vector<FrontSample>& samples) {
  if (samples.empty()) {
    CsvTable t;
    t.columns = {"t", "s", "x1", "x2", "xi1", "xi2"};
    return t;
  }
  const int n = static_cast<int>(samples[0].x.size());
  const int p = static_cast<int>(samples[0].s.size());
  CsvTable t;
  t.columns = {"t"};
  for (int a = 0; a < p; ++a)
    t.columns.push_back(p > 1 ? "s" + std::to_string(a + 1) : "s");
  for (int i = 0; i < n; ++i) t.columns.push_back("x" + std::to_string(i + 1));
  for (int i = 0; i < n; ++i) t.columns.push_back("xi" + std::to_string(i + 1));
  t.columns.push_back("branch");
  for (const FrontSample& fs : samples) {
    std::vector<std::string> row;
    row.push_back(format_double(fs.t));
    for (int a = 0; a < p; ++a) row.push_back(format_double(fs.s[a]));
    for (int i = 0; i < n; ++i) row.push_back(format_double(fs.x[i]));
    for (int i = 0; i < n; ++i) row.push_back(format_double(fs.xi[i]));
    row.push_back(format_double(fs.branch));
    t.rows.push_back(std::move(row));
  }
  return t;
}

CsvTable polylines_to_csv(const std::vector<std::vector<Vec>>& polylines,
                          const std::vector<std::string>& coord_names) {
  CsvTable t;
  t.columns = {"branch"};
  for (const auto& c : coord_names) t.columns.push_back(c);
  for (size_t b = 0; b < polylines.size(); ++b)
    for (const Vec& p : polylines[b]) {
      std::vector<std::string> row;
      row.push_back(std::to_string(b));
      for (int i = 0; i < p.size(); ++i) row.push_back(format_double(p[i]));
      t.rows.push_back(std::move(row));
    }
  return t;
}

void export_svg(const std::vector<std::vector<Vec>>& branches, const Box& box,
                const std::string& path) {
  for (const auto& br : branches)
    for (const Vec& p : br)
      if (p.size() != 2)
        throw ValidationError("export_svg requires 2-dimensional data");
  const double w = box.axes[0].length();
  const double h = box.axes[1].length();
  const double pad = 0.05 * std::max(w, h);
  // y axis flipped into SVG screen coordinates
  std::ostringstream out;
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\""
      << format_double(box.axes[0].lo - pad) << " "
      << format_double(-(box.axes[1].hi + pad)) << " "
      << format_double(w + 2 * pad) << " " << format_double(h + 2 * pad)
      << "\" width=\"800\" height=\""
      << format_double(800.0 * (h + 2 * pad) / (w + 2 * pad)) << "\">\n";
  const double stroke = 0.004 * std::max(w, h);
  for (const auto& br : branches) {
    if (br.empty()) continue;
    out << "<path fill=\"none\" stroke=\"black\" stroke-width=\""
        << format_double(stroke) << "\" d=\"";
    for (size_t i = 0; i < br.size(); ++i) {
      out << (i == 0 ? "M " : " L ") << format_double(br[i][0]) << " "
          << format_double(-br[i][1]);
    }
    out << "\"/>\n";
  }
  out << "</svg>\n";
  write_text(path, out.str());
}

void export_obj(const std::vector<std::vector<Vec>>& branches,
                const std::string& path, bool points_only) {
  for (const auto& br : branches)
    for (const Vec& p : br)
      if (p.size() != 3)
        throw ValidationError("export_obj requires 3-dimensional data");
  std::ostringstream out;
  out << "# wavefront geometry export\n";
  int base = 1;
  for (const auto& br : branches) {
    for (const Vec& p : br)
      out << "v " << format_double(p[0]) << " " << format_double(p[1]) << " "
          << format_double(p[2]) << "\n";
    if (points_only || br.size() == 1) {
      for (size_t i = 0; i < br.size(); ++i) out << "p " << (base + i) << "\n";
    } else {
      for (size_t i = 0; i + 1 < br.size(); ++i)
        out << "l " << (base + i) << " " << (base + i + 1) << "\n";
    }
    base += static_cast<int>(br.size());
  }
  write_text(path, out.str());
}

std::vector<std::vector<Vec>> trace_positions(const std::vector<ConflictTrace>& traces) {
  std::vector<std::vector<Vec>> out;
  for (const auto& tr : traces) {
    std::vector<Vec> br;
    for (const auto& p : tr.points) br.push_back(p.x);
    out.push_back(std::move(br));
  }
  return out;
}

}  // namespace cset
