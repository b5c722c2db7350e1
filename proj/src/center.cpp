#include "cset/center.hpp"

#include <algorithm>
#include <cmath>

namespace cset {

namespace {

Vec unit_normal(const ParametricHypersurface& surf, const Vec& s) {
  const Jet j = surf.jet(s, 1);
  const Vec m = surf.raw_conormal(j);
  const double n = m.norm();
  if (!(n > 1e-14)) throw ImmersionError("gauss_image: rank-deficient frame");
  return surf.orientation_sign() * m / n;
}

bool same_geometry(const ParametricHypersurface& a, const ParametricHypersurface& b) {
  return a.kind() == b.kind() && a.coefficients() == b.coefficients();
}

// Parallel-tangent system over the footpoints of l surfaces:
// <m_1(s1), d gamma_i / d s_i,a> = 0 for i = 2..l. The raw conormal of the
// first surface stands in for the common normal direction.
NonlinearSystem tuple_system(const std::vector<const ParametricHypersurface*>& surfs) {
  const int l = static_cast<int>(surfs.size());
  const int p = surfs[0]->param_dim();
  NonlinearSystem sys;
  sys.unknown_dim = l * p;
  sys.equation_dim = (l - 1) * p;
  sys.residual = [surfs, l, p](const Vec& u) {
    const Jet j1 = surfs[0]->jet(u.head(p), 2);
    const Vec m = surfs[0]->raw_conormal(j1);
    Vec r((l - 1) * p);
    for (int i = 1; i < l; ++i) {
      const Jet ji = surfs[i]->jet(u.segment(i * p, p), 1);
      for (int a = 0; a < p; ++a) {
        const Vec ta = (p == 1) ? ji.partial(1)
                                : ji.partial(a == 0 ? 1 : 0, a == 0 ? 0 : 1);
        r[(i - 1) * p + a] = m.dot(ta);
      }
    }
    return r;
  };
  sys.jacobian = [surfs, l, p](const Vec& u) {
    const Jet j1 = surfs[0]->jet(u.head(p), 2);
    const Vec m = surfs[0]->raw_conormal(j1);
    std::vector<Vec> dm(p);
    for (int b = 0; b < p; ++b) dm[b] = surfs[0]->raw_conormal_derivative(j1, b);
    Mat J = Mat::Zero((l - 1) * p, l * p);
    for (int i = 1; i < l; ++i) {
      const Jet ji = surfs[i]->jet(u.segment(i * p, p), 2);
      for (int a = 0; a < p; ++a) {
        const int row = (i - 1) * p + a;
        const Vec ta = (p == 1) ? ji.partial(1)
                                : ji.partial(a == 0 ? 1 : 0, a == 0 ? 0 : 1);
        for (int b = 0; b < p; ++b) J(row, b) = dm[b].dot(ta);
        for (int b = 0; b < p; ++b) {
          Vec tab;
          if (p == 1) tab = ji.partial(2);
          else {
            const int du = (a == 0 ? 1 : 0) + (b == 0 ? 1 : 0);
            tab = ji.partial(du, 2 - du);
          }
          J(row, i * p + b) = m.dot(tab);
        }
      }
    }
    return J;
  };
  return sys;
}

ParallelPair decode_pair(const std::vector<const ParametricHypersurface*>& surfs,
                         const Vec& u) {
  const int p = surfs[0]->param_dim();
  ParallelPair pr;
  pr.s1 = surfs[0]->clamp_to_domain(u.head(p));
  pr.s2 = surfs[1]->clamp_to_domain(u.segment(p, p));
  pr.x1 = surfs[0]->jet(pr.s1, 0).position();
  pr.x2 = surfs[1]->jet(pr.s2, 0).position();
  pr.v = unit_normal(*surfs[0], pr.s1);
  const Vec n2 = unit_normal(*surfs[1], pr.s2);
  pr.sign = pr.v.dot(n2) >= 0 ? 1.0 : -1.0;
  return pr;
}

std::vector<PairTrace> trace_tuples(const std::vector<const ParametricHypersurface*>& surfs,
                                    const ContinuationSettings& st, bool self_pair) {
  const int l = static_cast<int>(surfs.size());
  const int p = surfs[0]->param_dim();
  NonlinearSystem sys = tuple_system(surfs);

  double sep = 0;
  if (self_pair)
    sep = st.separation_fraction * surfs[0]->domain()[0].length();

  TraceDomain dom;
  dom.periods.assign(l * p, 0.0);
  for (int i = 0; i < l; ++i)
    for (int a = 0; a < p; ++a)
      if (surfs[i]->periodic()[a])
        dom.periods[i * p + a] = surfs[i]->domain()[a].length();
  const std::vector<double> periods = dom.periods;
  dom.inside = [surfs, l, p, sep, periods](const Vec& u) {
    for (int i = 0; i < l; ++i)
      if (!surfs[i]->in_domain(u.segment(i * p, p))) return false;
    if (sep > 0) {
      double d = 0;
      for (int a = 0; a < p; ++a) {
        double dd = u[a] - u[p + a];
        if (periods[a] > 0) dd -= periods[a] * std::round(dd / periods[a]);
        d += dd * dd;
      }
      if (std::sqrt(d) < sep) return false;
    }
    return true;
  };

  Box sbox;
  std::vector<int> dens;
  for (int i = 0; i < l; ++i)
    for (int a = 0; a < p; ++a) {
      sbox.axes.push_back(surfs[i]->domain()[a]);
      dens.push_back(p == 1 ? 25 : 9);
    }
  std::vector<Vec> seeds = grid_seed(sys, sbox, dens, st, &dom);
  std::vector<PairTrace> out;
  for (const Vec& seed : seeds) {
    if (!dom.inside(seed)) continue;
    bool consumed = false;
    for (const auto& tr : out) {
      for (const Vec& q : tr.raw.points) {
        if (dom.distance(seed, q) < st.consume_radius) consumed = true;
        if (self_pair && l == 2) {
          Vec sw(seed.size());
          sw.head(p) = seed.segment(p, p);
          sw.segment(p, p) = seed.head(p);
          if (dom.distance(sw, q) < st.consume_radius) consumed = true;
        }
        if (consumed) break;
      }
      if (consumed) break;
    }
    if (consumed) continue;

    PairTrace pt;
    try {
      pt.raw = trace_curve(sys, seed, st, dom);
    } catch (const PreconditionError&) {
      continue;
    }
    for (const Vec& u : pt.raw.points)
      pt.pairs.push_back(decode_pair(surfs, u));
    if (!pt.pairs.empty()) pt.sign = pt.pairs.front().sign;
    out.push_back(std::move(pt));
  }
  return out;
}

std::vector<PairTrace> sliced_pairs(const std::vector<const ParametricHypersurface*>& surfs,
                                    const ContinuationSettings& st) {
  // n = 3: pair variety has dimension 2; slice along the first parameter of
  // the first surface.
  NonlinearSystem sys = tuple_system(surfs);
  const int p = surfs[0]->param_dim();
  const int l = static_cast<int>(surfs.size());

  TraceDomain dom;
  dom.periods.assign(l * p, 0.0);
  for (int i = 0; i < l; ++i)
    for (int a = 0; a < p; ++a)
      if (surfs[i]->periodic()[a])
        dom.periods[i * p + a] = surfs[i]->domain()[a].length();
  dom.inside = [surfs, l, p](const Vec& u) {
    for (int i = 0; i < l; ++i)
      if (!surfs[i]->in_domain(u.segment(i * p, p))) return false;
    return true;
  };

  Box sbox;
  std::vector<int> dens;
  for (int i = 0; i < l; ++i)
    for (int a = 0; a < p; ++a) {
      sbox.axes.push_back(surfs[i]->domain()[a]);
      dens.push_back(5);
    }
  std::vector<AffineConstraint> cuts;
  const Interval& iv = surfs[0]->domain()[0];
  for (int k = 0; k < st.slice_count; ++k) {
    AffineConstraint c;
    c.normal = Vec::Zero(l * p);
    c.normal[0] = 1.0;
    c.value = iv.lo + iv.length() * (k + 1) / (st.slice_count + 1);
    cuts.push_back(c);
  }
  std::vector<SliceTraces> slices = slice_surface(sys, cuts, sbox, dens, st, dom);
  std::vector<PairTrace> out;
  for (const auto& sl : slices)
    for (const auto& tr : sl.traces) {
      PairTrace pt;
      pt.raw = tr;
      pt.slice_index = sl.slice_index;
      for (const Vec& u : tr.points) pt.pairs.push_back(decode_pair(surfs, u));
      if (!pt.pairs.empty()) pt.sign = pt.pairs.front().sign;
      out.push_back(std::move(pt));
    }
  return out;
}

}  // namespace

GaussImagePoint gauss_image(const ParametricHypersurface& surface, const Vec& s) {
  GaussImagePoint g;
  g.v = unit_normal(surface, s);
  const Vec x = surface.jet(s, 0).position();
  g.mu = x - x.dot(g.v) * g.v;
  return g;
}

std::vector<PairTrace> parallel_pairs(const Scene& scene) {
  if (scene.surface_count() < 2)
    throw ValidationError("parallel_pairs needs two surfaces");
  std::vector<const ParametricHypersurface*> surfs{&scene.entry(0).surface,
                                                   &scene.entry(1).surface};
  const bool self = same_geometry(*surfs[0], *surfs[1]);
  if (scene.ambient_dim() == 3) return sliced_pairs(surfs, scene.options());
  return trace_tuples(surfs, scene.options(), self);
}

std::vector<PairTrace> parallel_tuples(const Scene& scene,
                                       const std::vector<double>& signs) {
  const int l = scene.surface_count();
  if (static_cast<int>(signs.size()) != l)
    throw ValidationError("parallel_tuples: one sign per surface required");
  std::vector<const ParametricHypersurface*> surfs;
  for (int i = 0; i < l; ++i) surfs.push_back(&scene.entry(i).surface);
  const bool self = l == 2 && same_geometry(*surfs[0], *surfs[1]);
  std::vector<PairTrace> all =
      scene.ambient_dim() == 3 ? sliced_pairs(surfs, scene.options())
                               : trace_tuples(surfs, scene.options(), self);
  // keep branches whose per-surface normal alignment matches the sign pattern
  std::vector<PairTrace> out;
  for (auto& tr : all) {
    if (tr.raw.points.empty()) continue;
    const Vec& u = tr.raw.points[tr.raw.points.size() / 2];
    const int p = surfs[0]->param_dim();
    const Vec n1 = unit_normal(*surfs[0], u.head(p));
    bool match = true;
    for (int i = 1; i < l && match; ++i) {
      const Vec ni = unit_normal(*surfs[i], u.segment(i * p, p));
      const double si = n1.dot(ni) >= 0 ? 1.0 : -1.0;
      if (si * signs[0] * signs[i] < 0) match = false;
    }
    if (match) out.push_back(std::move(tr));
  }
  return out;
}

CenterSetResult center_set(const Scene& scene, const std::vector<double>& weights) {
  std::vector<double> w = weights;
  const int l = scene.surface_count();
  if (l == 1) {
    // center symmetry set of a single surface: pair it against itself with
    // opposite normals and the separation constraint
    std::vector<SceneEntry> doubled{scene.entry(0), scene.entry(0)};
    doubled[1].label += "#2";
    Scene pair(scene.ambient_dim(), std::move(doubled), scene.options());
    CenterSetResult r = center_set(pair, w);
    return r;
  }
  if (w.empty()) w.assign(l, 1.0 / 2);
  if (static_cast<int>(w.size()) != l)
    throw ValidationError("center_set: need one weight per surface");
  for (double wi : w)
    if (wi == 0.0) throw ValidationError("center_set: weights must be nonzero");

  std::vector<PairTrace> tuples;
  if (l == 2) {
    tuples = parallel_pairs(scene);
  } else {
    std::vector<double> signs;
    for (double wi : w) signs.push_back(wi > 0 ? 1.0 : -1.0);
    tuples = parallel_tuples(scene, signs);
  }

  CenterSetResult out;
  const int p = scene.entry(0).surface.param_dim();
  for (const auto& tr : tuples) {
    std::vector<Vec> poly;
    for (size_t k = 0; k < tr.raw.points.size(); ++k) {
      const Vec& u = tr.raw.points[k];
      Vec y = Vec::Zero(scene.ambient_dim());
      for (int i = 0; i < l; ++i) {
        const Vec xi =
            scene.entry(i).surface.jet(u.segment(i * p, p), 0).position();
        y += w[i] * xi;
      }
      poly.push_back(y);
    }
    out.polylines.push_back(std::move(poly));
    out.signs.push_back(tr.sign);
  }
  return out;
}

std::vector<std::vector<ChordImagePoint>> normal_chord_set(
    const std::vector<PairTrace>& pairs) {
  std::vector<std::vector<ChordImagePoint>> out;
  for (const auto& tr : pairs) {
    std::vector<ChordImagePoint> branch;
    for (const ParallelPair& pr : tr.pairs) {
      ChordImagePoint c;
      c.v = pr.v;
      c.mu1 = pr.x1 - pr.x1.dot(pr.v) * pr.v;
      c.mu2 = pr.x2 - pr.x2.dot(pr.v) * pr.v;
      const double scale = 1.0 + std::max(c.mu1.norm(), c.mu2.norm());
      c.normal_chord = (c.mu1 - c.mu2).norm() < 1e-9 * scale;
      branch.push_back(std::move(c));
    }
    out.push_back(std::move(branch));
  }
  return out;
}

double transversality_margin_chords(const ParallelPair& pair,
                                    const ParametricHypersurface& surf1,
                                    const ParametricHypersurface& surf2) {
  const int n = surf1.ambient_dim();
  const int p = surf1.param_dim();
  const Vec& v = pair.v;
  // orthonormal tangent basis of the sphere at v
  std::vector<Vec> tau;
  if (n == 2) {
    Vec t(2);
    t << -v[1], v[0];
    tau.push_back(t);
  } else {
    Vec a = std::abs(v[0]) < 0.9 ? Vec(Eigen::Vector3d::UnitX())
                                 : Vec(Eigen::Vector3d::UnitY());
    Vec t1 = a - a.dot(v) * v;
    t1.normalize();
    Vec t2(3);
    t2 << v[1] * t1[2] - v[2] * t1[1], v[2] * t1[0] - v[0] * t1[2],
        v[0] * t1[1] - v[1] * t1[0];
    tau.push_back(t1);
    tau.push_back(t2);
  }

  Mat M = Mat::Zero(2 * p, (n - 1) + 2 * p);
  const ParametricHypersurface* surfs[2] = {&surf1, &surf2};
  const Vec* params[2] = {&pair.s1, &pair.s2};
  for (int i = 0; i < 2; ++i) {
    const Jet j = surfs[i]->jet(*params[i], 2);
    for (int a = 0; a < p; ++a) {
      const int row = i * p + a;
      const Vec ta = (p == 1) ? j.partial(1)
                              : j.partial(a == 0 ? 1 : 0, a == 0 ? 0 : 1);
      for (int b = 0; b < n - 1; ++b) M(row, b) = tau[b].dot(ta);
      for (int b = 0; b < p; ++b) {
        Vec tab;
        if (p == 1) tab = j.partial(2);
        else {
          const int du = (a == 0 ? 1 : 0) + (b == 0 ? 1 : 0);
          tab = j.partial(du, 2 - du);
        }
        M(row, (n - 1) + i * p + b) = v.dot(tab);
      }
    }
  }
  return row_normalized_margin(M);
}

}  // namespace cset
