#include "cset/conflict.hpp"

#include <algorithm>
#include <cmath>

#include "cset/classify.hpp"

namespace cset {

namespace {

// Oriented ray data at a footpoint: conormal, velocity, and their s-derivatives.
struct OrientedRay {
  Vec gamma;
  Vec xi;      // oriented unit conormal, H(xi) = 1
  Vec v;       // Q xi
  Mat dgamma;  // n x (n-1)
  Mat dv;      // n x (n-1)
};

OrientedRay oriented_ray(const SceneEntry& e, const Vec& s) {
  const int n = e.surface.ambient_dim();
  const int p = e.surface.param_dim();
  const Jet j = e.surface.jet(s, 2);
  const Vec m = e.surface.raw_conormal(j);
  const Mat& Q = e.metric.Q();
  const double H = std::sqrt(m.dot(Q * m));
  if (!(H > 1e-14))
    throw ImmersionError("degenerate tangent frame along oriented ray");
  const double sigma = e.surface.orientation_sign();

  OrientedRay r;
  r.gamma = j.position();
  r.xi = sigma * m / H;
  r.v = Q * r.xi;
  r.dgamma.resize(n, p);
  r.dv.resize(n, p);
  for (int a = 0; a < p; ++a) {
    const Vec ga = (p == 1) ? j.partial(1)
                            : j.partial(a == 0 ? 1 : 0, a == 0 ? 0 : 1);
    r.dgamma.col(a) = ga;
    const Vec ma = e.surface.raw_conormal_derivative(j, a);
    const double dH = m.dot(Q * ma) / H;
    const Vec dxi = sigma * (ma / H - m * dH / (H * H));
    r.dv.col(a) = Q * dxi;
  }
  return r;
}

}  // namespace

Vec ConflictSystem::ambient_position(const Vec& u) const {
  if (!oriented) return u.head(n);
  const SceneEntry& e0 = scene->entry(0);
  const OrientedRay r = oriented_ray(e0, footpoint(u, 0));
  return r.gamma + time(u) * r.v;
}

ConflictPoint ConflictSystem::decode(const Vec& u) const {
  ConflictPoint p;
  p.t = time(u);
  p.x = ambient_position(u);
  for (int i = 0; i < l; ++i) {
    Vec s = footpoint(u, i);
    const SceneEntry& e = scene->entry(i);
    s = e.surface.clamp_to_domain(s);
    p.footpoints.push_back(s);
    if (oriented) {
      p.conormals.push_back(unit_conormal(e.surface, e.metric, s));
    } else {
      // conormal along the actual critical ray: xi = Qinv d / t
      const Jet j = e.surface.jet(s, 0);
      const Vec d = p.x - j.position();
      const double t = e.metric.travel_time(d);
      if (t > 1e-14)
        p.conormals.push_back((e.metric.Qinv() * d) / t);
      else
        p.conormals.push_back(Vec::Zero(n));
    }
  }
  return p;
}

ConflictSystem build_conflict_system(const Scene& scene, bool oriented) {
  const int n = scene.ambient_dim();
  const int l = scene.surface_count();
  if (l > n + 1)
    throw ValidationError("overdetermined scene: more than n+1 surfaces");
  if (l < 2)
    throw ValidationError("conflict systems need at least two surfaces");

  ConflictSystem cs;
  cs.scene = &scene;
  cs.oriented = oriented;
  cs.n = n;
  cs.l = l;

  const int p = n - 1;
  if (!oriented) {
    cs.system.unknown_dim = n + 1 + l * p;
    cs.system.equation_dim = l + l * p;
    const Scene* sc = &scene;
    cs.system.residual = [sc, n, l, p](const Vec& u) {
      Vec r(l + l * p);
      const Vec x = u.head(n);
      const double t = u[n];
      for (int i = 0; i < l; ++i) {
        const Vec s = u.segment(n + 1 + i * p, p);
        const SceneEntry& e = sc->entry(i);
        const TimeFunctionJet tf = travel_time_jet(e.surface, e.metric, x, s, 1);
        r[i] = t - tf.value;
        r.segment(l + i * p, p) = tf.grad_s;
      }
      return r;
    };
    cs.system.jacobian = [sc, n, l, p](const Vec& u) {
      Mat J = Mat::Zero(l + l * p, n + 1 + l * p);
      const Vec x = u.head(n);
      for (int i = 0; i < l; ++i) {
        const Vec s = u.segment(n + 1 + i * p, p);
        const SceneEntry& e = sc->entry(i);
        const TimeFunctionJet tf = travel_time_jet(e.surface, e.metric, x, s, 2);
        J.block(i, 0, 1, n) = -tf.grad_x.transpose();
        J(i, n) = 1.0;
        J.block(i, n + 1 + i * p, 1, p) = -tf.grad_s.transpose();
        J.block(l + i * p, 0, p, n) = tf.hess_sx;
        J.block(l + i * p, n + 1 + i * p, p, p) = tf.hess_s;
      }
      return J;
    };
  } else {
    cs.system.unknown_dim = 1 + l * p;
    cs.system.equation_dim = (l - 1) * n;
    const Scene* sc = &scene;
    cs.system.residual = [sc, n, l, p](const Vec& u) {
      const double t = u[0];
      const OrientedRay r0 = oriented_ray(sc->entry(0), u.segment(1, p));
      const Vec x0 = r0.gamma + t * r0.v;
      Vec r((l - 1) * n);
      for (int i = 1; i < l; ++i) {
        const OrientedRay ri = oriented_ray(sc->entry(i), u.segment(1 + i * p, p));
        r.segment((i - 1) * n, n) = x0 - (ri.gamma + t * ri.v);
      }
      return r;
    };
    cs.system.jacobian = [sc, n, l, p](const Vec& u) {
      const double t = u[0];
      Mat J = Mat::Zero((l - 1) * n, 1 + l * p);
      const OrientedRay r0 = oriented_ray(sc->entry(0), u.segment(1, p));
      for (int i = 1; i < l; ++i) {
        const OrientedRay ri = oriented_ray(sc->entry(i), u.segment(1 + i * p, p));
        J.block((i - 1) * n, 0, n, 1) = r0.v - ri.v;
        J.block((i - 1) * n, 1, n, p) = r0.dgamma + t * r0.dv;
        J.block((i - 1) * n, 1 + i * p, n, p) = -(ri.dgamma + t * ri.dv);
      }
      return J;
    };
  }
  // dimension bookkeeping: dof must equal n - l + 1
  const int dof = cs.system.unknown_dim - cs.system.equation_dim;
  if (dof != n - l + 1)
    throw SolverError("internal: conflict system dimension bookkeeping broken");
  return cs;
}

namespace {

// ---------------------------------------------------------------------------
// seeding

std::vector<Vec> critical_footpoints(const SceneEntry& e, const Vec& x) {
  std::vector<Vec> out;
  const int p = e.surface.param_dim();
  if (p == 1) {
    const Interval& iv = e.surface.domain()[0];
    const bool per = e.surface.periodic()[0];
    const int N = 64;
    std::vector<double> g(N + 1), sv(N + 1);
    for (int k = 0; k <= N; ++k) {
      sv[k] = iv.lo + iv.length() * k / N;
      Vec s(1);
      s[0] = sv[k];
      try {
        g[k] = travel_time_jet(e.surface, e.metric, x, s, 1).grad_s[0];
      } catch (const SingularTimeError&) {
        g[k] = std::numeric_limits<double>::quiet_NaN();
      }
    }
    const int last = per ? N : N;  // g[N] corresponds to iv.hi (== lo for periodic)
    for (int k = 0; k < last; ++k) {
      if (!std::isfinite(g[k]) || !std::isfinite(g[k + 1])) continue;
      if (g[k] == 0.0 || g[k] * g[k + 1] < 0) {
        double s0 = sv[k], s1 = sv[k + 1];
        double gm0 = g[k];
        // bisection then Newton polish
        for (int it = 0; it < 40; ++it) {
          const double sm = 0.5 * (s0 + s1);
          Vec s(1);
          s[0] = sm;
          double gm;
          try {
            gm = travel_time_jet(e.surface, e.metric, x, s, 1).grad_s[0];
          } catch (const SingularTimeError&) {
            break;
          }
          if (gm == 0.0) { s0 = s1 = sm; break; }
          if (gm * gm0 < 0) s1 = sm;
          else { s0 = sm; gm0 = gm; }
        }
        Vec s(1);
        s[0] = 0.5 * (s0 + s1);
        bool keep = true;
        try {
          for (int it = 0; it < 4; ++it) {
            const TimeFunctionJet tf = travel_time_jet(e.surface, e.metric, x, s, 2);
            if (std::abs(tf.hess_s(0, 0)) < 1e-14) break;
            s[0] -= tf.grad_s[0] / tf.hess_s(0, 0);
          }
          const TimeFunctionJet tf = travel_time_jet(e.surface, e.metric, x, s, 1);
          keep = std::abs(tf.grad_s[0]) < 1e-6 * (1 + std::abs(tf.value));
        } catch (const Error&) {
          keep = false;
        }
        if (keep && e.surface.in_domain(s)) out.push_back(e.surface.clamp_to_domain(s));
      }
    }
  } else {
    const Interval& iu = e.surface.domain()[0];
    const Interval& ivv = e.surface.domain()[1];
    const int N = 16;
    Mat norms(N + 1, N + 1);
    for (int a = 0; a <= N; ++a)
      for (int b = 0; b <= N; ++b) {
        Vec s(2);
        s << iu.lo + iu.length() * a / N, ivv.lo + ivv.length() * b / N;
        try {
          norms(a, b) = travel_time_jet(e.surface, e.metric, x, s, 1).grad_s.norm();
        } catch (const Error&) {
          norms(a, b) = std::numeric_limits<double>::infinity();
        }
      }
    for (int a = 0; a <= N; ++a)
      for (int b = 0; b <= N; ++b) {
        bool locmin = std::isfinite(norms(a, b));
        for (int da = -1; da <= 1 && locmin; ++da)
          for (int db = -1; db <= 1 && locmin; ++db) {
            int aa = a + da, bb = b + db;
            if (aa < 0 || aa > N || bb < 0 || bb > N) continue;
            if (norms(aa, bb) < norms(a, b)) locmin = false;
          }
        if (!locmin) continue;
        Vec s(2);
        s << iu.lo + iu.length() * a / N, ivv.lo + ivv.length() * b / N;
        bool keep = true;
        try {
          for (int it = 0; it < 12; ++it) {
            const TimeFunctionJet tf = travel_time_jet(e.surface, e.metric, x, s, 2);
            const Vec step = tf.hess_s.partialPivLu().solve(tf.grad_s);
            if (!step.allFinite()) break;
            s -= step;
            if (tf.grad_s.norm() < 1e-12) break;
          }
          const TimeFunctionJet tf = travel_time_jet(e.surface, e.metric, x, s, 1);
          keep = tf.grad_s.norm() < 1e-6 * (1 + std::abs(tf.value));
        } catch (const Error&) {
          keep = false;
        }
        if (keep && e.surface.in_domain(s)) {
          const Vec sc = e.surface.clamp_to_domain(s);
          bool dup = false;
          for (const Vec& q : out)
            if ((q - sc).norm() < 1e-6) dup = true;
          if (!dup) out.push_back(sc);
        }
      }
  }
  // dedup 1-param results
  std::sort(out.begin(), out.end(), lex_less);
  std::vector<Vec> ded;
  for (const Vec& s : out) {
    bool dup = false;
    for (const Vec& q : ded)
      if ((q - s).norm() < 1e-6) dup = true;
    if (!dup) ded.push_back(s);
  }
  return ded;
}

// Signed time along the oriented ray through footpoint s hitting x:
// t = <xi_oriented, x - gamma> (exact when x lies on the ray, H(xi) = 1).
double signed_time(const SceneEntry& e, const Vec& x, const Vec& s) {
  const Jet j = e.surface.jet(s, 1);
  const Vec xi = unit_conormal(e.surface, e.metric, s);
  return xi.dot(x - j.position());
}

std::vector<Vec> structured_seeds(const ConflictSystem& cs, const Box& box,
                                  const ContinuationSettings& st,
                                  const std::optional<double>& pin_time) {
  const Scene& scene = *cs.scene;
  const int n = cs.n, l = cs.l, p = n - 1;
  std::vector<Vec> nodes;
  std::vector<int> idx(n, 0);
  const int D = std::max(3, st.density_ambient - 2);
  while (true) {
    Vec x(n);
    for (int i = 0; i < n; ++i)
      x[i] = box.axes[i].lo + box.axes[i].length() * (idx[i] + 0.5) / D;
    nodes.push_back(x);
    int ax = n - 1;
    while (ax >= 0) {
      if (++idx[ax] < D) break;
      idx[ax] = 0;
      --ax;
    }
    if (ax < 0) break;
  }

  std::vector<Vec> seeds;
  for (const Vec& x : nodes) {
    std::vector<std::vector<Vec>> crits(l);
    bool any_empty = false;
    for (int i = 0; i < l; ++i) {
      crits[i] = critical_footpoints(scene.entry(i), x);
      if (crits[i].empty()) any_empty = true;
    }
    if (any_empty) continue;
    std::vector<int> pick(l, 0);
    while (true) {
      Vec u(cs.system.unknown_dim);
      double tmean = 0;
      bool good = true;
      for (int i = 0; i < l; ++i) {
        const Vec& s = crits[i][pick[i]];
        u.segment(cs.s_offset(i), p) = s;
        double ti;
        try {
          if (cs.oriented)
            ti = signed_time(scene.entry(i), x, s);
          else
            ti = travel_time_jet(scene.entry(i).surface, scene.entry(i).metric, x, s, 0)
                     .value;
        } catch (const Error&) {
          good = false;
          break;
        }
        tmean += ti;
      }
      if (good) {
        tmean /= l;
        if (pin_time) tmean = *pin_time;
        u[cs.t_offset()] = tmean;
        if (!cs.oriented) u.head(n) = x;
        seeds.push_back(u);
      }
      int ax2 = l - 1;
      while (ax2 >= 0) {
        if (++pick[ax2] < static_cast<int>(crits[ax2].size())) break;
        pick[ax2] = 0;
        --ax2;
      }
      if (ax2 < 0) break;
    }
  }
  std::sort(seeds.begin(), seeds.end(), lex_less);
  return seeds;
}

TraceDomain make_domain(const ConflictSystem& cs, const Box& box, double t_max,
                        double min_separation) {
  const Scene& scene = *cs.scene;
  const int n = cs.n, l = cs.l, p = n - 1;
  TraceDomain dom;
  dom.periods.assign(cs.system.unknown_dim, 0.0);
  for (int i = 0; i < l; ++i)
    for (int a = 0; a < p; ++a)
      if (scene.entry(i).surface.periodic()[a])
        dom.periods[cs.s_offset(i) + a] = scene.entry(i).surface.domain()[a].length();

  const ConflictSystem* pcs = &cs;
  dom.inside = [pcs, box, t_max, min_separation, n, l, p](const Vec& u) {
    const Scene& sc = *pcs->scene;
    if (std::abs(pcs->time(u)) > t_max) return false;
    for (int i = 0; i < l; ++i) {
      const Vec s = pcs->footpoint(u, i);
      if (!sc.entry(i).surface.in_domain(s)) return false;
    }
    if (min_separation > 0 && l == 2) {
      // footpoint separation for symmetry-type systems (same surface twice)
      const Vec s1 = pcs->footpoint(u, 0);
      const Vec s2 = pcs->footpoint(u, 1);
      double d = 0;
      for (int a = 0; a < p; ++a) {
        double dd = s1[a] - s2[a];
        const auto& surf = sc.entry(0).surface;
        if (surf.periodic()[a]) {
          const double T = surf.domain()[a].length();
          dd = dd - T * std::round(dd / T);
        }
        d += dd * dd;
      }
      if (std::sqrt(d) < min_separation) return false;
    }
    Vec x;
    try {
      x = pcs->ambient_position(u);
    } catch (const Error&) {
      return false;
    }
    return box.contains(x);
  };
  return dom;
}

double estimate_t_max(const Scene& scene, const Box& box) {
  // generous bound on any travel time between the box and the surfaces
  double far = box.diameter();
  Vec center(box.dim());
  for (int i = 0; i < box.dim(); ++i) center[i] = box.axes[i].mid();
  double qscale = 1.0;
  for (const auto& e : scene.entries()) {
    Eigen::SelfAdjointEigenSolver<Mat> es(e.metric.Qinv());
    qscale = std::max(qscale, std::sqrt(es.eigenvalues().maxCoeff()));
    const int p = e.surface.param_dim();
    const int N = p == 1 ? 32 : 8;
    std::vector<int> idx(p, 0);
    while (true) {
      Vec s(p);
      for (int a = 0; a < p; ++a)
        s[a] = e.surface.domain()[a].lo + e.surface.domain()[a].length() * idx[a] / N;
      far = std::max(far, (e.surface.jet(s, 0).position() - center).norm() +
                              0.5 * box.diameter());
      int ax = p - 1;
      while (ax >= 0) {
        if (++idx[ax] <= N) break;
        idx[ax] = 0;
        --ax;
      }
      if (ax < 0) break;
    }
  }
  return 1.5 * qscale * far;
}

// Restrict a non-periodic parameter axis to the values whose surface points
// fall near the ambient box; keeps seed grids useful for lines with huge
// nominal domains.
Interval clip_param_range(const ParametricHypersurface& surf, int axis,
                          const Box& box) {
  Interval iv = surf.domain()[axis];
  if (surf.periodic()[axis]) return iv;
  const int N = 256;
  const double pad = box.diameter();
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  const int p = surf.param_dim();
  for (int k = 0; k <= N; ++k) {
    Vec s(p);
    for (int a = 0; a < p; ++a)
      s[a] = (a == axis) ? iv.lo + iv.length() * k / N : surf.domain()[a].mid();
    const Vec x = surf.jet(s, 0).position();
    bool near = true;
    for (int i = 0; i < box.dim(); ++i)
      if (x[i] < box.axes[i].lo - pad || x[i] > box.axes[i].hi + pad) near = false;
    if (near) {
      lo = std::min(lo, s[axis]);
      hi = std::max(hi, s[axis]);
    }
  }
  if (!(hi > lo)) return iv;
  return {lo, hi};
}

struct SwapMap {
  bool active = false;
  int off1 = 0, off2 = 0, width = 0;
  Vec apply(const Vec& u) const {
    Vec v = u;
    v.segment(off1, width) = u.segment(off2, width);
    v.segment(off2, width) = u.segment(off1, width);
    return v;
  }
};

// Distance from a point to the segment [a, b], with the point first shifted by
// whole periods to the copy nearest a.
double wrapped_segment_distance(const Vec& p, const Vec& a, const Vec& b,
                                const std::vector<double>& periods) {
  Vec q = p;
  for (int i = 0; i < q.size(); ++i)
    if (periods[i] > 0)
      q[i] -= periods[i] * std::round((q[i] - a[i]) / periods[i]);
  const Vec ab = b - a;
  const double len2 = ab.squaredNorm();
  const double t = len2 > 0 ? std::clamp(ab.dot(q - a) / len2, 0.0, 1.0) : 0.0;
  return (q - (a + t * ab)).norm();
}

bool seed_consumed(const Vec& seed, const std::vector<ConflictTrace>& traces,
                   const TraceDomain& dom, double radius, const SwapMap& swap) {
  for (const auto& tr : traces) {
    const auto& pts = tr.raw.points;
    for (size_t k = 0; k < pts.size(); ++k) {
      const Vec& a = pts[k];
      const Vec& b = pts[k + 1 < pts.size() ? k + 1 : k];
      if (wrapped_segment_distance(seed, a, b, dom.periods) < radius) return true;
      if (swap.active &&
          wrapped_segment_distance(swap.apply(seed), a, b, dom.periods) < radius)
        return true;
    }
  }
  return false;
}

std::vector<ConflictTrace> run_conflict(const ConflictSystem& cs, const Box& box,
                                        double min_separation,
                                        const SwapMap& swap) {
  const Scene& scene = *cs.scene;
  const ContinuationSettings& st = scene.options();
  const int n = cs.n, l = cs.l, p = n - 1;
  const int dof = cs.system.unknown_dim - cs.system.equation_dim;
  const double t_max = estimate_t_max(scene, box);
  const TraceDomain dom = make_domain(cs, box, t_max, min_separation);

  // Seeds: full-grid seeding for plane scenes, ambient-grid x critical
  // footpoint combinations for space scenes (the product grid is too large).
  std::vector<Vec> seeds;
  if (n == 2 && dof <= 1) {
    Box sbox;
    std::vector<int> dens;
    if (!cs.oriented) {
      for (int i = 0; i < n; ++i) {
        sbox.axes.push_back(box.axes[i]);
        dens.push_back(st.density_ambient);
      }
      sbox.axes.push_back({0.0, t_max});
      dens.push_back(st.density_time);
    } else {
      sbox.axes.push_back({-t_max, t_max});
      dens.push_back(2 * st.density_time + 1);
    }
    for (int i = 0; i < l; ++i) {
      const auto& surf = scene.entry(i).surface;
      for (int a = 0; a < p; ++a) {
        Interval iv = clip_param_range(surf, a, box);
        if (surf.periodic()[a]) iv.hi -= iv.length() / (2 * st.density_param);
        sbox.axes.push_back(iv);
        dens.push_back(st.density_param);
      }
    }
    seeds = grid_seed(cs.system, sbox, dens, st, &dom);
  } else {
    std::vector<Vec> raw = structured_seeds(cs, box, st, std::nullopt);
    for (const Vec& u : raw) {
      NewtonResult r = newton_refine(cs.system, u, st);
      if (r.ok()) seeds.push_back(r.u);
    }
    std::sort(seeds.begin(), seeds.end(), lex_less);
  }

  // Drop seeds violating the separation constraint or outside the box.
  std::vector<Vec> kept;
  for (const Vec& u : seeds)
    if (dom.inside(u)) kept.push_back(u);

  std::vector<ConflictTrace> traces;
  for (const Vec& seed : kept) {
    if (seed_consumed(seed, traces, dom, st.consume_radius, swap)) continue;
    ConflictTrace tr;
    tr.oriented = cs.oriented;
    if (dof == 0) {
      tr.raw.points.push_back(seed);
      auto J = cs.system.jacobian(seed);
      tr.raw.margins.push_back(row_normalized_margin(J));
    } else {
      try {
        tr.raw = trace_curve(cs.system, seed, st, dom);
      } catch (const PreconditionError&) {
        continue;  // seed degraded between refinement and tracing
      }
    }
    traces.push_back(std::move(tr));
  }

  std::vector<const SceneEntry*> entries;
  for (int i = 0; i < l; ++i) entries.push_back(&scene.entry(i));
  for (auto& tr : traces) {
    for (const Vec& u : tr.raw.points) tr.points.push_back(cs.decode(u));
    annotate_conflict_trace(tr, entries, n);
  }
  return traces;
}

std::vector<ConflictTrace> run_conflict_sliced(const ConflictSystem& cs,
                                               const Box& box) {
  const Scene& scene = *cs.scene;
  const ContinuationSettings& st = scene.options();
  const int n = cs.n, l = cs.l;
  const double t_max = estimate_t_max(scene, box);
  const TraceDomain dom = make_domain(cs, box, t_max, 0.0);

  // Slice axis: last ambient coordinate for unoriented systems, time for
  // oriented ones (where x is not an unknown).
  std::vector<ConflictTrace> out;
  const int count = st.slice_count;
  for (int k = 0; k < count; ++k) {
    AffineConstraint c;
    c.normal = Vec::Zero(cs.system.unknown_dim);
    double level;
    if (!cs.oriented) {
      c.normal[n - 1] = 1.0;
      const Interval& iv = box.axes[n - 1];
      level = iv.lo + iv.length() * (k + 1) / (count + 1);
    } else {
      c.normal[0] = 1.0;
      level = -t_max + 2 * t_max * (k + 1) / (count + 1);
    }
    c.value = level;

    NonlinearSystem sliced;
    sliced.unknown_dim = cs.system.unknown_dim;
    sliced.equation_dim = cs.system.equation_dim + 1;
    const NonlinearSystem base = cs.system;
    sliced.residual = [base, c](const Vec& u) {
      Vec r(base.equation_dim + 1);
      r.head(base.equation_dim) = base.residual(u);
      r[base.equation_dim] = c.normal.dot(u) - c.value;
      return r;
    };
    sliced.jacobian = [base, c](const Vec& u) {
      Mat J(base.equation_dim + 1, base.unknown_dim);
      J.topRows(base.equation_dim) = base.jacobian(u);
      J.bottomRows(1) = c.normal.transpose();
      return J;
    };

    Box slice_box = box;
    if (!cs.oriented) slice_box.axes[n - 1] = {level - 1e-9, level + 1e-9};
    std::vector<Vec> raw = structured_seeds(
        cs, slice_box, st,
        cs.oriented ? std::optional<double>(level) : std::nullopt);
    std::vector<Vec> seeds;
    for (const Vec& u : raw) {
      NewtonResult r = newton_refine(sliced, u, st);
      if (r.ok() && dom.inside(r.u)) seeds.push_back(r.u);
    }
    std::sort(seeds.begin(), seeds.end(), lex_less);

    std::vector<ConflictTrace> slice_traces;
    SwapMap no_swap;
    for (const Vec& seed : seeds) {
      if (seed_consumed(seed, slice_traces, dom, st.consume_radius, no_swap)) continue;
      ConflictTrace tr;
      tr.oriented = cs.oriented;
      tr.slice_index = k;
      try {
        tr.raw = trace_curve(sliced, seed, st, dom);
      } catch (const PreconditionError&) {
        continue;
      }
      slice_traces.push_back(std::move(tr));
    }
    std::vector<const SceneEntry*> entries;
    for (int i = 0; i < l; ++i) entries.push_back(&scene.entry(i));
    for (auto& tr : slice_traces) {
      for (const Vec& u : tr.raw.points) tr.points.push_back(cs.decode(u));
      annotate_conflict_trace(tr, entries, n);
      out.push_back(std::move(tr));
    }
  }
  return out;
}

}  // namespace

std::vector<ConflictTrace> conflict_set(const Scene& scene, const Box& box) {
  ConflictSystem cs = build_conflict_system(scene, false);
  const int dof = cs.system.unknown_dim - cs.system.equation_dim;
  if (dof == 2) return run_conflict_sliced(cs, box);
  if (dof > 2) throw ValidationError("conflict sets of dimension > 2 are not traced");
  return run_conflict(cs, box, 0.0, SwapMap{});
}

std::vector<ConflictTrace> oriented_conflict_set(const Scene& scene, const Box& box) {
  ConflictSystem cs = build_conflict_system(scene, true);
  const int dof = cs.system.unknown_dim - cs.system.equation_dim;
  if (dof == 2) return run_conflict_sliced(cs, box);
  if (dof > 2) throw ValidationError("conflict sets of dimension > 2 are not traced");
  return run_conflict(cs, box, 0.0, SwapMap{});
}

std::vector<ConflictTrace> symmetry_set(const Scene& scene, const Box& box) {
  if (scene.surface_count() != 1)
    throw ValidationError("symmetry_set needs a single-surface scene");
  // Duplicate the surface and solve the two-footpoint system with separation.
  std::vector<SceneEntry> doubled{scene.entry(0), scene.entry(0)};
  doubled[1].label = scene.entry(0).label + "#2";
  Scene pair(scene.ambient_dim(), std::move(doubled), scene.options());

  ConflictSystem cs = build_conflict_system(pair, false);
  const int n = cs.n, p = n - 1;
  double sep = 0;
  for (int a = 0; a < p; ++a)
    sep = std::max(sep, scene.options().separation_fraction *
                            scene.entry(0).surface.domain()[a].length());
  SwapMap swap;
  swap.active = true;
  swap.off1 = cs.s_offset(0);
  swap.off2 = cs.s_offset(1);
  swap.width = p;

  const int dof = cs.system.unknown_dim - cs.system.equation_dim;
  if (dof == 2) return run_conflict_sliced(cs, box);
  // NOTE: `pair` must stay alive while tracing runs.
  return run_conflict(cs, box, sep, swap);
}

double conflict_residual(const Scene& scene, const ConflictPoint& pnt) {
  double worst = 0;
  for (int i = 0; i < static_cast<int>(pnt.footpoints.size()); ++i) {
    const SceneEntry& e = scene.entry(std::min(i, scene.surface_count() - 1));
    const Jet j = e.surface.jet(pnt.footpoints[i], 0);
    const double f = e.metric.travel_time(pnt.x - j.position());
    worst = std::max(worst, std::abs(f - std::abs(pnt.t)));
  }
  return worst;
}

}  // namespace cset
