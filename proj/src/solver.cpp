#include "cset/solver.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace cset {

double smallest_singular_value(const Mat& m) {
  if (m.rows() == 0 || m.cols() == 0) return 0.0;
  Eigen::JacobiSVD<Mat> svd(m);
  const auto& sv = svd.singularValues();
  return sv(sv.size() - 1);
}

double row_normalized_margin(const Mat& m) {
  Mat r = m;
  for (int i = 0; i < r.rows(); ++i) {
    const double n = r.row(i).norm();
    if (n > 1e-300) r.row(i) /= n;
  }
  return smallest_singular_value(r);
}

double TraceDomain::distance(const Vec& a, const Vec& b) const {
  double acc = 0;
  for (int i = 0; i < a.size(); ++i) {
    double d = a[i] - b[i];
    if (!periods.empty() && periods[i] > 0) {
      const double T = periods[i];
      d = d - T * std::round(d / T);
    }
    acc += d * d;
  }
  return std::sqrt(acc);
}

namespace {

struct Eval {
  bool ok = false;
  Vec r;
};

Eval try_residual(const NonlinearSystem& sys, const Vec& u) {
  Eval e;
  try {
    e.r = sys.residual(u);
    e.ok = e.r.allFinite();
  } catch (const DomainError&) {
    e.ok = false;
  } catch (const SingularTimeError&) {
    e.ok = false;
  }
  return e;
}

std::optional<Mat> try_jacobian(const NonlinearSystem& sys, const Vec& u) {
  try {
    Mat J = sys.jacobian(u);
    if (!J.allFinite()) return std::nullopt;
    return J;
  } catch (const DomainError&) {
    return std::nullopt;
  } catch (const SingularTimeError&) {
    return std::nullopt;
  }
}

}  // namespace

NewtonResult newton_refine(const NonlinearSystem& system, const Vec& guess,
                           const ContinuationSettings& settings) {
  NewtonResult res;
  res.u = guess;
  if (!guess.allFinite()) throw PreconditionError("newton_refine: non-finite guess");
  if (guess.size() != system.unknown_dim)
    throw PreconditionError("newton_refine: guess has wrong dimension");

  Eval e = try_residual(system, res.u);
  if (!e.ok) {
    res.status = NewtonStatus::out_of_domain;
    return res;
  }
  double rnorm = e.r.norm();
  int growth_streak = 0;

  for (int iter = 0; iter < settings.newton_max_iter; ++iter) {
    res.iterations = iter;
    res.residual_norm = rnorm;
    if (rnorm < settings.newton_tol) {
      res.status = NewtonStatus::converged;
      auto J = try_jacobian(system, res.u);
      res.smallest_singular_value = J ? smallest_singular_value(*J) : 0.0;
      return res;
    }
    auto Jopt = try_jacobian(system, res.u);
    if (!Jopt) {
      res.status = NewtonStatus::out_of_domain;
      return res;
    }
    const Mat& J = *Jopt;
    // Least-squares step for overdetermined systems, minimum-norm step for
    // underdetermined ones; plain solve when square.
    Eigen::CompleteOrthogonalDecomposition<Mat> cod(J);
    const Vec step = cod.solve(e.r);
    if (!step.allFinite() || step.norm() > 1e12 * (1.0 + res.u.norm())) {
      res.status = NewtonStatus::singular_jacobian;
      res.smallest_singular_value = smallest_singular_value(J);
      return res;
    }

    double alpha = 1.0;
    bool improved = false;
    Eval best;
    double best_norm = rnorm;
    while (alpha >= 1.0 / 64) {
      Eval trial = try_residual(system, res.u - alpha * step);
      if (trial.ok && trial.r.norm() < (1.0 - 1e-4 * alpha) * rnorm) {
        res.u -= alpha * step;
        e = trial;
        rnorm = trial.r.norm();
        improved = true;
        break;
      }
      if (trial.ok && trial.r.norm() < best_norm) {
        best = trial;
        best_norm = trial.r.norm();
      }
      alpha *= 0.5;
    }
    if (!improved) {
      ++growth_streak;
      if (growth_streak >= 5) {
        res.status = NewtonStatus::no_convergence;
        res.residual_norm = rnorm;
        return res;
      }
      // take the least-bad damped step anyway and retry
      Eval trial = try_residual(system, res.u - (1.0 / 64) * step);
      if (!trial.ok) {
        res.status = NewtonStatus::out_of_domain;
        return res;
      }
      res.u -= (1.0 / 64) * step;
      e = trial;
      rnorm = trial.r.norm();
    } else {
      growth_streak = 0;
    }
  }
  res.residual_norm = rnorm;
  if (rnorm < settings.newton_tol) {
    res.status = NewtonStatus::converged;
    auto J = try_jacobian(system, res.u);
    res.smallest_singular_value = J ? smallest_singular_value(*J) : 0.0;
  } else {
    res.status = NewtonStatus::no_convergence;
  }
  return res;
}

namespace {

// Unit tangent of the 1-dof solution set: right null vector of the jacobian.
std::optional<Vec> curve_tangent(const NonlinearSystem& sys, const Vec& u) {
  auto Jopt = try_jacobian(sys, u);
  if (!Jopt) return std::nullopt;
  Eigen::JacobiSVD<Mat> svd(*Jopt, Eigen::ComputeFullV);
  Vec t = svd.matrixV().col(sys.unknown_dim - 1);
  return t;
}

// One corrector solve: Newton on [r(u); tangent.(u - pred)] = 0.
std::optional<Vec> correct(const NonlinearSystem& sys, const Vec& pred,
                           const Vec& tangent, const ContinuationSettings& settings,
                           int* iters_out) {
  Vec u = pred;
  for (int iter = 0; iter < settings.newton_max_iter; ++iter) {
    Eval e = try_residual(sys, u);
    if (!e.ok) return std::nullopt;
    Vec full(sys.equation_dim + 1);
    full.head(sys.equation_dim) = e.r;
    full[sys.equation_dim] = tangent.dot(u - pred);
    if (full.norm() < settings.newton_tol) {
      if (iters_out) *iters_out = iter;
      return u;
    }
    auto Jopt = try_jacobian(sys, u);
    if (!Jopt) return std::nullopt;
    Mat A(sys.equation_dim + 1, sys.unknown_dim);
    A.topRows(sys.equation_dim) = *Jopt;
    A.bottomRows(1) = tangent.transpose();
    const Vec step = A.partialPivLu().solve(full);
    if (!step.allFinite()) return std::nullopt;
    u -= step;
    if (step.norm() > 10.0 * (1.0 + pred.norm())) return std::nullopt;
  }
  return std::nullopt;
}

}  // namespace

TraceResult trace_curve(const NonlinearSystem& system, const Vec& seed,
                        const ContinuationSettings& settings,
                        const TraceDomain& domain) {
  if (system.unknown_dim != system.equation_dim + 1)
    throw PreconditionError("trace_curve: system must have one degree of freedom");
  Eval e0 = try_residual(system, seed);
  if (!e0.ok || e0.r.norm() > 10 * settings.newton_tol)
    throw PreconditionError("trace_curve: seed does not satisfy the system");

  auto t0 = curve_tangent(system, seed);
  if (!t0) throw PreconditionError("trace_curve: jacobian unavailable at seed");
  auto J0 = try_jacobian(system, seed);
  const double margin0 = J0 ? row_normalized_margin(*J0) : 0.0;

  TraceResult out;
  if (margin0 < settings.margin_floor) {
    // Isolated / singular seed: emit it as a degenerate single-point trace.
    out.points.push_back(seed);
    out.margins.push_back(margin0);
    out.stop_backward = out.stop_forward = TraceStop::margin_collapse;
    return out;
  }

  std::vector<Vec> fwd_pts, bwd_pts;
  std::vector<double> fwd_m, bwd_m;
  bool closed = false;
  TraceStop stops[2] = {TraceStop::none, TraceStop::none};

  for (int dir = 0; dir < 2 && !closed; ++dir) {
    std::vector<Vec>& pts = dir == 0 ? fwd_pts : bwd_pts;
    std::vector<double>& mgs = dir == 0 ? fwd_m : bwd_m;
    Vec u = seed;
    Vec tangent = (dir == 0 ? 1.0 : -1.0) * (*t0);
    double h = settings.step_init;
    TraceStop stop = TraceStop::none;
    int steps = 0;

    while (stop == TraceStop::none) {
      if (static_cast<int>(pts.size() + fwd_pts.size() + bwd_pts.size()) >
          settings.max_points) {
        stop = TraceStop::max_points;
        break;
      }
      const Vec pred = u + h * tangent;
      int citers = 0;
      auto corrected = correct(system, pred, tangent, settings, &citers);
      bool accept = false;
      Vec unew;
      Vec tnew;
      if (corrected) {
        unew = *corrected;
        auto tn = curve_tangent(system, unew);
        if (tn) {
          tnew = *tn;
          if (tnew.dot(tangent) < 0) tnew = -tnew;
          // Reject sharp turns: likely jumped across a fold.
          if (tnew.dot(tangent) > 0.2 &&
              domain.distance(unew, u) < 3.0 * h + 1e-12)
            accept = true;
        }
      }
      if (!accept) {
        h *= 0.5;
        if (h < settings.step_min) {
          stop = TraceStop::stall;
          break;
        }
        continue;
      }

      const bool exits = domain.inside && !domain.inside(unew);
      auto Jn = try_jacobian(system, unew);
      const double margin = Jn ? row_normalized_margin(*Jn) : 0.0;
      // the first vertex beyond the domain is kept so branches reach the
      // boundary before stopping
      pts.push_back(unew);
      mgs.push_back(margin);
      ++steps;
      if (exits) {
        stop = TraceStop::box_exit;
        break;
      }
      if (margin < settings.margin_floor) {
        stop = TraceStop::margin_collapse;
        break;
      }
      // Closure test against the seed.
      if (steps > 5 && domain.distance(unew, seed) < h &&
          tnew.dot((dir == 0 ? 1.0 : -1.0) * (*t0)) > 0.5) {
        closed = true;
        stop = TraceStop::closure;
        break;
      }
      u = unew;
      tangent = tnew;
      if (citers <= 4) h = std::min(2 * h, settings.step_max);
      else if (citers >= 10) h = std::max(0.5 * h, settings.step_min);
    }
    stops[dir] = stop;
  }

  out.closed = closed;
  out.stop_forward = stops[0];
  out.stop_backward = closed ? TraceStop::closure : stops[1];
  out.points.reserve(bwd_pts.size() + 1 + fwd_pts.size());
  out.margins.reserve(bwd_pts.size() + 1 + fwd_pts.size());
  for (size_t i = bwd_pts.size(); i-- > 0;) {
    out.points.push_back(bwd_pts[i]);
    out.margins.push_back(bwd_m[i]);
  }
  out.points.push_back(seed);
  out.margins.push_back(margin0);
  for (size_t i = 0; i < fwd_pts.size(); ++i) {
    out.points.push_back(fwd_pts[i]);
    out.margins.push_back(fwd_m[i]);
  }
  return out;
}

std::vector<Vec> grid_seed(const NonlinearSystem& system, const Box& box,
                           const std::vector<int>& density,
                           const ContinuationSettings& settings,
                           const TraceDomain* domain) {
  if (box.dim() != system.unknown_dim)
    throw PreconditionError("grid_seed: box dimension mismatch");
  if (static_cast<int>(density.size()) != system.unknown_dim)
    throw PreconditionError("grid_seed: density per axis required");
  for (int d : density)
    if (d < 2) throw PreconditionError("grid_seed: density must be >= 2");

  std::mt19937_64 rng(settings.jitter_seed);
  std::uniform_real_distribution<double> jitter(-0.25, 0.25);

  std::vector<Vec> found;
  std::vector<int> idx(system.unknown_dim, 0);
  while (true) {
    Vec node(system.unknown_dim);
    for (int i = 0; i < system.unknown_dim; ++i) {
      const Interval& iv = box.axes[i];
      node[i] = iv.lo + iv.length() * idx[i] / (density[i] - 1);
      if (settings.jitter_seed != 0)
        node[i] += jitter(rng) * iv.length() / (density[i] - 1);
    }
    NewtonResult r = newton_refine(system, node, settings);
    if (r.ok()) found.push_back(r.u);

    int ax = system.unknown_dim - 1;
    while (ax >= 0) {
      if (++idx[ax] < density[ax]) break;
      idx[ax] = 0;
      --ax;
    }
    if (ax < 0) break;
  }

  std::sort(found.begin(), found.end(), lex_less);
  std::vector<Vec> out;
  const double dedup = 10 * settings.newton_tol;
  for (const Vec& u : found) {
    bool dup = false;
    // duplicates sit adjacent in lexicographic order (first coords agree to
    // the dedup radius), so only a trailing window needs checking
    for (auto it = out.rbegin(); it != out.rend(); ++it) {
      if (u[0] - (*it)[0] > dedup) break;
      const double d = domain ? domain->distance(u, *it) : (u - *it).norm();
      if (d < dedup) {
        dup = true;
        break;
      }
    }
    if (!dup) out.push_back(u);
  }
  return out;
}

std::vector<SliceTraces> slice_surface(const NonlinearSystem& system,
                                       const std::vector<AffineConstraint>& slicing,
                                       const Box& seed_box,
                                       const std::vector<int>& density,
                                       const ContinuationSettings& settings,
                                       const TraceDomain& domain) {
  if (system.unknown_dim != system.equation_dim + 2)
    throw PreconditionError("slice_surface: system must have two degrees of freedom");
  std::vector<SliceTraces> out;
  for (size_t si = 0; si < slicing.size(); ++si) {
    const AffineConstraint& c = slicing[si];
    NonlinearSystem sliced;
    sliced.unknown_dim = system.unknown_dim;
    sliced.equation_dim = system.equation_dim + 1;
    sliced.residual = [&system, c](const Vec& u) {
      Vec r(system.equation_dim + 1);
      r.head(system.equation_dim) = system.residual(u);
      r[system.equation_dim] = c.normal.dot(u) - c.value;
      return r;
    };
    sliced.jacobian = [&system, c](const Vec& u) {
      Mat J(system.equation_dim + 1, system.unknown_dim);
      J.topRows(system.equation_dim) = system.jacobian(u);
      J.bottomRows(1) = c.normal.transpose();
      return J;
    };

    SliceTraces st;
    st.slice_index = static_cast<int>(si);
    st.constraint = c;
    const std::vector<Vec> seeds = grid_seed(sliced, seed_box, density, settings, &domain);
    for (const Vec& seed : seeds) {
      bool consumed = false;
      for (const auto& tr : st.traces) {
        for (const Vec& p : tr.points)
          if (domain.distance(seed, p) < settings.consume_radius) {
            consumed = true;
            break;
          }
        if (consumed) break;
      }
      if (consumed) continue;
      try {
        st.traces.push_back(trace_curve(sliced, seed, settings, domain));
      } catch (const PreconditionError&) {
        // seed degraded (e.g. drifted out of domain); skip it
      }
    }
    out.push_back(std::move(st));
  }
  return out;
}

double distance_to_polyline(const Vec& p, const std::vector<Vec>& polyline) {
  double best = std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < polyline.size(); ++i) {
    best = std::min(best, (p - polyline[i]).norm());
    if (i + 1 < polyline.size()) {
      const Vec& a = polyline[i];
      const Vec& b = polyline[i + 1];
      const Vec ab = b - a;
      const double len2 = ab.squaredNorm();
      if (len2 > 0) {
        const double t = std::clamp(ab.dot(p - a) / len2, 0.0, 1.0);
        best = std::min(best, (p - (a + t * ab)).norm());
      }
    }
  }
  return best;
}

}  // namespace cset
