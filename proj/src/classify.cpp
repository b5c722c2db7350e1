#include "cset/classify.hpp"

#include <algorithm>
#include <cmath>

namespace cset {

namespace {

double factorial(int k) {
  double f = 1;
  for (int m = 2; m <= k; ++m) f *= m;
  return f;
}

constexpr double kNormFloor = 1e-8;

}  // namespace

GermLabel classify_germ_1d(const std::vector<double>& derivatives, double scale,
                           double criticality_tol, double tol_rel) {
  if (derivatives.empty() || derivatives.size() > 6)
    throw ValidationError("classify_germ_1d expects 1..6 derivative values");
  if (!(scale > 0)) throw ValidationError("classify_germ_1d: scale must be positive");
  const int K = static_cast<int>(derivatives.size());
  std::vector<double> norm(K + 1, 0.0);
  for (int m = 1; m <= K; ++m)
    norm[m] = std::abs(derivatives[m - 1]) * std::pow(scale, m) / factorial(m);
  double base = kNormFloor;
  for (int m = 2; m <= K; ++m) base = std::max(base, norm[m]);
  if (norm[1] > criticality_tol * std::max(base, 1.0))
    throw PreconditionError("classify_germ_1d: footpoint not critical, |G'| scale = " +
                            format_double(norm[1]));
  GermLabel g;
  g.witness.assign(norm.begin() + 1, norm.end());
  for (int m = 2; m <= K; ++m) {
    if (norm[m] > tol_rel * base) {
      g.kind = GermLabel::Kind::A;
      g.codim = m - 1;
      g.corank = (m == 2) ? 0 : 1;
      return g;
    }
  }
  g.kind = GermLabel::Kind::degenerate;
  g.corank = 1;
  return g;
}

GermLabel classify_germ_2d(const Mat& hessian, double third_along_kernel,
                           double fourth_along_kernel, double scale,
                           double tol_rel) {
  if (hessian.rows() != 2 || hessian.cols() != 2)
    throw ValidationError("classify_germ_2d expects a 2x2 Hessian");
  if (!(scale > 0)) throw ValidationError("classify_germ_2d: scale must be positive");
  Eigen::SelfAdjointEigenSolver<Mat> es(hessian);
  const double s2 = scale * scale;
  const double n_eig0 = std::abs(es.eigenvalues()(0)) * s2 / 2;
  const double n_eig1 = std::abs(es.eigenvalues()(1)) * s2 / 2;
  const double n3 = std::abs(third_along_kernel) * s2 * scale / 6;
  const double n4 = std::abs(fourth_along_kernel) * s2 * s2 / 24;
  const double base =
      std::max({n_eig0, n_eig1, n3, n4, kNormFloor});
  const double tol = tol_rel * base;

  GermLabel g;
  g.witness = {n_eig0, n_eig1, n3, n4};
  const int corank = (n_eig0 <= tol ? 1 : 0) + (n_eig1 <= tol ? 1 : 0);
  g.corank = corank;
  if (corank == 0) {
    g.kind = GermLabel::Kind::A;
    g.codim = 1;
    return g;
  }
  if (corank == 2) {
    g.kind = GermLabel::Kind::D4_flag;
    g.codim = 4;
    return g;
  }
  if (n3 > tol) {
    g.kind = GermLabel::Kind::A;
    g.codim = 2;
    return g;
  }
  if (n4 > tol) {
    g.kind = GermLabel::Kind::A;
    g.codim = 3;
    return g;
  }
  g.kind = GermLabel::Kind::degenerate;
  return g;
}

GermLabel classify_time_germ(const SceneEntry& entry, const Vec& x, const Vec& s) {
  const int p = entry.surface.param_dim();
  try {
    if (p == 1) {
      const TimeFunctionJet tf =
          travel_time_jet(entry.surface, entry.metric, x, s, 5);
      const Jet j = entry.surface.jet(s, 2);
      const Vec& g1 = j.partial(1);
      const Vec& g2 = j.partial(2);
      const double speed = g1.norm();
      const double cross = std::abs(g1[0] * g2[1] - g1[1] * g2[0]);
      const double kappa = cross / std::pow(std::max(speed, 1e-14), 3);
      const double L = kappa > 1e-10 ? 1.0 / kappa : std::max(tf.value, 1.0);
      const double scale = L / std::max(speed, 1e-14);
      std::vector<double> derivs(tf.higher_s.begin() + 1, tf.higher_s.end());
      return classify_germ_1d(derivs, scale);
    }
    TimeFunctionJet tf = travel_time_jet(entry.surface, entry.metric, x, s, 2);
    Eigen::SelfAdjointEigenSolver<Mat> es(tf.hess_s);
    // kernel candidate: eigenvector of the smallest |eigenvalue|
    const int kidx =
        std::abs(es.eigenvalues()(0)) <= std::abs(es.eigenvalues()(1)) ? 0 : 1;
    Vec dir = es.eigenvectors().col(kidx);
    const TimeFunctionJet tdir =
        travel_time_jet(entry.surface, entry.metric, x, s, 4, &dir);
    const Jet j = entry.surface.jet(s, 1);
    Mat J(3, 2);
    J.col(0) = j.partial(1, 0);
    J.col(1) = j.partial(0, 1);
    const double speed = std::max((J * dir).norm(), 1e-14);
    const double scale = std::max(tf.value, 1e-8) / speed;
    return classify_germ_2d(tf.hess_s, tdir.higher_s[3], tdir.higher_s[4], scale);
  } catch (const PreconditionError&) {
    throw;
  } catch (const Error&) {
    GermLabel g;
    g.kind = GermLabel::Kind::degenerate;
    return g;
  }
}

MultigermLabel multigerm_label(const ConflictPoint& point,
                               const std::vector<const SceneEntry*>& entries, int n) {
  MultigermLabel out;
  for (size_t i = 0; i < entries.size(); ++i) {
    GermLabel g;
    try {
      g = classify_time_germ(*entries[i], point.x, point.footpoints[i]);
    } catch (const PreconditionError&) {
      g.kind = GermLabel::Kind::degenerate;
    }
    out.germs.push_back(std::move(g));
  }
  std::vector<const GermLabel*> sorted;
  for (const auto& g : out.germs) sorted.push_back(&g);
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const GermLabel* a, const GermLabel* b) {
                     return a->codim > b->codim;
                   });
  for (const GermLabel* g : sorted) {
    out.name += g->name();
    out.total_codim += g->codim;
  }
  out.exceeds_generic_budget = out.total_codim > n + 1;
  return out;
}

MultigermLabel multigerm_label(const ConflictPoint& point, const Scene& scene) {
  std::vector<const SceneEntry*> entries;
  for (int i = 0; i < scene.surface_count(); ++i) entries.push_back(&scene.entry(i));
  return multigerm_label(point, entries, scene.ambient_dim());
}

double conflict_margin_from_blocks(const std::vector<PhaseJetBlock>& blocks, int n) {
  const int l = static_cast<int>(blocks.size());
  if (l < 2) throw ValidationError("margin needs at least two surfaces");
  const int p = n - 1;
  const int rows = l * p + (l - 1);
  const int cols = l * p + (l - 1) + n;

  // multipliers: unit-norm null direction of the lambda-coefficient matrix of
  // d_s F (all rows are ~0 at a conflict point; SVD picks a deterministic one)
  Vec lambda;
  if (l == 2) {
    lambda = Vec::Ones(1);
  } else {
    Mat A = Mat::Zero(l * p, l - 1);
    for (int i = 0; i < l; ++i)
      for (int j = 0; j < l - 1; ++j) {
        double dcidlj = 0;
        if (i == j) dcidlj += 1;
        if (i == j + 1) dcidlj -= 1;
        if (dcidlj != 0)
          A.block(i * p, j, p, 1) += dcidlj * blocks[i].grad_s;
      }
    Eigen::JacobiSVD<Mat> svd(A, Eigen::ComputeFullV);
    lambda = svd.matrixV().col(l - 2);
    for (int i = 0; i < lambda.size(); ++i) {
      if (std::abs(lambda[i]) > 1e-12) {
        if (lambda[i] < 0) lambda = -lambda;
        break;
      }
    }
  }
  // coefficients of each F_i in F = sum_j lambda_j (F_j - F_{j+1})
  std::vector<double> c(l, 0.0);
  for (int i = 0; i < l; ++i) {
    double ci = 0;
    if (i <= l - 2) ci += lambda[i];
    if (i >= 1) ci -= lambda[i - 1];
    c[i] = ci;
  }

  Mat M = Mat::Zero(rows, cols);
  const int xcol = l * p + (l - 1);
  for (int i = 0; i < l; ++i)
    for (int a = 0; a < p; ++a) {
      const int r = i * p + a;
      M.block(r, i * p, 1, p) = c[i] * blocks[i].hess_s.row(a);
      for (int j = 0; j < l - 1; ++j) {
        double dcidlj = (i == j ? 1.0 : 0.0) - (i == j + 1 ? 1.0 : 0.0);
        M(r, l * p + j) = dcidlj * blocks[i].grad_s[a];
      }
      M.block(r, xcol, 1, n) = c[i] * blocks[i].hess_sx.row(a);
    }
  for (int j = 0; j < l - 1; ++j) {
    const int r = l * p + j;
    M.block(r, j * p, 1, p) = blocks[j].grad_s.transpose();
    M.block(r, (j + 1) * p, 1, p) = -blocks[j + 1].grad_s.transpose();
    M.block(r, xcol, 1, n) =
        (blocks[j].grad_x - blocks[j + 1].grad_x).transpose();
  }
  return row_normalized_margin(M);
}

double transversality_margin_conflict(const ConflictPoint& point,
                                      const std::vector<const SceneEntry*>& entries,
                                      int n) {
  std::vector<PhaseJetBlock> blocks;
  for (size_t i = 0; i < entries.size(); ++i) {
    const SceneEntry& e = *entries[i];
    try {
      const TimeFunctionJet tf =
          travel_time_jet(e.surface, e.metric, point.x, point.footpoints[i], 2);
      PhaseJetBlock b;
      b.grad_s = tf.grad_s;
      b.hess_s = tf.hess_s;
      b.hess_sx = tf.hess_sx;
      b.grad_x = tf.grad_x;
      blocks.push_back(std::move(b));
    } catch (const Error&) {
      return 0.0;
    }
  }
  return conflict_margin_from_blocks(blocks, n);
}

double transversality_margin_conflict(const ConflictPoint& point, const Scene& scene) {
  std::vector<const SceneEntry*> entries;
  for (int i = 0; i < scene.surface_count(); ++i) entries.push_back(&scene.entry(i));
  return transversality_margin_conflict(point, entries, scene.ambient_dim());
}

void annotate_conflict_trace(ConflictTrace& trace,
                             const std::vector<const SceneEntry*>& entries, int n) {
  for (auto& pt : trace.points) {
    pt.margin = transversality_margin_conflict(pt, entries, n);
    MultigermLabel m = multigerm_label(pt, entries, n);
    pt.germs = m.germs;
    pt.multigerm = m.name;
  }
}

PartitionTable partition_table(int n, int l) {
  if (n < 1 || l < 1 || l > n + 1)
    throw ValidationError("partition_table requires n >= 1 and 1 <= l <= n+1");
  PartitionTable out;
  out.n = n;
  out.l = l;

  std::vector<int> tuple(l, 0);
  // non-increasing tuples of length l, parts >= 1, sum <= n+1
  std::function<void(int, int, int)> rec = [&](int pos, int maxpart, int remaining) {
    if (pos == l) {
      out.partitions.push_back(tuple);
      return;
    }
    const int slots_left = l - pos;
    for (int v = 1; v <= std::min(maxpart, remaining - (slots_left - 1)); ++v) {
      tuple[pos] = v;
      rec(pos + 1, v, remaining - v);
    }
  };
  rec(0, n + 1, n + 1);
  std::sort(out.partitions.begin(), out.partitions.end());

  // New cases: budget-saturating tuples (sum exactly n+1) with the reduction
  // parts (1's) stripped.
  for (const auto& t : out.partitions) {
    int sum = 0;
    for (int v : t) sum += v;
    if (sum != n + 1) continue;
    std::vector<int> stripped;
    for (int v : t)
      if (v >= 2) stripped.push_back(v);
    if (!stripped.empty()) out.new_cases.push_back(std::move(stripped));
  }
  std::sort(out.new_cases.begin(), out.new_cases.end());
  return out;
}

NiceDimension nice_dimension_check(int n, int l) {
  if (n < 1 || l < 1 || l > n + 1)
    throw ValidationError("nice_dimension_check requires n >= 1 and 1 <= l <= n+1");
  NiceDimension out;
  out.N = std::min(n - l + 2, 6);
  out.is_nice = (n - l + 2) <= 6;
  return out;
}

}  // namespace cset
