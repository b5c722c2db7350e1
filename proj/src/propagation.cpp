#include "cset/propagation.hpp"

#include <cmath>

namespace cset {

namespace {

double factorial(int k) {
  double f = 1;
  for (int m = 2; m <= k; ++m) f *= m;
  return f;
}

// Taylor coefficients of tau -> gamma(s + tau*dir) up to `order`.
std::vector<Vec> directional_series(const ParametricHypersurface& surface,
                                    const Jet& jet, const Vec& dir, int order) {
  std::vector<Vec> c(order + 1, Vec::Zero(surface.ambient_dim()));
  if (surface.param_dim() == 1) {
    for (int k = 0; k <= order; ++k)
      c[k] = jet.partial(k) * std::pow(dir[0], k) / factorial(k);
  } else {
    for (int k = 0; k <= order; ++k) {
      Vec acc = Vec::Zero(3);
      for (int i = 0; i <= k; ++i) {
        const int j = k - i;
        acc += jet.partial(i, j) * std::pow(dir[0], i) * std::pow(dir[1], j) /
               (factorial(i) * factorial(j));
      }
      c[k] = acc;
    }
  }
  return c;
}

// Coefficients of sqrt(g) for a power series g with g[0] > 0.
std::vector<double> sqrt_series(const std::vector<double>& g) {
  const int K = static_cast<int>(g.size()) - 1;
  std::vector<double> f(K + 1, 0.0);
  f[0] = std::sqrt(g[0]);
  for (int k = 1; k <= K; ++k) {
    double acc = g[k];
    for (int j = 1; j < k; ++j) acc -= f[j] * f[k - j];
    f[k] = acc / (2 * f[0]);
  }
  return f;
}

}  // namespace

TimeFunctionJet travel_time_jet(const ParametricHypersurface& surface,
                                const FinslerMetric& metric, const Vec& x,
                                const Vec& s, int order, const Vec* dir_in) {
  if (order > kMaxJetOrder) throw ValidationError("travel_time_jet order exceeds 5");
  const int n = surface.ambient_dim();
  const int p = surface.param_dim();
  const Jet jet = surface.jet(s, std::max(order, 2));
  const Mat& Qi = metric.Qinv();

  const Vec d = x - jet.position();
  const Vec Qid = Qi * d;
  const double F2 = d.dot(Qid);
  if (!(F2 > 1e-28 * std::max(1.0, x.squaredNorm())))
    throw SingularTimeError("travel time singular: x lies on the surface");
  const double F = std::sqrt(F2);

  TimeFunctionJet out;
  out.value = F;
  out.grad_x = Qid / F;

  out.grad_s = Vec::Zero(p);
  out.hess_s = Mat::Zero(p, p);
  out.hess_sx = Mat::Zero(p, n);
  std::vector<Vec> g1(p);
  for (int a = 0; a < p; ++a)
    g1[a] = (p == 1) ? jet.partial(1) : jet.partial(a == 0 ? 1 : 0, a == 0 ? 0 : 1);
  for (int a = 0; a < p; ++a) out.grad_s[a] = -g1[a].dot(Qid) / F;
  for (int a = 0; a < p; ++a)
    for (int b = 0; b < p; ++b) {
      Vec gab;
      if (p == 1) gab = jet.partial(2);
      else {
        const int i = (a == 0 ? 1 : 0) + (b == 0 ? 1 : 0);
        const int j = 2 - i;
        gab = jet.partial(i, j);
      }
      out.hess_s(a, b) = (g1[a].dot(Qi * g1[b]) - gab.dot(Qid)) / F -
                         out.grad_s[a] * out.grad_s[b] / F;
    }
  for (int a = 0; a < p; ++a)
    out.hess_sx.row(a) = (-(Qi * g1[a]) / F - out.grad_s[a] * out.grad_x).transpose();

  // Directional derivatives via the square-root power series of
  // g(tau) = <d(tau), Qinv d(tau)>, d(tau) = x - gamma(s + tau dir).
  Vec dir;
  if (dir_in) dir = *dir_in;
  else {
    dir = Vec::Zero(p);
    dir[0] = 1.0;
  }
  const std::vector<Vec> c = directional_series(surface, jet, dir, order);
  std::vector<Vec> D(order + 1);
  D[0] = d;
  for (int k = 1; k <= order; ++k) D[k] = -c[k];
  std::vector<double> g(order + 1, 0.0);
  for (int k = 0; k <= order; ++k)
    for (int j = 0; j <= k; ++j) g[k] += D[j].dot(Qi * D[k - j]);
  const std::vector<double> f = sqrt_series(g);
  out.higher_s.resize(order + 1);
  double fact = 1;
  for (int k = 0; k <= order; ++k) {
    if (k > 0) fact *= k;
    out.higher_s[k] = f[k] * fact;
  }
  return out;
}

std::vector<FrontSample> momental_front(const ParametricHypersurface& surface,
                                        const FinslerMetric& metric, double t,
                                        int samples, bool both_branches) {
  if (samples < 2) throw ValidationError("momental_front needs samples >= 2");
  const int p = surface.param_dim();
  std::vector<Vec> params;
  if (p == 1) {
    const Interval& iv = surface.domain()[0];
    const bool per = surface.periodic()[0];
    const int count = samples;
    for (int i = 0; i < count; ++i) {
      const double frac = per ? double(i) / count : double(i) / (count - 1);
      Vec s(1);
      s[0] = iv.lo + iv.length() * frac;
      params.push_back(s);
    }
  } else {
    const Interval& iu = surface.domain()[0];
    const Interval& iv = surface.domain()[1];
    for (int i = 0; i < samples; ++i)
      for (int j = 0; j < samples; ++j) {
        const double fu = surface.periodic()[0] ? double(i) / samples
                                                : double(i) / (samples - 1);
        const double fv = surface.periodic()[1] ? double(j) / samples
                                                : double(j) / (samples - 1);
        Vec s(2);
        s << iu.lo + iu.length() * fu, iv.lo + iv.length() * fv;
        params.push_back(s);
      }
  }

  std::vector<FrontSample> out;
  for (const Vec& s : params) {
    for (int sgn = 0; sgn < (both_branches ? 2 : 1); ++sgn) {
      const double branch = (sgn == 0 ? 1.0 : -1.0) * surface.orientation_sign();
      const Jet j = surface.jet(s, 1);
      const Vec m = surface.raw_conormal(j);
      const double h = metric.hamiltonian(m);
      if (!(h > 0)) continue;
      const Vec xi = branch * m / h;
      FrontSample fs;
      fs.s = s;
      fs.xi = xi;
      fs.t = t;
      fs.branch = branch;
      fs.x = j.position() + t * metric.velocity(xi);
      out.push_back(std::move(fs));
    }
  }
  return out;
}

TimeGraphPoint time_graph_point(const ParametricHypersurface& surface,
                                const FinslerMetric& metric, const Vec& x,
                                const Vec& s, double tolerance) {
  const TimeFunctionJet tf = travel_time_jet(surface, metric, x, s, 2);
  const double residual = tf.grad_s.norm();
  if (residual > tolerance)
    throw PreconditionError("time_graph_point: footpoint not critical, |grad_s| = " +
                            format_double(residual));
  TimeGraphPoint out;
  out.x = x;
  out.t = tf.value;
  Eigen::SelfAdjointEigenSolver<Mat> es(tf.hess_s);
  out.hessian_eigenvalues = es.eigenvalues();
  return out;
}

}  // namespace cset
