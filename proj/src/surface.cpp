#include "cset/surface.hpp"

#include <cmath>

namespace cset {

namespace {

// k-th derivative of cos(w*s) / sin(w*s), evaluated without phase-shift
// rounding error.
double dcos(int k, double w, double s) {
  const double p = std::pow(w, k);
  switch (k & 3) {
    case 0: return p * std::cos(w * s);
    case 1: return -p * std::sin(w * s);
    case 2: return -p * std::cos(w * s);
    default: return p * std::sin(w * s);
  }
}

double dsin(int k, double w, double s) {
  const double p = std::pow(w, k);
  switch (k & 3) {
    case 0: return p * std::sin(w * s);
    case 1: return p * std::cos(w * s);
    case 2: return -p * std::sin(w * s);
    default: return -p * std::cos(w * s);
  }
}

double falling_factorial(int m, int k) {
  double r = 1;
  for (int i = 0; i < k; ++i) r *= (m - i);
  return r;
}

Eigen::Vector3d cross3(const Vec& a, const Vec& b) {
  return Eigen::Vector3d(a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2],
                         a[0] * b[1] - a[1] * b[0]);
}

}  // namespace

SurfaceKind surface_kind_from_string(const std::string& s) {
  if (s == "line") return SurfaceKind::line;
  if (s == "circle") return SurfaceKind::circle;
  if (s == "ellipse") return SurfaceKind::ellipse;
  if (s == "sphere") return SurfaceKind::sphere;
  if (s == "plane") return SurfaceKind::plane;
  if (s == "graph-polynomial") return SurfaceKind::graph_polynomial;
  if (s == "fourier-curve") return SurfaceKind::fourier_curve;
  if (s == "biquadratic-patch") return SurfaceKind::biquadratic_patch;
  throw ValidationError("unknown surface kind '" + s + "'");
}

std::string to_string(SurfaceKind k) {
  switch (k) {
    case SurfaceKind::line: return "line";
    case SurfaceKind::circle: return "circle";
    case SurfaceKind::ellipse: return "ellipse";
    case SurfaceKind::sphere: return "sphere";
    case SurfaceKind::plane: return "plane";
    case SurfaceKind::graph_polynomial: return "graph-polynomial";
    case SurfaceKind::fourier_curve: return "fourier-curve";
    case SurfaceKind::biquadratic_patch: return "biquadratic-patch";
  }
  return "?";
}

int Jet::index(int param_dim, int i, int j) {
  if (param_dim == 1) return i;
  const int k = i + j;
  return k * (k + 1) / 2 + j;
}

int Jet::slot_count(int param_dim, int order) {
  if (param_dim == 1) return order + 1;
  return (order + 1) * (order + 2) / 2;
}

const Vec& Jet::partial(int i, int j) const { return data[index(param_dim, i, j)]; }
Vec& Jet::partial_mut(int i, int j) { return data[index(param_dim, i, j)]; }

ParametricHypersurface::ParametricHypersurface(SurfaceKind kind,
                                               std::vector<double> coefficients,
                                               std::vector<Interval> domain,
                                               std::vector<bool> periodic,
                                               double orientation_sign)
    : kind_(kind),
      coeffs_(std::move(coefficients)),
      domain_(std::move(domain)),
      periodic_(std::move(periodic)),
      orientation_sign_(orientation_sign) {
  infer_dims_and_check();
}

void ParametricHypersurface::infer_dims_and_check() {
  const size_t nc = coeffs_.size();
  switch (kind_) {
    case SurfaceKind::line:
      ambient_dim_ = 2; param_dim_ = 1;
      if (nc != 4) throw ValidationError("line needs 4 coefficients [px,py,dx,dy]");
      if (std::hypot(coeffs_[2], coeffs_[3]) == 0.0)
        throw ValidationError("line direction must be nonzero");
      break;
    case SurfaceKind::circle:
      ambient_dim_ = 2; param_dim_ = 1;
      if (nc != 3) throw ValidationError("circle needs 3 coefficients [cx,cy,r]");
      if (!(coeffs_[2] > 0)) throw ValidationError("circle radius must be positive");
      break;
    case SurfaceKind::ellipse:
      ambient_dim_ = 2; param_dim_ = 1;
      if (nc != 4 && nc != 5)
        throw ValidationError("ellipse needs coefficients [cx,cy,a,b] or [cx,cy,a,b,phi]");
      if (!(coeffs_[2] > 0) || !(coeffs_[3] > 0))
        throw ValidationError("ellipse semi-axes must be positive");
      break;
    case SurfaceKind::sphere:
      ambient_dim_ = 3; param_dim_ = 2;
      if (nc != 4) throw ValidationError("sphere needs 4 coefficients [cx,cy,cz,r]");
      if (!(coeffs_[3] > 0)) throw ValidationError("sphere radius must be positive");
      break;
    case SurfaceKind::plane:
      ambient_dim_ = 3; param_dim_ = 2;
      if (nc != 9) throw ValidationError("plane needs 9 coefficients [p,e1,e2]");
      break;
    case SurfaceKind::graph_polynomial:
      ambient_dim_ = 2; param_dim_ = 1;
      if (nc < 1) throw ValidationError("graph-polynomial needs at least 1 coefficient");
      break;
    case SurfaceKind::fourier_curve:
      ambient_dim_ = 2; param_dim_ = 1;
      if (nc < 2 || (nc - 2) % 4 != 0)
        throw ValidationError("fourier-curve needs 2 + 4K coefficients");
      break;
    case SurfaceKind::biquadratic_patch:
      ambient_dim_ = 3; param_dim_ = 2;
      if (nc != 27) throw ValidationError("biquadratic-patch needs 27 coefficients");
      break;
  }
  if (static_cast<int>(domain_.size()) != param_dim_)
    throw ValidationError("domain must have one interval per parameter");
  if (static_cast<int>(periodic_.size()) != param_dim_)
    throw ValidationError("periodic must have one flag per parameter");
  for (const auto& iv : domain_)
    if (!(iv.hi > iv.lo)) throw ValidationError("domain intervals must be nonempty");
  if (orientation_sign_ != 1.0 && orientation_sign_ != -1.0)
    throw ValidationError("orientation must be +1 or -1");
}

Vec ParametricHypersurface::clamp_to_domain(const Vec& s) const {
  if (s.size() != param_dim_)
    throw ValidationError("parameter dimension mismatch");
  Vec out = s;
  for (int i = 0; i < param_dim_; ++i) {
    const Interval& iv = domain_[i];
    if (periodic_[i]) {
      const double T = iv.length();
      out[i] = s[i] - T * std::floor((s[i] - iv.lo) / T);
    } else if (s[i] < iv.lo - 1e-12 || s[i] > iv.hi + 1e-12) {
      throw DomainError("parameter outside non-periodic domain");
    }
  }
  return out;
}

bool ParametricHypersurface::in_domain(const Vec& s) const {
  for (int i = 0; i < param_dim_; ++i)
    if (!periodic_[i] &&
        (s[i] < domain_[i].lo - 1e-12 || s[i] > domain_[i].hi + 1e-12))
      return false;
  return true;
}

Jet ParametricHypersurface::jet(const Vec& s_in, int order) const {
  if (order > kMaxJetOrder)
    throw ValidationError("jet order exceeds maximum (5)");
  const Vec s = clamp_to_domain(s_in);

  Jet j;
  j.ambient_dim = ambient_dim_;
  j.param_dim = param_dim_;
  j.order = order;
  j.data.assign(Jet::slot_count(param_dim_, order), Vec::Zero(ambient_dim_));

  switch (kind_) {
    case SurfaceKind::line: {
      const Eigen::Vector2d p(coeffs_[0], coeffs_[1]), d(coeffs_[2], coeffs_[3]);
      j.partial_mut(0) = p + s[0] * d;
      if (order >= 1) j.partial_mut(1) = d;
      break;
    }
    case SurfaceKind::circle: {
      const double cx = coeffs_[0], cy = coeffs_[1], r = coeffs_[2];
      for (int k = 0; k <= order; ++k) {
        Vec v(2);
        v << r * dcos(k, 1.0, s[0]), r * dsin(k, 1.0, s[0]);
        if (k == 0) { v[0] += cx; v[1] += cy; }
        j.partial_mut(k) = v;
      }
      break;
    }
    case SurfaceKind::ellipse: {
      const double cx = coeffs_[0], cy = coeffs_[1], a = coeffs_[2], b = coeffs_[3];
      const double phi = coeffs_.size() == 5 ? coeffs_[4] : 0.0;
      const double cp = std::cos(phi), sp = std::sin(phi);
      for (int k = 0; k <= order; ++k) {
        const double u = a * dcos(k, 1.0, s[0]);
        const double v = b * dsin(k, 1.0, s[0]);
        Vec w(2);
        w << cp * u - sp * v, sp * u + cp * v;
        if (k == 0) { w[0] += cx; w[1] += cy; }
        j.partial_mut(k) = w;
      }
      break;
    }
    case SurfaceKind::graph_polynomial: {
      const int deg = static_cast<int>(coeffs_.size()) - 1;
      for (int k = 0; k <= order; ++k) {
        double pk = 0;
        for (int m = deg; m >= k; --m)
          pk = pk * s[0] + coeffs_[m] * falling_factorial(m, k);
        Vec v(2);
        v << (k == 0 ? s[0] : (k == 1 ? 1.0 : 0.0)), pk;
        j.partial_mut(k) = v;
      }
      break;
    }
    case SurfaceKind::fourier_curve: {
      const int K = static_cast<int>((coeffs_.size() - 2) / 4);
      for (int m = 0; m <= order; ++m) {
        double x = (m == 0) ? coeffs_[0] : 0.0;
        double y = (m == 0) ? coeffs_[1] : 0.0;
        for (int k = 1; k <= K; ++k) {
          const double ak = coeffs_[2 + 4 * (k - 1) + 0];
          const double bk = coeffs_[2 + 4 * (k - 1) + 1];
          const double ck = coeffs_[2 + 4 * (k - 1) + 2];
          const double dk = coeffs_[2 + 4 * (k - 1) + 3];
          x += ak * dcos(m, k, s[0]) + bk * dsin(m, k, s[0]);
          y += ck * dcos(m, k, s[0]) + dk * dsin(m, k, s[0]);
        }
        Vec v(2);
        v << x, y;
        j.partial_mut(m) = v;
      }
      break;
    }
    case SurfaceKind::plane: {
      const Eigen::Vector3d p(coeffs_[0], coeffs_[1], coeffs_[2]);
      const Eigen::Vector3d e1(coeffs_[3], coeffs_[4], coeffs_[5]);
      const Eigen::Vector3d e2(coeffs_[6], coeffs_[7], coeffs_[8]);
      j.partial_mut(0, 0) = p + s[0] * e1 + s[1] * e2;
      if (order >= 1) {
        j.partial_mut(1, 0) = e1;
        j.partial_mut(0, 1) = e2;
      }
      break;
    }
    case SurfaceKind::sphere: {
      const double r = coeffs_[3];
      const double u = s[0], v = s[1];
      for (int a = 0; a <= order; ++a)
        for (int b = 0; a + b <= order; ++b) {
          Vec w(3);
          w << r * dcos(a, 1.0, u) * dcos(b, 1.0, v),
               r * dsin(a, 1.0, u) * dcos(b, 1.0, v),
               (a == 0 ? r * dsin(b, 1.0, v) : 0.0);
          if (a == 0 && b == 0) {
            w[0] += coeffs_[0]; w[1] += coeffs_[1]; w[2] += coeffs_[2];
          }
          j.partial_mut(a, b) = w;
        }
      break;
    }
    case SurfaceKind::biquadratic_patch: {
      const double u = s[0], v = s[1];
      for (int a = 0; a <= order; ++a)
        for (int b = 0; a + b <= order; ++b) {
          Vec w = Vec::Zero(3);
          for (int i = a; i <= 2; ++i)
            for (int q = b; q <= 2; ++q) {
              const double f = falling_factorial(i, a) * std::pow(u, i - a) *
                               falling_factorial(q, b) * std::pow(v, q - b);
              const int base = 3 * (3 * i + q);
              w[0] += coeffs_[base + 0] * f;
              w[1] += coeffs_[base + 1] * f;
              w[2] += coeffs_[base + 2] * f;
            }
          j.partial_mut(a, b) = w;
        }
      break;
    }
  }
  return j;
}

Vec ParametricHypersurface::raw_conormal(const Jet& j) const {
  if (param_dim_ == 1) {
    const Vec& t = j.partial(1);
    Vec m(2);
    m << t[1], -t[0];
    return m;
  }
  return cross3(j.partial(1, 0), j.partial(0, 1));
}

Vec ParametricHypersurface::raw_conormal_derivative(const Jet& j, int a) const {
  if (param_dim_ == 1) {
    const Vec& t2 = j.partial(2);
    Vec m(2);
    m << t2[1], -t2[0];
    return m;
  }
  if (a == 0)
    return Vec(cross3(j.partial(2, 0), j.partial(0, 1)) +
               cross3(j.partial(1, 0), j.partial(1, 1)));
  return Vec(cross3(j.partial(1, 1), j.partial(0, 1)) +
             cross3(j.partial(1, 0), j.partial(0, 2)));
}

void ParametricHypersurface::validate_immersion() const {
  const int grid = param_dim_ == 1 ? 64 : 12;
  std::vector<double> knots[2];
  for (int i = 0; i < param_dim_; ++i) {
    const Interval& iv = domain_[i];
    for (int g = 0; g <= grid; ++g)
      knots[i].push_back(iv.lo + iv.length() * g / grid);
  }
  if (param_dim_ == 1) knots[1].push_back(0);

  for (double u : knots[0])
    for (double v : knots[1]) {
      Vec s(param_dim_);
      s[0] = u;
      if (param_dim_ == 2) s[1] = v;
      const Jet j = jet(s, 1);
      Mat J(ambient_dim_, param_dim_);
      J.col(0) = j.partial(1, 0);
      if (param_dim_ == 2) J.col(1) = j.partial(0, 1);
      Eigen::JacobiSVD<Mat> svd(J);
      const double smax = svd.singularValues()(0);
      const double smin = svd.singularValues()(param_dim_ - 1);
      if (!(smin > 1e-10 * std::max(1.0, smax)))
        throw ImmersionError("surface is not an immersion near sampled parameter");
    }
}

void ParametricHypersurface::validate_periodicity() const {
  for (int ax = 0; ax < param_dim_; ++ax) {
    if (!periodic_[ax]) continue;
    const int cross_samples = param_dim_ == 1 ? 1 : 5;
    for (int g = 0; g < cross_samples; ++g) {
      Vec sa(param_dim_), sb(param_dim_);
      for (int i = 0; i < param_dim_; ++i) {
        const Interval& iv = domain_[i];
        const double mid = iv.lo + iv.length() * (g + 0.5) / cross_samples;
        sa[i] = (i == ax) ? iv.lo : mid;
        sb[i] = (i == ax) ? iv.hi : mid;
      }
      const Jet ja = jet(sa, kMaxJetOrder), jb = jet(sb, kMaxJetOrder);
      double scale = 1.0;
      for (const auto& d : ja.data) scale = std::max(scale, d.cwiseAbs().maxCoeff());
      for (size_t k = 0; k < ja.data.size(); ++k)
        if ((ja.data[k] - jb.data[k]).cwiseAbs().maxCoeff() > 1e-12 * scale)
          throw ValidationError("periodic parameter does not close up to order 5");
    }
  }
}

Jet evaluate_jet(const ParametricHypersurface& surface, const Vec& s, int order) {
  return surface.jet(s, order);
}

Vec unit_conormal(const ParametricHypersurface& surface, const FinslerMetric& metric,
                  const Vec& s) {
  const Jet j = surface.jet(s, 1);
  const Vec m = surface.raw_conormal(j);
  double scale = 0;
  scale = std::max(j.partial(1, 0).norm(), scale);
  if (surface.param_dim() == 2) scale = std::max(j.partial(0, 1).norm(), scale);
  if (m.norm() < 1e-12 * std::max(1.0, scale * scale))
    throw ImmersionError("rank-deficient tangent frame; no conormal");
  return surface.orientation_sign() * m / metric.hamiltonian(m);
}

Vec front_velocity(const FinslerMetric& metric, const Vec& xi) {
  return metric.velocity(xi);
}

}  // namespace cset
