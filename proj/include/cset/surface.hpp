#pragma once

#include <string>
#include <vector>

#include "cset/common.hpp"
#include "cset/metric.hpp"

namespace cset {

enum class SurfaceKind {
  line,             // n=2: p + s*d, coeffs [px,py,dx,dy]
  circle,           // n=2: c + r*(cos s, sin s), coeffs [cx,cy,r]
  ellipse,          // n=2: c + R(phi)*(a cos s, b sin s), coeffs [cx,cy,a,b(,phi)]
  sphere,           // n=3: c + r*(cos u cos v, sin u cos v, sin v), coeffs [cx,cy,cz,r]
  plane,            // n=3: p + u*e1 + v*e2, coeffs [p(3),e1(3),e2(3)]
  graph_polynomial, // n=2: (s, sum c_k s^k), coeffs [c0..ck]
  fourier_curve,    // n=2: coeffs [a0,c0, a1,b1,c1,d1, ...]; x=a0+sum ak cos ks+bk sin ks
  biquadratic_patch // n=3: sum_{i,j<=2} C_ij u^i v^j, coeffs C row-major, 27 values
};

SurfaceKind surface_kind_from_string(const std::string& s);
std::string to_string(SurfaceKind k);

// Derivatives of an embedding at a parameter value, all partials up to `order`.
// For one-parameter curves partial(i) is d^i gamma / ds^i; for two-parameter
// patches partial(i,j) is the mixed partial of order i in u and j in v.
struct Jet {
  int ambient_dim = 0;
  int param_dim = 0;
  int order = 0;
  std::vector<Vec> data;

  const Vec& partial(int i, int j = 0) const;
  Vec& partial_mut(int i, int j = 0);
  const Vec& position() const { return partial(0, 0); }

  static int index(int param_dim, int i, int j);
  static int slot_count(int param_dim, int order);
};

inline constexpr int kMaxJetOrder = 5;

class ParametricHypersurface {
 public:
  ParametricHypersurface(SurfaceKind kind, std::vector<double> coefficients,
                         std::vector<Interval> domain, std::vector<bool> periodic,
                         double orientation_sign);

  int ambient_dim() const { return ambient_dim_; }
  int param_dim() const { return param_dim_; }
  SurfaceKind kind() const { return kind_; }
  double orientation_sign() const { return orientation_sign_; }
  const std::vector<Interval>& domain() const { return domain_; }
  const std::vector<bool>& periodic() const { return periodic_; }
  const std::vector<double>& coefficients() const { return coeffs_; }

  // Wraps periodic components into their base interval; throws DomainError for
  // parameters outside a non-periodic interval.
  Vec clamp_to_domain(const Vec& s) const;
  bool in_domain(const Vec& s) const;

  Jet jet(const Vec& s, int order) const;

  // Raw (unnormalized) conormal: rotated tangent for curves, cross product of
  // the tangent frame for patches. Sign convention: +1 points outward for a
  // counterclockwise circle and along +z for the standard plane.
  Vec raw_conormal(const Jet& j) const;
  // d(raw conormal)/ds_a assembled from second derivatives.
  Vec raw_conormal_derivative(const Jet& j, int a) const;

  // Validates the immersion property on a grid; throws ImmersionError.
  void validate_immersion() const;
  // For periodic axes, checks that all derivatives up to order 5 agree at the
  // two interval ends to 1e-12.
  void validate_periodicity() const;

 private:
  void infer_dims_and_check();

  SurfaceKind kind_;
  std::vector<double> coeffs_;
  std::vector<Interval> domain_;
  std::vector<bool> periodic_;
  double orientation_sign_;
  int ambient_dim_ = 0;
  int param_dim_ = 0;
};

// [OP] evaluate_jet
Jet evaluate_jet(const ParametricHypersurface& surface, const Vec& s, int order);

// [OP] unit_conormal: xi annihilating the tangent space with H(xi) = 1.
Vec unit_conormal(const ParametricHypersurface& surface, const FinslerMetric& metric,
                  const Vec& s);

// [OP] front_velocity
Vec front_velocity(const FinslerMetric& metric, const Vec& xi);

}  // namespace cset
