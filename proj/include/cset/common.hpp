#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>
#include <vector>

namespace cset {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Error taxonomy. ValidationError covers anything wrong with the input
// (scene files, parameter ranges, preconditions a caller can fix);
// SolverError covers numerical failures that surface to the CLI as exit 3.
struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct ValidationError : Error {
  explicit ValidationError(const std::string& msg) : Error(msg) {}
};

struct DomainError : ValidationError {
  explicit DomainError(const std::string& msg) : ValidationError(msg) {}
};

struct ImmersionError : ValidationError {
  explicit ImmersionError(const std::string& msg) : ValidationError(msg) {}
};

struct DegenerateCovectorError : ValidationError {
  explicit DegenerateCovectorError(const std::string& msg) : ValidationError(msg) {}
};

struct SingularTimeError : ValidationError {
  explicit SingularTimeError(const std::string& msg) : ValidationError(msg) {}
};

struct PreconditionError : ValidationError {
  explicit PreconditionError(const std::string& msg) : ValidationError(msg) {}
};

struct SolverError : Error {
  explicit SolverError(const std::string& msg) : Error(msg) {}
};

struct DegenerateKiteError : Error {
  double condition;
  explicit DegenerateKiteError(const std::string& msg, double cond)
      : Error(msg), condition(cond) {}
};

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  double length() const { return hi - lo; }
  bool contains(double v) const { return v >= lo && v <= hi; }
  double mid() const { return 0.5 * (lo + hi); }
};

// Axis-aligned box, used both for ambient clipping and seed grids.
struct Box {
  std::vector<Interval> axes;
  int dim() const { return static_cast<int>(axes.size()); }
  bool contains(const Vec& p) const {
    for (int i = 0; i < dim(); ++i)
      if (!axes[i].contains(p[i])) return false;
    return true;
  }
  double diameter() const {
    double s = 0;
    for (const auto& a : axes) s += a.length() * a.length();
    return std::sqrt(s);
  }
};

// Lossless decimal formatting for doubles (17 significant digits).
std::string format_double(double v);

// Lexicographic comparison used whenever output order must be deterministic.
inline bool lex_less(const Vec& a, const Vec& b) {
  for (int i = 0; i < a.size() && i < b.size(); ++i) {
    if (a[i] < b[i]) return true;
    if (a[i] > b[i]) return false;
  }
  return a.size() < b.size();
}

}  // namespace cset
