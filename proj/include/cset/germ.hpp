#pragma once

#include <string>
#include <vector>

namespace cset {

// ADE-style label of a time-function germ at a critical footpoint.
struct GermLabel {
  enum class Kind { A, D4_flag, degenerate };
  Kind kind = Kind::degenerate;
  int codim = 0;   // k for A_k; 0 when unresolved
  int corank = 0;
  std::vector<double> witness;  // normalized derivative magnitudes inspected

  std::string name() const {
    switch (kind) {
      case Kind::A: return "A" + std::to_string(codim);
      case Kind::D4_flag: return "D4";
      case Kind::degenerate: return "DEG";
    }
    return "?";
  }
};

}  // namespace cset
