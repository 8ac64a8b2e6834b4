#pragma once

#include <array>

#include "triring/errors.hpp"

namespace triring {

// Truncated Cooper-pair number basis for the three islands: states
// |n1, n2, n3> with each n_j in [-N, N], enumerated lexicographically.
class ChargeBasis {
 public:
  explicit ChargeBasis(int cutoff) : cutoff_(cutoff) {
    if (cutoff < 1) throw ParameterError("charge basis cutoff must be >= 1");
    side_ = 2 * cutoff + 1;
    dim_ = side_ * side_ * side_;
  }

  int cutoff() const { return cutoff_; }
  int side() const { return side_; }
  int dim() const { return dim_; }

  int index_of(int n1, int n2, int n3) const {
    return ((n1 + cutoff_) * side_ + (n2 + cutoff_)) * side_ + (n3 + cutoff_);
  }

  std::array<int, 3> charges_at(int index) const {
    const int n3 = index % side_;
    const int rest = index / side_;
    const int n2 = rest % side_;
    const int n1 = rest / side_;
    return {n1 - cutoff_, n2 - cutoff_, n3 - cutoff_};
  }

  bool on_boundary(int index) const {
    const auto n = charges_at(index);
    return n[0] == -cutoff_ || n[0] == cutoff_ || n[1] == -cutoff_ ||
           n[1] == cutoff_ || n[2] == -cutoff_ || n[2] == cutoff_;
  }

 private:
  int cutoff_;
  int side_;
  int dim_;
};

}  // namespace triring
