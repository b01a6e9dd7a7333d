#pragma once

#include <vector>

#include "csg/geometry.hpp"

namespace csg {

inline constexpr int kSpannerExhaustiveCap = 20;

// Barycentric spanner of a set of indicator vectors: a rank-sized sub-basis
// maximizing |det|, so every set element decomposes with coefficients in
// [-1, 1] (exact bound in exhaustive mode; within the recorded swap factor
// otherwise).
class Spanner {
 public:
  Spanner(std::vector<IndicatorEntry> elements, int rank, bool exhaustive);

  const std::vector<IndicatorEntry>& elements() const { return elements_; }
  int rank() const { return rank_; }
  bool exhaustive() const { return exhaustive_; }

  // Coefficients lambda with w = sum_i lambda_i * b_i in the spanned
  // subspace; throws if w is outside the span (residual > tol).
  std::vector<double> coefficients(const std::vector<int>& bits) const;

 private:
  std::vector<IndicatorEntry> elements_;
  int rank_ = 0;
  bool exhaustive_ = true;
  // Precomputed pseudo-inverse pieces for coefficient solves.
  std::vector<std::vector<double>> basis_;  // rank x K
  std::vector<std::vector<double>> gram_inv_;
};

Spanner barycentric_spanner(const std::vector<IndicatorEntry>& W,
                            int cap_exhaustive = kSpannerExhaustiveCap);

}  // namespace csg
