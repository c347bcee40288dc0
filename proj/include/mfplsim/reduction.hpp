#pragma once

#include <vector>

#include "mfplsim/functional.hpp"

namespace mfplsim {

/// Partition of the p grid indices into w contiguous blocks, each with one
/// representative point. All indices are 0-based.
struct ReductionScheme {
  Index p = 0;
  Index w = 0;
  std::vector<Index> q;         // block sizes
  std::vector<Index> start;     // first full-grid index of each block
  std::vector<Index> reps;      // representative full-grid index of each block
  std::vector<Index> block_of;  // full-grid index -> block

  /// Full-grid indices [start[k], start[k] + q[k]).
  std::vector<Index> block(Index k) const;
};

/// The first p - w*floor(p/w) blocks hold floor(p/w) + 1 points, the rest
/// floor(p/w). Block k's representative is its ceil(q_k/2)-th point.
ReductionScheme build_reduction(Index p, Index w);

struct SecondStageSet {
  std::vector<Index> indices;  // sorted full-grid indices

  Index r() const noexcept { return static_cast<Index>(indices.size()); }
  bool empty() const noexcept { return indices.empty(); }
};

/// Union of the full blocks of `selected_blocks` (0-based block numbers).
SecondStageSet second_stage_set(const ReductionScheme& scheme, const std::vector<Index>& selected_blocks);

}  // namespace mfplsim
