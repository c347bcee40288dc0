#include "mfplsim/reduction.hpp"

#include <algorithm>
#include <sstream>

namespace mfplsim {

std::vector<Index> ReductionScheme::block(Index k) const {
  std::vector<Index> out;
  const auto kk = static_cast<std::size_t>(k);
  for (Index j = start[kk]; j < start[kk] + q[kk]; ++j) out.push_back(j);
  return out;
}

ReductionScheme build_reduction(Index p, Index w) {
  if (w < 1 || w > p) {
    std::ostringstream os;
    os << "reduction needs 1 <= w <= p, got w = " << w << ", p = " << p;
    throw ValidationError(os.str());
  }
  ReductionScheme s;
  s.p = p;
  s.w = w;
  const Index base = p / w;
  const Index extra = p - w * base;
  s.block_of.resize(static_cast<std::size_t>(p));
  Index first = 0;
  for (Index k = 0; k < w; ++k) {
    const Index qk = base + (k < extra ? 1 : 0);
    s.q.push_back(qk);
    s.start.push_back(first);
    s.reps.push_back(first + (qk + 1) / 2 - 1);
    for (Index j = first; j < first + qk; ++j) s.block_of[static_cast<std::size_t>(j)] = k;
    first += qk;
  }
  return s;
}

SecondStageSet second_stage_set(const ReductionScheme& scheme, const std::vector<Index>& selected_blocks) {
  SecondStageSet out;
  for (Index k : selected_blocks) {
    if (k < 0 || k >= scheme.w) {
      std::ostringstream os;
      os << "block " << k << " outside 0.." << scheme.w - 1;
      throw ValidationError(os.str());
    }
    const auto b = scheme.block(k);
    out.indices.insert(out.indices.end(), b.begin(), b.end());
  }
  std::sort(out.indices.begin(), out.indices.end());
  out.indices.erase(std::unique(out.indices.begin(), out.indices.end()), out.indices.end());
  return out;
}

}  // namespace mfplsim
