#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "mfplsim/fassmr.hpp"

namespace mfplsim {

struct IassmrConfig {
  /// Subsample sizes; default n1 = floor(n/2), n2 = n - n1.
  std::optional<Index> n1, n2;
  FassmrConfig stage1;
  /// Second-stage directions; the stage-1 set when absent.
  std::optional<DirectionSet> stage2_directions;
  ScadConfig stage2_scad;
  std::vector<double> stage2_bandwidth_quantiles = default_bandwidth_quantiles();
  /// Rows are permuted with this seed before splitting.
  std::optional<std::uint64_t> shuffle_seed;

  std::pair<Index, Index> resolve_split(Index n) const;
};

/// Stage 1: per w, the BIC-best reduced fit on the first n1 rows selects
/// blocks. Stage 2: on the next n2 rows, the penalised fit restricted to the
/// full selected blocks is tuned per w; w with the lowest stage-2 BIC wins
/// (ties to the smaller w). If no w selects anything the result is the pure
/// single-index fit on the second subsample, flagged degenerate.
FitResult iassmr_fit(const BiFunctionalDataset& data, const IassmrConfig& config);

/// Second stage alone for given (w, R2) pairs on the subsample `e2`.
FitResult iassmr_stage2(const BiFunctionalDataset& e2, const std::vector<std::pair<Index, SecondStageSet>>& sets,
                        const IassmrConfig& config);

SupportSet final_support(const FitResult& fit);

}  // namespace mfplsim
