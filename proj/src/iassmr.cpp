#include "mfplsim/iassmr.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

#include "mfplsim/rng.hpp"
#include "mfplsim/search.hpp"

namespace mfplsim {

std::pair<Index, Index> IassmrConfig::resolve_split(Index n) const {
  const Index a = n1.value_or(n / 2);
  const Index b = n2.value_or(n - a);
  if (a < 2 || b < 2) {
    std::ostringstream os;
    os << "subsample sizes must be at least 2, got n1 = " << a << ", n2 = " << b;
    throw ValidationError(os.str());
  }
  if (a + b > n) {
    std::ostringstream os;
    os << "n1 + n2 = " << a + b << " exceeds the " << n << " available samples";
    throw ValidationError(os.str());
  }
  return {a, b};
}

namespace {

ChosenTuning tuning(Index w, const CellChoice& c) {
  return {w, c.direction_index, c.h, c.lambda, c.bic, c.df, c.rss, c.converged};
}

struct Stage2Outcome {
  std::vector<CellChoice> cells;  // aligned with the nonempty input sets
  std::vector<std::size_t> which; // input position of each searched set
  std::size_t best;               // index into cells; cells.size() if none valid
};

Stage2Outcome run_stage2(const BiFunctionalDataset& e2, const std::vector<std::pair<Index, SecondStageSet>>& sets,
                         const IassmrConfig& config, const DirectionSet& dirs) {
  Stage2Outcome out;
  std::vector<std::vector<Index>> cols;
  for (std::size_t i = 0; i < sets.size(); ++i) {
    if (sets[i].second.empty()) continue;
    cols.push_back(sets[i].second.indices);
    out.which.push_back(i);
  }
  const SearchSpec spec{&dirs, config.stage2_bandwidth_quantiles, config.stage2_scad, config.stage1.workers};
  if (cols.empty()) {
    // every set empty: the single-index model alone
    out.cells = search_cells(e2, {std::vector<Index>{}}, spec);
    out.best = out.cells[0].valid ? 0 : 1;
    return out;
  }
  out.cells = search_cells(e2, cols, spec);
  out.best = out.cells.size();
  for (std::size_t i = 0; i < out.cells.size(); ++i) {
    if (!out.cells[i].valid) continue;
    if (out.best == out.cells.size()) {
      out.best = i;
      continue;
    }
    const double b = out.cells[out.best].bic, c = out.cells[i].bic;
    const Index wb = sets[out.which[out.best]].first, wc = sets[out.which[i]].first;
    if (c < b || (c == b && wc < wb)) out.best = i;
  }
  return out;
}

FitResult finish(const BiFunctionalDataset& e2, const std::vector<std::pair<Index, SecondStageSet>>& sets,
                 const Stage2Outcome& s2, const DirectionSet& dirs) {
  if (s2.best >= s2.cells.size()) throw NumericalError("no admissible second-stage cell");
  const CellChoice& c = s2.cells[s2.best];
  Eigen::VectorXd beta_full = Eigen::VectorXd::Zero(e2.p());
  Index w = 0;
  const bool degenerate = s2.which.empty();
  if (!degenerate) {
    const auto& entry = sets[s2.which[s2.best]];
    w = entry.first;
    for (std::size_t k = 0; k < entry.second.indices.size(); ++k)
      beta_full[entry.second.indices[k]] = c.beta[static_cast<Index>(k)];
  }
  FitResult r = make_fit_result("iassmr", e2, std::move(beta_full), dirs[c.direction_index], tuning(w, c));
  r.degenerate = degenerate;
  for (const auto& cell : s2.cells) {
    r.fits += cell.fits;
    r.nonconverged += cell.nonconverged;
  }
  r.all_nonconverged = r.fits > 0 && r.nonconverged == r.fits;
  return r;
}

}  // namespace

FitResult iassmr_stage2(const BiFunctionalDataset& e2, const std::vector<std::pair<Index, SecondStageSet>>& sets,
                        const IassmrConfig& config) {
  const DirectionSet& dirs = config.stage2_directions ? *config.stage2_directions : config.stage1.direction_set;
  if (dirs.empty()) throw ValidationError("direction set is empty");
  return finish(e2, sets, run_stage2(e2, sets, config, dirs), dirs);
}

FitResult iassmr_fit(const BiFunctionalDataset& data, const IassmrConfig& config) {
  config.stage1.validate(data.p());
  config.stage2_scad.validate();
  const auto [n1, n2] = config.resolve_split(data.n());

  BiFunctionalDataset source = data;
  if (config.shuffle_seed) {
    std::vector<Index> order(static_cast<std::size_t>(data.n()));
    std::iota(order.begin(), order.end(), Index{0});
    Rng rng(*config.shuffle_seed, 0x5eed);
    for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);
    source = data.select(order);
  }
  const auto [e1, e2] = split_dataset(source, n1, n2);

  std::vector<Index> ws = config.stage1.w_candidates;
  std::sort(ws.begin(), ws.end());
  ws.erase(std::unique(ws.begin(), ws.end()), ws.end());

  std::vector<ReductionScheme> schemes;
  std::vector<std::vector<Index>> rep_sets;
  for (Index w : ws) {
    schemes.push_back(build_reduction(data.p(), w));
    rep_sets.push_back(schemes.back().reps);
  }
  const FassmrConfig& c1 = config.stage1;
  const SearchSpec spec1{&c1.direction_set, c1.bandwidth_quantiles, c1.scad, c1.workers};
  const auto stage1 = search_cells(e1, rep_sets, spec1);

  StageTrace trace;
  trace.n1 = n1;
  trace.n2 = n2;
  std::vector<std::pair<Index, SecondStageSet>> sets;
  for (std::size_t i = 0; i < ws.size(); ++i) {
    StageRecord rec;
    rec.w = ws[i];
    std::vector<Index> blocks;
    if (stage1[i].valid) {
      rec.stage1 = tuning(ws[i], stage1[i]);
      for (Index k = 0; k < ws[i]; ++k) {
        if (stage1[i].beta[k] != 0.0) {
          blocks.push_back(k);
          rec.stage1_support.push_back(schemes[i].reps[static_cast<std::size_t>(k)]);
        }
      }
    }
    SecondStageSet r2 = second_stage_set(schemes[i], blocks);
    rec.second_stage = r2.indices;
    trace.records.push_back(std::move(rec));
    sets.emplace_back(ws[i], std::move(r2));
  }

  const DirectionSet& dirs = config.stage2_directions ? *config.stage2_directions : c1.direction_set;
  if (dirs.empty()) throw ValidationError("direction set is empty");
  const Stage2Outcome s2 = run_stage2(e2, sets, config, dirs);
  for (std::size_t i = 0; i < s2.which.size(); ++i) {
    auto& rec = trace.records[s2.which[i]];
    rec.stage2_valid = s2.cells[i].valid;
    if (s2.cells[i].valid) rec.stage2 = tuning(rec.w, s2.cells[i]);
  }
  FitResult r = finish(e2, sets, s2, dirs);
  for (const auto& c : stage1) {
    r.fits += c.fits;
    r.nonconverged += c.nonconverged;
  }
  r.all_nonconverged = r.fits > 0 && r.nonconverged == r.fits;
  trace.degenerate = r.degenerate;
  trace.chosen_w = r.chosen.w;
  r.stage_trace = std::move(trace);
  return r;
}

SupportSet final_support(const FitResult& fit) { return fit.support; }

}  // namespace mfplsim
