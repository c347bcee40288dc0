#include "mfplsim/search.hpp"

#include <algorithm>
#include <map>

#include "mfplsim/kernel.hpp"

namespace mfplsim {

bool precedes(const CellChoice& a, const CellChoice& b) {
  if (a.valid != b.valid) return a.valid;
  if (a.bic != b.bic) return a.bic < b.bic;
  if (a.direction_index != b.direction_index) return a.direction_index < b.direction_index;
  if (a.h != b.h) return a.h < b.h;
  return a.lambda > b.lambda;
}

namespace {

// Best path point for one transformed design.
CellChoice best_on_path(const ScadProblem& problem, const ScadConfig& scad) {
  CellChoice best;
  const PenaltyScaling scaling = problem.ols_scaling();
  const auto lambdas = problem.lambda_path(scaling, scad);
  const auto fits = problem.fit_path(lambdas, scaling, scad);
  const Index n = problem.n();
  for (const auto& f : fits) {
    ++best.fits;
    if (!f.converged) ++best.nonconverged;
    if (f.df >= n) continue;
    const double bic = bic_score(f, n);
    // path runs from large to small lambda, so strict < keeps the larger lambda on ties
    if (!best.valid || bic < best.bic) {
      best.valid = true;
      best.bic = bic;
      best.lambda = f.lambda;
      best.beta = f.beta;
      best.df = f.df;
      best.rss = f.rss;
      best.converged = f.converged;
    }
  }
  return best;
}

}  // namespace

std::vector<CellChoice> search_cells(const BiFunctionalDataset& data,
                                     const std::vector<std::vector<Index>>& column_sets,
                                     const SearchSpec& spec) {
  if (!spec.directions || spec.directions->empty()) throw ValidationError("direction set is empty");
  spec.scad.validate();
  const Index n = data.n();
  const Index p = data.p();

  // Union of all requested columns; each set maps into it.
  std::vector<Index> uni;
  for (const auto& s : column_sets) {
    for (Index j : s) {
      if (j < 0 || j >= p) throw ValidationError("column index outside the zeta grid");
      uni.push_back(j);
    }
  }
  std::sort(uni.begin(), uni.end());
  uni.erase(std::unique(uni.begin(), uni.end()), uni.end());
  std::map<Index, Index> pos;
  for (std::size_t i = 0; i < uni.size(); ++i) pos[uni[i]] = static_cast<Index>(i);

  // Columns 0..u-1 hold the union, the last column holds y.
  const Index u = static_cast<Index>(uni.size());
  Eigen::MatrixXd raw(n, u + 1);
  for (Index c = 0; c < u; ++c) raw.col(c) = data.zeta().col(uni[static_cast<std::size_t>(c)]);
  raw.col(u) = data.y();

  std::vector<std::vector<Index>> local(column_sets.size());
  for (std::size_t s = 0; s < column_sets.size(); ++s)
    for (Index j : column_sets[s]) local[s].push_back(pos.at(j));

  const DirectionSet& dirs = *spec.directions;
  std::vector<std::vector<CellChoice>> per_dir(dirs.size());

  parallel_for(dirs.size(), spec.workers, [&](std::size_t d) {
    std::vector<CellChoice> best(column_sets.size());
    const Eigen::VectorXd proj = project_rows(dirs[d], *data.x_grid(), data.x());
    const auto hs = bandwidth_grid(proj, spec.bandwidth_quantiles);
    for (double h : hs) {
      const ProjectedSmoother smoother(proj, h);
      const Eigen::MatrixXd t = smoother.residualize(raw);
      const Eigen::VectorXd yt = t.col(u);
      for (std::size_t s = 0; s < column_sets.size(); ++s) {
        Eigen::MatrixXd z(n, static_cast<Index>(local[s].size()));
        for (std::size_t c = 0; c < local[s].size(); ++c) z.col(static_cast<Index>(c)) = t.col(local[s][c]);
        CellChoice cell = best_on_path(ScadProblem(std::move(z), yt), spec.scad);
        cell.direction_index = d;
        cell.h = h;
        const std::size_t fits = best[s].fits + cell.fits;
        const std::size_t nonconv = best[s].nonconverged + cell.nonconverged;
        if (precedes(cell, best[s])) best[s] = std::move(cell);
        best[s].fits = fits;
        best[s].nonconverged = nonconv;
      }
    }
    per_dir[d] = std::move(best);
  });

  std::vector<CellChoice> out(column_sets.size());
  for (std::size_t d = 0; d < dirs.size(); ++d) {
    for (std::size_t s = 0; s < column_sets.size(); ++s) {
      const CellChoice& c = per_dir[d][s];
      const std::size_t fits = out[s].fits + c.fits;
      const std::size_t nonconv = out[s].nonconverged + c.nonconverged;
      if (precedes(c, out[s])) out[s] = c;
      out[s].fits = fits;
      out[s].nonconverged = nonconv;
    }
  }
  return out;
}

}  // namespace mfplsim
