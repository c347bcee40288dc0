#include "mfplsim/fassmr.hpp"

#include <algorithm>
#include <sstream>

#include "mfplsim/search.hpp"

namespace mfplsim {

void FassmrConfig::validate(Index p) const {
  if (w_candidates.empty()) throw ValidationError("w candidate set is empty");
  for (Index w : w_candidates) {
    if (w < 1 || w > p) {
      std::ostringstream os;
      os << "w = " << w << " must lie in [1, p = " << p << "]";
      throw ValidationError(os.str());
    }
  }
  if (direction_set.empty()) throw ValidationError("direction set is empty");
  if (bandwidth_quantiles.empty()) throw ValidationError("bandwidth quantile set is empty");
  for (double q : bandwidth_quantiles)
    if (!(q > 0.0 && q <= 1.0)) throw ValidationError("bandwidth quantiles must lie in (0, 1]");
  if (workers < 1) throw ValidationError("workers must be positive");
  scad.validate();
}

DirectionSet default_direction_set(int interior_knots, double a, double b) {
  if (interior_knots < 0) throw ValidationError("interior knot count must be nonnegative");
  auto basis = std::make_shared<const BSplineBasis>(3, interior_knots, a, b);
  return enumerate_directions(basis, {-1.0, 0.0, 1.0});
}

FitResult make_fit_result(const std::string& method, const BiFunctionalDataset& data,
                          Eigen::VectorXd beta_full, const Direction& theta, const ChosenTuning& chosen) {
  LinkState link = make_link_state(data, beta_full, theta, chosen.h);
  FitResult r(method, data.zeta_grid(), std::move(beta_full), theta, chosen, std::move(link));
  r.interior_knots = theta.basis()->interior_knots();
  return r;
}

FitResult fassmr_fit(const BiFunctionalDataset& data, const FassmrConfig& config) {
  config.validate(data.p());
  if (data.n() < 2) throw ValidationError("fitting needs at least two samples");

  std::vector<Index> ws = config.w_candidates;
  std::sort(ws.begin(), ws.end());
  ws.erase(std::unique(ws.begin(), ws.end()), ws.end());

  std::vector<ReductionScheme> schemes;
  std::vector<std::vector<Index>> sets;
  for (Index w : ws) {
    schemes.push_back(build_reduction(data.p(), w));
    sets.push_back(schemes.back().reps);
  }

  const SearchSpec spec{&config.direction_set, config.bandwidth_quantiles, config.scad, config.workers};
  const auto cells = search_cells(data, sets, spec);

  // ws ascending, so strict comparison on BIC keeps the smaller w on ties
  std::size_t best = cells.size();
  std::size_t fits = 0, nonconv = 0;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    fits += cells[i].fits;
    nonconv += cells[i].nonconverged;
    if (!cells[i].valid) continue;
    if (best == cells.size() || cells[i].bic < cells[best].bic) best = i;
  }
  if (best == cells.size()) throw NumericalError("no admissible (theta, h, lambda) cell: every path point had df >= n");

  const CellChoice& c = cells[best];
  const ReductionScheme& scheme = schemes[best];
  Eigen::VectorXd beta_full = Eigen::VectorXd::Zero(data.p());
  for (std::size_t k = 0; k < scheme.reps.size(); ++k) beta_full[scheme.reps[k]] = c.beta[static_cast<Index>(k)];

  ChosenTuning chosen{ws[best], c.direction_index, c.h, c.lambda, c.bic, c.df, c.rss, c.converged};
  FitResult r = make_fit_result("fassmr", data, std::move(beta_full), config.direction_set[c.direction_index], chosen);
  r.representatives = scheme.reps;
  r.fits = fits;
  r.nonconverged = nonconv;
  r.all_nonconverged = fits > 0 && nonconv == fits;
  return r;
}

FitResult standard_pls_fit(const BiFunctionalDataset& data, const FassmrConfig& config) {
  FassmrConfig c = config;
  c.w_candidates = {data.p()};
  FitResult r = fassmr_fit(data, c);
  r.method = "pls";
  return r;
}

Prediction predict(const FitResult& fit, const Curve& zeta_new, const Curve& x_new) {
  if (!zeta_new.grid()->same_as(*fit.zeta_grid)) throw ValidationError("zeta grid differs from training grid");
  const LinkEstimate m = evaluate_link(fit.link_state, x_new);
  return {zeta_new.values().dot(fit.beta_full) + m.value, m.extrapolated};
}

Eigen::VectorXd predict(const FitResult& fit, const BiFunctionalDataset& data, Index* extrapolated) {
  Eigen::VectorXd out(data.n());
  Index ex = 0;
  for (Index i = 0; i < data.n(); ++i) {
    const Prediction p = predict(fit, data.zeta_curve(i), data.x_curve(i));
    out[i] = p.value;
    if (p.extrapolated) ++ex;
  }
  if (extrapolated) *extrapolated = ex;
  return out;
}

double msep(const Eigen::VectorXd& predictions, const Eigen::VectorXd& truth) {
  if (predictions.size() != truth.size() || predictions.size() < 1)
    throw ValidationError("msep needs two sequences of equal positive length");
  return (predictions - truth).squaredNorm() / static_cast<double>(truth.size());
}

}  // namespace mfplsim
