#pragma once

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

#include "mfplsim/direction.hpp"
#include "mfplsim/functional.hpp"
#include "mfplsim/kernel.hpp"
#include "mfplsim/reduction.hpp"
#include "mfplsim/scad.hpp"

namespace mfplsim {

struct FassmrConfig {
  std::vector<Index> w_candidates{10, 15, 20};
  DirectionSet direction_set;
  std::vector<double> bandwidth_quantiles = default_bandwidth_quantiles();
  ScadConfig scad;
  int workers = 1;

  /// Throws ValidationError unless every w lies in [1, p] and the direction set is nonempty.
  void validate(Index p) const;
};

/// Candidate directions from B-splines of order 3 with `interior_knots`
/// uniform interior knots and seeds {-1, 0, 1}.
DirectionSet default_direction_set(int interior_knots = 3, double a = 0.0, double b = 1.0);

struct ChosenTuning {
  Index w = 0;
  std::size_t direction_index = 0;
  double h = 0.0;
  double lambda = 0.0;
  double bic = 0.0;
  Index df = 0;
  double rss = 0.0;
  bool converged = false;
};

struct StageRecord {
  Index w = 0;
  ChosenTuning stage1;
  std::vector<Index> stage1_support;  // full-grid indices (block representatives)
  std::vector<Index> second_stage;    // R2: full blocks of the selected representatives
  bool stage2_valid = false;
  ChosenTuning stage2;
};

struct StageTrace {
  Index n1 = 0;
  Index n2 = 0;
  std::vector<StageRecord> records;
  Index chosen_w = 0;
  bool degenerate = false;  // every second-stage set was empty
};

struct FitResult {
  FitResult(std::string method_, GridPtr zeta_grid_, Eigen::VectorXd beta, Direction theta,
            ChosenTuning chosen_, LinkState link)
      : method(std::move(method_)), zeta_grid(std::move(zeta_grid_)), beta_full(std::move(beta)),
        support(SupportSet::from_coefficients(beta_full)), theta_hat(std::move(theta)), chosen(chosen_),
        link_state(std::move(link)) {}

  std::string method;
  GridPtr zeta_grid;
  Eigen::VectorXd beta_full;
  SupportSet support;
  Direction theta_hat;
  ChosenTuning chosen;
  LinkState link_state;
  std::vector<Index> representatives;  // reps of the chosen reduction (FASSMR)
  std::size_t fits = 0;
  std::size_t nonconverged = 0;
  bool all_nonconverged = false;
  bool degenerate = false;
  int interior_knots = 0;
  std::optional<StageTrace> stage_trace;
};

/// Result record with support, link state and knot count filled in from
/// `beta_full` and the training data.
FitResult make_fit_result(const std::string& method, const BiFunctionalDataset& data,
                          Eigen::VectorXd beta_full, const Direction& theta, const ChosenTuning& chosen);

/// Grid search over (w, theta, h, lambda). Ties between cells resolve by
/// (BIC, smaller w, direction index, smaller h, larger lambda).
FitResult fassmr_fit(const BiFunctionalDataset& data, const FassmrConfig& config);

/// Penalised profile least squares on every grid point: fassmr_fit with w = p.
FitResult standard_pls_fit(const BiFunctionalDataset& data, const FassmrConfig& config);

struct Prediction {
  double value;
  bool extrapolated;
};

Prediction predict(const FitResult& fit, const Curve& zeta_new, const Curve& x_new);

/// Predictions for every row of `data`.
Eigen::VectorXd predict(const FitResult& fit, const BiFunctionalDataset& data,
                        Index* extrapolated = nullptr);

double msep(const Eigen::VectorXd& predictions, const Eigen::VectorXd& truth);

/// Runs `fit` once per interior-knot count and keeps the lowest BIC (ties to
/// fewer knots). `fit` receives a config whose direction set was rebuilt.
template <typename FitFn>
FitResult select_knots(const BiFunctionalDataset& data, FassmrConfig config,
                       std::vector<int> knot_counts, FitFn&& fit) {
  if (knot_counts.empty()) throw ValidationError("knot list is empty");
  std::sort(knot_counts.begin(), knot_counts.end());
  knot_counts.erase(std::unique(knot_counts.begin(), knot_counts.end()), knot_counts.end());
  std::optional<FitResult> best;
  for (int m : knot_counts) {
    config.direction_set =
        default_direction_set(m, data.x_grid()->front(), data.x_grid()->back());
    FitResult r = fit(data, config);
    r.interior_knots = m;
    if (!best || r.chosen.bic < best->chosen.bic) best = std::move(r);
  }
  return std::move(*best);
}

}  // namespace mfplsim
