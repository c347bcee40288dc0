#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mfplsim/fassmr.hpp"
#include "mfplsim/iassmr.hpp"
#include "mfplsim/rng.hpp"

namespace mfplsim {

enum class DesignKind { A, B, C };

std::string to_string(DesignKind k);
DesignKind parse_design(const std::string& s);

struct DesignSpec {
  DesignKind kind = DesignKind::A;
  Index n = 100;
  Index p = 101;
  Index n_test = 100;
  std::uint64_t seed = 1;
  /// Testing hook: generate Y without noise.
  bool noise_free = false;

  void validate() const;
};

struct Interval {
  double lo, hi;
};

struct GroundTruth {
  Eigen::VectorXd beta_true;            // over the zeta grid
  Direction theta_true;
  std::vector<double> impact_abscissae; // snapped to the zeta grid
  std::vector<Index> impact_indices;
  std::vector<Interval> good_region;
  double noise_sd = 0.0;

  /// True if t lies in the good region (closed intervals, 1e-9 slack).
  bool in_good_region(double t) const;
};

struct SimulatedDesign {
  BiFunctionalDataset train;
  BiFunctionalDataset test;
  GroundTruth truth;
  Eigen::VectorXd noise_train;
  Eigen::VectorXd noise_test;
};

/// Standard Brownian motion on a grid starting at 0.
Curve gen_brownian(const GridPtr& grid, Rng& rng);

/// a cos(2 pi t) + b sin(4 pi t) + 2 c (t - 0.25)(t - 0.5) with a, b, c ~ U[0, hi].
std::pair<Curve, Eigen::Vector3d> gen_xcurves(const GridPtr& grid, Rng& rng, double hi);

/// The same curve for given coefficients.
Curve xcurve(const GridPtr& grid, const Eigen::Vector3d& abc);

/// c t + d with d ~ N(0, 1).
Curve gen_lines(const GridPtr& grid, double c, Rng& rng);

/// theta_0 used by every design: order-3 B-splines, three interior knots.
Direction true_direction();

/// Replicate `replicate` of the design; draws come from stream (spec.seed, replicate).
SimulatedDesign gen_design(const DesignSpec& spec, std::uint64_t replicate = 0);

struct ImpactCounts {
  Index right = 0;
  Index wrong = 0;
};

ImpactCounts impact_metrics(const SupportSet& support, const GroundTruth& truth, const Grid& grid);

enum class Method { fassmr, iassmr, pls };

std::string to_string(Method m);
Method parse_method(const std::string& s);

struct ReplicateResult {
  Method method = Method::fassmr;
  Index replicate = 0;
  bool failed = false;
  std::string error;
  double msep = 0.0;
  Index right = 0;
  Index wrong = 0;
  SupportSet support;
  std::vector<Index> representatives;
  ChosenTuning chosen;
  double seconds = 0.0;
};

struct MethodSummary {
  Method method = Method::fassmr;
  Index replicates = 0;
  Index failures = 0;
  double mean_msep = 0.0;
  double sd_msep = 0.0;
  double mean_right = 0.0;
  double mean_wrong = 0.0;
  double mean_seconds = 0.0;
};

struct MetricsSummary {
  DesignSpec spec;
  Index M = 0;
  std::vector<MethodSummary> methods;
  std::vector<ReplicateResult> replicates;  // ordered by (replicate, method)
};

struct MonteCarloOptions {
  std::vector<Method> methods{Method::fassmr, Method::pls};
  Index M = 20;
  int workers = 1;
  FassmrConfig fassmr;  // shared by FASSMR and the PLS baseline
  IassmrConfig iassmr;  // its stage1 is replaced by `fassmr`
  /// FASSMR and PLS use only the first rows of each training sample.
  std::optional<Index> fassmr_rows;
};

MetricsSummary monte_carlo(const DesignSpec& spec, const MonteCarloOptions& options);

/// Summary of already computed replicates of one method.
MethodSummary summarize(Method m, const std::vector<ReplicateResult>& replicates);

}  // namespace mfplsim
