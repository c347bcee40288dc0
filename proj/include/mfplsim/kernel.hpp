#pragma once

#include <vector>

#include <Eigen/Core>

#include "mfplsim/direction.hpp"
#include "mfplsim/functional.hpp"

namespace mfplsim {

/// Epanechnikov kernel on nonnegative distance ratios: 3/4 (1 - u^2) on [0, 1].
template <typename Scalar>
constexpr Scalar epanechnikov(Scalar u) {
  return (u >= Scalar(0) && u <= Scalar(1)) ? Scalar(0.75) * (Scalar(1) - u * u) : Scalar(0);
}

struct KernelSpec {
  enum class Family { epanechnikov };
  Family family = Family::epanechnikov;

  double operator()(double u) const { return epanechnikov(u); }
};

/// |<theta, chi1 - chi2>|
double semimetric(const Direction& theta, const Curve& chi1, const Curve& chi2);

/// Dense Nadaraya-Watson weight matrix: row i holds the weights of every
/// sample at X_i.
struct WeightMatrix {
  Eigen::MatrixXd w;
  Direction theta;
  double h;
};

WeightMatrix nw_weights(const Grid& x_grid, const Eigen::MatrixXd& x, const Direction& theta, double h,
                        const KernelSpec& kernel = {});

/// Weight matrix for samples already projected on theta.
Eigen::MatrixXd nw_weights_from_projections(const Eigen::VectorXd& u, double h,
                                            const KernelSpec& kernel = {});

struct TransformedDesign {
  Eigen::VectorXd y_tilde;
  Eigen::MatrixXd z_tilde;
};

/// ((I - W) y, (I - W) Z)
TransformedDesign transform(const WeightMatrix& w, const Eigen::VectorXd& y, const Eigen::MatrixXd& z);

/// Computes W M for the Epanechnikov weight matrix of 1-D projections u
/// without forming W. Each kernel row is a contiguous window of the sorted
/// projections, and on that window K is a quadratic in the projection, so
/// window sums reduce to three prefix sums per column: O(n log n + n k).
class ProjectedSmoother {
public:
  ProjectedSmoother(const Eigen::VectorXd& u, double h);

  Index size() const noexcept { return static_cast<Index>(order_.size()); }
  double bandwidth() const noexcept { return h_; }

  /// W * m, column by column.
  Eigen::MatrixXd smooth(const Eigen::MatrixXd& m) const;

  /// (I - W) * m.
  Eigen::MatrixXd residualize(const Eigen::MatrixXd& m) const { return m - smooth(m); }

private:
  double h_;
  std::vector<Index> order_;     // sorted position -> sample index
  Eigen::VectorXd v_;            // centred, bandwidth-scaled projections in sorted order
  std::vector<Index> lo_, hi_;   // kernel window [lo, hi) in sorted order
  Eigen::VectorXd denom_;        // row sums of the unnormalised kernel, sorted order
  bool direct_ = false;          // sum windows explicitly instead of via prefix sums
};

/// Bandwidths at the given quantile levels of the pairwise projected
/// distances {|u_i - u_j| : i < j}. Nonpositive and repeated values dropped;
/// result ascending.
std::vector<double> bandwidth_grid(const Eigen::VectorXd& u, const std::vector<double>& quantiles);

/// Default quantile levels 0.05, 0.10, ..., 0.50.
std::vector<double> default_bandwidth_quantiles();

/// Everything needed to evaluate the residual-smoothing link estimator.
struct LinkState {
  Direction theta;
  double h;
  GridPtr x_grid;
  Eigen::VectorXd projections;  // <theta, X_i> over the training sample
  Eigen::VectorXd residuals;    // Y_i - zeta_i' beta
};

struct LinkEstimate {
  double value;
  bool extrapolated;  // no training sample inside the kernel support; nearest neighbour used
};

LinkState make_link_state(const BiFunctionalDataset& train, const Eigen::VectorXd& beta_full,
                          const Direction& theta, double h);

LinkEstimate evaluate_link(const LinkState& state, double projection, const KernelSpec& kernel = {});
LinkEstimate evaluate_link(const LinkState& state, const Curve& chi, const KernelSpec& kernel = {});

/// Nadaraya-Watson smooth of the residuals Y_i - zeta_i' beta at chi.
LinkEstimate estimate_link(const BiFunctionalDataset& train, const Eigen::VectorXd& beta_full,
                           const Direction& theta, double h, const Curve& chi);

}  // namespace mfplsim
