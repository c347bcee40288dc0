#pragma once

#include <cstddef>
#include <memory>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "mfplsim/errors.hpp"

namespace mfplsim {

using Index = Eigen::Index;

/// Composite trapezoid weights for nodes `t`. Dotting them with sampled values
/// of f integrates f over [t.front(), t.back()].
template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> trapezoid_weights(
    const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& t) {
  const Index p = t.size();
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> w = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>::Zero(p);
  for (Index j = 0; j + 1 < p; ++j) {
    const Scalar half = (t[j + 1] - t[j]) / Scalar(2);
    w[j] += half;
    w[j + 1] += half;
  }
  return w;
}

/// Ordered abscissae t_1 < ... < t_p, with their quadrature weights.
class Grid {
public:
  enum class Spacing { uniform, regular };

  explicit Grid(Eigen::VectorXd points);

  static std::shared_ptr<const Grid> uniform(double a, double b, Index p);

  const Eigen::VectorXd& points() const noexcept { return points_; }
  const Eigen::VectorXd& weights() const noexcept { return weights_; }
  Index size() const noexcept { return points_.size(); }
  double front() const noexcept { return points_[0]; }
  double back() const noexcept { return points_[points_.size() - 1]; }
  Spacing spacing() const noexcept { return spacing_; }

  /// Index of the grid point nearest to t (ties resolve to the lower index).
  Index nearest(double t) const;

  bool same_as(const Grid& other) const;

private:
  Eigen::VectorXd points_;
  Eigen::VectorXd weights_;
  Spacing spacing_;
};

using GridPtr = std::shared_ptr<const Grid>;

/// A sampled path on a grid.
class Curve {
public:
  Curve(GridPtr grid, Eigen::VectorXd values);

  const GridPtr& grid() const noexcept { return grid_; }
  const Eigen::VectorXd& values() const noexcept { return values_; }

private:
  GridPtr grid_;
  Eigen::VectorXd values_;
};

/// Integral of f*g over the shared grid domain (composite trapezoid).
double inner_product(const Curve& f, const Curve& g);

/// n samples of (zeta on zeta_grid, X on x_grid, Y). Rows are samples.
class BiFunctionalDataset {
public:
  BiFunctionalDataset(GridPtr zeta_grid, Eigen::MatrixXd zeta, GridPtr x_grid,
                      Eigen::MatrixXd x, Eigen::VectorXd y);

  Index n() const noexcept { return y_.size(); }
  Index p() const noexcept { return zeta_.cols(); }

  const GridPtr& zeta_grid() const noexcept { return zeta_grid_; }
  const GridPtr& x_grid() const noexcept { return x_grid_; }
  const Eigen::MatrixXd& zeta() const noexcept { return zeta_; }
  const Eigen::MatrixXd& x() const noexcept { return x_; }
  const Eigen::VectorXd& y() const noexcept { return y_; }

  Curve zeta_curve(Index i) const { return Curve(zeta_grid_, zeta_.row(i).transpose()); }
  Curve x_curve(Index i) const { return Curve(x_grid_, x_.row(i).transpose()); }

  /// Contiguous row block [first, first + count).
  BiFunctionalDataset rows(Index first, Index count) const;

  /// Rows reordered by `order` (a permutation or any index selection).
  BiFunctionalDataset select(const std::vector<Index>& order) const;

  /// Same curves with a different response vector.
  BiFunctionalDataset with_response(Eigen::VectorXd y) const;

private:
  GridPtr zeta_grid_;
  Eigen::MatrixXd zeta_;
  GridPtr x_grid_;
  Eigen::MatrixXd x_;
  Eigen::VectorXd y_;
};

/// Sorted grid indices (0-based) with nonzero linear coefficient.
struct SupportSet {
  std::vector<Index> indices;

  std::size_t size() const noexcept { return indices.size(); }
  bool empty() const noexcept { return indices.empty(); }
  bool contains(Index j) const;

  static SupportSet from_coefficients(const Eigen::VectorXd& beta);
};

/// First n1 rows and the following n2 rows, order preserved.
std::pair<BiFunctionalDataset, BiFunctionalDataset> split_dataset(const BiFunctionalDataset& d,
                                                                  Index n1, Index n2);

}  // namespace mfplsim
