#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "mfplsim/bspline.hpp"
#include "mfplsim/functional.hpp"

namespace mfplsim {

/// Options controlling how seed tuples become calibrated directions.
struct CalibrationOptions {
  /// Points of the uniform quadrature grid used for <theta, theta> = 1.
  Index quadrature_points = 1001;
  /// Sign anchor; defaults to the domain midpoint.
  std::optional<double> anchor;
  /// Maximum number of seed tuples enumerate_directions may visit.
  std::size_t max_tuples = 2'000'000;
};

/// theta(t) = sum_j coeffs[j] e_j(t) over a B-spline basis.
class Direction {
public:
  Direction(BasisPtr basis, Eigen::VectorXd coeffs);

  /// Rescale `seed` so <theta, theta> = 1 and theta(anchor) > 0. Returns
  /// nullopt when the seed is null or theta(anchor) == 0.
  static std::optional<Direction> calibrate(BasisPtr basis, const Eigen::VectorXd& seed,
                                            const CalibrationOptions& opts = {});

  const BasisPtr& basis() const noexcept { return basis_; }
  const Eigen::VectorXd& coeffs() const noexcept { return coeffs_; }

  double operator()(double t) const { return basis_->eval(t).dot(coeffs_); }

  /// theta sampled on grid points.
  Eigen::VectorXd render(const Grid& grid) const;

  /// Quadrature-weighted samples: projections of curves stored row-wise in X
  /// on `grid` are X * projection_weights(grid).
  Eigen::VectorXd projection_weights(const Grid& grid) const;

  /// <theta, theta> under trapezoid quadrature on a uniform grid of `points` nodes.
  double norm_squared(Index points = 1001) const;

private:
  BasisPtr basis_;
  Eigen::VectorXd coeffs_;
};

/// Candidate set of directions; ordering follows the lexicographic order of
/// the seed tuples that produced them.
struct DirectionSet {
  std::vector<Direction> directions;

  std::size_t size() const noexcept { return directions.size(); }
  bool empty() const noexcept { return directions.empty(); }
  const Direction& operator[](std::size_t i) const { return directions[i]; }
};

/// All tuples of `seeds`^d except the null tuple, calibrated, sign anchored,
/// with anchor-zero tuples dropped and duplicates (max-abs difference below
/// 1e-10) removed.
DirectionSet enumerate_directions(const BasisPtr& basis, std::vector<double> seeds,
                                  const CalibrationOptions& opts = {});

/// <theta, chi> on chi's grid. The grid must span the basis domain.
double project(const Direction& theta, const Curve& chi);

/// Projections of every row of `x` (curves on `grid`).
Eigen::VectorXd project_rows(const Direction& theta, const Grid& grid, const Eigen::MatrixXd& x);

}  // namespace mfplsim
