#pragma once

#include <memory>

#include <Eigen/Core>

#include "mfplsim/functional.hpp"

namespace mfplsim {

/// B-spline basis of order `order` (degree order - 1) on [a, b] with
/// `interior_knots` uniformly spaced interior knots and endpoint knots of
/// multiplicity `order`. Dimension is order + interior_knots.
class BSplineBasis {
public:
  BSplineBasis(int order, int interior_knots, double a, double b);

  int order() const noexcept { return order_; }
  int interior_knots() const noexcept { return interior_; }
  Index dimension() const noexcept { return order_ + interior_; }
  double lower() const noexcept { return a_; }
  double upper() const noexcept { return b_; }
  const Eigen::VectorXd& knots() const noexcept { return knots_; }

  /// Values of all basis functions at t (Cox-de Boor). Throws outside [a, b].
  Eigen::VectorXd eval(double t) const;

  /// Basis matrix: row j holds eval(grid[j]).
  Eigen::MatrixXd eval(const Eigen::VectorXd& t) const;

  bool operator==(const BSplineBasis& o) const {
    return order_ == o.order_ && interior_ == o.interior_ && a_ == o.a_ && b_ == o.b_;
  }

private:
  int order_;
  int interior_;
  double a_, b_;
  Eigen::VectorXd knots_;
};

using BasisPtr = std::shared_ptr<const BSplineBasis>;

inline Eigen::VectorXd basis_eval(const BSplineBasis& basis, double t) { return basis.eval(t); }

}  // namespace mfplsim
