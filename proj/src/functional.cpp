#include "mfplsim/functional.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace mfplsim {

Grid::Grid(Eigen::VectorXd points) : points_(std::move(points)) {
  if (points_.size() < 1) throw ValidationError("grid must contain at least one point");
  for (Index j = 0; j < points_.size(); ++j) {
    if (!std::isfinite(points_[j])) {
      std::ostringstream os;
      os << "grid abscissa " << j << " is not finite";
      throw ValidationError(os.str());
    }
    if (j > 0 && !(points_[j] > points_[j - 1])) {
      std::ostringstream os;
      os << "grid not strictly increasing at index " << j << " (" << points_[j - 1] << " -> "
         << points_[j] << ")";
      throw ValidationError(os.str());
    }
  }
  weights_ = trapezoid_weights<double>(points_);

  spacing_ = Spacing::uniform;
  if (points_.size() > 2) {
    const double h0 = (back() - front()) / static_cast<double>(points_.size() - 1);
    for (Index j = 0; j + 1 < points_.size(); ++j) {
      if (std::abs((points_[j + 1] - points_[j]) - h0) > 1e-9 * std::max(1.0, std::abs(h0))) {
        spacing_ = Spacing::regular;
        break;
      }
    }
  }
}

std::shared_ptr<const Grid> Grid::uniform(double a, double b, Index p) {
  if (p < 2) throw ValidationError("uniform grid needs at least two points");
  if (!(b > a)) throw ValidationError("uniform grid needs b > a");
  Eigen::VectorXd t(p);
  for (Index j = 0; j < p; ++j)
    t[j] = a + (b - a) * static_cast<double>(j) / static_cast<double>(p - 1);
  t[p - 1] = b;
  return std::make_shared<const Grid>(std::move(t));
}

Index Grid::nearest(double t) const {
  const auto* begin = points_.data();
  const auto* end = begin + points_.size();
  const auto* it = std::lower_bound(begin, end, t);
  if (it == begin) return 0;
  if (it == end) return points_.size() - 1;
  const Index hi = it - begin;
  const Index lo = hi - 1;
  return (t - points_[lo] <= points_[hi] - t) ? lo : hi;
}

bool Grid::same_as(const Grid& other) const {
  if (this == &other) return true;
  return points_.size() == other.points_.size() && points_ == other.points_;
}

Curve::Curve(GridPtr grid, Eigen::VectorXd values) : grid_(std::move(grid)), values_(std::move(values)) {
  if (!grid_) throw ValidationError("curve without grid");
  if (values_.size() != grid_->size()) {
    std::ostringstream os;
    os << "curve has " << values_.size() << " values for a grid of " << grid_->size() << " points";
    throw ValidationError(os.str());
  }
  if (!values_.allFinite()) throw ValidationError("curve values must be finite");
}

double inner_product(const Curve& f, const Curve& g) {
  if (!f.grid()->same_as(*g.grid())) throw ValidationError("grid mismatch in inner product");
  return f.grid()->weights().dot(f.values().cwiseProduct(g.values()));
}

BiFunctionalDataset::BiFunctionalDataset(GridPtr zeta_grid, Eigen::MatrixXd zeta, GridPtr x_grid,
                                         Eigen::MatrixXd x, Eigen::VectorXd y)
    : zeta_grid_(std::move(zeta_grid)),
      zeta_(std::move(zeta)),
      x_grid_(std::move(x_grid)),
      x_(std::move(x)),
      y_(std::move(y)) {
  if (!zeta_grid_ || !x_grid_) throw ValidationError("dataset requires both grids");
  if (zeta_.rows() != y_.size() || x_.rows() != y_.size()) {
    std::ostringstream os;
    os << "row counts differ: zeta " << zeta_.rows() << ", x " << x_.rows() << ", y " << y_.size();
    throw DataError(os.str());
  }
  if (zeta_.cols() != zeta_grid_->size())
    throw DataError("zeta column count does not match its grid");
  if (x_.cols() != x_grid_->size()) throw DataError("x column count does not match its grid");
  if (!zeta_.allFinite() || !x_.allFinite() || !y_.allFinite())
    throw DataError("dataset contains non-finite values");
}

BiFunctionalDataset BiFunctionalDataset::rows(Index first, Index count) const {
  if (first < 0 || count < 0 || first + count > n()) throw ValidationError("row block out of range");
  return BiFunctionalDataset(zeta_grid_, zeta_.middleRows(first, count), x_grid_,
                             x_.middleRows(first, count), y_.segment(first, count));
}

BiFunctionalDataset BiFunctionalDataset::select(const std::vector<Index>& order) const {
  const Index m = static_cast<Index>(order.size());
  Eigen::MatrixXd z(m, p()), xx(m, x_.cols());
  Eigen::VectorXd yy(m);
  for (Index r = 0; r < m; ++r) {
    const Index i = order[static_cast<std::size_t>(r)];
    if (i < 0 || i >= n()) throw ValidationError("row selection out of range");
    z.row(r) = zeta_.row(i);
    xx.row(r) = x_.row(i);
    yy[r] = y_[i];
  }
  return BiFunctionalDataset(zeta_grid_, std::move(z), x_grid_, std::move(xx), std::move(yy));
}

BiFunctionalDataset BiFunctionalDataset::with_response(Eigen::VectorXd y) const {
  return BiFunctionalDataset(zeta_grid_, zeta_, x_grid_, x_, std::move(y));
}

bool SupportSet::contains(Index j) const {
  return std::binary_search(indices.begin(), indices.end(), j);
}

SupportSet SupportSet::from_coefficients(const Eigen::VectorXd& beta) {
  SupportSet s;
  for (Index j = 0; j < beta.size(); ++j)
    if (beta[j] != 0.0) s.indices.push_back(j);
  return s;
}

std::pair<BiFunctionalDataset, BiFunctionalDataset> split_dataset(const BiFunctionalDataset& d,
                                                                  Index n1, Index n2) {
  if (n1 < 1 || n2 < 1) throw ValidationError("split sizes must be at least 1");
  if (n1 + n2 > d.n()) {
    std::ostringstream os;
    os << "split sizes " << n1 << " + " << n2 << " exceed the " << d.n() << " available rows";
    throw ValidationError(os.str());
  }
  return {d.rows(0, n1), d.rows(n1, n2)};
}

}  // namespace mfplsim
