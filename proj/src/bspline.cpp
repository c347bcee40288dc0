#include "mfplsim/bspline.hpp"

#include <sstream>

namespace mfplsim {

BSplineBasis::BSplineBasis(int order, int interior_knots, double a, double b)
    : order_(order), interior_(interior_knots), a_(a), b_(b) {
  if (order < 2) throw ValidationError("B-spline order must be at least 2");
  if (interior_knots < 0) throw ValidationError("interior knot count must be nonnegative");
  if (!(b > a)) throw ValidationError("B-spline domain needs b > a");

  knots_.resize(2 * order + interior_knots);
  Index k = 0;
  for (int i = 0; i < order; ++i) knots_[k++] = a;
  for (int i = 1; i <= interior_knots; ++i)
    knots_[k++] = a + (b - a) * static_cast<double>(i) / static_cast<double>(interior_knots + 1);
  for (int i = 0; i < order; ++i) knots_[k++] = b;
}

Eigen::VectorXd BSplineBasis::eval(double t) const {
  if (!(t >= a_ && t <= b_)) {
    std::ostringstream os;
    os << "B-spline evaluation point " << t << " outside domain [" << a_ << ", " << b_ << "]";
    throw ValidationError(os.str());
  }
  const Index d = dimension();
  const Index nk = knots_.size();

  // Knot span mu with knots[mu] <= t < knots[mu+1]; the right endpoint is
  // assigned to the last nonempty span.
  Index mu = order_ - 1;
  while (mu + 1 < nk - order_ && knots_[mu + 1] <= t) ++mu;

  // Triangular Cox-de Boor table over the order_ functions supported on span mu.
  Eigen::VectorXd local = Eigen::VectorXd::Zero(order_);
  local[0] = 1.0;
  for (int deg = 1; deg < order_; ++deg) {
    double saved = 0.0;
    for (int r = 0; r < deg; ++r) {
      const double right = knots_[mu + 1 + r] - t;
      const double left = t - knots_[mu + 1 + r - deg];
      const double denom = right + left;
      const double term = denom > 0.0 ? local[r] / denom : 0.0;
      local[r] = saved + right * term;
      saved = left * term;
    }
    local[deg] = saved;
  }

  Eigen::VectorXd out = Eigen::VectorXd::Zero(d);
  for (int r = 0; r < order_; ++r) {
    const Index j = mu - (order_ - 1) + r;
    if (j >= 0 && j < d) out[j] = local[r];
  }
  return out;
}

Eigen::MatrixXd BSplineBasis::eval(const Eigen::VectorXd& t) const {
  Eigen::MatrixXd m(t.size(), dimension());
  for (Index i = 0; i < t.size(); ++i) m.row(i) = eval(t[i]).transpose();
  return m;
}

}  // namespace mfplsim
