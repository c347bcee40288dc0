#include "mfplsim/direction.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace mfplsim {

namespace {

void check_domain(const BSplineBasis& basis, const Grid& grid) {
  const double scale = std::max(1.0, std::abs(basis.upper() - basis.lower()));
  if (std::abs(grid.front() - basis.lower()) > 1e-9 * scale ||
      std::abs(grid.back() - basis.upper()) > 1e-9 * scale) {
    std::ostringstream os;
    os << "grid domain [" << grid.front() << ", " << grid.back() << "] differs from direction domain ["
       << basis.lower() << ", " << basis.upper() << "]";
    throw ValidationError(os.str());
  }
}

Eigen::VectorXd clamped_render(const BSplineBasis& basis, const Eigen::VectorXd& coeffs,
                               const Grid& grid) {
  Eigen::VectorXd v(grid.size());
  for (Index j = 0; j < grid.size(); ++j) {
    const double t = std::clamp(grid.points()[j], basis.lower(), basis.upper());
    v[j] = basis.eval(t).dot(coeffs);
  }
  return v;
}

}  // namespace

Direction::Direction(BasisPtr basis, Eigen::VectorXd coeffs)
    : basis_(std::move(basis)), coeffs_(std::move(coeffs)) {
  if (!basis_) throw ValidationError("direction without basis");
  if (coeffs_.size() != basis_->dimension()) {
    std::ostringstream os;
    os << "direction has " << coeffs_.size() << " coefficients for a basis of dimension "
       << basis_->dimension();
    throw ValidationError(os.str());
  }
}

double Direction::norm_squared(Index points) const {
  const auto grid = Grid::uniform(basis_->lower(), basis_->upper(), points);
  const Eigen::VectorXd v = render(*grid);
  return grid->weights().dot(v.cwiseAbs2());
}

std::optional<Direction> Direction::calibrate(BasisPtr basis, const Eigen::VectorXd& seed,
                                              const CalibrationOptions& opts) {
  Direction raw(basis, seed);
  const double nsq = raw.norm_squared(opts.quadrature_points);
  if (!(nsq > 0.0)) return std::nullopt;
  Eigen::VectorXd c = seed / std::sqrt(nsq);
  const double anchor = opts.anchor.value_or(0.5 * (basis->lower() + basis->upper()));
  const double at_anchor = basis->eval(anchor).dot(c);
  if (std::abs(at_anchor) <= 1e-12) return std::nullopt;
  if (at_anchor < 0.0) c = -c;
  return Direction(std::move(basis), std::move(c));
}

Eigen::VectorXd Direction::render(const Grid& grid) const {
  return clamped_render(*basis_, coeffs_, grid);
}

Eigen::VectorXd Direction::projection_weights(const Grid& grid) const {
  check_domain(*basis_, grid);
  return grid.weights().cwiseProduct(render(grid));
}

DirectionSet enumerate_directions(const BasisPtr& basis, std::vector<double> seeds,
                                  const CalibrationOptions& opts) {
  if (seeds.empty()) throw ValidationError("seed-coefficient set is empty");
  std::sort(seeds.begin(), seeds.end());
  seeds.erase(std::unique(seeds.begin(), seeds.end()), seeds.end());

  const Index d = basis->dimension();
  const std::size_t m = seeds.size();
  double total = std::pow(static_cast<double>(m), static_cast<double>(d));
  if (total > static_cast<double>(opts.max_tuples)) {
    std::ostringstream os;
    os << "enumeration too large: " << m << "^" << d << " = " << total
       << " seed tuples exceeds the cap of " << opts.max_tuples << " (raise the cap to at least "
       << static_cast<unsigned long long>(total) << ")";
    throw ValidationError(os.str());
  }

  // Calibration is linear in the seed, so reuse one quadrature grid.
  const auto grid = Grid::uniform(basis->lower(), basis->upper(), opts.quadrature_points);
  const Eigen::MatrixXd B = basis->eval(grid->points());
  const Eigen::MatrixXd gram = B.transpose() * grid->weights().asDiagonal() * B;
  const double anchor = opts.anchor.value_or(0.5 * (basis->lower() + basis->upper()));
  const Eigen::VectorXd at_anchor = basis->eval(anchor);

  DirectionSet out;
  std::vector<std::size_t> digit(static_cast<std::size_t>(d), 0);
  Eigen::VectorXd seed(d);
  const auto n_tuples = static_cast<std::size_t>(total);
  for (std::size_t count = 0; count < n_tuples; ++count) {
    for (Index j = 0; j < d; ++j) seed[j] = seeds[digit[static_cast<std::size_t>(j)]];
    // advance odometer, last coordinate fastest
    for (Index j = d - 1; j >= 0; --j) {
      auto& dj = digit[static_cast<std::size_t>(j)];
      if (++dj < m) break;
      dj = 0;
    }

    const double nsq = seed.dot(gram * seed);
    if (!(nsq > 0.0)) continue;
    Eigen::VectorXd c = seed / std::sqrt(nsq);
    const double a = at_anchor.dot(c);
    if (std::abs(a) <= 1e-12) continue;
    if (a < 0.0) c = -c;

    bool duplicate = false;
    for (const auto& existing : out.directions) {
      if ((existing.coeffs() - c).cwiseAbs().maxCoeff() < 1e-10) {
        duplicate = true;
        break;
      }
    }
    if (!duplicate) out.directions.emplace_back(basis, std::move(c));
  }
  return out;
}

double project(const Direction& theta, const Curve& chi) {
  const Grid& grid = *chi.grid();
  return theta.projection_weights(grid).dot(chi.values());
}

Eigen::VectorXd project_rows(const Direction& theta, const Grid& grid, const Eigen::MatrixXd& x) {
  return x * theta.projection_weights(grid);
}

}  // namespace mfplsim
