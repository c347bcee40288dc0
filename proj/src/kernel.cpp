#include "mfplsim/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace mfplsim {

double semimetric(const Direction& theta, const Curve& chi1, const Curve& chi2) {
  if (!chi1.grid()->same_as(*chi2.grid())) throw ValidationError("grid mismatch in semimetric");
  const Eigen::VectorXd v = theta.projection_weights(*chi1.grid());
  return std::abs(v.dot(chi1.values() - chi2.values()));
}

Eigen::MatrixXd nw_weights_from_projections(const Eigen::VectorXd& u, double h, const KernelSpec& kernel) {
  if (!(h > 0.0)) {
    std::ostringstream os;
    os << "bandwidth must be positive, got " << h;
    throw ValidationError(os.str());
  }
  const Index n = u.size();
  Eigen::MatrixXd w(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index l = 0; l < n; ++l) w(i, l) = kernel(std::abs(u[i] - u[l]) / h);
    const double s = w.row(i).sum();
    // s >= K(0) > 0 because the diagonal distance is zero
    w.row(i) /= s;
  }
  return w;
}

WeightMatrix nw_weights(const Grid& x_grid, const Eigen::MatrixXd& x, const Direction& theta, double h,
                        const KernelSpec& kernel) {
  if (x.rows() < 1) throw ValidationError("weight matrix needs at least one sample");
  const Eigen::VectorXd u = project_rows(theta, x_grid, x);
  return WeightMatrix{nw_weights_from_projections(u, h, kernel), theta, h};
}

TransformedDesign transform(const WeightMatrix& w, const Eigen::VectorXd& y, const Eigen::MatrixXd& z) {
  const Index n = w.w.rows();
  if (y.size() != n || z.rows() != n) throw ValidationError("transform dimension mismatch");
  TransformedDesign out;
  out.y_tilde = y - w.w * y;
  out.z_tilde = z - w.w * z;
  return out;
}

ProjectedSmoother::ProjectedSmoother(const Eigen::VectorXd& u, double h) : h_(h) {
  if (!(h > 0.0)) throw ValidationError("bandwidth must be positive");
  const Index n = u.size();
  order_.resize(static_cast<std::size_t>(n));
  std::iota(order_.begin(), order_.end(), Index{0});
  std::stable_sort(order_.begin(), order_.end(), [&](Index a, Index b) { return u[a] < u[b]; });

  Eigen::VectorXd us(n);
  for (Index r = 0; r < n; ++r) us[r] = u[order_[static_cast<std::size_t>(r)]];
  const double centre = n > 0 ? 0.5 * (us[0] + us[n - 1]) : 0.0;
  v_ = (us.array() - centre) / h;

  lo_.assign(static_cast<std::size_t>(n), 0);
  hi_.assign(static_cast<std::size_t>(n), 0);
  Index lo = 0, hi = 0;
  for (Index r = 0; r < n; ++r) {
    while (us[lo] <= us[r] - h) ++lo;
    if (hi < r + 1) hi = r + 1;
    while (hi < n && us[hi] < us[r] + h) ++hi;
    lo_[static_cast<std::size_t>(r)] = lo;
    hi_[static_cast<std::size_t>(r)] = hi;
  }

  // Prefix sums lose precision when the scaled projections are large relative
  // to the window; narrow windows are cheap to sum directly anyway.
  std::size_t window_total = 0;
  for (Index r = 0; r < n; ++r)
    window_total += static_cast<std::size_t>(hi_[static_cast<std::size_t>(r)] - lo_[static_cast<std::size_t>(r)]);
  direct_ = (n > 0 && v_.cwiseAbs().maxCoeff() > 256.0) ||
            window_total <= 4 * static_cast<std::size_t>(n);

  denom_.resize(n);
  if (direct_) {
    for (Index r = 0; r < n; ++r) {
      double s = 0.0;
      for (Index l = lo_[static_cast<std::size_t>(r)]; l < hi_[static_cast<std::size_t>(r)]; ++l) {
        const double d = v_[l] - v_[r];
        s += 0.75 * (1.0 - d * d);
      }
      denom_[r] = s;
    }
    return;
  }
  // Unnormalised kernel sums; the same prefix machinery as smooth().
  Eigen::VectorXd p0(n + 1), p1(n + 1), p2(n + 1);
  p0[0] = p1[0] = p2[0] = 0.0;
  for (Index r = 0; r < n; ++r) {
    p0[r + 1] = p0[r] + 1.0;
    p1[r + 1] = p1[r] + v_[r];
    p2[r + 1] = p2[r] + v_[r] * v_[r];
  }
  for (Index r = 0; r < n; ++r) {
    const Index a = lo_[static_cast<std::size_t>(r)], b = hi_[static_cast<std::size_t>(r)];
    const double s0 = p0[b] - p0[a], s1 = p1[b] - p1[a], s2 = p2[b] - p2[a];
    const double vi = v_[r];
    denom_[r] = 0.75 * ((1.0 - vi * vi) * s0 + 2.0 * vi * s1 - s2);
  }
}

Eigen::MatrixXd ProjectedSmoother::smooth(const Eigen::MatrixXd& m) const {
  const Index n = size();
  if (m.rows() != n) throw ValidationError("smoother dimension mismatch");
  Eigen::MatrixXd out(n, m.cols());
  if (direct_) {
    for (Index c = 0; c < m.cols(); ++c) {
      for (Index r = 0; r < n; ++r) {
        double s = 0.0;
        for (Index l = lo_[static_cast<std::size_t>(r)]; l < hi_[static_cast<std::size_t>(r)]; ++l) {
          const double d = v_[l] - v_[r];
          s += 0.75 * (1.0 - d * d) * m(order_[static_cast<std::size_t>(l)], c);
        }
        out(order_[static_cast<std::size_t>(r)], c) = s / denom_[r];
      }
    }
    return out;
  }
  Eigen::VectorXd p0(n + 1), p1(n + 1), p2(n + 1);
  for (Index c = 0; c < m.cols(); ++c) {
    p0[0] = p1[0] = p2[0] = 0.0;
    for (Index r = 0; r < n; ++r) {
      const double z = m(order_[static_cast<std::size_t>(r)], c);
      const double vz = v_[r] * z;
      p0[r + 1] = p0[r] + z;
      p1[r + 1] = p1[r] + vz;
      p2[r + 1] = p2[r] + v_[r] * vz;
    }
    for (Index r = 0; r < n; ++r) {
      const Index a = lo_[static_cast<std::size_t>(r)], b = hi_[static_cast<std::size_t>(r)];
      const double s0 = p0[b] - p0[a], s1 = p1[b] - p1[a], s2 = p2[b] - p2[a];
      const double vi = v_[r];
      const double num = 0.75 * ((1.0 - vi * vi) * s0 + 2.0 * vi * s1 - s2);
      out(order_[static_cast<std::size_t>(r)], c) = num / denom_[r];
    }
  }
  return out;
}

std::vector<double> bandwidth_grid(const Eigen::VectorXd& u, const std::vector<double>& quantiles) {
  const Index n = u.size();
  std::vector<double> d;
  d.reserve(static_cast<std::size_t>(n * (n - 1) / 2));
  for (Index i = 0; i < n; ++i)
    for (Index j = i + 1; j < n; ++j) d.push_back(std::abs(u[i] - u[j]));
  std::vector<double> out;
  if (d.empty()) return out;
  std::sort(d.begin(), d.end());
  const double last = static_cast<double>(d.size() - 1);
  for (double q : quantiles) {
    if (!(q >= 0.0 && q <= 1.0)) throw ValidationError("bandwidth quantile outside [0, 1]");
    const double pos = q * last;
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, d.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    const double h = d[lo] + frac * (d[hi] - d[lo]);
    if (h > 0.0) out.push_back(h);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<double> default_bandwidth_quantiles() {
  std::vector<double> q;
  for (int i = 1; i <= 10; ++i) q.push_back(0.05 * i);
  return q;
}

LinkState make_link_state(const BiFunctionalDataset& train, const Eigen::VectorXd& beta_full,
                          const Direction& theta, double h) {
  if (!(h > 0.0)) throw ValidationError("bandwidth must be positive");
  if (beta_full.size() != train.p()) throw ValidationError("coefficient vector does not match zeta grid");
  return LinkState{theta, h, train.x_grid(), project_rows(theta, *train.x_grid(), train.x()),
                   train.y() - train.zeta() * beta_full};
}

LinkEstimate evaluate_link(const LinkState& state, double projection, const KernelSpec& kernel) {
  const Index n = state.projections.size();
  if (n == 0) throw ValidationError("link state has no training samples");
  double num = 0.0, den = 0.0;
  for (Index i = 0; i < n; ++i) {
    const double k = kernel(std::abs(projection - state.projections[i]) / state.h);
    num += k * state.residuals[i];
    den += k;
  }
  if (den > 0.0) return {num / den, false};
  Index best = 0;
  double best_d = std::abs(projection - state.projections[0]);
  for (Index i = 1; i < n; ++i) {
    const double d = std::abs(projection - state.projections[i]);
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  return {state.residuals[best], true};
}

LinkEstimate evaluate_link(const LinkState& state, const Curve& chi, const KernelSpec& kernel) {
  if (!chi.grid()->same_as(*state.x_grid)) throw ValidationError("curve grid differs from training grid");
  return evaluate_link(state, project(state.theta, chi), kernel);
}

LinkEstimate estimate_link(const BiFunctionalDataset& train, const Eigen::VectorXd& beta_full,
                           const Direction& theta, double h, const Curve& chi) {
  return evaluate_link(make_link_state(train, beta_full, theta, h), chi);
}

}  // namespace mfplsim
