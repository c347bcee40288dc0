#include "mfplsim/scad.hpp"

#include <algorithm>
#include <limits>
#include <sstream>

#include <Eigen/Cholesky>

namespace mfplsim {

namespace {

constexpr double kSigmaFloor = 1e-8;

double soft_threshold(double z, double t) {
  if (z > t) return z - t;
  if (z < -t) return z + t;
  return 0.0;
}

}  // namespace

void ScadConfig::validate() const {
  if (!(a > 2.0)) throw ValidationError("SCAD shape parameter a must exceed 2");
  if (!(lambda_min_ratio > 0.0 && lambda_min_ratio < 1.0))
    throw ValidationError("lambda_min_ratio must lie in (0, 1)");
  if (lambda_grid_size < 1) throw ValidationError("lambda_grid_size must be positive");
  if (!(tol > 0.0)) throw ValidationError("tol must be positive");
  if (max_iter < 1) throw ValidationError("max_iter must be positive");
}

PenaltyScaling PenaltyScaling::ones(Index k) {
  PenaltyScaling s;
  s.sigma = Eigen::VectorXd::Ones(k);
  return s;
}

ScadProblem::ScadProblem(Eigen::MatrixXd z, Eigen::VectorXd y) : z_(std::move(z)), y_(std::move(y)) {
  if (z_.rows() != y_.size()) throw ValidationError("design and response row counts differ");
  gram_ = Eigen::MatrixXd(k(), k());
  gram_.setZero();
  gram_.selfadjointView<Eigen::Lower>().rankUpdate(z_.transpose());
  gram_.triangularView<Eigen::StrictlyUpper>() = gram_.transpose();
  zty_ = z_.transpose() * y_;
}

double ScadProblem::rss(const Eigen::VectorXd& beta) const {
  Eigen::VectorXd r = y_;
  for (Index j = 0; j < beta.size(); ++j)
    if (beta[j] != 0.0) r.noalias() -= beta[j] * z_.col(j);
  return r.squaredNorm();
}

double ScadProblem::objective(const Eigen::VectorXd& beta, double lambda, const PenaltyScaling& s,
                              const ScadConfig& c) const {
  double pen = 0.0;
  for (Index j = 0; j < beta.size(); ++j) pen += scad_penalty(beta[j], lambda * s.sigma[j], c.a);
  return 0.5 * rss(beta) + static_cast<double>(n()) * pen;
}

PenaltyScaling ScadProblem::ols_scaling() const {
  const Index kk = k();
  const Index nn = n();
  PenaltyScaling out;
  out.sigma = Eigen::VectorXd::Constant(kk, kSigmaFloor);
  if (kk == 0) return out;

  for (Index j = 0; j < kk; ++j)
    if (!(gram_(j, j) > 0.0)) out.degenerate.push_back(j);

  bool singular = !out.degenerate.empty();
  Eigen::VectorXd beta;
  Eigen::VectorXd inv_diag;

  if (kk < nn && !singular) {
    Eigen::LDLT<Eigen::MatrixXd> ldlt(gram_);
    const Eigen::VectorXd d = ldlt.vectorD().cwiseAbs();
    const double dmax = d.maxCoeff();
    if (ldlt.info() != Eigen::Success || !(dmax > 0.0)) {
      singular = true;
    } else {
      // Pivoted positions whose pivot collapsed identify collinear columns.
      Eigen::VectorXi perm(kk);
      for (Index j = 0; j < kk; ++j) perm[j] = static_cast<int>(j);
      perm = ldlt.transpositionsP() * perm;
      for (Index j = 0; j < kk; ++j) {
        if (d[j] <= 1e-10 * dmax) {
          out.degenerate.push_back(perm[j]);
          singular = true;
        }
      }
      if (!singular) {
        beta = ldlt.solve(zty_);
        inv_diag = ldlt.solve(Eigen::MatrixXd::Identity(kk, kk)).diagonal();
      }
    }
  }

  if (kk >= nn || singular) {
    out.ridge = true;
    double delta = 1e-4 * gram_.trace() / static_cast<double>(kk);
    if (!(delta > 0.0)) delta = 1.0;
    if (kk > nn) {
      // Dual form: (G + dI)^-1 = (I - Z'(ZZ' + dI)^-1 Z) / d
      Eigen::MatrixXd outer = z_ * z_.transpose();
      outer.diagonal().array() += delta;
      Eigen::LDLT<Eigen::MatrixXd> ldlt(outer);
      beta = z_.transpose() * ldlt.solve(y_);
      const Eigen::MatrixXd solved = ldlt.solve(z_);
      inv_diag.resize(kk);
      for (Index j = 0; j < kk; ++j) inv_diag[j] = (1.0 - z_.col(j).dot(solved.col(j))) / delta;
    } else {
      Eigen::MatrixXd reg = gram_;
      reg.diagonal().array() += delta;
      Eigen::LDLT<Eigen::MatrixXd> ldlt(reg);
      beta = ldlt.solve(zty_);
      inv_diag = ldlt.solve(Eigen::MatrixXd::Identity(kk, kk)).diagonal();
    }
  }

  std::sort(out.degenerate.begin(), out.degenerate.end());
  out.degenerate.erase(std::unique(out.degenerate.begin(), out.degenerate.end()), out.degenerate.end());

  const double resid = (y_ - z_ * beta).squaredNorm();
  const double dof = static_cast<double>(std::max<Index>(nn - kk, 1));
  const double s2 = resid / dof;
  for (Index j = 0; j < kk; ++j) {
    const double v = s2 * std::max(inv_diag[j], 0.0);
    const double sd = std::sqrt(v);
    out.sigma[j] = (std::isfinite(sd) && sd > kSigmaFloor) ? sd : kSigmaFloor;
  }
  return out;
}

double ScadProblem::lambda_max(const PenaltyScaling& s) const {
  double lm = 0.0;
  for (Index j = 0; j < k(); ++j)
    lm = std::max(lm, std::abs(zty_[j]) / (static_cast<double>(n()) * s.sigma[j]));
  return lm;
}

std::vector<double> ScadProblem::lambda_path(const PenaltyScaling& s, const ScadConfig& c) const {
  c.validate();
  const double lmax = lambda_max(s);
  if (!(lmax > 0.0) || !std::isfinite(lmax)) return {0.0};
  const int m = c.lambda_grid_size;
  std::vector<double> out(static_cast<std::size_t>(m));
  if (m == 1) {
    out[0] = lmax;
    return out;
  }
  const double lo = std::log(lmax * c.lambda_min_ratio);
  const double hi = std::log(lmax);
  for (int i = 0; i < m; ++i)
    out[static_cast<std::size_t>(i)] = std::exp(hi + (lo - hi) * static_cast<double>(i) / (m - 1));
  out.front() = lmax;
  return out;
}

void ScadProblem::polish(Eigen::VectorXd& beta, const Eigen::VectorXd& thresh) const {
  // Exact weighted-lasso solution on the support found by coordinate descent:
  // G_AA b = (Z'y)_A - t_A sign(b_A), kept only if signs and the inactive
  // optimality conditions hold.
  std::vector<Index> act;
  for (Index j = 0; j < beta.size(); ++j)
    if (beta[j] != 0.0) act.push_back(j);
  const Index m = static_cast<Index>(act.size());
  if (m == 0 || m >= n()) return;
  Eigen::MatrixXd g(m, m);
  Eigen::VectorXd rhs(m);
  for (Index a = 0; a < m; ++a) {
    const Index ja = act[static_cast<std::size_t>(a)];
    for (Index b = 0; b < m; ++b) g(a, b) = gram_(ja, act[static_cast<std::size_t>(b)]);
    rhs[a] = zty_[ja] - thresh[ja] * (beta[ja] > 0.0 ? 1.0 : -1.0);
  }
  const Eigen::LLT<Eigen::MatrixXd> llt(g);
  if (llt.info() != Eigen::Success) return;
  const Eigen::VectorXd cand = llt.solve(rhs);
  if (!cand.allFinite()) return;
  for (Index a = 0; a < m; ++a)
    if ((cand[a] > 0.0) != (beta[act[static_cast<std::size_t>(a)]] > 0.0) || cand[a] == 0.0) return;

  Eigen::VectorXd full = Eigen::VectorXd::Zero(beta.size());
  for (Index a = 0; a < m; ++a) full[act[static_cast<std::size_t>(a)]] = cand[a];
  const Eigen::VectorXd grad = zty_ - gram_ * full;
  for (Index j = 0; j < beta.size(); ++j) {
    if (full[j] != 0.0) continue;
    if (std::abs(grad[j]) > thresh[j] + 1e-9 * (1.0 + std::abs(zty_[j]))) return;
  }
  beta = full;
}

PenalizedFit ScadProblem::fit(double lambda, const PenaltyScaling& s, const ScadConfig& c,
                              const Eigen::VectorXd* warm_start) const {
  if (!(lambda >= 0.0)) throw ValidationError("lambda must be nonnegative");
  if (s.sigma.size() != k()) throw ValidationError("penalty scaling does not match design");
  const Index kk = k();
  const double nn = static_cast<double>(n());

  PenalizedFit out;
  out.lambda = lambda;
  out.beta = warm_start ? *warm_start : Eigen::VectorXd::Zero(kk);
  if (out.beta.size() != kk) throw ValidationError("warm start has the wrong length");

  Eigen::VectorXd thresh(kk);
  Eigen::VectorXd prev(kk);
  Eigen::VectorXd grad(kk);
  std::vector<Index> active;
  active.reserve(static_cast<std::size_t>(kk));
  const double inner_tol = 0.1 * c.tol;

  double obj = objective(out.beta, lambda, s, c);
  out.objective_trace.push_back(obj);

  for (int outer = 0; outer < c.max_iter; ++outer) {
    for (Index j = 0; j < kk; ++j)
      thresh[j] = nn * scad_derivative(std::abs(out.beta[j]), lambda * s.sigma[j], c.a);
    prev = out.beta;
    grad = zty_ - gram_ * out.beta;

    auto update = [&](Index j) {
      const double gjj = gram_(j, j);
      if (!(gjj > 0.0)) return 0.0;
      const double bj = out.beta[j];
      const double nb = soft_threshold(grad[j] + gjj * bj, thresh[j]) / gjj;
      const double step = nb - bj;
      if (step != 0.0) {
        grad.noalias() -= step * gram_.col(j);
        out.beta[j] = nb;
      }
      return std::abs(step);
    };

    // Full sweeps alternate with sweeps over the current nonzeros until a
    // full sweep moves nothing.
    int sweeps = 0;
    while (sweeps < c.max_iter) {
      double max_step = 0.0;
      active.clear();
      for (Index j = 0; j < kk; ++j) {
        max_step = std::max(max_step, update(j));
        if (out.beta[j] != 0.0) active.push_back(j);
      }
      ++sweeps;
      if (max_step < inner_tol) break;
      while (sweeps < c.max_iter) {
        double inner = 0.0;
        for (Index j : active) inner = std::max(inner, update(j));
        ++sweeps;
        if (inner < inner_tol) break;
      }
    }
    polish(out.beta, thresh);

    ++out.iterations;
    obj = objective(out.beta, lambda, s, c);
    out.objective_trace.push_back(obj);
    if (kk == 0 || (out.beta - prev).cwiseAbs().maxCoeff() < c.tol) {
      out.converged = true;
      break;
    }
  }

  out.rss = rss(out.beta);
  out.objective = obj;
  for (Index j = 0; j < kk; ++j)
    if (out.beta[j] != 0.0) out.active.push_back(j);
  out.df = static_cast<Index>(out.active.size());
  return out;
}

std::vector<PenalizedFit> ScadProblem::fit_path(const std::vector<double>& lambdas,
                                                const PenaltyScaling& s, const ScadConfig& c) const {
  std::vector<PenalizedFit> out;
  out.reserve(lambdas.size());
  Eigen::VectorXd warm = Eigen::VectorXd::Zero(k());
  for (double lambda : lambdas) {
    out.push_back(fit(lambda, s, c, &warm));
    warm = out.back().beta;
  }
  return out;
}

PenaltyScaling ols_scaling(const Eigen::MatrixXd& z_tilde, const Eigen::VectorXd& y_tilde) {
  return ScadProblem(z_tilde, y_tilde).ols_scaling();
}

std::vector<double> lambda_path(const Eigen::MatrixXd& z_tilde, const Eigen::VectorXd& y_tilde,
                                const PenaltyScaling& scaling, const ScadConfig& config) {
  return ScadProblem(z_tilde, y_tilde).lambda_path(scaling, config);
}

PenalizedFit penalized_fit(const Eigen::MatrixXd& z_tilde, const Eigen::VectorXd& y_tilde, double lambda,
                           const PenaltyScaling& scaling, const ScadConfig& config) {
  config.validate();
  return ScadProblem(z_tilde, y_tilde).fit(lambda, scaling, config);
}

double bic_score(double rss, Index df, Index n) {
  if (!(n > df)) {
    std::ostringstream os;
    os << "BIC needs n > df (n = " << n << ", df = " << df << ")";
    throw ValidationError(os.str());
  }
  const double nn = static_cast<double>(n);
  const double r = std::max(rss, std::numeric_limits<double>::min());
  return nn * std::log(r / nn) + static_cast<double>(df) * std::log(nn);
}

double bic_score(const PenalizedFit& fit, Index n) { return bic_score(fit.rss, fit.df, n); }

}  // namespace mfplsim
