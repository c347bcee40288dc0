#pragma once

#include <cmath>
#include <vector>

#include <Eigen/Core>

#include "mfplsim/functional.hpp"

namespace mfplsim {

struct ScadConfig {
  double a = 3.7;
  int lambda_grid_size = 100;
  double lambda_min_ratio = 0.01;
  double tol = 1e-6;
  int max_iter = 1000;

  void validate() const;
};

/// SCAD penalty P_lambda(|u|) with shape a > 2.
template <typename Scalar>
Scalar scad_penalty(Scalar u, Scalar lambda, Scalar a) {
  const Scalar x = std::abs(u);
  if (x < lambda) return lambda * x;
  if (x < a * lambda) {
    const Scalar d = x - a * lambda;
    return ((a * a - Scalar(1)) * lambda * lambda - d * d) / (Scalar(2) * (a - Scalar(1)));
  }
  return (a + Scalar(1)) * lambda * lambda / Scalar(2);
}

/// d/du P_lambda(u) for u >= 0.
template <typename Scalar>
Scalar scad_derivative(Scalar u, Scalar lambda, Scalar a) {
  if (u < lambda) return lambda;
  if (u < a * lambda) return (a * lambda - u) / (a - Scalar(1));
  return Scalar(0);
}

/// Per-coefficient scales sigma_k: lambda_k = lambda * sigma_k.
struct PenaltyScaling {
  Eigen::VectorXd sigma;
  std::vector<Index> degenerate;  // columns flagged as zero or collinear
  bool ridge = false;             // ridge-stabilised coefficients were used

  static PenaltyScaling ones(Index k);
};

struct PenalizedFit {
  Eigen::VectorXd beta;
  std::vector<Index> active;
  double rss = 0.0;
  double objective = 0.0;
  Index df = 0;
  double lambda = 0.0;
  bool converged = false;
  int iterations = 0;
  std::vector<double> objective_trace;  // one entry per local linear approximation step
};

/// A transformed linear model (z, y) with its cross products cached, so a
/// whole lambda path reuses one Gram matrix.
class ScadProblem {
public:
  ScadProblem(Eigen::MatrixXd z, Eigen::VectorXd y);

  Index n() const noexcept { return z_.rows(); }
  Index k() const noexcept { return z_.cols(); }
  const Eigen::MatrixXd& z() const noexcept { return z_; }
  const Eigen::VectorXd& y() const noexcept { return y_; }
  const Eigen::MatrixXd& gram() const noexcept { return gram_; }
  const Eigen::VectorXd& zty() const noexcept { return zty_; }

  /// Residual sum of squares computed from the residual vector.
  double rss(const Eigen::VectorXd& beta) const;

  /// rss / 2 + n * sum_k P_{lambda sigma_k}(|beta_k|)
  double objective(const Eigen::VectorXd& beta, double lambda, const PenaltyScaling& s,
                   const ScadConfig& c) const;

  PenaltyScaling ols_scaling() const;

  /// Smallest lambda whose penalised fit from the null model is zero.
  double lambda_max(const PenaltyScaling& s) const;

  std::vector<double> lambda_path(const PenaltyScaling& s, const ScadConfig& c) const;

  /// Local linear approximation of SCAD; each step is a weighted lasso solved
  /// by covariance-form coordinate descent from the current iterate.
  PenalizedFit fit(double lambda, const PenaltyScaling& s, const ScadConfig& c,
                   const Eigen::VectorXd* warm_start = nullptr) const;

  /// Fits along `lambdas` in order, each warm started from the previous one.
  std::vector<PenalizedFit> fit_path(const std::vector<double>& lambdas, const PenaltyScaling& s,
                                     const ScadConfig& c) const;

private:
  void polish(Eigen::VectorXd& beta, const Eigen::VectorXd& thresh) const;

  Eigen::MatrixXd z_;
  Eigen::VectorXd y_;
  Eigen::MatrixXd gram_;
  Eigen::VectorXd zty_;
};

PenaltyScaling ols_scaling(const Eigen::MatrixXd& z_tilde, const Eigen::VectorXd& y_tilde);

std::vector<double> lambda_path(const Eigen::MatrixXd& z_tilde, const Eigen::VectorXd& y_tilde,
                                const PenaltyScaling& scaling, const ScadConfig& config);

PenalizedFit penalized_fit(const Eigen::MatrixXd& z_tilde, const Eigen::VectorXd& y_tilde, double lambda,
                           const PenaltyScaling& scaling, const ScadConfig& config);

/// n ln(rss / n) + df ln(n). Requires n > df.
double bic_score(const PenalizedFit& fit, Index n);
double bic_score(double rss, Index df, Index n);

}  // namespace mfplsim
