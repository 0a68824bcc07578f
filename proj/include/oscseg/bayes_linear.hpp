#pragma once

#include <Eigen/Dense>

namespace oscseg::bayes_linear {

// Gaussian linear model y = X b + e, e ~ N(0, sigma2 I), b ~ N(0, prior_var I).

struct GaussianPosterior {
  Eigen::VectorXd mean;
  Eigen::MatrixXd covariance;
};

/// Sigma = (X'X/sigma2 + I/prior_var)^-1, mu = Sigma X'y / sigma2.
GaussianPosterior posterior(const Eigen::Ref<const Eigen::VectorXd>& y,
                            const Eigen::Ref<const Eigen::MatrixXd>& X, double sigma2,
                            double prior_var);

/// log p(y) with b integrated out:
///   -(n/2) log(2 pi sigma2) - y'y/(2 sigma2) + (1/2) log|Sigma|
///   - (q/2) log(prior_var) + (1/2) mu' Sigma^-1 mu.
double log_marginal(const Eigen::Ref<const Eigen::VectorXd>& y,
                    const Eigen::Ref<const Eigen::MatrixXd>& X, double sigma2,
                    double prior_var);

/// log N(y; 0, sigma2 I), the model with no columns.
double log_marginal_null(const Eigen::Ref<const Eigen::VectorXd>& y, double sigma2);

}  // namespace oscseg::bayes_linear
