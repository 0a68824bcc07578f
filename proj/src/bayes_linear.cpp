#include "oscseg/bayes_linear.hpp"

#include "oscseg/error.hpp"

#include <cmath>
#include <numbers>

namespace oscseg::bayes_linear {

namespace {

void check_inputs(const Eigen::Ref<const Eigen::VectorXd>& y,
                  const Eigen::Ref<const Eigen::MatrixXd>& X, double sigma2,
                  double prior_var) {
  if (y.size() < 1 || X.cols() < 1) throw InvalidArgument("bayes_linear: empty problem");
  if (X.rows() != y.size()) throw InvalidArgument("bayes_linear: X rows != |y|");
  if (!(sigma2 > 0.0) || !(prior_var > 0.0) || !std::isfinite(sigma2) ||
      !std::isfinite(prior_var)) {
    throw InvalidArgument("bayes_linear: variances must be positive and finite");
  }
  if (!y.allFinite() || !X.allFinite()) throw InvalidArgument("bayes_linear: non-finite data");
}

struct Factored {
  Eigen::LLT<Eigen::MatrixXd> precision;  // Sigma^-1 = X'X/sigma2 + I/prior_var
  Eigen::VectorXd xty;                    // X'y / sigma2
};

Factored factor(const Eigen::Ref<const Eigen::VectorXd>& y,
                const Eigen::Ref<const Eigen::MatrixXd>& X, double sigma2,
                double prior_var) {
  Eigen::MatrixXd prec = X.transpose() * X / sigma2;
  prec.diagonal().array() += 1.0 / prior_var;
  Factored f{Eigen::LLT<Eigen::MatrixXd>(prec), X.transpose() * y / sigma2};
  if (f.precision.info() != Eigen::Success) {
    throw NumericalFailure("bayes_linear: precision matrix not positive definite");
  }
  return f;
}

}  // namespace

GaussianPosterior posterior(const Eigen::Ref<const Eigen::VectorXd>& y,
                            const Eigen::Ref<const Eigen::MatrixXd>& X, double sigma2,
                            double prior_var) {
  check_inputs(y, X, sigma2, prior_var);
  const Factored f = factor(y, X, sigma2, prior_var);
  GaussianPosterior out;
  out.mean = f.precision.solve(f.xty);
  out.covariance = f.precision.solve(Eigen::MatrixXd::Identity(X.cols(), X.cols()));
  // Symmetrize away round-off.
  out.covariance = 0.5 * (out.covariance + out.covariance.transpose()).eval();
  return out;
}

double log_marginal(const Eigen::Ref<const Eigen::VectorXd>& y,
                    const Eigen::Ref<const Eigen::MatrixXd>& X, double sigma2,
                    double prior_var) {
  check_inputs(y, X, sigma2, prior_var);
  const Factored f = factor(y, X, sigma2, prior_var);
  const auto n = static_cast<double>(y.size());
  const auto q = static_cast<double>(X.cols());
  const Eigen::MatrixXd L = f.precision.matrixL();
  // log|Sigma| = -log|Sigma^-1| = -2 sum log diag(L).
  const double log_det_sigma = -2.0 * L.diagonal().array().log().sum();
  // mu' Sigma^-1 mu = xty' Sigma xty = |L^-1 xty|^2.
  const Eigen::VectorXd z = f.precision.matrixL().solve(f.xty);
  return -0.5 * n * std::log(2.0 * std::numbers::pi * sigma2) - 0.5 * y.squaredNorm() / sigma2 +
         0.5 * log_det_sigma - 0.5 * q * std::log(prior_var) + 0.5 * z.squaredNorm();
}

double log_marginal_null(const Eigen::Ref<const Eigen::VectorXd>& y, double sigma2) {
  if (!(sigma2 > 0.0)) throw InvalidArgument("log_marginal_null: sigma2 must be positive");
  const auto n = static_cast<double>(y.size());
  return -0.5 * n * std::log(2.0 * std::numbers::pi * sigma2) - 0.5 * y.squaredNorm() / sigma2;
}

}  // namespace oscseg::bayes_linear
