#include "doctest.h"

#include "oscseg/bayes_linear.hpp"
#include "oscseg/error.hpp"
#include "support/oracles.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace oscseg;
namespace bl = oscseg::bayes_linear;

namespace {

struct Instance {
  Eigen::VectorXd y;
  Eigen::MatrixXd X;
  double s2;
  double s0;
};

Instance random_instance(std::mt19937_64& rng, Eigen::Index n, Eigen::Index q) {
  std::normal_distribution<double> g;
  std::uniform_real_distribution<double> var(0.3, 3.0);
  Instance in{Eigen::VectorXd(n), Eigen::MatrixXd(n, q), var(rng), var(rng)};
  for (Eigen::Index i = 0; i < n; ++i) {
    in.y(i) = g(rng);
    for (Eigen::Index k = 0; k < q; ++k) in.X(i, k) = g(rng);
  }
  return in;
}

}  // namespace

TEST_CASE("posterior scalar example and zero data") {
  Eigen::VectorXd y(1);
  y << 2.0;
  Eigen::MatrixXd X(1, 1);
  X << 1.0;
  const auto post = bl::posterior(y, X, 1.0, 1.0);
  CHECK(post.covariance(0, 0) == doctest::Approx(0.5));
  CHECK(post.mean(0) == doctest::Approx(1.0));

  std::mt19937_64 rng(1);
  auto in = random_instance(rng, 5, 3);
  in.y.setZero();
  const auto p0 = bl::posterior(in.y, in.X, in.s2, in.s0);
  CHECK(p0.mean.norm() == 0.0);
  Eigen::MatrixXd prec = in.X.transpose() * in.X / in.s2;
  prec.diagonal().array() += 1.0 / in.s0;
  CHECK((p0.covariance - prec.inverse()).norm() < 1e-12);
}

TEST_CASE("posterior matches an independent linear solve") {
  std::mt19937_64 rng(2);
  for (int rep = 0; rep < 50; ++rep) {
    const auto in = random_instance(rng, 6, 2);
    const auto post = bl::posterior(in.y, in.X, in.s2, in.s0);
    const auto [mu, cov] = oracle::ridge_posterior_qr(in.y, in.X, in.s2, in.s0);
    CHECK((post.mean - mu).cwiseAbs().maxCoeff() < 1e-10);
    CHECK((post.covariance - cov).cwiseAbs().maxCoeff() < 1e-10);
    CHECK((post.covariance - post.covariance.transpose()).cwiseAbs().maxCoeff() < 1e-12);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(post.covariance);
    CHECK(es.eigenvalues().minCoeff() > 0.0);
  }
}

TEST_CASE("log marginal with zero data") {
  std::mt19937_64 rng(3);
  auto in = random_instance(rng, 4, 2);
  in.y.setZero();
  const auto post = bl::posterior(in.y, in.X, in.s2, in.s0);
  const double expect = -2.0 * std::log(2 * std::numbers::pi * in.s2) - std::log(in.s0) +
                        0.5 * std::log(post.covariance.determinant());
  CHECK(bl::log_marginal(in.y, in.X, in.s2, in.s0) == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("log marginal matches the dense Gaussian marginal and quadrature") {
  std::mt19937_64 rng(4);
  for (int rep = 0; rep < 30; ++rep) {
    const auto in = random_instance(rng, 6, 2);
    const double lm = bl::log_marginal(in.y, in.X, in.s2, in.s0);
    CHECK(lm == doctest::Approx(oracle::log_marginal_dense(in.y, in.X, in.s2, in.s0)).epsilon(1e-12));
    CHECK(std::abs(lm - oracle::log_marginal_quadrature(in.y, in.X, in.s2, in.s0, 40)) < 1e-6);
  }
}

TEST_CASE("log marginal satisfies the density-ratio identity") {
  // p(y) = p(y | b = 0) p(b = 0) / p(b = 0 | y)
  std::mt19937_64 rng(5);
  for (int rep = 0; rep < 30; ++rep) {
    const auto in = random_instance(rng, 7, 2);
    const auto post = bl::posterior(in.y, in.X, in.s2, in.s0);
    const double q = 2.0;
    const double log_lik0 = bl::log_marginal_null(in.y, in.s2);
    const double log_prior0 = -0.5 * q * std::log(2 * std::numbers::pi * in.s0);
    const double log_post0 = oracle::log_mvn_zero_mean(post.mean, post.covariance);
    CHECK(std::abs(bl::log_marginal(in.y, in.X, in.s2, in.s0) - (log_lik0 + log_prior0 - log_post0)) <
          1e-8);
  }
}

TEST_CASE("null model") {
  CHECK(bl::log_marginal_null(Eigen::VectorXd::Zero(2), 1.0) ==
        doctest::Approx(-std::log(2 * std::numbers::pi)));
  CHECK(bl::log_marginal_null(Eigen::VectorXd::Ones(2), 1.0) ==
        doctest::Approx(-std::log(2 * std::numbers::pi) - 1.0));
  std::mt19937_64 rng(6);
  std::normal_distribution<double> g;
  Eigen::VectorXd y(9);
  for (auto& v : y) v = g(rng);
  double ref = 0.0;
  for (double v : y) ref += std::log(std::exp(-v * v / (2 * 1.7)) / std::sqrt(2 * std::numbers::pi * 1.7));
  CHECK(std::abs(bl::log_marginal_null(y, 1.7) - ref) < 1e-12);
}

TEST_CASE("column permutation and block additivity") {
  std::mt19937_64 rng(7);
  for (int rep = 0; rep < 20; ++rep) {
    const auto in = random_instance(rng, 8, 4);
    Eigen::MatrixXd Xp = in.X;
    Xp.col(0).swap(Xp.col(3));
    Xp.col(1).swap(Xp.col(2));
    CHECK(std::abs(bl::log_marginal(in.y, in.X, in.s2, in.s0) - bl::log_marginal(in.y, Xp, in.s2, in.s0)) <
          1e-10);

    auto a = random_instance(rng, 5, 2);
    auto b = random_instance(rng, 4, 2);
    b.s2 = a.s2;
    b.s0 = a.s0;
    Eigen::VectorXd y(9);
    y << a.y, b.y;
    Eigen::MatrixXd X = Eigen::MatrixXd::Zero(9, 4);
    X.block(0, 0, 5, 2) = a.X;
    X.block(5, 2, 4, 2) = b.X;
    CHECK(std::abs(bl::log_marginal(y, X, a.s2, a.s0) -
                   (bl::log_marginal(a.y, a.X, a.s2, a.s0) + bl::log_marginal(b.y, b.X, a.s2, a.s0))) <
          1e-10);
  }
}

TEST_CASE("adding a row cannot widen the posterior") {
  std::mt19937_64 rng(8);
  for (int rep = 0; rep < 30; ++rep) {
    const auto in = random_instance(rng, 7, 3);
    const auto full = bl::posterior(in.y, in.X, in.s2, in.s0);
    const auto fewer = bl::posterior(in.y.head(6), in.X.topRows(6), in.s2, in.s0);
    for (Eigen::Index k = 0; k < 3; ++k) {
      CHECK(full.covariance(k, k) <= fewer.covariance(k, k) + 1e-14);
    }
  }
}

TEST_CASE("a vaguer prior moves the log marginal monotonically") {
  std::mt19937_64 rng(9);
  const auto in = random_instance(rng, 12, 2);
  double prev = bl::log_marginal(in.y, in.X, in.s2, 1e2);
  for (double s0 : {1e3, 1e4, 1e6, 1e8}) {
    const double cur = bl::log_marginal(in.y, in.X, in.s2, s0);
    CHECK(cur < prev);  // the Occam factor grows like -log(s0)
    prev = cur;
  }
}

TEST_CASE("input validation") {
  Eigen::VectorXd y = Eigen::VectorXd::Ones(3);
  Eigen::MatrixXd X = Eigen::MatrixXd::Ones(3, 2);
  CHECK_THROWS_AS(bl::posterior(y, X, 0.0, 1.0), InvalidArgument);
  CHECK_THROWS_AS(bl::posterior(y, X, 1.0, -1.0), InvalidArgument);
  CHECK_THROWS_AS(bl::posterior(y, Eigen::MatrixXd::Ones(2, 2), 1.0, 1.0), InvalidArgument);
  y(1) = std::nan("");
  CHECK_THROWS_AS(bl::log_marginal(y, X, 1.0, 1.0), InvalidArgument);
  CHECK_THROWS_AS(bl::log_marginal_null(Eigen::VectorXd::Ones(2), 0.0), InvalidArgument);
}
