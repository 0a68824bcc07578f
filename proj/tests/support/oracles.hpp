#pragma once

// Independent reference computations for the tests. Nothing here calls the
// library code it is used to check.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <utility>
#include <vector>

namespace oracle {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// log N(y; 0, C) through a dense Cholesky of C.
inline double log_mvn_zero_mean(const Eigen::VectorXd& y, const Eigen::MatrixXd& C) {
  Eigen::LLT<Eigen::MatrixXd> llt(C);
  const Eigen::VectorXd z = llt.matrixL().solve(y);
  double logdet = 0.0;
  for (Eigen::Index i = 0; i < C.rows(); ++i) logdet += 2.0 * std::log(llt.matrixL()(i, i));
  return -0.5 * static_cast<double>(y.size()) * std::log(kTwoPi) - 0.5 * logdet -
         0.5 * z.squaredNorm();
}

/// Marginal of y = X b + e with b ~ N(0, s0 I), e ~ N(0, s2 I): y ~ N(0, s2 I + s0 X X').
inline double log_marginal_dense(const Eigen::VectorXd& y, const Eigen::MatrixXd& X, double s2,
                                 double s0) {
  Eigen::MatrixXd C = s0 * X * X.transpose();
  C.diagonal().array() += s2;
  return log_mvn_zero_mean(y, C);
}

/// Posterior of b by solving the normal equations with a QR factorization.
inline std::pair<Eigen::VectorXd, Eigen::MatrixXd> ridge_posterior_qr(const Eigen::VectorXd& y,
                                                                      const Eigen::MatrixXd& X,
                                                                      double s2, double s0) {
  const Eigen::Index q = X.cols();
  Eigen::MatrixXd A = X.transpose() * X / s2;
  A.diagonal().array() += 1.0 / s0;
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A);
  Eigen::VectorXd mu = qr.solve(X.transpose() * y / s2);
  Eigen::MatrixXd cov = qr.solve(Eigen::MatrixXd::Identity(q, q));
  return {mu, cov};
}

/// Physicists' Gauss-Hermite rule: sum w_i f(x_i) ~ int exp(-x^2) f(x) dx.
inline std::pair<std::vector<double>, std::vector<double>> gauss_hermite(int n) {
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
  for (int k = 1; k < n; ++k) {
    J(k, k - 1) = std::sqrt(k / 2.0);
    J(k - 1, k) = J(k, k - 1);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  std::vector<double> x(n), w(n);
  for (int i = 0; i < n; ++i) {
    x[i] = es.eigenvalues()(i);
    w[i] = std::sqrt(std::numbers::pi) * es.eigenvectors()(0, i) * es.eigenvectors()(0, i);
  }
  return {x, w};
}

/// log of int N(y; X b, s2 I) N(b; 0, s0 I_2) db by an adaptive tensor
/// Gauss-Hermite rule: nodes are centred on the ridge solution and spread by an
/// inflated copy of its inverse normal matrix, so the weight function only needs
/// to resemble the integrand.
inline double log_marginal_quadrature(const Eigen::VectorXd& y, const Eigen::MatrixXd& X,
                                      double s2, double s0, int nodes) {
  const auto [x, w] = gauss_hermite(nodes);
  const auto [center, cov] = ridge_posterior_qr(y, X, s2, s0);
  const Eigen::Matrix2d L = Eigen::LLT<Eigen::MatrixXd>(2.25 * cov).matrixL().toDenseMatrix();
  const double log_jac = std::log(2.0 * L.determinant());
  const double n = static_cast<double>(y.size());
  std::vector<double> logs;
  logs.reserve(static_cast<std::size_t>(nodes) * nodes);
  for (int i = 0; i < nodes; ++i) {
    for (int j = 0; j < nodes; ++j) {
      if (w[i] * w[j] == 0.0) continue;
      const Eigen::Vector2d z(x[i], x[j]);
      const Eigen::Vector2d b = center + std::sqrt(2.0) * L * z;
      const double log_lik = -0.5 * n * std::log(kTwoPi * s2) - (y - X * b).squaredNorm() / (2.0 * s2);
      const double log_prior = -std::log(kTwoPi * s0) - b.squaredNorm() / (2.0 * s0);
      logs.push_back(std::log(w[i] * w[j]) + z.squaredNorm() + log_lik + log_prior + log_jac);
    }
  }
  const double mx = *std::max_element(logs.begin(), logs.end());
  double acc = 0.0;
  for (double l : logs) acc += std::exp(l - mx);
  return mx + std::log(acc);
}

enum class Kind { SinSinSame, CosCosSame, SinCosSame, SinSinCross, CosCosCross, SinCosCross, CosSinCross };

inline double trig_direct_sum(Kind kind, double a, double b, long n) {
  double s = 0.0;
  for (long t = 1; t <= n; ++t) {
    const double td = static_cast<double>(t);
    switch (kind) {
      case Kind::SinSinSame: s += std::sin(a * td) * std::sin(a * td); break;
      case Kind::CosCosSame: s += std::cos(a * td) * std::cos(a * td); break;
      case Kind::SinCosSame: s += std::sin(a * td) * std::cos(a * td); break;
      case Kind::SinSinCross: s += std::sin(a * td) * std::sin(b * td); break;
      case Kind::CosCosCross: s += std::cos(a * td) * std::cos(b * td); break;
      case Kind::SinCosCross: s += std::sin(a * td) * std::cos(b * td); break;
      case Kind::CosSinCross: s += std::cos(a * td) * std::sin(b * td); break;
    }
  }
  return s;
}

/// Periodogram by complex exponentials with time t = 1..n.
inline std::vector<double> periodogram_direct(const std::vector<double>& y) {
  const std::size_t n = y.size();
  std::vector<double> out;
  for (std::size_t j = 1; j <= n / 2; ++j) {
    double re = 0.0, im = 0.0;
    for (std::size_t t = 1; t <= n; ++t) {
      const double angle = kTwoPi * static_cast<double>(j * t) / static_cast<double>(n);
      re += y[t - 1] * std::cos(angle);
      im -= y[t - 1] * std::sin(angle);
    }
    out.push_back((re * re + im * im) / static_cast<double>(n));
  }
  return out;
}

/// Segments as explicit sets of time points 1..T.
inline std::vector<std::set<long>> segment_sets(const std::vector<long>& cps, long T) {
  std::vector<std::set<long>> out;
  long start = 0;
  std::vector<long> ends = cps;
  ends.push_back(T);
  for (long e : ends) {
    std::set<long> s;
    for (long t = start + 1; t <= e; ++t) s.insert(t);
    out.push_back(std::move(s));
    start = e;
  }
  return out;
}

inline double coverage_bruteforce(const std::vector<long>& truth, const std::vector<long>& est,
                                  long T) {
  const auto A = segment_sets(truth, T);
  const auto B = segment_sets(est, T);
  double total = 0.0;
  for (const auto& a : A) {
    double best = 0.0;
    for (const auto& b : B) {
      std::size_t inter = 0;
      for (long t : a) inter += b.count(t);
      std::set<long> uni = a;
      uni.insert(b.begin(), b.end());
      best = std::max(best, static_cast<double>(inter) / static_cast<double>(uni.size()));
    }
    total += static_cast<double>(a.size()) * best;
  }
  return total / static_cast<double>(T);
}

inline double hausdorff_bruteforce(const std::vector<long>& truth, const std::vector<long>& est,
                                   long T) {
  std::vector<long> a{0}, b{0};
  a.insert(a.end(), truth.begin(), truth.end());
  b.insert(b.end(), est.begin(), est.end());
  a.push_back(T);
  b.push_back(T);
  auto directed = [](const std::vector<long>& from, const std::vector<long>& to) {
    long worst = 0;
    for (long x : from) {
      long nearest = -1;
      for (long y : to) {
        const long d = std::abs(x - y);
        if (nearest < 0 || d < nearest) nearest = d;
      }
      worst = std::max(worst, nearest);
    }
    return worst;
  };
  return static_cast<double>(std::max(directed(a, b), directed(b, a))) / static_cast<double>(T);
}

/// Sample excess kurtosis.
inline double excess_kurtosis(const std::vector<double>& x) {
  const double n = static_cast<double>(x.size());
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= n;
  double m2 = 0.0, m4 = 0.0;
  for (double v : x) {
    const double d = v - mean;
    m2 += d * d;
    m4 += d * d * d * d;
  }
  m2 /= n;
  m4 /= n;
  return m4 / (m2 * m2) - 3.0;
}

/// Lag-1 sample autocorrelation.
inline double lag1_autocorrelation(const double* x, std::size_t n) {
  double mean = 0.0;
  for (std::size_t i = 0; i < n; ++i) mean += x[i];
  mean /= static_cast<double>(n);
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    den += (x[i] - mean) * (x[i] - mean);
    if (i > 0) num += (x[i] - mean) * (x[i - 1] - mean);
  }
  return num / den;
}

}  // namespace oracle
