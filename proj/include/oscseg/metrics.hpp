#pragma once

#include "oscseg/partition.hpp"

#include <Eigen/Dense>

#include <span>

namespace oscseg::metrics {

struct EvalReport {
  double coverage = 0.0;
  double hausdorff = 0.0;
  long bias = 0;
  double rmse_signal = 0.0;
  double rmse_fit = 0.0;
};

/// (1/T) sum over truth segments A of |A| max_est J(A, est), J the Jaccard index.
double coverage(const Partition& truth, const Partition& est);

/// (1/T) times the symmetric Hausdorff distance between boundary sets {0, cps, T}.
double hausdorff(const Partition& truth, const Partition& est);

/// Directed part: max over truth boundaries of the distance to the nearest est boundary.
long directed_hausdorff(const Partition& from, const Partition& to);

long bias(const Partition& truth, const Partition& est);

double rmse(std::span<const double> a, std::span<const double> b);
double rmse(const Eigen::Ref<const Eigen::VectorXd>& a, const Eigen::Ref<const Eigen::VectorXd>& b);

}  // namespace oscseg::metrics
