#include "oscseg/metrics.hpp"

#include "oscseg/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

namespace oscseg::metrics {

namespace {

void check_same_length(const Partition& a, const Partition& b) {
  if (a.T() != b.T()) throw InvalidArgument("metrics: partitions differ in T");
}

}  // namespace

double coverage(const Partition& truth, const Partition& est) {
  check_same_length(truth, est);
  const auto est_segments = est.segments();
  double total = 0.0;
  for (const Window& a : truth.segments()) {
    double best = 0.0;
    for (const Window& b : est_segments) {
      const long inter = std::max(0L, std::min(a.v, b.v) - std::max(a.u, b.u));
      const long uni = a.size() + b.size() - inter;
      best = std::max(best, static_cast<double>(inter) / static_cast<double>(uni));
    }
    total += static_cast<double>(a.size()) * best;
  }
  return total / static_cast<double>(truth.T());
}

long directed_hausdorff(const Partition& from, const Partition& to) {
  check_same_length(from, to);
  const auto targets = to.boundaries();
  long worst = 0;
  for (long a : from.boundaries()) {
    // Boundaries are sorted; the nearest target is adjacent to the insertion point.
    auto it = std::lower_bound(targets.begin(), targets.end(), a);
    long nearest = to.T();
    if (it != targets.end()) nearest = std::min(nearest, std::abs(*it - a));
    if (it != targets.begin()) nearest = std::min(nearest, std::abs(*std::prev(it) - a));
    worst = std::max(worst, nearest);
  }
  return worst;
}

double hausdorff(const Partition& truth, const Partition& est) {
  const long d = std::max(directed_hausdorff(truth, est), directed_hausdorff(est, truth));
  return static_cast<double>(d) / static_cast<double>(truth.T());
}

long bias(const Partition& truth, const Partition& est) {
  return std::abs(static_cast<long>(truth.m()) - static_cast<long>(est.m()));
}

double rmse(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw InvalidArgument("rmse: length mismatch");
  if (a.empty()) throw InvalidArgument("rmse: empty input");
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(acc / static_cast<double>(a.size()));
}

double rmse(const Eigen::Ref<const Eigen::VectorXd>& a, const Eigen::Ref<const Eigen::VectorXd>& b) {
  return rmse(std::span<const double>(a.data(), static_cast<std::size_t>(a.size())),
              std::span<const double>(b.data(), static_cast<std::size_t>(b.size())));
}

}  // namespace oscseg::metrics
