#pragma once

#include "oscseg/fourier.hpp"

#include <vector>

namespace oscseg {

/// Sorted change points 0 < t_1 < ... < t_m < T splitting {1..T} into the
/// segments (t_{j-1}, t_j] with t_0 = 0 and t_{m+1} = T.
class Partition {
 public:
  Partition() = default;
  Partition(std::vector<long> cps, long T);

  const std::vector<long>& cps() const { return cps_; }
  long T() const { return T_; }
  std::size_t m() const { return cps_.size(); }
  std::vector<Window> segments() const;
  /// {0, t_1, ..., t_m, T}
  std::vector<long> boundaries() const;

  bool operator==(const Partition&) const = default;

 private:
  std::vector<long> cps_;
  long T_ = 0;
};

}  // namespace oscseg
