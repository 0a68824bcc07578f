#include "oscseg/partition.hpp"

#include "oscseg/error.hpp"

#include <string>

namespace oscseg {

Partition::Partition(std::vector<long> cps, long T) : cps_(std::move(cps)), T_(T) {
  if (T_ < 1) throw InvalidArgument("partition: T must be positive");
  for (std::size_t j = 0; j < cps_.size(); ++j) {
    if (cps_[j] <= 0 || cps_[j] >= T_) {
      throw InvalidArgument("partition: change point " + std::to_string(cps_[j]) +
                            " outside (0, T)");
    }
    if (j > 0 && cps_[j] <= cps_[j - 1]) {
      throw InvalidArgument("partition: change points must be strictly increasing");
    }
  }
}

std::vector<Window> Partition::segments() const {
  std::vector<Window> out;
  long start = 0;
  for (long cp : cps_) {
    out.push_back({start, cp});
    start = cp;
  }
  out.push_back({start, T_});
  return out;
}

std::vector<long> Partition::boundaries() const {
  std::vector<long> out;
  out.reserve(cps_.size() + 2);
  out.push_back(0);
  out.insert(out.end(), cps_.begin(), cps_.end());
  out.push_back(T_);
  return out;
}

}  // namespace oscseg
