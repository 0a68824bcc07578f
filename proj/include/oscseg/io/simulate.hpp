#pragma once

#include "oscseg/io/report.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace oscseg::io {

/// Negative or zero fields mean "scenario default".
struct SimulationRequest {
  std::string scenario;  // 1a, 1b, 1c, 2a, 2b, 3, 4, 5 or 6
  std::uint64_t seed = 0;
  double sigma = -1.0;   // 1a, 2a, 2b, 6
  long T = 0;            // 2a, 2b, 3, 6
  long m = -1;           // 2a, 2b, 3
  long d = 3;            // 3
  long d1 = -1;          // 3; series with sigma 3, the rest get 9
};

struct Simulation {
  std::vector<Eigen::VectorXd> series;
  TruthInfo truth;
};

/// Throws InvalidArgument for an unknown scenario or out-of-range request.
Simulation simulate(const SimulationRequest& request);

std::vector<std::string> default_labels(std::size_t d);

}  // namespace oscseg::io
