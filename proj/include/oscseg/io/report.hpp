#pragma once

#include "oscseg/metrics.hpp"
#include "oscseg/segment.hpp"
#include "oscseg/simgen.hpp"

#include "json.hpp"

#include <optional>
#include <string>
#include <vector>

namespace oscseg::io {

using Json = nlohmann::ordered_json;

/// Bumped whenever a report field changes meaning or is removed.
inline constexpr int kSchemaVersion = 1;

std::string_view to_string(GridMode mode);
std::string_view to_string(Selection selection);
std::string_view to_string(SearchMode search);

struct ReportInput {
  std::string source;
  std::optional<std::vector<long>> index;
};

/// Everything needed to re-plot the run. `timings` is the last top-level key.
Json detection_report(const DetectionResult& result, const PanelSeries& panel,
                      const ReportInput& input = {});

Json config_json(const DetectionConfig& cfg);

/// Truth sidecar written next to simulated data.
struct TruthInfo {
  std::string scenario;
  std::uint64_t seed = 0;
  Partition truth;
  std::vector<std::string> labels;
  std::vector<simgen::OscSpec> specs;           // oscillatory scenarios
  std::vector<Eigen::VectorXd> means;           // empty when the mean is not oscillatory
  std::optional<simgen::ArSpec> ar;             // piecewise autoregression
  std::optional<simgen::TvarSim> tvar;          // time-varying autoregression (series not stored)
};

Json truth_json(const TruthInfo& truth);

/// Reads {"T": .., "cps": [..]} and validates it as a Partition.
Partition partition_from_json(const Json& j);

/// Metrics of a detection report against a truth sidecar. Throws
/// InvalidArgument when the two disagree on T or d.
Json evaluation_report(const Json& report, const Json& truth);

/// Parses a JSON document, reporting syntax errors as InputError.
Json parse_json(const std::string& text, const std::string& source);
Json read_json_file(const std::string& path);

}  // namespace oscseg::io
