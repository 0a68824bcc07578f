#pragma once

#include "oscseg/fourier.hpp"
#include "oscseg/partition.hpp"
#include "oscseg/susie.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <map>
#include <mutex>
#include <string>
#include <tuple>
#include <vector>

namespace oscseg {

/// d series of common length T that share their change points.
class PanelSeries {
 public:
  PanelSeries(std::vector<Eigen::VectorXd> series, std::vector<std::string> labels = {});
  static PanelSeries univariate(Eigen::VectorXd series);

  std::size_t d() const { return series_.size(); }
  long T() const { return static_cast<long>(series_.front().size()); }
  const Eigen::VectorXd& series(std::size_t i) const { return series_[i]; }
  const std::vector<std::string>& labels() const { return labels_; }

  /// Rows of series i inside (u, v].
  auto window(std::size_t i, Window w) const { return series_[i].segment(w.u, w.size()); }

 private:
  std::vector<Eigen::VectorXd> series_;
  std::vector<std::string> labels_;
};

enum class GridMode { Equal, Periodogram, Values };
enum class Selection { ThresholdOnly, MDL };
enum class SearchMode { Optimistic, FullScan };

struct GridSpec {
  GridMode mode = GridMode::Periodogram;
  std::size_t p = 50;
  std::vector<double> values;  // GridMode::Values only
};

struct DetectionConfig {
  GridSpec grid;
  int n_effects = 2;
  int auto_ne_max = 0;  // > 0: choose N_E in 1..auto_ne_max by MDL
  double prior_var = 1.0;
  double delta = 1.01;
  long min_seg = 30;
  Selection selection = Selection::MDL;
  SearchMode search = SearchMode::Optimistic;
  std::uint64_t seed = 0;  // echoed only; detection itself draws no random numbers
  int refit_effects = 0;   // effects for the reported per-segment fits; 0 = detection N_E
  double pip_threshold = 0.5;
  susie::SusieOptions susie;
  int threads = 1;

  /// Throws InvalidArgument on out-of-range values.
  void validate() const;
};

FrequencyGrid build_panel_grid(const PanelSeries& panel, const GridSpec& spec);

struct GainEvaluation {
  long s = 0;
  double gain = 0.0;       // 1 + (left + right - whole) / |whole|
  double raw_ratio = 0.0;  // (left + right) / whole
  double left = 0.0;
  double right = 0.0;
  double whole = 0.0;
};

struct GainProfile {
  Window interval;
  std::vector<GainEvaluation> evaluations;  // in evaluation order, distinct s
  long argmax_s = 0;
  double argmax_gain = 0.0;

  const GainEvaluation& best() const;
};

/// Per-series summary of one segment fit, enough for the description length.
struct FitStats {
  double elbo = 0.0;
  double rss = 0.0;  // |y - posterior mean prediction|^2
  std::size_t l_hat = 0;
};

/// Segment scores over a fixed panel and grid, memoized by (window, N_E).
/// Thread-safe.
class SegmentScorer {
 public:
  SegmentScorer(const PanelSeries& panel, FrequencyGrid grid, DetectionConfig cfg);

  const PanelSeries& panel() const { return panel_; }
  const FrequencyGrid& grid() const { return grid_; }
  const DetectionConfig& config() const { return cfg_; }

  /// Sum over series of the segment ELBO.
  double interval_score(Window w, int n_effects);
  double interval_score(Window w) { return interval_score(w, cfg_.n_effects); }

  std::vector<FitStats> stats(Window w, int n_effects);

  GainEvaluation gain(long u, long v, long s, int n_effects);
  GainEvaluation gain(long u, long v, long s) { return gain(u, v, s, cfg_.n_effects); }

  susie::SusieFit fit(std::size_t series, Window w, int n_effects) const;

  std::size_t fits_computed() const;

 private:
  std::vector<FitStats> compute(Window w, int n_effects) const;

  const PanelSeries& panel_;
  FrequencyGrid grid_;
  DetectionConfig cfg_;
  DesignPair design_;
  Eigen::VectorXd prior_pi_;
  mutable std::mutex mutex_;
  std::map<std::tuple<long, long, int>, std::vector<FitStats>> cache_;
  std::size_t fits_ = 0;
};

/// Free-standing forms that build the grid from cfg each call.
double interval_score(const PanelSeries& panel, Window w, const DetectionConfig& cfg);
double gain(const PanelSeries& panel, long u, long v, long s, const DetectionConfig& cfg);

/// Bracket-shrinking argmax of f over the integers [lo, hi], finished by a full
/// scan once the bracket is at most `bracket` wide. Each f(s) is called once.
/// Returns (s, f(s)) in call order.
std::vector<std::pair<long, double>> optimistic_argmax(long lo, long hi, long bracket,
                                                       const std::function<double(long)>& f);

/// Upper bound on the number of f calls optimistic_argmax makes over a range of
/// `width` candidates.
std::size_t optimistic_budget(long width, long bracket);

long bracket_width(long min_seg);

GainProfile optimistic_search(SegmentScorer& scorer, long u, long v, int n_effects);
GainProfile full_scan(SegmentScorer& scorer, long u, long v, int n_effects);

struct SplitNode {
  long u = 0;
  long v = 0;
  long s = 0;
  double gain = 0.0;
  double raw_ratio = 0.0;
  int depth = 0;
  int parent = -1;           // index into splits, -1 for the root interval
  double nested_gain = 0.0;  // min(gain, parent's nested_gain)
};

struct SegmentationTree {
  long T = 0;
  std::vector<SplitNode> splits;      // accepted splits, depth-first order
  std::vector<GainProfile> profiles;  // every searched interval, accepted or not
};

SegmentationTree binary_segmentation(SegmentScorer& scorer, int n_effects);

/// Accepted splits whose nested gain exceeds `threshold`.
Partition threshold_partition(const SegmentationTree& tree, double threshold);

/// Nested candidates: the top-k splits ranked by nested gain, k = 0..|tree|.
std::vector<Partition> nested_candidates(const SegmentationTree& tree);

/// Description length of a partition from per-segment, per-series refit stats
/// (outer index: segment, inner: series). Lower is better.
double mdl(const Partition& partition, const std::vector<std::vector<FitStats>>& refits);

/// Refits every segment at n_effects through the scorer's cache and scores it.
double mdl(SegmentScorer& scorer, const Partition& partition, int n_effects);

struct CandidateScore {
  Partition partition;
  double mdl = 0.0;
};

struct Selected {
  Partition partition;
  std::vector<CandidateScore> candidates;
};

Selected select_partition(SegmentScorer& scorer, const SegmentationTree& tree, int n_effects);

struct NeChoice {
  int n_effects = 1;
  Partition partition;
  SegmentationTree tree;
  std::vector<CandidateScore> candidates;  // criterion on each N_E's partition
  std::vector<CandidateScore> per_ne;      // index ne-1: refit at N_E max
};

NeChoice auto_select_ne(SegmentScorer& scorer, int max_effects);

struct SeriesSegmentFit {
  susie::SegmentSummary summary;
  Eigen::VectorXd pip;
  double sigma2 = 0.0;
  double elbo = 0.0;
  bool converged = false;
};

struct SegmentReport {
  Window window;
  std::vector<SeriesSegmentFit> series;  // one per panel row
};

struct Timings {
  double grid_s = 0.0;
  double search_s = 0.0;
  double selection_s = 0.0;
  double refit_s = 0.0;
};

struct DetectionResult {
  Partition partition;
  int chosen_ne = 0;
  std::vector<double> grid;
  GridSource grid_source = GridSource::PeriodogramTop;
  SegmentationTree tree;
  std::vector<CandidateScore> candidates;
  std::vector<CandidateScore> ne_trace;  // auto N_E only
  std::vector<SegmentReport> segments;
  std::vector<Eigen::VectorXd> fitted;   // per series, posterior-mean signal
  std::vector<double> rmse_fit;          // per series, in-sample
  DetectionConfig config;
  Timings timings;
  std::size_t gain_evaluations = 0;
  std::size_t fits = 0;
};

DetectionResult detect(const PanelSeries& panel, const DetectionConfig& cfg);

}  // namespace oscseg
