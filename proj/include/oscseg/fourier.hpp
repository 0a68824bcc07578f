#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace oscseg {

/// Half-open integer time window (u, v]; rows are absolute times u+1..v.
struct Window {
  long u = 0;
  long v = 0;

  long size() const { return v - u; }
  bool operator==(const Window&) const = default;
  auto operator<=>(const Window&) const = default;
};

enum class GridSource { EquallySpaced, PeriodogramTop, User };

std::string_view to_string(GridSource source);

/// Candidate frequencies (cycles per sample), strictly increasing inside (0, 1/2).
class FrequencyGrid {
 public:
  /// Validates and sorts `freqs`. Values within 1e-12 of each other are merged;
  /// values within 1e-9 of 0 or 1/2 are rejected.
  static FrequencyGrid from_values(std::vector<double> freqs,
                                   GridSource source = GridSource::User);

  const std::vector<double>& freqs() const { return freqs_; }
  std::size_t size() const { return freqs_.size(); }
  double operator[](std::size_t k) const { return freqs_[k]; }
  GridSource source() const { return source_; }

 private:
  FrequencyGrid(std::vector<double> freqs, GridSource source)
      : freqs_(std::move(freqs)), source_(source) {}

  std::vector<double> freqs_;
  GridSource source_;
};

struct Periodogram {
  std::vector<double> freqs;   // j/n, j = 1..floor(n/2)
  std::vector<double> powers;  // |sum_t y_t e^{-2 pi i j t/n}|^2 / n
};

/// Sine and cosine columns of a grid over a window of absolute time indices.
struct DesignPair {
  Eigen::MatrixXd sin_cols;  // n x p
  Eigen::MatrixXd cos_cols;  // n x p
  Window window;

  /// Rows of a sub-window (which must lie inside `window`), without copying.
  auto sin_block(Window sub) const {
    return sin_cols.middleRows(sub.u - window.u, sub.size());
  }
  auto cos_block(Window sub) const {
    return cos_cols.middleRows(sub.u - window.u, sub.size());
  }
};

FrequencyGrid build_grid_equal(std::size_t p);

/// Direct-summation periodogram at the canonical frequencies. Time runs t = 1..n.
Periodogram periodogram(std::span<const double> series);

/// Elementwise mean of periodograms of equal-length series.
Periodogram mean_periodogram(std::span<const Periodogram> parts);

/// The p canonical frequencies of largest power, ascending. Ties go to the
/// lower frequency.
FrequencyGrid build_grid_periodogram(const Periodogram& pgram, std::size_t p);
FrequencyGrid build_grid_periodogram(std::span<const double> series, std::size_t p);

DesignPair design(const FrequencyGrid& grid, Window window);

enum class GramKind {
  SinSinSame,
  CosCosSame,
  SinCosSame,
  SinSinCross,
  CosCosCross,
  SinCosCross,
  CosSinCross,
};

/// Closed forms for sums over t = 1..n of products of sin/cos at angular
/// frequencies theta1, theta2. The *Same kinds ignore theta2. Throws
/// DegenerateFrequency when a denominator vanishes (|sin| < 1e-12).
double gram_identity(GramKind kind, double theta1, double theta2, long n);

/// Right-segment frequencies for which a single-frequency signal sharing its
/// intensity pair across a change at t0 is unchanged at t0, in the closed form
///   {w1 + k/t0} U {1/2 - w1 + k/t0},  k integer, restricted to (0, 1/2).
/// Sorted, deduplicated at 1e-12.
///
/// The second family matches the left value only for particular phases (for
/// instance a pure sine with odd t0); see continuity_compatible_frequencies_exact
/// for the intensity-aware set.
std::vector<double> continuity_compatible_frequencies(double omega1, long t0);

/// Intensity-aware version: every returned w2 satisfies
/// b1 sin(2 pi w2 t0) + b2 cos(2 pi w2 t0) == b1 sin(2 pi w1 t0) + b2 cos(2 pi w1 t0).
std::vector<double> continuity_compatible_frequencies_exact(double omega1, long t0,
                                                            double beta_sin,
                                                            double beta_cos);

}  // namespace oscseg
