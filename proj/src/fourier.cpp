#include "oscseg/fourier.hpp"

#include "oscseg/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

namespace oscseg {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kDenominatorFloor = 1e-12;

double checked_denominator(double value, const char* what) {
  if (std::abs(value) < kDenominatorFloor) {
    throw DegenerateFrequency(std::string("gram_identity: vanishing ") + what);
  }
  return value;
}

// Appends base + k/t0 for every integer k that lands strictly inside (0, 1/2).
void append_shifted(double base, long t0, std::vector<double>& out) {
  const double step = 1.0 / static_cast<double>(t0);
  const long k_lo = static_cast<long>(std::floor(-base * t0)) - 1;
  const long k_hi = static_cast<long>(std::ceil((0.5 - base) * t0)) + 1;
  for (long k = k_lo; k <= k_hi; ++k) {
    const double w = base + static_cast<double>(k) * step;
    if (w > 0.0 && w < 0.5) out.push_back(w);
  }
}

std::vector<double> sorted_unique(std::vector<double> values, double tol) {
  std::sort(values.begin(), values.end());
  std::vector<double> out;
  for (double w : values) {
    if (out.empty() || w - out.back() > tol) out.push_back(w);
  }
  return out;
}

}  // namespace

std::string_view to_string(GridSource source) {
  switch (source) {
    case GridSource::EquallySpaced: return "equal";
    case GridSource::PeriodogramTop: return "periodogram";
    case GridSource::User: return "values";
  }
  return "unknown";
}

FrequencyGrid FrequencyGrid::from_values(std::vector<double> freqs, GridSource source) {
  if (freqs.empty()) throw InvalidArgument("frequency grid must not be empty");
  for (double w : freqs) {
    if (!std::isfinite(w)) throw InvalidArgument("frequency grid has a non-finite value");
    if (w <= 1e-9 || w >= 0.5 - 1e-9) {
      throw InvalidArgument("frequency " + std::to_string(w) + " is not inside (0, 1/2)");
    }
  }
  return FrequencyGrid(sorted_unique(std::move(freqs), 1e-12), source);
}

FrequencyGrid build_grid_equal(std::size_t p) {
  if (p == 0) throw InvalidArgument("build_grid_equal: p must be positive");
  std::vector<double> freqs(p);
  const double denom = 2.0 * static_cast<double>(p + 1);
  for (std::size_t k = 0; k < p; ++k) freqs[k] = static_cast<double>(k + 1) / denom;
  return FrequencyGrid::from_values(std::move(freqs), GridSource::EquallySpaced);
}

Periodogram periodogram(std::span<const double> series) {
  const std::size_t n = series.size();
  if (n < 4) throw SeriesTooShort("periodogram needs at least 4 samples");
  const std::size_t half = n / 2;
  Periodogram out;
  out.freqs.resize(half);
  out.powers.resize(half);
  const double nd = static_cast<double>(n);
  // cos/sin of 2 pi r/n for r = 0..n-1; angles j*t are reduced mod n.
  std::vector<double> cos_table(n), sin_table(n);
  for (std::size_t r = 0; r < n; ++r) {
    const double angle = kTwoPi * static_cast<double>(r) / nd;
    cos_table[r] = std::cos(angle);
    sin_table[r] = std::sin(angle);
  }
  for (std::size_t j = 1; j <= half; ++j) {
    double c = 0.0;
    double s = 0.0;
    std::size_t r = 0;
    for (std::size_t t = 1; t <= n; ++t) {
      r += j;
      if (r >= n) r -= n;
      c += series[t - 1] * cos_table[r];
      s += series[t - 1] * sin_table[r];
    }
    out.freqs[j - 1] = static_cast<double>(j) / nd;
    out.powers[j - 1] = (c * c + s * s) / nd;
  }
  return out;
}

Periodogram mean_periodogram(std::span<const Periodogram> parts) {
  if (parts.empty()) throw InvalidArgument("mean_periodogram: no inputs");
  Periodogram out = parts.front();
  for (std::size_t i = 1; i < parts.size(); ++i) {
    if (parts[i].powers.size() != out.powers.size()) {
      throw InvalidArgument("mean_periodogram: length mismatch");
    }
    for (std::size_t j = 0; j < out.powers.size(); ++j) out.powers[j] += parts[i].powers[j];
  }
  const double scale = 1.0 / static_cast<double>(parts.size());
  for (double& v : out.powers) v *= scale;
  return out;
}

FrequencyGrid build_grid_periodogram(const Periodogram& pgram, std::size_t p) {
  if (p == 0 || p > pgram.powers.size()) {
    throw InvalidArgument("build_grid_periodogram: p must lie in [1, floor(n/2)]");
  }
  std::vector<std::size_t> order(pgram.powers.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return pgram.powers[a] > pgram.powers[b];
  });
  std::vector<double> freqs;
  freqs.reserve(p);
  for (std::size_t k = 0; k < p; ++k) freqs.push_back(pgram.freqs[order[k]]);
  // Nyquist (j = n/2) is exactly 1/2 and cannot carry a sine column.
  std::erase_if(freqs, [](double w) { return w >= 0.5 - 1e-9; });
  if (freqs.size() < p) {
    for (std::size_t k = p; k < order.size() && freqs.size() < p; ++k) {
      const double w = pgram.freqs[order[k]];
      if (w < 0.5 - 1e-9) freqs.push_back(w);
    }
  }
  return FrequencyGrid::from_values(std::move(freqs), GridSource::PeriodogramTop);
}

FrequencyGrid build_grid_periodogram(std::span<const double> series, std::size_t p) {
  return build_grid_periodogram(periodogram(series), p);
}

DesignPair design(const FrequencyGrid& grid, Window window) {
  if (window.u < 0 || window.v <= window.u) {
    throw InvalidArgument("design: empty or negative window");
  }
  const long n = window.size();
  const auto p = static_cast<Eigen::Index>(grid.size());
  DesignPair out{Eigen::MatrixXd(n, p), Eigen::MatrixXd(n, p), window};
  for (Eigen::Index k = 0; k < p; ++k) {
    const double w = grid[static_cast<std::size_t>(k)];
    for (long r = 0; r < n; ++r) {
      const double angle = kTwoPi * w * static_cast<double>(window.u + 1 + r);
      out.sin_cols(r, k) = std::sin(angle);
      out.cos_cols(r, k) = std::cos(angle);
    }
  }
  return out;
}

double gram_identity(GramKind kind, double theta1, double theta2, long n) {
  if (n < 1) throw InvalidArgument("gram_identity: n must be positive");
  const double nd = static_cast<double>(n);
  const double m = nd + 0.5;
  switch (kind) {
    case GramKind::SinSinSame: {
      const double den = checked_denominator(std::sin(theta1), "sin(theta)");
      return nd / 2.0 + 0.25 - std::sin((2.0 * nd + 1.0) * theta1) / (4.0 * den);
    }
    case GramKind::CosCosSame: {
      const double den = checked_denominator(std::sin(theta1), "sin(theta)");
      return nd / 2.0 - 0.25 + std::sin((2.0 * nd + 1.0) * theta1) / (4.0 * den);
    }
    case GramKind::SinCosSame: {
      const double den = checked_denominator(std::sin(theta1), "sin(theta)");
      return (std::cos(theta1) - std::cos((2.0 * nd + 1.0) * theta1)) / (4.0 * den);
    }
    default: break;
  }

  const double dm = theta1 - theta2;
  const double dp = theta1 + theta2;
  const double sm = checked_denominator(std::sin(dm / 2.0), "sin(delta-/2)");
  const double sp = checked_denominator(std::sin(dp / 2.0), "sin(delta+/2)");
  switch (kind) {
    case GramKind::SinSinCross:
      return 0.25 * (std::sin(m * dm) / sm - std::sin(m * dp) / sp);
    case GramKind::CosCosCross:
      return 0.25 * (std::sin(m * dm) / sm + std::sin(m * dp) / sp - 2.0);
    case GramKind::SinCosCross:
      return 0.25 * ((std::cos(dp / 2.0) - std::cos(m * dp)) / sp +
                     (std::cos(dm / 2.0) - std::cos(m * dm)) / sm);
    case GramKind::CosSinCross:
      return 0.25 * ((std::cos(dp / 2.0) - std::cos(m * dp)) / sp -
                     (std::cos(dm / 2.0) - std::cos(m * dm)) / sm);
    default: break;
  }
  throw InvalidArgument("gram_identity: unknown kind");
}

std::vector<double> continuity_compatible_frequencies(double omega1, long t0) {
  if (!(omega1 > 0.0 && omega1 < 0.5)) {
    throw InvalidArgument("continuity_compatible_frequencies: omega1 must be in (0, 1/2)");
  }
  if (t0 < 1) throw InvalidArgument("continuity_compatible_frequencies: t0 must be >= 1");
  std::vector<double> out;
  append_shifted(omega1, t0, out);
  append_shifted(0.5 - omega1, t0, out);
  return sorted_unique(std::move(out), 1e-12);
}

std::vector<double> continuity_compatible_frequencies_exact(double omega1, long t0,
                                                            double beta_sin,
                                                            double beta_cos) {
  if (!(omega1 > 0.0 && omega1 < 0.5)) {
    throw InvalidArgument("continuity_compatible_frequencies: omega1 must be in (0, 1/2)");
  }
  if (t0 < 1) throw InvalidArgument("continuity_compatible_frequencies: t0 must be >= 1");
  if (std::hypot(beta_sin, beta_cos) == 0.0) {
    throw InvalidArgument("continuity_compatible_frequencies: zero intensity pair");
  }
  // b1 sin(x) + b2 cos(x) = A sin(x + phi); equal values at x1 and x2 iff
  // x2 = x1 + 2 pi k or x2 = pi - x1 - 2 phi + 2 pi k.
  const double phi = std::atan2(beta_cos, beta_sin);
  std::vector<double> out;
  append_shifted(omega1, t0, out);
  const double reflected = (0.5 - phi / std::numbers::pi) / static_cast<double>(t0) - omega1;
  append_shifted(reflected, t0, out);
  return sorted_unique(std::move(out), 1e-12);
}

}  // namespace oscseg
