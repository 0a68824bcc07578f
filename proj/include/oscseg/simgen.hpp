#pragma once

#include "oscseg/partition.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace oscseg::simgen {

/// beta_sin sin(2 pi omega t + phase) + beta_cos cos(2 pi omega t + phase)
struct Component {
  double omega = 0.0;
  double beta_sin = 0.0;
  double beta_cos = 0.0;
  double phase = 0.0;

  double value(double t) const;
  double amplitude() const;
};

struct OscSegment {
  long end = 0;  // segment is (previous end, end]
  std::vector<Component> components;
  int baseline = -1;  // index into the baseline pool, -1 when ad hoc
};

enum class NoiseKind { Gaussian, StudentT, NonStationaryM1 };

struct NoiseSpec {
  NoiseKind kind = NoiseKind::Gaussian;
  double sigma = 1.0;  // Gaussian only
  double nu = 3.0;     // StudentT only
};

std::string to_string(NoiseKind kind);

struct OscSpec {
  long T = 0;
  std::vector<OscSegment> segments;
  NoiseSpec noise;
  bool continuity = false;

  /// Throws InvalidArgument when segments do not tile (0, T] or a frequency
  /// lies outside (0, 1/2).
  void validate() const;
  Partition partition() const;
  Eigen::VectorXd mean() const;
  /// Value of segment j's formula at real time t, inside or outside the segment.
  double segment_value(std::size_t j, double t) const;
};

struct SeriesSim {
  Eigen::VectorXd series;
  Eigen::VectorXd mean;
  Partition truth;
  OscSpec spec;
};

struct PanelSim {
  std::vector<Eigen::VectorXd> series;
  std::vector<Eigen::VectorXd> means;
  Partition truth;
  std::vector<OscSpec> specs;
};

/// Number of baseline mean functions in the scenario 2 and 3 pool.
constexpr int kBaselineCount = 6;
/// Baselines 0..2 are the three scenario 1 segment means; 3..5 are fixed stand-ins.
std::vector<Component> baseline(int k);

Eigen::VectorXd draw_noise(const NoiseSpec& noise, long T, std::mt19937_64& rng);

/// mean() plus noise drawn from `seed`.
SeriesSim generate(const OscSpec& spec, std::uint64_t seed);

enum class Scenario1Noise { Gaussian, StudentT3, M1 };

/// T = 900, change points {300, 650}. `sigma` applies to Gaussian noise; 0
/// returns the exact mean.
SeriesSim gen_scenario1(Scenario1Noise noise, double sigma, std::uint64_t seed);

/// Minimum change point spacing used by the scenario 2 and 3 generators.
long min_spacing(long T);

/// m change points, uniform over configurations whose gaps (including the two
/// edge segments) are at least `spacing`, with the edge requirement relaxed
/// when (m+1) spacing exceeds T. Throws when m spacing >= T.
std::vector<long> sample_change_points(long T, std::size_t m, long spacing, std::mt19937_64& rng);

/// Chooses phases of segments 1.. so the mean is continuous at every change
/// point. Returns the largest remaining boundary gap.
double enforce_continuity(OscSpec& spec, std::mt19937_64& rng);

/// Largest |segment_{j+1}(t_j) - segment_j(t_j)| over change points.
double max_boundary_gap(const OscSpec& spec);

SeriesSim gen_scenario2(long T, std::size_t m, bool continuity, std::uint64_t seed,
                        double sigma = 3.0);

/// d series sharing m change points; sigma 3 for the first d1 series and 9 for the
/// rest. d1 < 0 means d1 = d.
PanelSim gen_scenario3(std::size_t d, long T, std::size_t m, long d1, std::uint64_t seed,
                       bool continuity = false);

struct ArPiece {
  long end = 0;
  std::vector<double> coeffs;  // y_t = sum_k coeffs[k] y_{t-1-k} + e_t
};

struct ArSpec {
  long T = 0;
  std::vector<ArPiece> pieces;
  double sigma = 1.0;
  long burn_in = 200;

  void validate() const;
  Partition partition() const;
};

/// Largest modulus among the roots of the AR companion matrix.
double companion_spectral_radius(const std::vector<double>& coeffs);

/// Burn-in runs with the first piece; state carries across piece boundaries.
Eigen::VectorXd gen_ar(const ArSpec& spec, std::uint64_t seed);

ArSpec piecewise_ar_spec();
SeriesSim gen_piecewise_ar(std::uint64_t seed);

struct TvarSim {
  Eigen::VectorXd series;
  Eigen::VectorXd a;     // a_t, t = 1..T
  Eigen::VectorXd peak;  // spectral peak frequency of the local AR(2), t = 1..T
};

double tvar_coefficient(long t, long T = 1031);

/// Peak frequency of the AR(2) spectrum y_t = a1 y_{t-1} + a2 y_{t-2} + e_t.
/// Throws DegenerateFrequency when the spectrum has no interior peak.
double ar2_peak_frequency(double a1, double a2);

/// log spectral density of that AR(2) at frequency omega.
double ar2_log_spectrum(double a1, double a2, double omega, double sigma2 = 1.0);

TvarSim gen_tvar(std::uint64_t seed);

Eigen::VectorXd gen_white_noise(long T, double sigma, std::uint64_t seed);

}  // namespace oscseg::simgen
