#include "oscseg/simgen.hpp"

#include "oscseg/error.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

namespace oscseg::simgen {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kContinuityTol = 1e-9;

double wrap_phase(double a) {
  a = std::fmod(a, kTwoPi);
  return a < 0.0 ? a + kTwoPi : a;
}

double total_amplitude(const std::vector<Component>& comps) {
  double s = 0.0;
  for (const auto& c : comps) s += c.amplitude();
  return s;
}

double components_value(const std::vector<Component>& comps, double t) {
  double s = 0.0;
  for (const auto& c : comps) s += c.value(t);
  return s;
}

// argmin of f over [lo, hi] for unimodal f.
template <class F>
double golden_section(F&& f, double lo, double hi, double tol) {
  const double r = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - r * (b - a), d = a + r * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > tol) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - r * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + r * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

// Coordinate descent on the phases of `comps` so their sum at t equals target.
// Returns the achieved |gap|.
double descend_phases(std::vector<Component>& comps, double t, double target) {
  constexpr int kMaxSweeps = 200;
  constexpr int kCoarse = 64;
  auto gap = [&] { return std::abs(components_value(comps, t) - target); };
  double best = gap();
  for (int sweep = 0; sweep < kMaxSweeps && best > 1e-13; ++sweep) {
    for (auto& c : comps) {
      auto f = [&](double a) {
        const double saved = c.phase;
        c.phase = a;
        const double g = std::abs(components_value(comps, t) - target);
        c.phase = saved;
        return g;
      };
      const double h = kTwoPi / kCoarse;
      double a0 = c.phase, f0 = f(a0);
      for (int k = 0; k < kCoarse; ++k) {
        const double a = k * h;
        const double fa = f(a);
        if (fa < f0) {
          a0 = a;
          f0 = fa;
        }
      }
      const double a1 = golden_section(f, a0 - h, a0 + h, 1e-14);
      if (f(a1) < f0) a0 = a1;
      c.phase = wrap_phase(a0);
    }
    const double g = gap();
    if (g >= best * (1.0 - 1e-12) && sweep > 0) {
      best = std::min(best, g);
      break;
    }
    best = std::min(best, g);
  }
  return gap();
}

// Several restarts; among solutions that close the gap, keep the one with the
// smallest |value| at t_right so the next boundary stays reachable.
double solve_phases(std::vector<Component>& comps, double t, double target, double t_right,
                    std::mt19937_64& rng) {
  constexpr int kStarts = 8;
  std::uniform_real_distribution<double> unif(0.0, kTwoPi);
  std::vector<Component> best = comps;
  double best_gap = std::numeric_limits<double>::infinity();
  double best_right = std::numeric_limits<double>::infinity();
  for (int start = 0; start < kStarts; ++start) {
    std::vector<Component> trial = comps;
    for (auto& c : trial) c.phase = start == 0 ? 0.0 : unif(rng);
    const double g = descend_phases(trial, t, target);
    const double right = std::abs(components_value(trial, t_right));
    const bool closes = g <= kContinuityTol;
    const bool best_closes = best_gap <= kContinuityTol;
    if ((closes && (!best_closes || right < best_right)) || (!closes && !best_closes && g < best_gap)) {
      best = trial;
      best_gap = g;
      best_right = right;
    }
  }
  comps = std::move(best);
  return best_gap;
}

int draw_baseline(std::mt19937_64& rng, int exclude, double min_amplitude) {
  std::vector<int> pool;
  for (int k = 0; k < kBaselineCount; ++k) {
    if (k != exclude && total_amplitude(baseline(k)) > min_amplitude) pool.push_back(k);
  }
  if (pool.empty()) return -1;
  std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
  return pool[pick(rng)];
}

// One attempt at a series spec over fixed change points. Fails (returns false)
// only when continuity leaves no reachable baseline.
bool draw_osc_spec(OscSpec& spec, const std::vector<long>& cps, long T, bool continuity,
                   std::mt19937_64& rng) {
  spec.T = T;
  spec.continuity = continuity;
  spec.segments.clear();
  std::vector<long> ends = cps;
  ends.push_back(T);
  int prev = -1;
  for (std::size_t j = 0; j < ends.size(); ++j) {
    OscSegment seg;
    seg.end = ends[j];
    if (!continuity || j == 0) {
      seg.baseline = draw_baseline(rng, prev, 0.0);
      seg.components = baseline(seg.baseline);
    } else {
      const double t = static_cast<double>(ends[j - 1]);
      const double target = components_value(spec.segments.back().components, t);
      seg.baseline = draw_baseline(rng, prev, std::abs(target) + 1e-6);
      if (seg.baseline < 0) return false;
      seg.components = baseline(seg.baseline);
      if (solve_phases(seg.components, t, target, static_cast<double>(seg.end), rng) >
          kContinuityTol) {
        return false;
      }
    }
    prev = seg.baseline;
    spec.segments.push_back(std::move(seg));
  }
  return true;
}

PanelSim panel_sim(long T, std::size_t m, const std::vector<double>& sigmas, bool continuity,
                   std::uint64_t seed) {
  constexpr int kMaxAttempts = 1000;
  std::mt19937_64 rng(seed);
  PanelSim out;
  const auto cps = sample_change_points(T, m, min_spacing(T), rng);
  out.truth = Partition(cps, T);
  for (double sigma : sigmas) {
    OscSpec spec;
    int attempt = 0;
    while (!draw_osc_spec(spec, cps, T, continuity, rng)) {
      if (++attempt >= kMaxAttempts) {
        throw NumericalFailure("continuity: no reachable baseline sequence");
      }
    }
    spec.noise = NoiseSpec{NoiseKind::Gaussian, sigma, 3.0};
    Eigen::VectorXd mean = spec.mean();
    out.series.push_back(mean + draw_noise(spec.noise, T, rng));
    out.means.push_back(std::move(mean));
    out.specs.push_back(std::move(spec));
  }
  return out;
}

}  // namespace

double Component::value(double t) const {
  const double x = kTwoPi * omega * t + phase;
  return beta_sin * std::sin(x) + beta_cos * std::cos(x);
}

double Component::amplitude() const { return std::hypot(beta_sin, beta_cos); }

std::string to_string(NoiseKind kind) {
  switch (kind) {
    case NoiseKind::Gaussian: return "gaussian";
    case NoiseKind::StudentT: return "student_t";
    case NoiseKind::NonStationaryM1: return "m1";
  }
  return "unknown";
}

void OscSpec::validate() const {
  if (T < 1) throw InvalidArgument("OscSpec: T must be positive");
  if (segments.empty()) throw InvalidArgument("OscSpec: no segments");
  long prev = 0;
  for (const auto& seg : segments) {
    if (seg.end <= prev) throw InvalidArgument("OscSpec: segment ends must increase");
    for (const auto& c : seg.components) {
      if (!(c.omega > 0.0 && c.omega < 0.5)) {
        throw InvalidArgument("OscSpec: frequency outside (0, 1/2)");
      }
    }
    prev = seg.end;
  }
  if (prev != T) throw InvalidArgument("OscSpec: last segment must end at T");
}

Partition OscSpec::partition() const {
  validate();
  std::vector<long> cps;
  for (std::size_t j = 0; j + 1 < segments.size(); ++j) cps.push_back(segments[j].end);
  return Partition(std::move(cps), T);
}

double OscSpec::segment_value(std::size_t j, double t) const {
  return components_value(segments.at(j).components, t);
}

Eigen::VectorXd OscSpec::mean() const {
  validate();
  Eigen::VectorXd mu(T);
  long start = 0;
  for (std::size_t j = 0; j < segments.size(); ++j) {
    for (long t = start + 1; t <= segments[j].end; ++t) {
      mu(t - 1) = segment_value(j, static_cast<double>(t));
    }
    start = segments[j].end;
  }
  return mu;
}

std::vector<Component> baseline(int k) {
  switch (k) {
    case 0:
      return {{1.0 / 24, 2.0, 3.0}, {1.0 / 15, 4.0, 5.0}, {1.0 / 7, 1.0, 2.5}};
    case 1:
      return {{1.0 / 12, 4.0, 3.0}};
    case 2:
      return {{1.0 / 22, 2.5, 4.0}, {1.0 / 25, 4.0, 2.0}};
    case 3:
      return {{1.0 / 9, 4.0, 3.0}, {1.0 / 18, 3.0, 4.0}};
    case 4:
      return {{1.0 / 28, 5.0, 3.0}, {1.0 / 40, 3.0, 4.0}};
    case 5:
      return {{1.0 / 11, 5.0, 4.0}};
    default:
      throw InvalidArgument("baseline: index out of range");
  }
}

Eigen::VectorXd draw_noise(const NoiseSpec& noise, long T, std::mt19937_64& rng) {
  Eigen::VectorXd eps = Eigen::VectorXd::Zero(T);
  switch (noise.kind) {
    case NoiseKind::Gaussian: {
      if (noise.sigma < 0.0) throw InvalidArgument("noise: sigma must be nonnegative");
      if (noise.sigma == 0.0) return eps;
      std::normal_distribution<double> g(0.0, noise.sigma);
      for (long t = 0; t < T; ++t) eps(t) = g(rng);
      return eps;
    }
    case NoiseKind::StudentT: {
      if (!(noise.nu > 0.0)) throw InvalidArgument("noise: degrees of freedom must be positive");
      std::student_t_distribution<double> st(noise.nu);
      for (long t = 0; t < T; ++t) eps(t) = st(rng);
      return eps;
    }
    case NoiseKind::NonStationaryM1: {
      std::normal_distribution<double> g(0.0, 1.0);
      double prev_eps = 0.0, prev_e = 0.0;
      for (long t = 1; t <= T; ++t) {
        const double e = g(rng);
        const double tt = static_cast<double>(t);
        const double x = 0.5 * std::cos(tt / 900.0) * prev_eps + e + 0.3 * (tt / 900.0) * prev_e;
        eps(t - 1) = x;
        prev_eps = x;
        prev_e = e;
      }
      return eps;
    }
  }
  throw InvalidArgument("noise: unknown kind");
}

SeriesSim generate(const OscSpec& spec, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  SeriesSim out;
  out.spec = spec;
  out.truth = spec.partition();
  out.mean = spec.mean();
  out.series = out.mean + draw_noise(spec.noise, spec.T, rng);
  return out;
}

SeriesSim gen_scenario1(Scenario1Noise noise, double sigma, std::uint64_t seed) {
  OscSpec spec;
  spec.T = 900;
  spec.segments = {{300, baseline(0), 0}, {650, baseline(1), 1}, {900, baseline(2), 2}};
  switch (noise) {
    case Scenario1Noise::Gaussian: spec.noise = {NoiseKind::Gaussian, sigma, 3.0}; break;
    case Scenario1Noise::StudentT3: spec.noise = {NoiseKind::StudentT, 1.0, 3.0}; break;
    case Scenario1Noise::M1: spec.noise = {NoiseKind::NonStationaryM1, 1.0, 3.0}; break;
    default: throw InvalidArgument("scenario 1: unknown noise variant");
  }
  return generate(spec, seed);
}

long min_spacing(long T) {
  if (T <= 1000) return 100;
  if (T <= 5000) return 200;
  return 300;
}

std::vector<long> sample_change_points(long T, std::size_t m, long spacing, std::mt19937_64& rng) {
  if (spacing < 1) throw InvalidArgument("change points: spacing must be positive");
  const long ml = static_cast<long>(m);
  if (ml * spacing >= T) {
    throw InvalidArgument("change points: " + std::to_string(m) + " points with spacing " +
                          std::to_string(spacing) + " do not fit in T=" + std::to_string(T));
  }
  if (m == 0) return {};
  long edge = spacing;
  if ((ml + 1) * spacing > T) edge = std::max(1L, (T - (ml - 1) * spacing) / 2);
  const long slack = T - 2 * edge - (ml - 1) * spacing;
  // m sorted values in [0, slack] with repetition <-> m distinct values in [0, slack + m).
  std::vector<long> pool(static_cast<std::size_t>(slack + ml));
  std::iota(pool.begin(), pool.end(), 0L);
  std::vector<long> z;
  z.reserve(m);
  for (std::size_t i = 0; i < m; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, pool.size() - 1);
    std::swap(pool[i], pool[pick(rng)]);
    z.push_back(pool[i]);
  }
  std::sort(z.begin(), z.end());
  std::vector<long> cps(m);
  for (long j = 0; j < ml; ++j) cps[j] = edge + j * spacing + (z[j] - j);
  return cps;
}

double max_boundary_gap(const OscSpec& spec) {
  double worst = 0.0;
  for (std::size_t j = 0; j + 1 < spec.segments.size(); ++j) {
    const double t = static_cast<double>(spec.segments[j].end);
    worst = std::max(worst, std::abs(spec.segment_value(j + 1, t) - spec.segment_value(j, t)));
  }
  return worst;
}

double enforce_continuity(OscSpec& spec, std::mt19937_64& rng) {
  spec.validate();
  for (std::size_t j = 1; j < spec.segments.size(); ++j) {
    const double t = static_cast<double>(spec.segments[j - 1].end);
    const double target = spec.segment_value(j - 1, t);
    solve_phases(spec.segments[j].components, t, target,
                 static_cast<double>(spec.segments[j].end), rng);
  }
  spec.continuity = true;
  return max_boundary_gap(spec);
}

SeriesSim gen_scenario2(long T, std::size_t m, bool continuity, std::uint64_t seed, double sigma) {
  PanelSim panel = panel_sim(T, m, {sigma}, continuity, seed);
  SeriesSim out;
  out.series = std::move(panel.series.front());
  out.mean = std::move(panel.means.front());
  out.truth = panel.truth;
  out.spec = std::move(panel.specs.front());
  return out;
}

PanelSim gen_scenario3(std::size_t d, long T, std::size_t m, long d1, std::uint64_t seed,
                       bool continuity) {
  if (d == 0) throw InvalidArgument("scenario 3: d must be positive");
  const std::size_t quiet = d1 < 0 ? d : static_cast<std::size_t>(d1);
  if (quiet > d) throw InvalidArgument("scenario 3: d1 exceeds d");
  std::vector<double> sigmas(d, 9.0);
  std::fill(sigmas.begin(), sigmas.begin() + static_cast<std::ptrdiff_t>(quiet), 3.0);
  return panel_sim(T, m, sigmas, continuity, seed);
}

void ArSpec::validate() const {
  if (T < 1) throw InvalidArgument("ArSpec: T must be positive");
  if (pieces.empty()) throw InvalidArgument("ArSpec: no pieces");
  if (sigma < 0.0) throw InvalidArgument("ArSpec: sigma must be nonnegative");
  if (burn_in < 0) throw InvalidArgument("ArSpec: burn_in must be nonnegative");
  long prev = 0;
  for (const auto& p : pieces) {
    if (p.end <= prev) throw InvalidArgument("ArSpec: piece ends must increase");
    if (p.coeffs.empty()) throw InvalidArgument("ArSpec: empty coefficient list");
    if (companion_spectral_radius(p.coeffs) >= 1.0) {
      throw InvalidArgument("ArSpec: nonstationary piece");
    }
    prev = p.end;
  }
  if (prev != T) throw InvalidArgument("ArSpec: last piece must end at T");
}

Partition ArSpec::partition() const {
  std::vector<long> cps;
  for (std::size_t j = 0; j + 1 < pieces.size(); ++j) cps.push_back(pieces[j].end);
  return Partition(std::move(cps), T);
}

double companion_spectral_radius(const std::vector<double>& coeffs) {
  const auto p = static_cast<Eigen::Index>(coeffs.size());
  if (p == 0) return 0.0;
  Eigen::MatrixXd C = Eigen::MatrixXd::Zero(p, p);
  for (Eigen::Index k = 0; k < p; ++k) C(0, k) = coeffs[static_cast<std::size_t>(k)];
  for (Eigen::Index k = 1; k < p; ++k) C(k, k - 1) = 1.0;
  return Eigen::EigenSolver<Eigen::MatrixXd>(C, false).eigenvalues().cwiseAbs().maxCoeff();
}

Eigen::VectorXd gen_ar(const ArSpec& spec, std::uint64_t seed) {
  spec.validate();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  std::size_t order = 0;
  for (const auto& p : spec.pieces) order = std::max(order, p.coeffs.size());
  std::vector<double> hist(order, 0.0);  // hist[k] = y_{t-1-k}
  auto step = [&](const std::vector<double>& a) {
    double y = spec.sigma * g(rng);
    for (std::size_t k = 0; k < a.size(); ++k) y += a[k] * hist[k];
    std::rotate(hist.rbegin(), hist.rbegin() + 1, hist.rend());
    hist[0] = y;
    return y;
  };
  for (long b = 0; b < spec.burn_in; ++b) step(spec.pieces.front().coeffs);
  Eigen::VectorXd y(spec.T);
  std::size_t piece = 0;
  for (long t = 1; t <= spec.T; ++t) {
    while (t > spec.pieces[piece].end) ++piece;
    y(t - 1) = step(spec.pieces[piece].coeffs);
  }
  return y;
}

ArSpec piecewise_ar_spec() {
  ArSpec spec;
  spec.T = 1024;
  spec.pieces = {{512, {0.9}}, {768, {1.69, -0.81}}, {1024, {1.32, -0.81}}};
  return spec;
}

SeriesSim gen_piecewise_ar(std::uint64_t seed) {
  const ArSpec spec = piecewise_ar_spec();
  SeriesSim out;
  out.series = gen_ar(spec, seed);
  out.mean = Eigen::VectorXd::Zero(spec.T);
  out.truth = spec.partition();
  out.spec.T = spec.T;
  return out;
}

double tvar_coefficient(long t, long T) {
  return 0.8 * (1.0 - 0.5 * std::cos(std::numbers::pi * static_cast<double>(t) / static_cast<double>(T)));
}

double ar2_peak_frequency(double a1, double a2) {
  // |1 - a1 z - a2 z^2|^2 is minimized over cos(2 pi w) at a1 (a2 - 1) / (4 a2).
  if (a2 == 0.0) throw DegenerateFrequency("ar2 peak: a2 = 0 has no interior peak");
  const double c = a1 * (a2 - 1.0) / (4.0 * a2);
  if (std::abs(c) >= 1.0) throw DegenerateFrequency("ar2 peak: peak at the band edge");
  return std::acos(c) / kTwoPi;
}

double ar2_log_spectrum(double a1, double a2, double omega, double sigma2) {
  const double x = kTwoPi * omega;
  const double re = 1.0 - a1 * std::cos(x) - a2 * std::cos(2.0 * x);
  const double im = a1 * std::sin(x) + a2 * std::sin(2.0 * x);
  return std::log(sigma2) - std::log(re * re + im * im);
}

TvarSim gen_tvar(std::uint64_t seed) {
  constexpr long T = 1031;
  constexpr long kBurnIn = 200;
  constexpr double a2 = -0.81;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  TvarSim out;
  out.series.resize(T);
  out.a.resize(T);
  out.peak.resize(T);
  double y1 = 0.0, y2 = 0.0;
  const double a_first = tvar_coefficient(1, T);
  for (long b = 0; b < kBurnIn; ++b) {
    const double y = a_first * y1 + a2 * y2 + g(rng);
    y2 = y1;
    y1 = y;
  }
  for (long t = 1; t <= T; ++t) {
    const double a = tvar_coefficient(t, T);
    const double y = a * y1 + a2 * y2 + g(rng);
    y2 = y1;
    y1 = y;
    out.series(t - 1) = y;
    out.a(t - 1) = a;
    out.peak(t - 1) = ar2_peak_frequency(a, a2);
  }
  return out;
}

Eigen::VectorXd gen_white_noise(long T, double sigma, std::uint64_t seed) {
  if (T < 1) throw InvalidArgument("white noise: T must be positive");
  std::mt19937_64 rng(seed);
  return draw_noise({NoiseKind::Gaussian, sigma, 3.0}, T, rng);
}

}  // namespace oscseg::simgen
