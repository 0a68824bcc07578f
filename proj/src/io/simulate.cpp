#include "oscseg/io/simulate.hpp"

#include "oscseg/error.hpp"
#include "oscseg/simgen.hpp"

namespace oscseg::io {

namespace sg = oscseg::simgen;

std::vector<std::string> default_labels(std::size_t d) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < d; ++i) out.push_back("y" + std::to_string(i + 1));
  return out;
}

Simulation simulate(const SimulationRequest& a) {
  Simulation out;
  TruthInfo& truth = out.truth;
  truth.scenario = a.scenario;
  truth.seed = a.seed;
  const std::string& id = a.scenario;
  auto sigma_or = [&](double fallback) { return a.sigma >= 0.0 ? a.sigma : fallback; };

  if (id == "1a" || id == "1b" || id == "1c") {
    const auto noise = id == "1a" ? sg::Scenario1Noise::Gaussian
                       : id == "1b" ? sg::Scenario1Noise::StudentT3
                                    : sg::Scenario1Noise::M1;
    auto sim = sg::gen_scenario1(noise, sigma_or(1.0), a.seed);
    out.series.push_back(sim.series);
    truth.truth = sim.truth;
    truth.specs.push_back(sim.spec);
    truth.means.push_back(sim.mean);
  } else if (id == "2a" || id == "2b") {
    const long T = a.T > 0 ? a.T : 1000;
    const long m = a.m >= 0 ? a.m : 2;
    auto sim = sg::gen_scenario2(T, static_cast<std::size_t>(m), id == "2b", a.seed, sigma_or(3.0));
    out.series.push_back(sim.series);
    truth.truth = sim.truth;
    truth.specs.push_back(sim.spec);
    truth.means.push_back(sim.mean);
  } else if (id == "3") {
    const long T = a.T > 0 ? a.T : 1000;
    const long m = a.m >= 0 ? a.m : 4;
    if (a.d < 1) throw InvalidArgument("simulate: d must be positive");
    auto sim = sg::gen_scenario3(static_cast<std::size_t>(a.d), T, static_cast<std::size_t>(m), a.d1, a.seed);
    out.series = sim.series;
    truth.truth = sim.truth;
    truth.specs = sim.specs;
    truth.means = sim.means;
  } else if (id == "4") {
    auto sim = sg::gen_piecewise_ar(a.seed);
    out.series.push_back(sim.series);
    truth.truth = sim.truth;
    truth.ar = sg::piecewise_ar_spec();
  } else if (id == "5") {
    auto sim = sg::gen_tvar(a.seed);
    out.series.push_back(sim.series);
    truth.truth = Partition({}, sim.series.size());
    sim.series.resize(0);
    truth.tvar = std::move(sim);
  } else if (id == "6") {
    const long T = a.T > 0 ? a.T : 1000;
    const double sigma = sigma_or(3.0);
    out.series.push_back(sg::gen_white_noise(T, sigma, a.seed));
    truth.truth = Partition({}, T);
    sg::OscSpec spec;
    spec.T = T;
    spec.segments = {{T, {}, -1}};
    spec.noise = {sg::NoiseKind::Gaussian, sigma, 3.0};
    truth.specs.push_back(spec);
    truth.means.push_back(Eigen::VectorXd::Zero(T));
  } else {
    throw InvalidArgument("unknown scenario '" + id + "' (expected 1a, 1b, 1c, 2a, 2b, 3, 4, 5 or 6)");
  }
  truth.labels = default_labels(out.series.size());
  return out;
}

}  // namespace oscseg::io
