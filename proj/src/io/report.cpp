#include "oscseg/io/report.hpp"

#include "oscseg/error.hpp"
#include "oscseg/io/csv.hpp"

#include <cmath>
#include <fstream>
#include <iterator>
#include <sstream>

namespace oscseg::io {

namespace {

Json vector_json(const Eigen::VectorXd& v) {
  Json out = Json::array();
  for (double x : v) out.push_back(x);
  return out;
}

Json partition_json(const Partition& p) {
  return Json{{"T", p.T()}, {"cps", p.cps()}};
}

Json frequency_json(const susie::SelectedFrequency& s) {
  return Json{{"index", s.index},         {"frequency", s.frequency}, {"beta_sin", s.beta_sin},
              {"beta_cos", s.beta_cos},   {"amplitude", s.amplitude}, {"pip", s.pip}};
}

Json component_json(const simgen::Component& c) {
  return Json{{"omega", c.omega},     {"beta_sin", c.beta_sin},   {"beta_cos", c.beta_cos},
              {"phase", c.phase},     {"amplitude", c.amplitude()}};
}

Json noise_json(const simgen::NoiseSpec& n) {
  Json out{{"kind", simgen::to_string(n.kind)}};
  if (n.kind == simgen::NoiseKind::Gaussian) out["sigma"] = n.sigma;
  if (n.kind == simgen::NoiseKind::StudentT) out["nu"] = n.nu;
  return out;
}

std::string grid_spec_string(const GridSpec& g) {
  switch (g.mode) {
    case GridMode::Equal: return "equal:" + std::to_string(g.p);
    case GridMode::Periodogram: return "periodogram:" + std::to_string(g.p);
    case GridMode::Values: {
      std::string s = "values:";
      for (std::size_t k = 0; k < g.values.size(); ++k) s += (k ? "," : "") + format_double(g.values[k]);
      return s;
    }
  }
  return "unknown";
}

template <class T>
T get_or_throw(const Json& j, const char* key, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) throw InputError(where, 0, 0, std::string("missing field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw InputError(where, 0, 0, std::string("field '") + key + "': " + e.what());
  }
}

std::vector<Eigen::VectorXd> matrix_rows(const Json& rows, const std::string& where) {
  std::vector<Eigen::VectorXd> out;
  if (!rows.is_array()) throw InputError(where, 0, 0, "expected an array of series");
  for (const auto& r : rows) {
    const auto v = r.get<std::vector<double>>();
    out.emplace_back(Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size())));
  }
  return out;
}

}  // namespace

std::string_view to_string(GridMode mode) {
  switch (mode) {
    case GridMode::Equal: return "equal";
    case GridMode::Periodogram: return "periodogram";
    case GridMode::Values: return "values";
  }
  return "unknown";
}

std::string_view to_string(Selection selection) {
  return selection == Selection::MDL ? "mdl" : "threshold";
}

std::string_view to_string(SearchMode search) {
  return search == SearchMode::Optimistic ? "optimistic" : "full";
}

Json config_json(const DetectionConfig& cfg) {
  Json out;
  out["grid"] = grid_spec_string(cfg.grid);
  out["ne"] = cfg.auto_ne_max > 0 ? Json("auto:" + std::to_string(cfg.auto_ne_max)) : Json(cfg.n_effects);
  out["refit_ne"] = cfg.refit_effects;
  out["prior_var"] = cfg.prior_var;
  out["delta"] = cfg.delta;
  out["min_seg"] = cfg.min_seg;
  out["select"] = to_string(cfg.selection);
  out["search"] = to_string(cfg.search);
  out["pip_threshold"] = cfg.pip_threshold;
  out["max_iter"] = cfg.susie.max_iter;
  out["tol"] = cfg.susie.tol;
  out["seed"] = cfg.seed;
  out["threads"] = cfg.threads;
  return out;
}

Json detection_report(const DetectionResult& result, const PanelSeries& panel, const ReportInput& input) {
  Json out;
  out["schema_version"] = kSchemaVersion;
  out["kind"] = "detection";
  out["tool"] = {{"name", "oscseg"}, {"version", "0.1.0"}};
  out["input"] = {{"source", input.source}, {"T", panel.T()}, {"d", panel.d()}, {"labels", panel.labels()},
                  {"index", input.index ? Json(*input.index) : Json(nullptr)}};
  out["config"] = config_json(result.config);
  out["grid"] = {{"source", std::string(to_string(result.grid_source))}, {"frequencies", result.grid}};
  out["partition"] = partition_json(result.partition);
  out["chosen_ne"] = result.chosen_ne;

  Json segments = Json::array();
  for (const auto& seg : result.segments) {
    Json rows = Json::array();
    for (std::size_t i = 0; i < seg.series.size(); ++i) {
      const auto& f = seg.series[i];
      Json selected = Json::array(), effects = Json::array();
      for (const auto& s : f.summary.selected) selected.push_back(frequency_json(s));
      for (const auto& s : f.summary.effects) effects.push_back(frequency_json(s));
      rows.push_back({{"label", panel.labels()[i]},
                      {"sigma2", f.sigma2},
                      {"elbo", f.elbo},
                      {"converged", f.converged},
                      {"l_hat", f.summary.l_hat},
                      {"selected", selected},
                      {"effects", effects},
                      {"pip", vector_json(f.pip)}});
    }
    segments.push_back({{"u", seg.window.u}, {"v", seg.window.v}, {"series", rows}});
  }
  out["segments"] = segments;

  Json splits = Json::array();
  for (const auto& s : result.tree.splits) {
    splits.push_back({{"u", s.u},
                      {"v", s.v},
                      {"s", s.s},
                      {"gain", s.gain},
                      {"raw_ratio", s.raw_ratio},
                      {"depth", s.depth},
                      {"parent", s.parent},
                      {"nested_gain", s.nested_gain}});
  }
  Json profiles = Json::array();
  for (const auto& p : result.tree.profiles) {
    Json evals = Json::array();
    for (const auto& e : p.evaluations) evals.push_back(Json::array({e.s, e.gain, e.raw_ratio}));
    profiles.push_back({{"u", p.interval.u},
                        {"v", p.interval.v},
                        {"argmax_s", p.argmax_s},
                        {"argmax_gain", p.argmax_gain},
                        {"evaluations", evals}});
  }
  out["tree"] = {{"splits", splits}, {"profiles", profiles}};

  Json candidates = Json::array();
  for (const auto& c : result.candidates) candidates.push_back({{"cps", c.partition.cps()}, {"mdl", c.mdl}});
  Json ne_trace = Json::array();
  for (std::size_t k = 0; k < result.ne_trace.size(); ++k) {
    ne_trace.push_back({{"ne", k + 1}, {"cps", result.ne_trace[k].partition.cps()}, {"mdl", result.ne_trace[k].mdl}});
  }
  out["criterion"] = {{"name", std::string(to_string(result.config.selection))},
                      {"candidates", candidates},
                      {"ne_trace", ne_trace}};

  Json observed = Json::array(), fitted = Json::array();
  for (std::size_t i = 0; i < panel.d(); ++i) {
    observed.push_back(vector_json(panel.series(i)));
    fitted.push_back(vector_json(result.fitted[i]));
  }
  out["series"] = {{"observed", observed}, {"fitted", fitted}};
  out["rmse_fit"] = result.rmse_fit;
  out["counts"] = {{"gain_evaluations", result.gain_evaluations}, {"fits", result.fits}};
  out["timings"] = {{"grid_s", result.timings.grid_s},
                    {"search_s", result.timings.search_s},
                    {"selection_s", result.timings.selection_s},
                    {"refit_s", result.timings.refit_s}};
  return out;
}

Json truth_json(const TruthInfo& truth) {
  Json out;
  out["schema_version"] = kSchemaVersion;
  out["kind"] = "truth";
  out["scenario"] = truth.scenario;
  out["seed"] = truth.seed;
  out["T"] = truth.truth.T();
  out["d"] = truth.labels.size();
  out["labels"] = truth.labels;
  out["partition"] = partition_json(truth.truth);

  Json series = Json::array();
  for (std::size_t i = 0; i < truth.specs.size(); ++i) {
    const auto& spec = truth.specs[i];
    Json segs = Json::array();
    long start = 0;
    for (const auto& seg : spec.segments) {
      Json comps = Json::array();
      for (const auto& c : seg.components) comps.push_back(component_json(c));
      segs.push_back({{"u", start}, {"v", seg.end}, {"baseline", seg.baseline}, {"components", comps}});
      start = seg.end;
    }
    series.push_back({{"label", truth.labels.at(i)},
                      {"noise", noise_json(spec.noise)},
                      {"continuity", spec.continuity},
                      {"segments", segs}});
  }
  out["series"] = series;

  if (truth.ar) {
    Json pieces = Json::array();
    long start = 0;
    for (const auto& p : truth.ar->pieces) {
      pieces.push_back({{"u", start}, {"v", p.end}, {"coeffs", p.coeffs}});
      start = p.end;
    }
    out["ar"] = {{"sigma", truth.ar->sigma}, {"burn_in", truth.ar->burn_in}, {"pieces", pieces}};
  }
  if (truth.tvar) {
    out["tvar"] = {{"a2", -0.81}, {"a", vector_json(truth.tvar->a)}, {"peak", vector_json(truth.tvar->peak)}};
  }
  Json means = Json::array();
  for (const auto& m : truth.means) means.push_back(vector_json(m));
  out["mean"] = truth.means.empty() ? Json(nullptr) : means;
  return out;
}

Partition partition_from_json(const Json& j) {
  const long T = get_or_throw<long>(j, "T", "partition");
  auto cps = get_or_throw<std::vector<long>>(j, "cps", "partition");
  return Partition(std::move(cps), T);
}

Json evaluation_report(const Json& report, const Json& truth) {
  if (!report.is_object() || report.value("kind", "") != "detection") {
    throw InputError("report", 0, 0, "not a detection report");
  }
  if (!truth.is_object() || truth.value("kind", "") != "truth") {
    throw InputError("truth", 0, 0, "not a truth file");
  }
  const Partition est = partition_from_json(report.at("partition"));
  const Partition tru = partition_from_json(truth.at("partition"));
  if (est.T() != tru.T()) {
    throw InvalidArgument("report has T=" + std::to_string(est.T()) + " but truth has T=" +
                          std::to_string(tru.T()));
  }

  Json out;
  out["schema_version"] = kSchemaVersion;
  out["kind"] = "evaluation";
  out["T"] = tru.T();
  out["truth_cps"] = tru.cps();
  out["estimated_cps"] = est.cps();
  out["coverage"] = metrics::coverage(tru, est);
  out["hausdorff"] = metrics::hausdorff(tru, est);
  out["bias"] = metrics::bias(tru, est);

  const auto fitted = matrix_rows(report.at("series").at("fitted"), "report");
  const auto observed = matrix_rows(report.at("series").at("observed"), "report");
  Json rmse_fit = Json::array();
  for (std::size_t i = 0; i < fitted.size(); ++i) rmse_fit.push_back(metrics::rmse(observed[i], fitted[i]));
  out["rmse_fit"] = rmse_fit;

  out["rmse_signal"] = nullptr;
  if (truth.contains("mean") && !truth.at("mean").is_null()) {
    const auto means = matrix_rows(truth.at("mean"), "truth");
    if (means.size() != fitted.size()) {
      throw InvalidArgument("report has d=" + std::to_string(fitted.size()) + " but truth has d=" +
                            std::to_string(means.size()));
    }
    Json rmse_signal = Json::array();
    for (std::size_t i = 0; i < means.size(); ++i) rmse_signal.push_back(metrics::rmse(means[i], fitted[i]));
    out["rmse_signal"] = rmse_signal;
  }

  // Slowly varying autoregression: compare the true local spectral peak with the
  // strongest selected frequency of the segment containing t.
  out["peak_mse"] = nullptr;
  if (truth.contains("tvar")) {
    const auto peak = truth.at("tvar").at("peak").get<std::vector<double>>();
    const auto& segs = report.at("segments");
    double acc = 0.0;
    std::size_t counted = 0;
    for (const auto& seg : segs) {
      const auto& sel = seg.at("series").at(0).at("selected");
      if (sel.empty()) continue;
      double best_amp = -1.0, best_f = 0.0;
      for (const auto& s : sel) {
        if (s.at("amplitude").get<double>() > best_amp) {
          best_amp = s.at("amplitude").get<double>();
          best_f = s.at("frequency").get<double>();
        }
      }
      for (long t = seg.at("u").get<long>(); t < seg.at("v").get<long>(); ++t) {
        const double e = peak.at(static_cast<std::size_t>(t)) - best_f;
        acc += e * e;
        ++counted;
      }
    }
    if (counted > 0) out["peak_mse"] = acc / static_cast<double>(counted);
  }
  return out;
}

Json parse_json(const std::string& text, const std::string& source) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError(source, 0, e.byte, e.what());
  }
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError(path, 0, 0, "cannot open file");
  const std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  return parse_json(text, path);
}

}  // namespace oscseg::io
