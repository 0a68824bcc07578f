#include "oscseg/error.hpp"
#include "oscseg/fourier.hpp"
#include "oscseg/io/csv.hpp"
#include "oscseg/io/plot.hpp"
#include "oscseg/io/report.hpp"
#include "oscseg/io/simulate.hpp"
#include "oscseg/metrics.hpp"
#include "oscseg/segment.hpp"
#include "oscseg/susie.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace oscseg;

namespace {

Partition partition(std::vector<long> cps, long T) { return Partition(std::move(cps), T); }

py::dict fit_to_dict(const susie::SusieFit& fit, double pip_threshold) {
  const auto ne = static_cast<Eigen::Index>(fit.effects.size());
  const auto p = static_cast<Eigen::Index>(fit.freqs.size());
  Eigen::MatrixXd alpha(ne, p), mean_sin(ne, p), mean_cos(ne, p);
  for (Eigen::Index e = 0; e < ne; ++e) {
    const auto& eff = fit.effects[static_cast<std::size_t>(e)];
    alpha.row(e) = eff.alpha.transpose();
    mean_sin.row(e) = eff.means.col(0).transpose();
    mean_cos.row(e) = eff.means.col(1).transpose();
  }
  py::list selected;
  const auto summary = susie::summarize(fit, pip_threshold);
  for (const auto& s : summary.selected) {
    py::dict d;
    d["frequency"] = s.frequency;
    d["beta_sin"] = s.beta_sin;
    d["beta_cos"] = s.beta_cos;
    d["amplitude"] = s.amplitude;
    d["pip"] = s.pip;
    selected.append(d);
  }
  py::dict out;
  out["freqs"] = fit.freqs;
  out["alpha"] = alpha;
  out["mean_sin"] = mean_sin;
  out["mean_cos"] = mean_cos;
  out["pip"] = Eigen::VectorXd(susie::pip(fit));
  out["sigma2"] = fit.sigma2;
  out["elbo"] = fit.elbo_trace;
  out["converged"] = fit.converged;
  out["fitted"] = fit.fitted;
  out["selected"] = selected;
  return out;
}

}  // namespace

PYBIND11_MODULE(_oscseg, m) {
  m.doc() = "Compiled core of the oscseg package";

  py::register_exception<io::InputError>(m, "InputError", PyExc_ValueError);

  py::enum_<GridMode>(m, "GridMode")
      .value("EQUAL", GridMode::Equal)
      .value("PERIODOGRAM", GridMode::Periodogram)
      .value("VALUES", GridMode::Values);
  py::enum_<Selection>(m, "Selection").value("MDL", Selection::MDL).value("THRESHOLD", Selection::ThresholdOnly);
  py::enum_<SearchMode>(m, "SearchMode")
      .value("OPTIMISTIC", SearchMode::Optimistic)
      .value("FULL", SearchMode::FullScan);

  py::class_<GridSpec>(m, "GridSpec")
      .def(py::init<>())
      .def_readwrite("mode", &GridSpec::mode)
      .def_readwrite("p", &GridSpec::p)
      .def_readwrite("values", &GridSpec::values);

  py::class_<DetectionConfig>(m, "DetectionConfig")
      .def(py::init<>())
      .def_readwrite("grid", &DetectionConfig::grid)
      .def_readwrite("n_effects", &DetectionConfig::n_effects)
      .def_readwrite("auto_ne_max", &DetectionConfig::auto_ne_max)
      .def_readwrite("prior_var", &DetectionConfig::prior_var)
      .def_readwrite("delta", &DetectionConfig::delta)
      .def_readwrite("min_seg", &DetectionConfig::min_seg)
      .def_readwrite("selection", &DetectionConfig::selection)
      .def_readwrite("search", &DetectionConfig::search)
      .def_readwrite("seed", &DetectionConfig::seed)
      .def_readwrite("refit_effects", &DetectionConfig::refit_effects)
      .def_readwrite("pip_threshold", &DetectionConfig::pip_threshold)
      .def_readwrite("threads", &DetectionConfig::threads)
      .def_property(
          "max_iter", [](const DetectionConfig& c) { return c.susie.max_iter; },
          [](DetectionConfig& c, int v) { c.susie.max_iter = v; })
      .def_property(
          "tol", [](const DetectionConfig& c) { return c.susie.tol; },
          [](DetectionConfig& c, double v) { c.susie.tol = v; })
      .def("validate", &DetectionConfig::validate);

  m.def(
      "detect_json",
      [](std::vector<Eigen::VectorXd> series, std::vector<std::string> labels, const DetectionConfig& cfg,
         const std::string& source) {
        std::string text;
        {
          py::gil_scoped_release release;
          const PanelSeries panel(std::move(series), std::move(labels));
          const auto result = detect(panel, cfg);
          text = io::detection_report(result, panel, {source, std::nullopt}).dump();
        }
        return text;
      },
      py::arg("series"), py::arg("labels"), py::arg("config"), py::arg("source") = "<python>");

  m.def(
      "periodogram",
      [](const std::vector<double>& y) {
        const auto pg = periodogram(y);
        return py::make_tuple(pg.freqs, pg.powers);
      },
      py::arg("y"));
  m.def("grid_equal", [](std::size_t p) { return build_grid_equal(p).freqs(); }, py::arg("p"));
  m.def(
      "grid_periodogram",
      [](const std::vector<double>& y, std::size_t p) { return build_grid_periodogram(y, p).freqs(); },
      py::arg("y"), py::arg("p"));
  m.def(
      "continuity_compatible_frequencies",
      [](double omega1, long t0) { return continuity_compatible_frequencies(omega1, t0); }, py::arg("omega1"),
      py::arg("t0"));

  m.def(
      "susie_fit",
      [](const Eigen::VectorXd& y, const std::vector<double>& freqs, int n_effects, double prior_var,
         int max_iter, double tol, bool estimate_sigma2, double sigma2, long offset, double pip_threshold) {
        susie::SusieOptions opts;
        opts.max_iter = max_iter;
        opts.tol = tol;
        opts.estimate_sigma2 = estimate_sigma2;
        opts.sigma2 = sigma2;
        const auto grid = FrequencyGrid::from_values(freqs);
        const Window w{offset, offset + static_cast<long>(y.size())};
        const auto fit = susie::susie_fit(y, grid, w, n_effects, Eigen::VectorXd(), prior_var, opts);
        return fit_to_dict(fit, pip_threshold);
      },
      py::arg("y"), py::arg("freqs"), py::arg("n_effects") = 2, py::arg("prior_var") = 1.0,
      py::arg("max_iter") = 100, py::arg("tol") = 1e-6, py::arg("estimate_sigma2") = true,
      py::arg("sigma2") = 0.0, py::arg("offset") = 0, py::arg("pip_threshold") = 0.5);

  m.def(
      "coverage",
      [](std::vector<long> truth, std::vector<long> est, long T) {
        return metrics::coverage(partition(std::move(truth), T), partition(std::move(est), T));
      },
      py::arg("truth"), py::arg("est"), py::arg("T"));
  m.def(
      "hausdorff",
      [](std::vector<long> truth, std::vector<long> est, long T) {
        return metrics::hausdorff(partition(std::move(truth), T), partition(std::move(est), T));
      },
      py::arg("truth"), py::arg("est"), py::arg("T"));
  m.def(
      "bias",
      [](std::vector<long> truth, std::vector<long> est, long T) {
        return metrics::bias(partition(std::move(truth), T), partition(std::move(est), T));
      },
      py::arg("truth"), py::arg("est"), py::arg("T"));

  m.def(
      "simulate_json",
      [](const std::string& scenario, std::uint64_t seed, double sigma, long T, long m_cps, long d, long d1) {
        const auto sim = io::simulate({scenario, seed, sigma, T, m_cps, d, d1});
        return py::make_tuple(sim.series, io::truth_json(sim.truth).dump());
      },
      py::arg("scenario"), py::arg("seed") = 0, py::arg("sigma") = -1.0, py::arg("T") = 0, py::arg("m") = -1,
      py::arg("d") = 3, py::arg("d1") = -1);
  m.def(
      "evaluate_json",
      [](const std::string& report, const std::string& truth) {
        return io::evaluation_report(io::parse_json(report, "report"), io::parse_json(truth, "truth")).dump();
      },
      py::arg("report"), py::arg("truth"));
  m.def(
      "render_svg",
      [](const std::string& report, int width, int panel_height) {
        return io::render_svg(io::parse_json(report, "report"), {width, panel_height});
      },
      py::arg("report"), py::arg("width") = 960, py::arg("panel_height") = 250);

  m.attr("SCHEMA_VERSION") = io::kSchemaVersion;
}
