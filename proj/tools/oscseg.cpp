#include "oscseg/error.hpp"
#include "oscseg/io/csv.hpp"
#include "oscseg/io/plot.hpp"
#include "oscseg/io/report.hpp"
#include "oscseg/io/simulate.hpp"
#include "oscseg/segment.hpp"

#include "CLI11.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>

namespace {

using namespace oscseg;
using io::Json;

enum Exit { kOk = 0, kInputError = 2, kConfigError = 3, kNumericalError = 4 };

/// Flag values that parse but do not make sense.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(item);
  return out;
}

long parse_long(const std::string& s, const std::string& what) {
  try {
    std::size_t pos = 0;
    const long v = std::stol(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ConfigError(what + ": expected an integer, got '" + s + "'");
  }
}

double parse_double(const std::string& s, const std::string& what) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ConfigError(what + ": expected a number, got '" + s + "'");
  }
}

/// equal:P, periodogram:P or values:f1,f2,...
GridSpec parse_grid(const std::string& text) {
  const auto colon = text.find(':');
  const std::string kind = text.substr(0, colon);
  const std::string arg = colon == std::string::npos ? "" : text.substr(colon + 1);
  GridSpec g;
  if (kind == "equal" || kind == "periodogram") {
    g.mode = kind == "equal" ? GridMode::Equal : GridMode::Periodogram;
    const long p = arg.empty() ? 50 : parse_long(arg, "--grid");
    if (p < 1) throw ConfigError("--grid: p must be positive");
    g.p = static_cast<std::size_t>(p);
    return g;
  }
  if (kind == "values") {
    g.mode = GridMode::Values;
    for (const auto& v : split(arg, ',')) g.values.push_back(parse_double(v, "--grid"));
    if (g.values.empty()) throw ConfigError("--grid values: list is empty");
    return g;
  }
  throw ConfigError("--grid: expected equal:P, periodogram:P or values:f1,f2,..., got '" + text + "'");
}

int default_threads() {
  if (const char* env = std::getenv("OSCSEG_THREADS"); env && *env) {
    const long n = parse_long(env, "OSCSEG_THREADS");
    if (n < 1) throw ConfigError("OSCSEG_THREADS must be positive");
    return static_cast<int>(n);
  }
  return static_cast<int>(std::max(1U, std::thread::hardware_concurrency()));
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw io::InputError(path, 0, 0, "cannot open for writing");
  out << text;
}

struct DetectArgs {
  std::string input;
  std::string out;
  std::string grid = "periodogram:50";
  std::string ne = "2";
  double delta = 1.01;
  std::string select = "mdl";
  std::string search = "optimistic";
  std::uint64_t seed = 0;
  int threads = 0;
  int refit_ne = 0;
  long min_seg = 30;
  double prior_var = 1.0;
  double pip_threshold = 0.5;
  int max_iter = 100;
  double tol = 1e-6;
};

DetectionConfig make_config(const DetectArgs& a) {
  DetectionConfig cfg;
  cfg.grid = parse_grid(a.grid);
  if (a.ne.rfind("auto:", 0) == 0) {
    cfg.auto_ne_max = static_cast<int>(parse_long(a.ne.substr(5), "--ne"));
    if (cfg.auto_ne_max < 1) throw ConfigError("--ne auto:K needs K >= 1");
    cfg.n_effects = 1;
  } else {
    cfg.n_effects = static_cast<int>(parse_long(a.ne, "--ne"));
  }
  cfg.delta = a.delta;
  if (a.select == "mdl") cfg.selection = Selection::MDL;
  else if (a.select == "threshold") cfg.selection = Selection::ThresholdOnly;
  else throw ConfigError("--select: expected mdl or threshold");
  if (a.search == "optimistic") cfg.search = SearchMode::Optimistic;
  else if (a.search == "full") cfg.search = SearchMode::FullScan;
  else throw ConfigError("--search: expected optimistic or full");
  cfg.seed = a.seed;
  cfg.threads = a.threads > 0 ? a.threads : default_threads();
  cfg.refit_effects = a.refit_ne;
  cfg.min_seg = a.min_seg;
  cfg.prior_var = a.prior_var;
  cfg.pip_threshold = a.pip_threshold;
  cfg.susie.max_iter = a.max_iter;
  cfg.susie.tol = a.tol;
  try {
    cfg.validate();
  } catch (const InvalidArgument& e) {
    throw ConfigError(e.what());
  }
  return cfg;
}

int run_detect(const DetectArgs& a) {
  const DetectionConfig cfg = make_config(a);
  io::SeriesTable table;
  if (a.input == "-") {
    table = io::read_series(std::cin, "<stdin>");
  } else {
    table = io::read_series_file(a.input);
  }
  PanelSeries panel = [&] {
    try {
      return PanelSeries(table.series, table.labels);
    } catch (const InvalidArgument& e) {
      throw io::InputError(a.input, 0, 0, e.what());
    }
  }();
  const DetectionResult result = detect(panel, cfg);
  const Json report = io::detection_report(result, panel, {a.input, table.index});
  write_text(a.out, report.dump(2) + "\n");
  return kOk;
}

int run_simulate(const io::SimulationRequest& request, const std::string& out, const std::string& truth_out) {
  const io::Simulation sim = io::simulate(request);
  std::ostringstream csv;
  io::write_series(csv, sim.truth.labels, sim.series);
  write_text(out, csv.str());

  std::string truth_path = truth_out;
  if (truth_path.empty() && !out.empty() && out != "-") {
    std::filesystem::path p(out);
    p.replace_extension(".truth.json");
    truth_path = p.string();
  }
  if (!truth_path.empty()) write_text(truth_path, io::truth_json(sim.truth).dump(2) + "\n");
  return kOk;
}

int run_evaluate(const std::string& report_path, const std::string& truth_path, const std::string& out) {
  const Json report = io::read_json_file(report_path);
  const Json truth = io::read_json_file(truth_path);
  Json eval;
  try {
    eval = io::evaluation_report(report, truth);
  } catch (const nlohmann::json::exception& e) {
    throw io::InputError(report_path, 0, 0, std::string("malformed report: ") + e.what());
  } catch (const InvalidArgument& e) {
    throw ConfigError(e.what());
  }
  write_text(out, eval.dump(2) + "\n");
  return kOk;
}

int run_plot(const std::string& report_path, const std::string& out) {
  const Json report = io::read_json_file(report_path);
  std::string svg;
  try {
    svg = io::render_svg(report);
  } catch (const nlohmann::json::exception& e) {
    throw io::InputError(report_path, 0, 0, std::string("malformed report: ") + e.what());
  }
  write_text(out, svg);
  return kOk;
}

std::string strip(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

/// Expands `--config FILE` into flags. Each `key = value` line becomes
/// `--key value` unless that flag is already on the command line, which wins.
/// Blank lines and lines starting with # are ignored; values may be quoted.
std::vector<std::string> expand_config(std::vector<std::string> args) {
  std::string path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
  }
  if (path.empty()) return args;
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  std::vector<std::string> extra;
  std::string line;
  for (std::size_t n = 1; std::getline(in, line); ++n) {
    line = strip(line);
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(path + ":" + std::to_string(n) + ": expected key = value");
    const std::string key = strip(line.substr(0, eq));
    std::string value = strip(line.substr(eq + 1));
    if (value.size() >= 2 && (value.front() == '"' || value.front() == '\'') && value.back() == value.front()) {
      value = value.substr(1, value.size() - 2);
    }
    if (key.empty() || key == "config") throw ConfigError(path + ":" + std::to_string(n) + ": invalid key");
    const std::string flag = "--" + key;
    const bool given = std::any_of(args.begin(), args.end(), [&](const std::string& a) {
      return a == flag || a.rfind(flag + "=", 0) == 0;
    });
    if (!given) {
      extra.push_back(flag);
      extra.push_back(value);
    }
  }
  args.insert(args.end(), extra.begin(), extra.end());
  return args;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Change point detection for oscillatory time series", "oscseg"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "oscseg 0.1.0");

  DetectArgs det;
  auto* detect_cmd = app.add_subcommand("detect", "Segment the series of a CSV file and write a JSON report");
  detect_cmd->add_option("--input,-i", det.input, "CSV file, or - for stdin")->required();
  detect_cmd->add_option("--out,-o", det.out, "Report path (default stdout)");
  detect_cmd->add_option("--grid", det.grid, "equal:P, periodogram:P or values:f1,f2,...")->capture_default_str();
  detect_cmd->add_option("--ne", det.ne, "Number of effects N, or auto:K to choose N in 1..K")->capture_default_str();
  detect_cmd->add_option("--delta", det.delta, "Gain threshold (> 1)")->capture_default_str();
  detect_cmd->add_option("--select", det.select, "mdl or threshold")->capture_default_str();
  detect_cmd->add_option("--search", det.search, "optimistic or full")->capture_default_str();
  detect_cmd->add_option("--seed", det.seed, "Seed echoed in the report")->capture_default_str();
  detect_cmd->add_option("--threads", det.threads, "Worker threads (default $OSCSEG_THREADS or all cores)");
  detect_cmd->add_option("--refit-ne", det.refit_ne, "Effects for the reported segment fits (0: detection N)")
      ->capture_default_str();
  detect_cmd->add_option("--min-seg", det.min_seg, "Minimum segment length")->capture_default_str();
  detect_cmd->add_option("--prior-var", det.prior_var, "Prior variance of the intensities")->capture_default_str();
  detect_cmd->add_option("--pip-threshold", det.pip_threshold, "Confidence needed to report a frequency")
      ->capture_default_str();
  detect_cmd->add_option("--max-iter", det.max_iter, "Backfitting sweep cap")->capture_default_str();
  detect_cmd->add_option("--tol", det.tol, "Relative ELBO tolerance")->capture_default_str();
  std::string config_path;
  detect_cmd->add_option("--config", config_path, "key = value file; keys are flag names without dashes");

  io::SimulationRequest sim;
  std::string sim_out, sim_truth;
  auto* sim_cmd = app.add_subcommand("simulate", "Write a simulated scenario as CSV plus a truth JSON");
  sim_cmd->add_option("--scenario", sim.scenario, "1a, 1b, 1c, 2a, 2b, 3, 4, 5 or 6")->required();
  sim_cmd->add_option("--out,-o", sim_out, "CSV path (default stdout)");
  sim_cmd->add_option("--truth", sim_truth, "Truth JSON path (default: next to --out)");
  sim_cmd->add_option("--seed", sim.seed, "Random seed")->capture_default_str();
  sim_cmd->add_option("--sigma", sim.sigma, "Noise standard deviation (scenarios 1a, 2a, 2b, 6)");
  sim_cmd->add_option("--T", sim.T, "Series length (scenarios 2a, 2b, 3, 6)");
  sim_cmd->add_option("--m", sim.m, "Number of change points (scenarios 2a, 2b, 3)");
  sim_cmd->add_option("--d", sim.d, "Number of series (scenario 3)")->capture_default_str();
  sim_cmd->add_option("--d1", sim.d1, "Series with sigma 3, the rest get 9 (scenario 3; default d)");
  sim_cmd->add_option("--config", config_path, "key = value file; keys are flag names without dashes");

  std::string eval_report, eval_truth, eval_out;
  auto* eval_cmd = app.add_subcommand("evaluate", "Score a detection report against a truth JSON");
  eval_cmd->add_option("--report", eval_report, "Detection report")->required();
  eval_cmd->add_option("--truth", eval_truth, "Truth JSON written by simulate")->required();
  eval_cmd->add_option("--out,-o", eval_out, "Output path (default stdout)");

  std::string plot_report, plot_out;
  auto* plot_cmd = app.add_subcommand("plot", "Render a detection report as SVG");
  plot_cmd->add_option("--report", plot_report, "Detection report")->required();
  plot_cmd->add_option("--out,-o", plot_out, "SVG path (default stdout)");

  try {
    std::vector<std::string> args(argv + 1, argv + argc);
    args = expand_config(std::move(args));
    std::reverse(args.begin(), args.end());  // CLI11 consumes the vector from the back
    app.parse(args);
  } catch (const ConfigError& e) {
    std::cerr << "oscseg: config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfigError;
  }

  try {
    if (*detect_cmd) return run_detect(det);
    if (*sim_cmd) return run_simulate(sim, sim_out, sim_truth);
    if (*eval_cmd) return run_evaluate(eval_report, eval_truth, eval_out);
    if (*plot_cmd) return run_plot(plot_report, plot_out);
  } catch (const io::InputError& e) {
    std::cerr << "oscseg: input error: " << e.what() << '\n';
    return kInputError;
  } catch (const ConfigError& e) {
    std::cerr << "oscseg: config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const InvalidArgument& e) {
    std::cerr << "oscseg: config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "oscseg: numerical failure: " << e.what() << '\n';
    return kNumericalError;
  }
  return kConfigError;
}
