#include "oscseg/segment.hpp"

#include "oscseg/error.hpp"
#include "parallel.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <string>

namespace oscseg {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

void check_split(long u, long v, long s, long min_seg) {
  if (!(u < s && s < v) || s - u < min_seg || v - s < min_seg) {
    throw SplitInfeasible("split at " + std::to_string(s) + " of (" + std::to_string(u) + ", " +
                          std::to_string(v) + "] violates the minimum segment length " +
                          std::to_string(min_seg));
  }
}

GainProfile make_profile(Window interval, std::vector<GainEvaluation> evals) {
  GainProfile out;
  out.interval = interval;
  out.evaluations = std::move(evals);
  const GainEvaluation& b = out.best();
  out.argmax_s = b.s;
  out.argmax_gain = b.gain;
  return out;
}

}  // namespace

PanelSeries::PanelSeries(std::vector<Eigen::VectorXd> series, std::vector<std::string> labels)
    : series_(std::move(series)), labels_(std::move(labels)) {
  if (series_.empty()) throw InvalidArgument("panel: needs at least one series");
  const Eigen::Index T = series_.front().size();
  if (T < 4) throw SeriesTooShort("panel: series must have at least 4 samples");
  for (const auto& s : series_) {
    if (s.size() != T) throw InvalidArgument("panel: series lengths differ");
    if (!s.allFinite()) throw InvalidArgument("panel: non-finite value");
  }
  if (labels_.empty()) {
    for (std::size_t i = 0; i < series_.size(); ++i) labels_.push_back("y" + std::to_string(i + 1));
  }
  if (labels_.size() != series_.size()) throw InvalidArgument("panel: label count != d");
}

PanelSeries PanelSeries::univariate(Eigen::VectorXd series) {
  std::vector<Eigen::VectorXd> rows;
  rows.push_back(std::move(series));
  return PanelSeries(std::move(rows));
}

void DetectionConfig::validate() const {
  if (!(delta > 1.0)) throw InvalidArgument("config: delta must exceed 1");
  if (min_seg < 2) throw InvalidArgument("config: min_seg must be >= 2");
  if (n_effects < 1) throw InvalidArgument("config: N_E must be >= 1");
  if (auto_ne_max < 0) throw InvalidArgument("config: auto N_E bound must be >= 1");
  if (refit_effects < 0) throw InvalidArgument("config: refit N_E must be >= 0");
  if (!(prior_var > 0.0) || !std::isfinite(prior_var)) {
    throw InvalidArgument("config: prior variance must be positive");
  }
  if (!(pip_threshold > 0.0 && pip_threshold <= 1.0)) {
    throw InvalidArgument("config: pip threshold must lie in (0, 1]");
  }
  if (grid.mode != GridMode::Values && grid.p < 1) throw InvalidArgument("config: grid p >= 1");
  if (susie.max_iter < 1 || !(susie.tol >= 0.0)) {
    throw InvalidArgument("config: invalid susie iteration settings");
  }
  if (threads < 1) throw InvalidArgument("config: threads must be >= 1");
}

FrequencyGrid build_panel_grid(const PanelSeries& panel, const GridSpec& spec) {
  switch (spec.mode) {
    case GridMode::Equal:
      return build_grid_equal(spec.p);
    case GridMode::Values:
      return FrequencyGrid::from_values(spec.values, GridSource::User);
    case GridMode::Periodogram: {
      std::vector<Periodogram> parts;
      parts.reserve(panel.d());
      for (std::size_t i = 0; i < panel.d(); ++i) {
        const auto& s = panel.series(i);
        parts.push_back(periodogram(std::span<const double>(s.data(), s.size())));
      }
      return build_grid_periodogram(mean_periodogram(parts), spec.p);
    }
  }
  throw InvalidArgument("unknown grid mode");
}

const GainEvaluation& GainProfile::best() const {
  if (evaluations.empty()) throw InvalidArgument("gain profile has no evaluations");
  const GainEvaluation* best = &evaluations.front();
  for (const auto& e : evaluations) {
    if (e.gain > best->gain || (e.gain == best->gain && e.s < best->s)) best = &e;
  }
  return *best;
}

SegmentScorer::SegmentScorer(const PanelSeries& panel, FrequencyGrid grid, DetectionConfig cfg)
    : panel_(panel),
      grid_(std::move(grid)),
      cfg_(std::move(cfg)),
      design_(design(grid_, Window{0, panel.T()})),
      prior_pi_(susie::uniform_prior(grid_.size())) {
  cfg_.validate();
}

susie::SusieFit SegmentScorer::fit(std::size_t series, Window w, int n_effects) const {
  if (w.size() < 2) throw SegmentTooShort("segment (" + std::to_string(w.u) + ", " +
                                          std::to_string(w.v) + "] is shorter than 2");
  if (w.u < 0 || w.v > panel_.T()) throw InvalidArgument("segment window outside the series");
  const Eigen::VectorXd y = panel_.window(series, w);
  return susie::susie_fit(y, grid_, susie::DesignView(design_, w), n_effects, prior_pi_,
                          cfg_.prior_var, cfg_.susie);
}

std::vector<FitStats> SegmentScorer::compute(Window w, int n_effects) const {
  std::vector<FitStats> out(panel_.d());
  detail::parallel_for(panel_.d(), cfg_.threads, [&](std::size_t i) {
    const susie::SusieFit f = fit(i, w, n_effects);
    const Eigen::VectorXd y = panel_.window(i, w);
    out[i].elbo = f.elbo();
    out[i].rss = (y - f.fitted).squaredNorm();
    out[i].l_hat = susie::summarize(f, cfg_.pip_threshold).l_hat;
  });
  return out;
}

std::vector<FitStats> SegmentScorer::stats(Window w, int n_effects) {
  const auto key = std::make_tuple(w.u, w.v, n_effects);
  {
    std::lock_guard lock(mutex_);
    if (auto it = cache_.find(key); it != cache_.end()) return it->second;
  }
  std::vector<FitStats> computed = compute(w, n_effects);
  std::lock_guard lock(mutex_);
  auto [it, inserted] = cache_.emplace(key, std::move(computed));
  if (inserted) fits_ += panel_.d();
  return it->second;
}

double SegmentScorer::interval_score(Window w, int n_effects) {
  double total = 0.0;
  for (const FitStats& s : stats(w, n_effects)) total += s.elbo;
  return total;
}

GainEvaluation SegmentScorer::gain(long u, long v, long s, int n_effects) {
  check_split(u, v, s, cfg_.min_seg);
  GainEvaluation g;
  g.s = s;
  g.left = interval_score({u, s}, n_effects);
  g.right = interval_score({s, v}, n_effects);
  g.whole = interval_score({u, v}, n_effects);
  const double scale = std::max(std::abs(g.whole), 1e-12);
  g.gain = 1.0 + (g.left + g.right - g.whole) / scale;
  g.raw_ratio = (g.left + g.right) / (g.whole == 0.0 ? 1e-12 : g.whole);
  return g;
}

std::size_t SegmentScorer::fits_computed() const {
  std::lock_guard lock(mutex_);
  return fits_;
}

double interval_score(const PanelSeries& panel, Window w, const DetectionConfig& cfg) {
  SegmentScorer scorer(panel, build_panel_grid(panel, cfg.grid), cfg);
  return scorer.interval_score(w);
}

double gain(const PanelSeries& panel, long u, long v, long s, const DetectionConfig& cfg) {
  SegmentScorer scorer(panel, build_panel_grid(panel, cfg.grid), cfg);
  return scorer.gain(u, v, s).gain;
}

long bracket_width(long min_seg) { return std::max<long>(5, min_seg / 2); }

std::size_t optimistic_budget(long width, long bracket) {
  // Each probe shrinks the bracket to at most 3/4 of its width plus one.
  const double w = static_cast<double>(std::max<long>(width, 1));
  const auto shrink_steps = static_cast<std::size_t>(std::ceil(std::log(w) / std::log(4.0 / 3.0)));
  return 1 + shrink_steps + static_cast<std::size_t>(bracket) + 3;
}

std::vector<std::pair<long, double>> optimistic_argmax(long lo, long hi, long bracket,
                                                       const std::function<double(long)>& f) {
  if (hi < lo) throw InvalidArgument("optimistic_argmax: empty range");
  std::vector<std::pair<long, double>> calls;
  std::map<long, double> seen;
  auto eval = [&](long s) {
    if (auto it = seen.find(s); it != seen.end()) return it->second;
    const double value = f(s);
    seen.emplace(s, value);
    calls.emplace_back(s, value);
    return value;
  };

  long l = lo;
  long r = hi;
  if (r - l > bracket) {
    long w = l + (r - l) / 2;
    double gw = eval(w);
    while (r - l > bracket) {
      const bool probe_right = (r - w) >= (w - l);
      const long m = probe_right ? w + (r - w + 1) / 2 : l + (w - l) / 2;
      if (m == w || m < l || m > r) break;
      const double gm = eval(m);
      if (probe_right) {
        if (gm > gw) {
          l = w;
          w = m;
          gw = gm;
        } else {
          r = m;
        }
      } else {
        if (gm > gw) {
          r = w;
          w = m;
          gw = gm;
        } else {
          l = m;
        }
      }
    }
  }
  for (long s = l; s <= r; ++s) eval(s);
  return calls;
}

GainProfile optimistic_search(SegmentScorer& scorer, long u, long v, int n_effects) {
  const long min_seg = scorer.config().min_seg;
  if (v - u < 2 * min_seg) {
    throw SplitInfeasible("interval (" + std::to_string(u) + ", " + std::to_string(v) +
                          "] is shorter than twice the minimum segment length");
  }
  std::vector<GainEvaluation> evals;
  const auto calls = optimistic_argmax(u + min_seg, v - min_seg, bracket_width(min_seg),
                                       [&](long s) {
                                         evals.push_back(scorer.gain(u, v, s, n_effects));
                                         return evals.back().gain;
                                       });
  return make_profile({u, v}, std::move(evals));
}

GainProfile full_scan(SegmentScorer& scorer, long u, long v, int n_effects) {
  const long min_seg = scorer.config().min_seg;
  if (v - u < 2 * min_seg) {
    throw SplitInfeasible("interval (" + std::to_string(u) + ", " + std::to_string(v) +
                          "] is shorter than twice the minimum segment length");
  }
  const long lo = u + min_seg;
  const long hi = v - min_seg;
  // Whole-interval score first so workers share it through the cache.
  scorer.interval_score({u, v}, n_effects);
  std::vector<GainEvaluation> evals(static_cast<std::size_t>(hi - lo + 1));
  detail::parallel_for(evals.size(), scorer.config().threads, [&](std::size_t i) {
    evals[i] = scorer.gain(u, v, lo + static_cast<long>(i), n_effects);
  });
  return make_profile({u, v}, std::move(evals));
}

namespace {

void bisect(SegmentScorer& scorer, int n_effects, long u, long v, int depth, int parent,
            SegmentationTree& tree) {
  const DetectionConfig& cfg = scorer.config();
  if (v - u < 2 * cfg.min_seg) return;
  GainProfile profile = cfg.search == SearchMode::Optimistic
                            ? optimistic_search(scorer, u, v, n_effects)
                            : full_scan(scorer, u, v, n_effects);
  const GainEvaluation best = profile.best();
  tree.profiles.push_back(std::move(profile));
  if (!(best.gain > cfg.delta)) return;

  SplitNode node;
  node.u = u;
  node.v = v;
  node.s = best.s;
  node.gain = best.gain;
  node.raw_ratio = best.raw_ratio;
  node.depth = depth;
  node.parent = parent;
  node.nested_gain =
      parent < 0 ? best.gain
                 : std::min(best.gain, tree.splits[static_cast<std::size_t>(parent)].nested_gain);
  tree.splits.push_back(node);
  const int index = static_cast<int>(tree.splits.size()) - 1;
  bisect(scorer, n_effects, u, best.s, depth + 1, index, tree);
  bisect(scorer, n_effects, best.s, v, depth + 1, index, tree);
}

Partition partition_of(const SegmentationTree& tree, std::vector<long> cps) {
  std::sort(cps.begin(), cps.end());
  return Partition(std::move(cps), tree.T);
}

}  // namespace

SegmentationTree binary_segmentation(SegmentScorer& scorer, int n_effects) {
  SegmentationTree tree;
  tree.T = scorer.panel().T();
  bisect(scorer, n_effects, 0, tree.T, 0, -1, tree);
  return tree;
}

Partition threshold_partition(const SegmentationTree& tree, double threshold) {
  std::vector<long> cps;
  for (const auto& s : tree.splits) {
    if (s.nested_gain > threshold) cps.push_back(s.s);
  }
  return partition_of(tree, std::move(cps));
}

std::vector<Partition> nested_candidates(const SegmentationTree& tree) {
  std::vector<std::size_t> order(tree.splits.size());
  std::iota(order.begin(), order.end(), 0);
  // Parents precede children in depth-first order, so a stable sort keeps
  // every prefix closed under taking ancestors.
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return tree.splits[a].nested_gain > tree.splits[b].nested_gain;
  });
  std::vector<Partition> out;
  std::vector<long> cps;
  out.push_back(partition_of(tree, cps));
  for (std::size_t idx : order) {
    cps.push_back(tree.splits[idx].s);
    out.push_back(partition_of(tree, cps));
  }
  return out;
}

double mdl(const Partition& partition, const std::vector<std::vector<FitStats>>& refits) {
  const auto segments = partition.segments();
  if (refits.size() != segments.size()) throw InvalidArgument("mdl: refit count != segments");
  double total = std::log(static_cast<double>(partition.m() + 1));
  for (long cp : partition.cps()) total += std::log(static_cast<double>(cp));
  for (std::size_t j = 0; j < segments.size(); ++j) {
    const double n = static_cast<double>(segments[j].size());
    for (const FitStats& s : refits[j]) {
      const double sigma2 = std::max(s.rss / n, 1e-12);
      total += (2.0 * static_cast<double>(s.l_hat) + 1.0) / 2.0 * std::log(n) +
               0.5 * n * std::log(2.0 * std::numbers::pi * sigma2) + s.rss / (2.0 * sigma2);
    }
  }
  return total;
}

double mdl(SegmentScorer& scorer, const Partition& partition, int n_effects) {
  std::vector<std::vector<FitStats>> refits;
  for (const Window& w : partition.segments()) refits.push_back(scorer.stats(w, n_effects));
  return mdl(partition, refits);
}

Selected select_partition(SegmentScorer& scorer, const SegmentationTree& tree, int n_effects) {
  Selected out;
  if (scorer.config().selection == Selection::ThresholdOnly) {
    out.partition = threshold_partition(tree, scorer.config().delta);
    return out;
  }
  double best = std::numeric_limits<double>::infinity();
  for (Partition& p : nested_candidates(tree)) {
    const double score = mdl(scorer, p, n_effects);
    out.candidates.push_back({p, score});
    if (score < best) {
      best = score;
      out.partition = std::move(p);
    }
  }
  return out;
}

NeChoice auto_select_ne(SegmentScorer& scorer, int max_effects) {
  if (max_effects < 1) throw InvalidArgument("auto_select_ne: bound must be >= 1");
  NeChoice out;
  double best = std::numeric_limits<double>::infinity();
  for (int ne = 1; ne <= max_effects; ++ne) {
    SegmentationTree tree = binary_segmentation(scorer, ne);
    Selected sel = select_partition(scorer, tree, ne);
    const double score = mdl(scorer, sel.partition, max_effects);
    out.per_ne.push_back({sel.partition, score});
    if (score < best) {
      best = score;
      out.n_effects = ne;
      out.partition = sel.partition;
      out.tree = std::move(tree);
      out.candidates = std::move(sel.candidates);
    }
  }
  return out;
}

DetectionResult detect(const PanelSeries& panel, const DetectionConfig& cfg) {
  cfg.validate();
  DetectionResult out;
  out.config = cfg;

  auto start = Clock::now();
  FrequencyGrid grid = build_panel_grid(panel, cfg.grid);
  out.grid = grid.freqs();
  out.grid_source = grid.source();
  SegmentScorer scorer(panel, std::move(grid), cfg);
  out.timings.grid_s = seconds_since(start);

  start = Clock::now();
  if (cfg.auto_ne_max > 0) {
    NeChoice choice = auto_select_ne(scorer, cfg.auto_ne_max);
    out.chosen_ne = choice.n_effects;
    out.partition = std::move(choice.partition);
    out.tree = std::move(choice.tree);
    out.candidates = std::move(choice.candidates);
    out.ne_trace = std::move(choice.per_ne);
    out.timings.search_s = seconds_since(start);
  } else {
    out.chosen_ne = cfg.n_effects;
    out.tree = binary_segmentation(scorer, cfg.n_effects);
    out.timings.search_s = seconds_since(start);
    start = Clock::now();
    Selected sel = select_partition(scorer, out.tree, cfg.n_effects);
    out.partition = std::move(sel.partition);
    out.candidates = std::move(sel.candidates);
    out.timings.selection_s = seconds_since(start);
  }
  for (const auto& p : out.tree.profiles) out.gain_evaluations += p.evaluations.size();

  start = Clock::now();
  const int refit_ne = cfg.refit_effects > 0 ? cfg.refit_effects : out.chosen_ne;
  const auto windows = out.partition.segments();
  out.segments.resize(windows.size());
  out.fitted.assign(panel.d(), Eigen::VectorXd::Zero(panel.T()));
  for (std::size_t j = 0; j < windows.size(); ++j) {
    out.segments[j].window = windows[j];
    out.segments[j].series.resize(panel.d());
  }
  detail::parallel_for(windows.size() * panel.d(), cfg.threads, [&](std::size_t job) {
    const std::size_t j = job / panel.d();
    const std::size_t i = job % panel.d();
    const Window w = windows[j];
    const susie::SusieFit f = scorer.fit(i, w, refit_ne);
    SeriesSegmentFit& dst = out.segments[j].series[i];
    dst.summary = susie::summarize(f, cfg.pip_threshold);
    dst.pip = susie::pip(f);
    dst.sigma2 = f.sigma2;
    dst.elbo = f.elbo();
    dst.converged = f.converged;
    out.fitted[i].segment(w.u, w.size()) = f.fitted;
  });
  for (std::size_t i = 0; i < panel.d(); ++i) {
    const double mse = (panel.series(i) - out.fitted[i]).squaredNorm() /
                       static_cast<double>(panel.T());
    out.rmse_fit.push_back(std::sqrt(mse));
  }
  out.timings.refit_s = seconds_since(start);
  out.fits = scorer.fits_computed();
  return out;
}

}  // namespace oscseg
