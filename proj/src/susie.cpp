#include "oscseg/susie.hpp"

#include "oscseg/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace oscseg::susie {

namespace {

constexpr double kLog2Pi = 1.8378770664093453;  // log(2 pi)

// Per-column 2x2 Gram entries of the window.
struct Gram {
  Eigen::VectorXd ss;
  Eigen::VectorXd cc;
  Eigen::VectorXd sc;
};

Gram column_grams(const DesignView& d) {
  return {d.sin_cols.colwise().squaredNorm().transpose(),
          d.cos_cols.colwise().squaredNorm().transpose(),
          (d.sin_cols.array() * d.cos_cols.array()).colwise().sum().transpose()};
}

Eigen::Matrix2d gram_at(const Gram& g, Eigen::Index k) {
  Eigen::Matrix2d m;
  m << g.ss(k), g.sc(k), g.sc(k), g.cc(k);
  return m;
}

// SER update from the sufficient statistics X_k'r for every k.
void ser_from_products(const Gram& g, const Eigen::VectorXd& xs, const Eigen::VectorXd& xc,
                       double rr, Eigen::Index n, const Eigen::Ref<const Eigen::VectorXd>& prior_pi,
                       double sigma2, double prior_var, SerPosterior& out) {
  const Eigen::Index p = xs.size();
  out.alpha.resize(p);
  out.means.resize(p, 2);
  out.covs.resize(static_cast<std::size_t>(p));
  out.log_bf.resize(p);

  const double base = -0.5 * static_cast<double>(n) * (kLog2Pi + std::log(sigma2)) -
                      0.5 * rr / sigma2 - std::log(prior_var);
  const double inv_s2 = 1.0 / sigma2;
  const double inv_v = 1.0 / prior_var;

  double max_logit = -std::numeric_limits<double>::infinity();
  for (Eigen::Index k = 0; k < p; ++k) {
    // Precision [[a, b], [b, c]] and its inverse.
    const double a = g.ss(k) * inv_s2 + inv_v;
    const double c = g.cc(k) * inv_s2 + inv_v;
    const double b = g.sc(k) * inv_s2;
    const double det = a * c - b * b;
    Eigen::Matrix2d cov;
    cov << c / det, -b / det, -b / det, a / det;
    const Eigen::Vector2d z(xs(k) * inv_s2, xc(k) * inv_s2);
    const Eigen::Vector2d mu = cov * z;
    out.means.row(k) = mu.transpose();
    out.covs[static_cast<std::size_t>(k)] = cov;
    out.log_bf(k) = base - 0.5 * std::log(det) + 0.5 * mu.dot(z);
    const double logit = prior_pi(k) > 0.0 ? std::log(prior_pi(k)) + out.log_bf(k)
                                            : -std::numeric_limits<double>::infinity();
    out.alpha(k) = logit;
    max_logit = std::max(max_logit, logit);
  }
  // Log-sum-exp in fixed index order.
  double total = 0.0;
  for (Eigen::Index k = 0; k < p; ++k) {
    out.alpha(k) = std::exp(out.alpha(k) - max_logit);
    total += out.alpha(k);
  }
  out.alpha /= total;
}

Eigen::VectorXd effect_prediction(const SerPosterior& e, const DesignView& d) {
  const Eigen::VectorXd ws = e.alpha.cwiseProduct(e.means.col(0));
  const Eigen::VectorXd wc = e.alpha.cwiseProduct(e.means.col(1));
  return d.sin_cols * ws + d.cos_cols * wc;
}

// sum_k alpha_k E[(X_k b)'(X_k b) | gamma_k = 1]
double effect_second_moment(const SerPosterior& e, const Gram& g) {
  double total = 0.0;
  for (Eigen::Index k = 0; k < e.alpha.size(); ++k) {
    if (e.alpha(k) == 0.0) continue;
    const Eigen::Matrix2d G = gram_at(g, k);
    const Eigen::Vector2d mu = e.means.row(k).transpose();
    total += e.alpha(k) * (mu.dot(G * mu) + (G * e.covs[static_cast<std::size_t>(k)]).trace());
  }
  return total;
}

double effect_kl(const SerPosterior& e, const Eigen::VectorXd& prior_pi, double prior_var) {
  double kl = 0.0;
  for (Eigen::Index k = 0; k < e.alpha.size(); ++k) {
    const double a = e.alpha(k);
    if (a <= 0.0) continue;
    const Eigen::Matrix2d& cov = e.covs[static_cast<std::size_t>(k)];
    const Eigen::Vector2d mu = e.means.row(k).transpose();
    const double gauss = 0.5 * ((cov.trace() + mu.squaredNorm()) / prior_var - 2.0 +
                                2.0 * std::log(prior_var) - std::log(cov.determinant()));
    kl += a * (std::log(a / prior_pi(k)) + gauss);
  }
  return kl;
}

// Working state of one backfitting run over a fixed window.
class Backfitter {
 public:
  Backfitter(SusieFit& fit, const Eigen::Ref<const Eigen::VectorXd>& y, const DesignView& d)
      : fit_(fit), y_(y), d_(d), gram_(column_grams(d)) {
    preds_.reserve(fit_.effects.size());
    total_ = Eigen::VectorXd::Zero(y_.size());
    for (const auto& e : fit_.effects) {
      preds_.push_back(effect_prediction(e, d_));
      total_ += preds_.back();
    }
  }

  void sweep() {
    const Eigen::Index n = y_.size();
    for (std::size_t e = 0; e < fit_.effects.size(); ++e) {
      const Eigen::VectorXd r = y_ - total_ + preds_[e];
      const Eigen::VectorXd xs = d_.sin_cols.transpose() * r;
      const Eigen::VectorXd xc = d_.cos_cols.transpose() * r;
      ser_from_products(gram_, xs, xc, r.squaredNorm(), n, fit_.prior_pi, fit_.sigma2,
                        fit_.prior_var, fit_.effects[e]);
      Eigen::VectorXd updated = effect_prediction(fit_.effects[e], d_);
      total_ += updated - preds_[e];
      preds_[e] = std::move(updated);
    }
    if (fit_.estimate_sigma2) {
      fit_.sigma2 = std::max(erss() / static_cast<double>(n), fit_.sigma2_floor);
    }
  }

  double erss() const {
    double out = (y_ - total_).squaredNorm();
    for (std::size_t e = 0; e < fit_.effects.size(); ++e) {
      out += effect_second_moment(fit_.effects[e], gram_) - preds_[e].squaredNorm();
    }
    return std::max(out, 0.0);
  }

  double elbo() const {
    const auto n = static_cast<double>(y_.size());
    double kl = 0.0;
    for (const auto& e : fit_.effects) kl += effect_kl(e, fit_.prior_pi, fit_.prior_var);
    return -0.5 * n * (kLog2Pi + std::log(fit_.sigma2)) - 0.5 * erss() / fit_.sigma2 - kl;
  }

  void run(int sweeps, double tol, bool stop_on_tol) {
    for (int it = 0; it < sweeps; ++it) {
      const double previous = fit_.elbo_trace.empty()
                                  ? -std::numeric_limits<double>::infinity()
                                  : fit_.elbo_trace.back();
      sweep();
      const double current = elbo();
      if (!std::isfinite(current)) throw NumericalFailure("susie: non-finite ELBO");
      fit_.elbo_trace.push_back(current);
      if (std::isfinite(previous) &&
          std::abs(current - previous) < tol * std::max(1.0, std::abs(previous))) {
        fit_.converged = true;
        if (stop_on_tol) break;
      }
    }
    fit_.fitted = total_;
  }

 private:
  SusieFit& fit_;
  const Eigen::Ref<const Eigen::VectorXd>& y_;
  const DesignView& d_;
  Gram gram_;
  std::vector<Eigen::VectorXd> preds_;
  Eigen::VectorXd total_;
};

double population_variance(const Eigen::Ref<const Eigen::VectorXd>& y) {
  const double mean = y.mean();
  return (y.array() - mean).square().mean();
}

void check_dims(const Eigen::Ref<const Eigen::VectorXd>& y, const DesignView& d) {
  if (d.rows() != y.size()) throw InvalidArgument("susie: design rows do not match |y|");
  if (d.cos_cols.rows() != d.rows() || d.cos_cols.cols() != d.cols()) {
    throw InvalidArgument("susie: sine and cosine blocks differ in shape");
  }
  if (d.cols() < 1) throw InvalidArgument("susie: empty grid");
}

}  // namespace

Eigen::VectorXd uniform_prior(std::size_t p) {
  return Eigen::VectorXd::Constant(static_cast<Eigen::Index>(p), 1.0 / static_cast<double>(p));
}

SerPosterior ser_fit(const Eigen::Ref<const Eigen::VectorXd>& y, const DesignView& design,
                     const Eigen::Ref<const Eigen::VectorXd>& prior_pi, double sigma2,
                     double prior_var) {
  check_dims(y, design);
  if (prior_pi.size() != design.cols()) throw InvalidArgument("ser_fit: |prior_pi| != p");
  if (std::abs(prior_pi.sum() - 1.0) > 1e-10 || (prior_pi.array() < 0.0).any()) {
    throw InvalidArgument("ser_fit: prior_pi must be a probability vector");
  }
  if (!(sigma2 > 0.0) || !(prior_var > 0.0)) {
    throw InvalidArgument("ser_fit: variances must be positive");
  }
  const Gram g = column_grams(design);
  SerPosterior out;
  ser_from_products(g, design.sin_cols.transpose() * y, design.cos_cols.transpose() * y,
                    y.squaredNorm(), y.size(), prior_pi, sigma2, prior_var, out);
  return out;
}

SusieFit susie_fit(const Eigen::Ref<const Eigen::VectorXd>& y, const FrequencyGrid& grid,
                   const DesignView& design, int n_effects,
                   const Eigen::Ref<const Eigen::VectorXd>& prior_pi, double prior_var,
                   const SusieOptions& opts) {
  if (y.size() < 2) throw SegmentTooShort("susie_fit: segment needs at least 2 samples");
  if (n_effects < 1) throw InvalidArgument("susie_fit: n_effects must be >= 1");
  if (!(prior_var > 0.0)) throw InvalidArgument("susie_fit: prior variance must be positive");
  if (!y.allFinite()) throw InvalidArgument("susie_fit: non-finite data");
  check_dims(y, design);
  if (static_cast<std::size_t>(design.cols()) != grid.size()) {
    throw InvalidArgument("susie_fit: design columns do not match grid size");
  }
  const auto p = static_cast<Eigen::Index>(grid.size());

  SusieFit fit;
  fit.freqs = grid.freqs();
  fit.prior_pi = prior_pi.size() == 0 ? uniform_prior(grid.size()) : Eigen::VectorXd(prior_pi);
  if (fit.prior_pi.size() != p) throw InvalidArgument("susie_fit: |prior_pi| != p");
  if (std::abs(fit.prior_pi.sum() - 1.0) > 1e-10) {
    throw InvalidArgument("susie_fit: prior_pi must sum to 1");
  }
  fit.prior_var = prior_var;
  fit.estimate_sigma2 = opts.estimate_sigma2;
  const double var_y = population_variance(y);
  fit.sigma2 = opts.sigma2 > 0.0 ? opts.sigma2 : (var_y > 0.0 ? var_y : 1.0);
  fit.sigma2_floor = std::max(1e-8 * var_y, std::numeric_limits<double>::min());

  SerPosterior init;
  init.alpha = fit.prior_pi;
  init.means = Eigen::MatrixX2d::Zero(p, 2);
  init.covs.assign(static_cast<std::size_t>(p), Eigen::Matrix2d::Identity() * prior_var);
  init.log_bf = Eigen::VectorXd::Zero(p);
  fit.effects.assign(static_cast<std::size_t>(n_effects), init);

  Backfitter(fit, y, design).run(opts.max_iter, opts.tol, true);
  return fit;
}

SusieFit susie_fit(const Eigen::Ref<const Eigen::VectorXd>& y, const FrequencyGrid& grid,
                   Window window, int n_effects,
                   const Eigen::Ref<const Eigen::VectorXd>& prior_pi, double prior_var,
                   const SusieOptions& opts) {
  if (window.size() != y.size()) throw InvalidArgument("susie_fit: window length != |y|");
  if (window.size() < 2) throw SegmentTooShort("susie_fit: segment needs at least 2 samples");
  const DesignPair d = design(grid, window);
  return susie_fit(y, grid, DesignView(d), n_effects, prior_pi, prior_var, opts);
}

void continue_fit(SusieFit& fit, const Eigen::Ref<const Eigen::VectorXd>& y,
                  const DesignView& design, int sweeps) {
  check_dims(y, design);
  fit.converged = false;
  Backfitter(fit, y, design).run(sweeps, 0.0, false);
}

double elbo(const SusieFit& fit, const Eigen::Ref<const Eigen::VectorXd>& y,
            const DesignView& design) {
  check_dims(y, design);
  SusieFit copy = fit;
  return Backfitter(copy, y, design).elbo();
}

double expected_rss(const SusieFit& fit, const Eigen::Ref<const Eigen::VectorXd>& y,
                    const DesignView& design) {
  check_dims(y, design);
  SusieFit copy = fit;
  return Backfitter(copy, y, design).erss();
}

double segment_score(const Eigen::Ref<const Eigen::VectorXd>& y, const FrequencyGrid& grid,
                     const DesignView& design, int n_effects,
                     const Eigen::Ref<const Eigen::VectorXd>& prior_pi, double prior_var,
                     const SusieOptions& opts) {
  return susie_fit(y, grid, design, n_effects, prior_pi, prior_var, opts).elbo();
}

Eigen::VectorXd pip(const SusieFit& fit) {
  const Eigen::Index p = static_cast<Eigen::Index>(fit.freqs.size());
  Eigen::VectorXd keep = Eigen::VectorXd::Ones(p);
  for (const auto& e : fit.effects) keep.array() *= (1.0 - e.alpha.array());
  return (1.0 - keep.array()).matrix();
}

SegmentSummary summarize(const SusieFit& fit, double pip_threshold) {
  SegmentSummary out;
  const double n = static_cast<double>(std::max<Eigen::Index>(fit.fitted.size(), 1));
  const double resolution = 0.5 / n;
  for (const auto& e : fit.effects) {
    Eigen::Index k = 0;
    const double top = e.alpha.maxCoeff(&k);
    SelectedFrequency s;
    s.index = static_cast<std::size_t>(k);
    s.frequency = fit.freqs[s.index];
    s.beta_sin = e.means(k, 0);
    s.beta_cos = e.means(k, 1);
    s.amplitude = std::hypot(s.beta_sin, s.beta_cos);
    s.pip = top;
    out.effects.push_back(s);
    if (top < pip_threshold) continue;
    auto same = std::find_if(out.selected.begin(), out.selected.end(), [&](const SelectedFrequency& o) {
      return o.index == s.index || std::abs(o.frequency - s.frequency) < resolution;
    });
    if (same == out.selected.end()) {
      out.selected.push_back(s);
    } else if (s.amplitude > same->amplitude) {
      *same = s;
    }
  }
  std::sort(out.selected.begin(), out.selected.end(),
            [](const SelectedFrequency& a, const SelectedFrequency& b) {
              return a.frequency < b.frequency;
            });
  out.l_hat = out.selected.size();
  return out;
}

}  // namespace oscseg::susie
