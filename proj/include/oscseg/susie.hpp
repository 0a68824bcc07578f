#pragma once

#include "oscseg/fourier.hpp"

#include <Eigen/Dense>

#include <vector>

namespace oscseg::susie {

/// Non-owning rows x p sine/cosine column blocks sharing one time window.
struct DesignView {
  Eigen::Ref<const Eigen::MatrixXd> sin_cols;
  Eigen::Ref<const Eigen::MatrixXd> cos_cols;

  explicit DesignView(const DesignPair& d) : sin_cols(d.sin_cols), cos_cols(d.cos_cols) {}
  DesignView(const DesignPair& d, Window sub)
      : sin_cols(d.sin_block(sub)), cos_cols(d.cos_block(sub)) {}
  DesignView(const Eigen::Ref<const Eigen::MatrixXd>& s,
             const Eigen::Ref<const Eigen::MatrixXd>& c)
      : sin_cols(s), cos_cols(c) {}

  Eigen::Index rows() const { return sin_cols.rows(); }
  Eigen::Index cols() const { return sin_cols.cols(); }
};

/// Single effect regression: one frequency, both of its columns, shared indicator.
struct SerPosterior {
  Eigen::VectorXd alpha;               // inclusion probabilities, sums to 1
  Eigen::MatrixX2d means;              // posterior mean of (b_sin, b_cos) given gamma_k = 1
  std::vector<Eigen::Matrix2d> covs;   // matching posterior covariances
  Eigen::VectorXd log_bf;              // log p(y | column pair k)
};

struct SusieOptions {
  int max_iter = 100;
  double tol = 1e-6;  // relative ELBO change between sweeps
  bool estimate_sigma2 = true;
  double sigma2 = 0.0;  // initial (or fixed) noise variance; <= 0 means var(y)
};

struct SusieFit {
  std::vector<SerPosterior> effects;
  std::vector<double> freqs;           // grid the fit was computed on
  Eigen::VectorXd prior_pi;
  double prior_var = 1.0;
  double sigma2 = 1.0;
  double sigma2_floor = 0.0;
  bool estimate_sigma2 = true;
  std::vector<double> elbo_trace;
  bool converged = false;
  Eigen::VectorXd fitted;              // posterior-mean prediction of y

  int n_effects() const { return static_cast<int>(effects.size()); }
  double elbo() const { return elbo_trace.empty() ? 0.0 : elbo_trace.back(); }
};

struct SelectedFrequency {
  std::size_t index = 0;
  double frequency = 0.0;
  double beta_sin = 0.0;
  double beta_cos = 0.0;
  double amplitude = 0.0;
  double pip = 0.0;  // max alpha of the effect that chose it
};

struct SegmentSummary {
  std::vector<SelectedFrequency> effects;   // argmax of every effect, in effect order
  std::vector<SelectedFrequency> selected;  // confident and deduplicated, ascending frequency
  std::size_t l_hat = 0;
};

/// Uniform prior over p candidates.
Eigen::VectorXd uniform_prior(std::size_t p);

SerPosterior ser_fit(const Eigen::Ref<const Eigen::VectorXd>& y, const DesignView& design,
                     const Eigen::Ref<const Eigen::VectorXd>& prior_pi, double sigma2,
                     double prior_var);

/// Iterative backfitting of n_effects single effects. An empty prior_pi means uniform.
SusieFit susie_fit(const Eigen::Ref<const Eigen::VectorXd>& y, const FrequencyGrid& grid,
                   const DesignView& design, int n_effects,
                   const Eigen::Ref<const Eigen::VectorXd>& prior_pi, double prior_var,
                   const SusieOptions& opts = {});

SusieFit susie_fit(const Eigen::Ref<const Eigen::VectorXd>& y, const FrequencyGrid& grid,
                   Window window, int n_effects,
                   const Eigen::Ref<const Eigen::VectorXd>& prior_pi, double prior_var,
                   const SusieOptions& opts = {});

/// Runs `sweeps` more backfitting sweeps on an existing fit, appending to its trace.
void continue_fit(SusieFit& fit, const Eigen::Ref<const Eigen::VectorXd>& y,
                  const DesignView& design, int sweeps);

/// Evidence lower bound of the current variational state.
double elbo(const SusieFit& fit, const Eigen::Ref<const Eigen::VectorXd>& y,
            const DesignView& design);

/// Expected residual sum of squares under the variational posterior.
double expected_rss(const SusieFit& fit, const Eigen::Ref<const Eigen::VectorXd>& y,
                    const DesignView& design);

/// Final ELBO of a fresh fit, used as the log marginal surrogate of the window.
double segment_score(const Eigen::Ref<const Eigen::VectorXd>& y, const FrequencyGrid& grid,
                     const DesignView& design, int n_effects,
                     const Eigen::Ref<const Eigen::VectorXd>& prior_pi, double prior_var,
                     const SusieOptions& opts = {});

/// Aggregate per-frequency PIP: 1 - prod_e (1 - alpha[e][k]).
Eigen::VectorXd pip(const SusieFit& fit);

/// Effects whose top alpha reaches pip_threshold are selected. Two selections
/// closer than 1/(2n) in frequency (n the window length) cannot be told apart in
/// the window and are merged, keeping the larger amplitude.
SegmentSummary summarize(const SusieFit& fit, double pip_threshold = 0.5);

}  // namespace oscseg::susie
