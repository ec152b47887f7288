#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "vbhmm/elbo.hpp"
#include "vbhmm/forward_backward.hpp"
#include "vbhmm/posteriors.hpp"
#include "vbhmm/types.hpp"
#include "vbhmm/vb_updates.hpp"

namespace vbhmm {

enum class InitMethod { kRandomResponsibilities, kKMeans };

struct TrainConfig {
  int states = 1;
  double tol = 1e-6;
  int max_iters = 200;
  std::uint64_t seed = 0;
  InitMethod init = InitMethod::kRandomResponsibilities;
  InitialUpdateMode initial_update = InitialUpdateMode::kPaper;
  int restarts = 1;

  void validate() const;
};

struct TrainReport {
  HmmPosterior posterior;
  HmmPriors priors;    // resolved priors the fit actually used
  TrainConfig config;  // configuration the fit ran with
  std::vector<double> elbo_trace;
  int iterations = 0;
  bool converged = false;
  std::vector<std::string> warnings;
};

// Snapshot of one iteration, observable via the fit callback: the posterior
// the E-step ran against, the statistics it produced, and the bound.
struct IterationInfo {
  int iteration;  // 1-based
  const HmmPosterior& posterior;
  const SufficientStats& stats;
  const std::vector<EStepResult>& e_steps;
  const ElboBreakdown& bound;
};

using IterationObserver = std::function<void(const IterationInfo&)>;

// One VB-EM run from given per-sequence initial responsibilities: M-step from
// the responsibilities, then alternate E-step / M-step recording the bound
// after each E-step until |delta L| / (1 + |L|) < tol or max_iters.
TrainReport fit_from_responsibilities(const std::vector<ObservationSequence>& data,
                                      const TrainConfig& cfg, const HmmPriors& priors,
                                      const std::vector<Eigen::MatrixXd>& responsibilities,
                                      const IterationObserver& observer = nullptr);

// Full training entry point. Runs cfg.restarts seeded restarts and returns
// the report with the highest final bound (ties: lowest restart index).
// Byte-identical for identical (data, cfg, priors).
TrainReport fit(const std::vector<ObservationSequence>& data, const TrainConfig& cfg,
                const std::optional<HmmPriors>& priors = std::nullopt,
                const IterationObserver& observer = nullptr);

// Initial per-sequence responsibilities: rows drawn from Dirichlet(1) in
// random mode, or 10-iteration k-means assignments softened to
// 0.9 / (0.1/(J-1)) in k-means mode.
std::vector<Eigen::MatrixXd> init_responsibilities(const std::vector<ObservationSequence>& data,
                                                   const TrainConfig& cfg);

// Expectations of the posterior: pi and A from Dirichlet means, means m_j,
// covariances (nu_j W_j)^-1.
struct PointEstimate {
  Eigen::VectorXd pi;
  Eigen::MatrixXd a;
  std::vector<Eigen::VectorXd> means;
  std::vector<Eigen::MatrixXd> covariances;
};

PointEstimate point_estimate(const HmmPosterior& post);

}  // namespace vbhmm
