#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "vbhmm/forward_backward.hpp"
#include "vbhmm/posteriors.hpp"
#include "vbhmm/types.hpp"

namespace vbhmm {

// Responsibility-weighted statistics feeding the M-step. For states with
// occupancy below kEmptyStateThreshold, xbar and s are zeroed and the state
// is flagged empty (the update then reproduces the prior).
struct SufficientStats {
  Eigen::VectorXd n_j;                 // occupancy per state
  std::vector<Eigen::VectorXd> xbar;   // weighted means
  std::vector<Eigen::MatrixXd> s;      // weighted scatter (1/N_j normalization)
  Eigen::MatrixXd xi_sums;             // summed pairwise responsibilities
  Eigen::VectorXd gamma1;              // first-step responsibilities (summed over sequences)
  std::vector<bool> empty;
  double total_observations = 0.0;
};

// How the initial-state pseudo-counts are updated. Paper adds the occupancy
// counts N_j (mirroring mixture weights); FirstStep adds gamma row 1, the
// standard VB-HMM update.
enum class InitialUpdateMode { kPaper, kFirstStep };

SufficientStats sufficient_stats(const EStepResult& result, const ObservationSequence& seq);

// Pooled statistics over several sequences; reduction runs in sequence order.
SufficientStats sufficient_stats(std::span<const EStepResult> results,
                                 std::span<const ObservationSequence> seqs);

// alpha_{j,s} = alpha0_{j,s} + sum_n xi(z_{n,j}, z_{n+1,s})
std::vector<DirichletRow> update_transitions(const HmmPriors& priors,
                                             const SufficientStats& stats);

DirichletRow update_initial(const HmmPriors& priors, const SufficientStats& stats,
                            InitialUpdateMode mode);

std::vector<GaussWishart> update_emissions(const HmmPriors& priors, const SufficientStats& stats,
                                           int* jitter_events = nullptr);

// Hyperparameter defaults: transition prior 0.5 on the diagonal and 1/(2J)
// off it, uniform initial row, and a data-scaled emission prior
// (m0 = data mean, beta0 = 1, nu0 = D, W0 = I / (D * scale)) so that
// E[Lambda] = nu0 W0 matches the empirical precision in magnitude.
HmmPriors default_priors(int states, int dim, const Eigen::VectorXd& data_mean,
                         double data_scale);

// Pooled mean and mean diagonal variance of a dataset, the `data_summary`
// consumed by default_priors.
std::pair<Eigen::VectorXd, double> data_summary(std::span<const ObservationSequence> seqs);

}  // namespace vbhmm
