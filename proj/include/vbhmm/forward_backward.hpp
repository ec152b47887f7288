#pragma once

#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "vbhmm/posteriors.hpp"
#include "vbhmm/types.hpp"

namespace vbhmm {

// Marginals produced by one scaled forward-backward sweep.
struct EStepResult {
  Eigen::MatrixXd gamma;            // N x J, rows sum to 1
  std::vector<Eigen::MatrixXd> xi;  // N-1 slices of J x J, each sums to 1
  Eigen::VectorXd log_c;            // per-step log scaling constants
  double log_z_tilde = 0.0;         // sum of log_c
  int degenerate_steps = 0;         // uniform-fallback steps (0 for finite inputs)
};

// Expected-log parameters under the posterior: (log pi~, log a~) with
// log a~(j, s) = E[ln pi~_{j,s}] from transition row j.
std::pair<Eigen::VectorXd, Eigen::MatrixXd> tilde_params(const HmmPosterior& post);

// Scaled forward-backward over arbitrary log-parameters. The inputs need not
// be normalized (the VB E-step feeds sub-normalized tilde parameters, the ML
// baseline feeds exact log-densities); gamma and xi are normalized posteriors
// either way and log_z_tilde is the log of the summed path weights.
EStepResult forward_backward(const Eigen::VectorXd& log_pi, const Eigen::MatrixXd& log_a,
                             const Eigen::MatrixXd& log_b);

// Per-state expected log-densities ln b_{n,j} for a whole sequence.
Eigen::MatrixXd log_b_matrix(const HmmPosterior& post, const ObservationSequence& seq);

// The variational E-step for one sequence.
EStepResult e_step(const HmmPosterior& post, const ObservationSequence& seq);

// pi_j = gamma(z_{1,j}) / sum_k gamma(z_{1,k}); gamma rows are already
// normalized so this is the first row of gamma.
Eigen::VectorXd initial_pi_hat(const EStepResult& result);

}  // namespace vbhmm
