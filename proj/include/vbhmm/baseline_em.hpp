#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "vbhmm/types.hpp"

namespace vbhmm {

// Point-parameter HMM fitted by maximum likelihood.
struct MlHmm {
  Eigen::VectorXd pi;
  Eigen::MatrixXd a;
  std::vector<Eigen::VectorXd> means;
  std::vector<Eigen::MatrixXd> covariances;

  int states() const { return static_cast<int>(pi.size()); }
  int dim() const { return means.empty() ? 0 : static_cast<int>(means.front().size()); }
  void validate() const;
};

struct EmReport {
  MlHmm model;
  std::vector<double> loglik_trace;
  int iterations = 0;
  bool converged = false;
  // True when a covariance collapsed (Cholesky failure or non-finite
  // likelihood). Only reachable with cov_floor == 0; the model holds the last
  // valid parameters.
  bool diverged = false;
};

// Classical Baum-Welch with covariance eigenvalue flooring. cov_floor may be
// zero, which disables the singularity patch (used to demonstrate collapse on
// degenerate data).
EmReport baum_welch_fit(const std::vector<ObservationSequence>& data, int states,
                        std::uint64_t seed, int max_iters, double tol, double cov_floor);

// Exact sequence log-likelihood under concrete parameters.
double log_likelihood(const MlHmm& model, const ObservationSequence& seq);

// Per-state Gaussian log-densities, ln N(x_n | mean_j, cov_j).
Eigen::MatrixXd gaussian_log_pdf_matrix(const MlHmm& model, const ObservationSequence& seq);

}  // namespace vbhmm
