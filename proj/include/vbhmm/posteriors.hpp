#pragma once

#include <vector>

#include <Eigen/Dense>

#include "vbhmm/types.hpp"

namespace vbhmm {

// Dirichlet pseudo-counts for one row of the transition table (or for the
// initial-state distribution). All entries strictly positive.
struct DirichletRow {
  Eigen::VectorXd alpha;

  explicit DirichletRow(Eigen::VectorXd a);
  int size() const { return static_cast<int>(alpha.size()); }
};

// Gaussian-Wishart parameters: q(mu, Lambda) = N(mu | m, (beta Lambda)^-1)
// W(Lambda | w, nu). Invariants: beta > 0, nu > D - 1, w SPD.
struct GaussWishart {
  Eigen::VectorXd m;
  double beta;
  Eigen::MatrixXd w;
  double nu;

  GaussWishart(Eigen::VectorXd m, double beta, Eigen::MatrixXd w, double nu);
  int dim() const { return static_cast<int>(m.size()); }
};

// Prior hyperparameters. The emission prior is shared across states.
struct HmmPriors {
  DirichletRow initial_alpha0;
  std::vector<DirichletRow> transition_alpha0;
  GaussWishart emission0;

  int states() const { return static_cast<int>(transition_alpha0.size()); }
  int dim() const { return emission0.dim(); }
  void validate() const;
};

// Variational posterior over all model parameters.
struct HmmPosterior {
  DirichletRow initial;
  std::vector<DirichletRow> transitions;
  std::vector<GaussWishart> emissions;

  int states() const { return static_cast<int>(emissions.size()); }
  int dim() const;
  void validate() const;
};

// E[ln pi~_k] = psi(alpha_k) - psi(sum_j alpha_j), one entry per component.
// Entries are <= 0, strictly negative for rows of length >= 2.
Eigen::VectorXd expected_log_pi(const DirichletRow& row);

// E[ln |Lambda|] = sum_d psi((nu + 1 - d)/2) + D ln 2 + ln|W|.
double expected_log_det_lambda(const GaussWishart& gw);

// E[(x - mu)^T Lambda (x - mu)] = D / beta + nu (x - m)^T W (x - m).
double expected_quadratic(const Eigen::VectorXd& x, const GaussWishart& gw);

// ln b_{n,j} = E[ln N(x | mu, Lambda^-1)]
//            = E[ln|Lambda|]/2 - D ln(2 pi)/2 - E[(x-mu)^T Lambda (x-mu)]/2.
double log_b(const Eigen::VectorXd& x, const GaussWishart& gw);

// Conjugate update from weighted statistics (occupancy n, weighted mean xbar,
// weighted scatter s, both defined with the 1/n normalization):
//   beta' = beta0 + n,  nu' = nu0 + n,  m' = (beta0 m0 + n xbar) / beta',
//   W'^-1 = W0^-1 + n s + (beta0 n / (beta0 + n)) (xbar - m0)(xbar - m0)^T.
// n == 0 returns the prior unchanged. Borderline-PSD assemblies are repaired
// by jitter escalation (1e-12 * trace * I, at most 3 doublings); repairs are
// counted into *jitter_events when given.
GaussWishart from_stats(const GaussWishart& prior, double n, const Eigen::VectorXd& xbar,
                        const Eigen::MatrixXd& s, int* jitter_events = nullptr);

// Occupancy below this value is treated as an empty state.
inline constexpr double kEmptyStateThreshold = 1e-12;

}  // namespace vbhmm
