#pragma once

#include "vbhmm/forward_backward.hpp"
#include "vbhmm/posteriors.hpp"
#include "vbhmm/vb_updates.hpp"

namespace vbhmm {

// The lower bound split into its seven expectation terms. By construction
//   total = e_ln_p_x + e_ln_p_z + e_ln_p_pi + e_ln_p_mu_lambda
//         - e_ln_q_z - e_ln_q_pi - e_ln_q_mu_lambda
// holds exactly: the data terms enter the total through log_z_tilde (the
// collapsed form for the optimal q(Z)) and e_ln_q_z is populated from the
// same identity, which equals its explicit gamma/xi expansion up to
// regrouping.
struct ElboBreakdown {
  double e_ln_p_x = 0.0;
  double e_ln_p_z = 0.0;
  double e_ln_p_pi = 0.0;
  double e_ln_p_mu_lambda = 0.0;
  double e_ln_q_z = 0.0;
  double e_ln_q_pi = 0.0;
  double e_ln_q_mu_lambda = 0.0;
  double total = 0.0;
};

// Lower bound for the (posterior, E-step) pair of one iteration. The Pi
// terms cover the transition rows and the initial-state row.
ElboBreakdown elbo(const HmmPosterior& post, const HmmPriors& priors,
                   const SufficientStats& stats, const EStepResult& estep);

// Same, with the summed log normalizer supplied directly (multi-sequence
// fits pool stats and add the per-sequence log_z_tilde values).
ElboBreakdown elbo(const HmmPosterior& post, const HmmPriors& priors,
                   const SufficientStats& stats, double log_z_tilde);

// KL(Dir(q) || Dir(p)); nonnegative, zero iff q == p.
double dirichlet_kl(const DirichletRow& q, const DirichletRow& p);

// KL between Gaussian-Wishart distributions with densities
// N(mu | m, (beta Lambda)^-1) W(Lambda | W, nu); nonnegative, zero iff the
// parameters coincide.
double gauss_wishart_kl(const GaussWishart& q, const GaussWishart& p);

}  // namespace vbhmm
