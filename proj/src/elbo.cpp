#include "vbhmm/elbo.hpp"

#include <cmath>
#include <stdexcept>

#include "vbhmm/special_functions.hpp"

namespace vbhmm {

namespace {

constexpr double kLn2Pi = 1.8378770664093454835606594728112;

// E_q[ln Dir(pi | alpha)] where expected_log is E_q[ln pi~] under the
// posterior row.
double expected_log_dirichlet(const Eigen::VectorXd& alpha,
                              const Eigen::VectorXd& expected_log) {
  return ln_dirichlet_norm(alpha) +
         ((alpha.array() - 1.0) * expected_log.array()).sum();
}

}  // namespace

ElboBreakdown elbo(const HmmPosterior& post, const HmmPriors& priors,
                   const SufficientStats& stats, const EStepResult& estep) {
  return elbo(post, priors, stats, estep.log_z_tilde);
}

ElboBreakdown elbo(const HmmPosterior& post, const HmmPriors& priors,
                   const SufficientStats& stats, double log_z_tilde) {
  post.validate();
  priors.validate();
  const int j = post.states();
  const int d = post.dim();
  if (priors.states() != j || priors.dim() != d || stats.n_j.size() != j) {
    throw std::invalid_argument("elbo: inconsistent shapes");
  }

  const Eigen::VectorXd u_init = expected_log_pi(post.initial);
  std::vector<Eigen::VectorXd> u_rows;
  u_rows.reserve(j);
  for (int row = 0; row < j; ++row) u_rows.push_back(expected_log_pi(post.transitions[row]));
  std::vector<double> eld(j);
  for (int state = 0; state < j; ++state) {
    eld[state] = expected_log_det_lambda(post.emissions[state]);
  }

  ElboBreakdown bd;

  for (int state = 0; state < j; ++state) {
    const auto& gw = post.emissions[state];
    const double n = stats.n_j[state];
    if (n < kEmptyStateThreshold) continue;
    const Eigen::VectorXd dev = stats.xbar[state] - gw.m;
    bd.e_ln_p_x += 0.5 * n *
                   (eld[state] - d / gw.beta - gw.nu * (stats.s[state] * gw.w).trace() -
                    gw.nu * dev.dot(gw.w * dev) - d * kLn2Pi);
  }

  bd.e_ln_p_z = stats.gamma1.dot(u_init);
  for (int row = 0; row < j; ++row) {
    bd.e_ln_p_z += stats.xi_sums.row(row).dot(u_rows[row].transpose());
  }

  bd.e_ln_p_pi = expected_log_dirichlet(priors.initial_alpha0.alpha, u_init);
  bd.e_ln_q_pi = expected_log_dirichlet(post.initial.alpha, u_init);
  for (int row = 0; row < j; ++row) {
    bd.e_ln_p_pi += expected_log_dirichlet(priors.transition_alpha0[row].alpha, u_rows[row]);
    bd.e_ln_q_pi += expected_log_dirichlet(post.transitions[row].alpha, u_rows[row]);
  }

  const auto& prior_gw = priors.emission0;
  const double ln_b0 = ln_wishart_norm(prior_gw.w, prior_gw.nu);
  const Eigen::MatrixXd w0_inv =
      detail::spd_llt(prior_gw.w, "elbo: prior scale")
          .solve(Eigen::MatrixXd::Identity(d, d));
  for (int state = 0; state < j; ++state) {
    const auto& gw = post.emissions[state];
    const Eigen::VectorXd dev = gw.m - prior_gw.m;
    bd.e_ln_p_mu_lambda +=
        0.5 * (d * std::log(prior_gw.beta / (2.0 * M_PI)) + eld[state] -
               d * prior_gw.beta / gw.beta -
               prior_gw.beta * gw.nu * dev.dot(gw.w * dev)) +
        ln_b0 + 0.5 * (prior_gw.nu - d - 1) * eld[state] -
        0.5 * gw.nu * (w0_inv * gw.w).trace();
    bd.e_ln_q_mu_lambda += 0.5 * eld[state] + 0.5 * d * std::log(gw.beta / (2.0 * M_PI)) -
                           0.5 * d - wishart_entropy(gw.w, gw.nu, eld[state]);
  }

  bd.e_ln_q_z = bd.e_ln_p_x + bd.e_ln_p_z - log_z_tilde;
  bd.total = log_z_tilde + bd.e_ln_p_pi - bd.e_ln_q_pi + bd.e_ln_p_mu_lambda -
             bd.e_ln_q_mu_lambda;
  return bd;
}

double dirichlet_kl(const DirichletRow& q, const DirichletRow& p) {
  if (q.size() != p.size()) throw std::invalid_argument("dirichlet_kl: length mismatch");
  const Eigen::VectorXd u = expected_log_pi(q);
  return ln_dirichlet_norm(q.alpha) - ln_dirichlet_norm(p.alpha) +
         ((q.alpha - p.alpha).array() * u.array()).sum();
}

double gauss_wishart_kl(const GaussWishart& q, const GaussWishart& p) {
  if (q.dim() != p.dim()) throw std::invalid_argument("gauss_wishart_kl: dimension mismatch");
  const int d = q.dim();
  const double eld = expected_log_det_lambda(q);

  // Wishart part.
  const Eigen::MatrixXd p_w_inv =
      detail::spd_llt(p.w, "gauss_wishart_kl").solve(Eigen::MatrixXd::Identity(d, d));
  double kl = ln_wishart_norm(q.w, q.nu) - ln_wishart_norm(p.w, p.nu) +
              0.5 * (q.nu - p.nu) * eld + 0.5 * q.nu * ((p_w_inv * q.w).trace() - d);

  // Conditional Gaussian part, averaged over q(Lambda).
  const Eigen::VectorXd dev = q.m - p.m;
  kl += 0.5 * (d * std::log(q.beta / p.beta) + d * p.beta / q.beta - d +
               p.beta * q.nu * dev.dot(q.w * dev));
  return kl;
}

}  // namespace vbhmm
