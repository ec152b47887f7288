#include "oracles/conjugate.hpp"

#include <cmath>
#include <stdexcept>

#include "oracles/reference_functions.hpp"

namespace oracle {

namespace {

constexpr double kLn2Pi = 1.8378770664093454835606594728112;

Eigen::MatrixXd inverse(const Eigen::MatrixXd& a) {
  return a.inverse().eval();
}

}  // namespace

NwParams nw_posterior_from_data(const NwParams& prior, const Eigen::MatrixXd& data) {
  const int n = static_cast<int>(data.rows());
  const int d = static_cast<int>(data.cols());
  if (n == 0) return prior;
  const Eigen::VectorXd xbar = data.colwise().mean().transpose();
  Eigen::MatrixXd scatter = Eigen::MatrixXd::Zero(d, d);
  for (int r = 0; r < n; ++r) {
    const Eigen::VectorXd c = data.row(r).transpose() - xbar;
    scatter += c * c.transpose();
  }
  NwParams post;
  post.beta = prior.beta + n;
  post.nu = prior.nu + n;
  post.m = (prior.beta * prior.m + n * xbar) / post.beta;
  const Eigen::VectorXd dev = xbar - prior.m;
  const Eigen::MatrixXd w_inv = inverse(prior.w) + scatter +
                                (prior.beta * n / (prior.beta + n)) * dev * dev.transpose();
  post.w = inverse(w_inv);
  return post;
}

double nw_log_marginal(const NwParams& prior, const Eigen::MatrixXd& data) {
  const int n = static_cast<int>(data.rows());
  const int d = static_cast<int>(data.cols());
  if (n == 0) return 0.0;
  const NwParams post = nw_posterior_from_data(prior, data);
  return -0.5 * n * d * kLn2Pi + 0.5 * d * std::log(prior.beta / post.beta) +
         ref_ln_wishart_norm(prior.w, prior.nu) - ref_ln_wishart_norm(post.w, post.nu);
}

double small_hmm_log_evidence(const Eigen::VectorXd& initial_alpha,
                              const std::vector<Eigen::VectorXd>& transition_alpha,
                              const NwParams& emission_prior, const Eigen::MatrixXd& seq) {
  const int n = static_cast<int>(seq.rows());
  const int j = static_cast<int>(initial_alpha.size());
  double paths = 1.0;
  for (int t = 0; t < n; ++t) paths *= j;
  if (paths > 2e7) throw std::invalid_argument("small_hmm_log_evidence: too many paths");
  const long total = static_cast<long>(paths);

  auto ln_dirichlet_c = [](const Eigen::VectorXd& alpha) {
    double value = std::lgamma(alpha.sum());
    for (Eigen::Index k = 0; k < alpha.size(); ++k) value -= std::lgamma(alpha[k]);
    return value;
  };

  std::vector<int> path(n);
  double max_log = -std::numeric_limits<double>::infinity();
  std::vector<double> log_terms(total);
  for (long index = 0; index < total; ++index) {
    long rest = index;
    for (int t = 0; t < n; ++t) {
      path[t] = static_cast<int>(rest % j);
      rest /= j;
    }
    // Dirichlet-multinomial probability of the path.
    double lp = std::log(initial_alpha[path[0]] / initial_alpha.sum());
    Eigen::MatrixXd counts = Eigen::MatrixXd::Zero(j, j);
    for (int t = 1; t < n; ++t) counts(path[t - 1], path[t]) += 1.0;
    for (int row = 0; row < j; ++row) {
      const Eigen::VectorXd posterior_alpha =
          transition_alpha[row] + counts.row(row).transpose();
      lp += ln_dirichlet_c(transition_alpha[row]) - ln_dirichlet_c(posterior_alpha);
    }
    // Gaussian-Wishart marginal of each state's subset.
    for (int state = 0; state < j; ++state) {
      int rows = 0;
      for (int t = 0; t < n; ++t) rows += path[t] == state ? 1 : 0;
      if (rows == 0) continue;
      Eigen::MatrixXd subset(rows, seq.cols());
      int at = 0;
      for (int t = 0; t < n; ++t) {
        if (path[t] == state) subset.row(at++) = seq.row(t);
      }
      lp += nw_log_marginal(emission_prior, subset);
    }
    log_terms[index] = lp;
    max_log = std::max(max_log, lp);
  }
  double sum = 0.0;
  for (const double lp : log_terms) sum += std::exp(lp - max_log);
  return std::log(sum) + max_log;
}

}  // namespace oracle
