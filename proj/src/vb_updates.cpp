#include "vbhmm/vb_updates.hpp"

#include <cmath>
#include <stdexcept>

namespace vbhmm {

SufficientStats sufficient_stats(const EStepResult& result, const ObservationSequence& seq) {
  return sufficient_stats(std::span<const EStepResult>(&result, 1),
                          std::span<const ObservationSequence>(&seq, 1));
}

SufficientStats sufficient_stats(std::span<const EStepResult> results,
                                 std::span<const ObservationSequence> seqs) {
  if (results.empty() || results.size() != seqs.size()) {
    throw std::invalid_argument("sufficient_stats: result/sequence count mismatch");
  }
  const int j = static_cast<int>(results[0].gamma.cols());
  const int d = static_cast<int>(seqs[0].cols());

  SufficientStats stats;
  stats.n_j = Eigen::VectorXd::Zero(j);
  stats.xi_sums = Eigen::MatrixXd::Zero(j, j);
  stats.gamma1 = Eigen::VectorXd::Zero(j);
  stats.xbar.assign(j, Eigen::VectorXd::Zero(d));
  stats.s.assign(j, Eigen::MatrixXd::Zero(d, d));
  stats.empty.assign(j, false);

  Eigen::MatrixXd weighted_sum = Eigen::MatrixXd::Zero(j, d);
  for (std::size_t i = 0; i < results.size(); ++i) {
    const auto& r = results[i];
    const auto& x = seqs[i];
    if (r.gamma.rows() != x.rows() || r.gamma.cols() != j || x.cols() != d) {
      throw std::invalid_argument("sufficient_stats: shape mismatch");
    }
    stats.n_j += r.gamma.colwise().sum().transpose();
    stats.gamma1 += r.gamma.row(0).transpose();
    weighted_sum += r.gamma.transpose() * x;
    for (const auto& slice : r.xi) stats.xi_sums += slice;
    stats.total_observations += static_cast<double>(x.rows());
  }

  for (int state = 0; state < j; ++state) {
    if (stats.n_j[state] < kEmptyStateThreshold) {
      stats.empty[state] = true;
      continue;
    }
    stats.xbar[state] = weighted_sum.row(state).transpose() / stats.n_j[state];
  }
  for (std::size_t i = 0; i < results.size(); ++i) {
    const auto& gamma = results[i].gamma;
    const auto& x = seqs[i];
    for (int state = 0; state < j; ++state) {
      if (stats.empty[state]) continue;
      const Eigen::MatrixXd centered = x.rowwise() - stats.xbar[state].transpose();
      stats.s[state].noalias() +=
          centered.transpose() * (centered.array().colwise() * gamma.col(state).array()).matrix();
    }
  }
  for (int state = 0; state < j; ++state) {
    if (!stats.empty[state]) stats.s[state] /= stats.n_j[state];
  }
  return stats;
}

std::vector<DirichletRow> update_transitions(const HmmPriors& priors,
                                             const SufficientStats& stats) {
  const int j = priors.states();
  if (stats.xi_sums.rows() != j || stats.xi_sums.cols() != j) {
    throw std::invalid_argument("update_transitions: shape mismatch");
  }
  std::vector<DirichletRow> rows;
  rows.reserve(j);
  for (int row = 0; row < j; ++row) {
    rows.emplace_back(priors.transition_alpha0[row].alpha +
                      stats.xi_sums.row(row).transpose());
  }
  return rows;
}

DirichletRow update_initial(const HmmPriors& priors, const SufficientStats& stats,
                            InitialUpdateMode mode) {
  const Eigen::VectorXd& counts =
      mode == InitialUpdateMode::kPaper ? stats.n_j : stats.gamma1;
  if (counts.size() != priors.initial_alpha0.size()) {
    throw std::invalid_argument("update_initial: shape mismatch");
  }
  return DirichletRow(priors.initial_alpha0.alpha + counts);
}

std::vector<GaussWishart> update_emissions(const HmmPriors& priors, const SufficientStats& stats,
                                           int* jitter_events) {
  const int j = priors.states();
  if (stats.n_j.size() != j) throw std::invalid_argument("update_emissions: shape mismatch");
  std::vector<GaussWishart> emissions;
  emissions.reserve(j);
  for (int state = 0; state < j; ++state) {
    const double n = stats.empty[state] ? 0.0 : stats.n_j[state];
    emissions.push_back(
        from_stats(priors.emission0, n, stats.xbar[state], stats.s[state], jitter_events));
  }
  return emissions;
}

HmmPriors default_priors(int states, int dim, const Eigen::VectorXd& data_mean,
                         double data_scale) {
  if (states < 1 || dim < 1) throw std::invalid_argument("default_priors: J and D must be >= 1");
  if (data_mean.size() != dim) throw std::invalid_argument("default_priors: mean size mismatch");
  if (!std::isfinite(data_scale) || data_scale <= 0.0) data_scale = 1.0;

  Eigen::VectorXd diag_row(states);
  std::vector<DirichletRow> transition_rows;
  transition_rows.reserve(states);
  for (int row = 0; row < states; ++row) {
    Eigen::VectorXd alpha = Eigen::VectorXd::Constant(states, 1.0 / (2.0 * states));
    alpha[row] = 0.5;
    transition_rows.emplace_back(std::move(alpha));
  }

  const Eigen::MatrixXd w0 =
      Eigen::MatrixXd::Identity(dim, dim) / (static_cast<double>(dim) * data_scale);
  return HmmPriors{DirichletRow(Eigen::VectorXd::Ones(states)), std::move(transition_rows),
                   GaussWishart(data_mean, 1.0, w0, static_cast<double>(dim))};
}

std::pair<Eigen::VectorXd, double> data_summary(std::span<const ObservationSequence> seqs) {
  if (seqs.empty()) throw std::invalid_argument("data_summary: no sequences");
  const int d = static_cast<int>(seqs[0].cols());
  double count = 0.0;
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(d);
  for (const auto& x : seqs) {
    if (x.cols() != d) throw std::invalid_argument("data_summary: dimension mismatch");
    mean += x.colwise().sum().transpose();
    count += static_cast<double>(x.rows());
  }
  if (count == 0.0) throw std::invalid_argument("data_summary: empty dataset");
  mean /= count;
  double variance = 0.0;
  for (const auto& x : seqs) {
    variance += (x.rowwise() - mean.transpose()).array().square().sum();
  }
  variance /= count * d;
  return {std::move(mean), variance};
}

}  // namespace vbhmm
