#include "vbhmm/forward_backward.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace vbhmm {

namespace {

constexpr double kLn2Pi = 1.8378770664093454835606594728112;

}  // namespace

std::pair<Eigen::VectorXd, Eigen::MatrixXd> tilde_params(const HmmPosterior& post) {
  post.validate();
  const int j = post.states();
  Eigen::MatrixXd log_a(j, j);
  for (int row = 0; row < j; ++row) {
    log_a.row(row) = expected_log_pi(post.transitions[row]).transpose();
  }
  return {expected_log_pi(post.initial), std::move(log_a)};
}

EStepResult forward_backward(const Eigen::VectorXd& log_pi, const Eigen::MatrixXd& log_a,
                             const Eigen::MatrixXd& log_b) {
  const int n = static_cast<int>(log_b.rows());
  const int j = static_cast<int>(log_b.cols());
  if (n == 0) throw std::invalid_argument("forward_backward: empty sequence");
  if (log_pi.size() != j || log_a.rows() != j || log_a.cols() != j) {
    throw std::invalid_argument("forward_backward: parameter shape mismatch");
  }

  const Eigen::VectorXd pi = log_pi.array().exp();
  const Eigen::MatrixXd a = log_a.array().exp();

  // Each row of log_b is shifted by its maximum before exponentiation; the
  // shifts are restored in log_c, so gamma/xi are unaffected and no finite
  // log_b can underflow an entire step.
  Eigen::VectorXd shift(n);
  Eigen::MatrixXd b(n, j);
  for (int t = 0; t < n; ++t) {
    shift[t] = log_b.row(t).maxCoeff();
    if (!std::isfinite(shift[t])) {
      throw std::invalid_argument("forward_backward: non-finite log_b row");
    }
    b.row(t) = (log_b.row(t).array() - shift[t]).exp();
  }

  EStepResult result;
  result.log_c.resize(n);
  Eigen::MatrixXd alpha_hat(n, j);
  Eigen::VectorXd c_shifted(n);

  auto normalize_step = [&](int t, Eigen::RowVectorXd& f) {
    double c = f.sum();
    if (!(c > 0.0) || !std::isfinite(c)) {
      // Unreachable for finite log_b; kept as a guarded fallback.
      f.setConstant(1.0 / j);
      c = std::numeric_limits<double>::min();
      ++result.degenerate_steps;
    } else {
      f /= c;
    }
    alpha_hat.row(t) = f;
    c_shifted[t] = c;
    result.log_c[t] = std::log(c) + shift[t];
  };

  Eigen::RowVectorXd f = pi.transpose().cwiseProduct(b.row(0));
  normalize_step(0, f);
  for (int t = 1; t < n; ++t) {
    f = (alpha_hat.row(t - 1) * a).cwiseProduct(b.row(t));
    normalize_step(t, f);
  }

  Eigen::MatrixXd beta_hat(n, j);
  beta_hat.row(n - 1).setOnes();
  for (int t = n - 2; t >= 0; --t) {
    const Eigen::RowVectorXd weighted = b.row(t + 1).cwiseProduct(beta_hat.row(t + 1));
    beta_hat.row(t) = (a * weighted.transpose()).transpose() / c_shifted[t + 1];
  }

  result.gamma = alpha_hat.cwiseProduct(beta_hat);
  result.xi.reserve(n > 0 ? n - 1 : 0);
  for (int t = 0; t + 1 < n; ++t) {
    const Eigen::RowVectorXd weighted = b.row(t + 1).cwiseProduct(beta_hat.row(t + 1));
    Eigen::MatrixXd slice =
        (alpha_hat.row(t).transpose() * weighted).cwiseProduct(a);
    slice /= slice.sum();
    result.xi.push_back(std::move(slice));
  }
  result.log_z_tilde = result.log_c.sum();
  return result;
}

Eigen::MatrixXd log_b_matrix(const HmmPosterior& post, const ObservationSequence& seq) {
  const int n = static_cast<int>(seq.rows());
  const int j = post.states();
  const int d = post.dim();
  Eigen::MatrixXd out(n, j);
  for (int state = 0; state < j; ++state) {
    const GaussWishart& gw = post.emissions[state];
    const double base = 0.5 * expected_log_det_lambda(gw) - 0.5 * d * kLn2Pi -
                        0.5 * d / gw.beta;
    for (int t = 0; t < n; ++t) {
      const Eigen::VectorXd diff = seq.row(t).transpose() - gw.m;
      out(t, state) = base - 0.5 * gw.nu * diff.dot(gw.w * diff);
    }
  }
  return out;
}

EStepResult e_step(const HmmPosterior& post, const ObservationSequence& seq) {
  post.validate();
  if (seq.rows() == 0) throw std::invalid_argument("e_step: empty sequence");
  if (seq.cols() != post.dim()) throw std::invalid_argument("e_step: dimension mismatch");
  if (!seq.allFinite()) throw std::invalid_argument("e_step: non-finite observation");
  const auto [log_pi, log_a] = tilde_params(post);
  return forward_backward(log_pi, log_a, log_b_matrix(post, seq));
}

Eigen::VectorXd initial_pi_hat(const EStepResult& result) {
  if (result.gamma.rows() == 0) throw std::invalid_argument("initial_pi_hat: empty result");
  Eigen::VectorXd first = result.gamma.row(0).transpose();
  return first / first.sum();
}

}  // namespace vbhmm
