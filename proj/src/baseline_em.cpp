#include "vbhmm/baseline_em.hpp"

#include <cmath>
#include <stdexcept>

#include "vbhmm/forward_backward.hpp"
#include "vbhmm/rng.hpp"

namespace vbhmm {

namespace {

constexpr double kLn2Pi = 1.8378770664093454835606594728112;

void floor_covariance(Eigen::MatrixXd& cov, double cov_floor) {
  if (cov_floor <= 0.0) return;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov);
  Eigen::VectorXd values = es.eigenvalues().cwiseMax(cov_floor);
  cov = es.eigenvectors() * values.asDiagonal() * es.eigenvectors().transpose();
  cov = 0.5 * (cov + cov.transpose());
}

// ln N(x | mean, cov) columns for every state; returns false on a collapsed
// covariance instead of throwing, so the caller can flag divergence.
bool try_log_pdf_matrix(const MlHmm& model, const ObservationSequence& seq,
                        Eigen::MatrixXd& out) {
  const int n = static_cast<int>(seq.rows());
  const int j = model.states();
  const int d = model.dim();
  out.resize(n, j);
  for (int state = 0; state < j; ++state) {
    Eigen::LLT<Eigen::MatrixXd> llt(model.covariances[state]);
    if (llt.info() != Eigen::Success) return false;
    const double ln_det = 2.0 * llt.matrixLLT().diagonal().array().log().sum();
    if (!std::isfinite(ln_det)) return false;
    for (int t = 0; t < n; ++t) {
      const Eigen::VectorXd diff = seq.row(t).transpose() - model.means[state];
      const double maha = llt.matrixL().solve(diff).squaredNorm();
      out(t, state) = -0.5 * (d * kLn2Pi + ln_det + maha);
    }
  }
  return out.allFinite();
}

struct MlStats {
  Eigen::VectorXd pi_counts;
  Eigen::MatrixXd a_counts;
  Eigen::VectorXd n_j;
  Eigen::MatrixXd weighted_sum;  // J x D
};

MlHmm m_step(const std::vector<ObservationSequence>& data,
             const std::vector<Eigen::MatrixXd>& gammas,
             const std::vector<std::vector<Eigen::MatrixXd>>& xis, const MlHmm& previous,
             double cov_floor) {
  const int j = previous.states();
  const int d = previous.dim();
  MlStats st{Eigen::VectorXd::Zero(j), Eigen::MatrixXd::Zero(j, j), Eigen::VectorXd::Zero(j),
             Eigen::MatrixXd::Zero(j, d)};
  for (std::size_t i = 0; i < data.size(); ++i) {
    st.pi_counts += gammas[i].row(0).transpose();
    st.n_j += gammas[i].colwise().sum().transpose();
    st.weighted_sum += gammas[i].transpose() * data[i];
    for (const auto& slice : xis[i]) st.a_counts += slice;
  }

  MlHmm model = previous;
  model.pi = st.pi_counts / st.pi_counts.sum();
  for (int row = 0; row < j; ++row) {
    const double mass = st.a_counts.row(row).sum();
    if (mass > 0.0) model.a.row(row) = st.a_counts.row(row) / mass;
  }
  for (int state = 0; state < j; ++state) {
    if (st.n_j[state] <= 0.0) continue;  // keep previous parameters
    model.means[state] = st.weighted_sum.row(state).transpose() / st.n_j[state];
    Eigen::MatrixXd scatter = Eigen::MatrixXd::Zero(d, d);
    for (std::size_t i = 0; i < data.size(); ++i) {
      const Eigen::MatrixXd centered =
          data[i].rowwise() - model.means[state].transpose();
      scatter.noalias() += centered.transpose() *
                           (centered.array().colwise() * gammas[i].col(state).array()).matrix();
    }
    Eigen::MatrixXd cov = scatter / st.n_j[state];
    cov = 0.5 * (cov + cov.transpose());
    floor_covariance(cov, cov_floor);
    model.covariances[state] = std::move(cov);
  }
  return model;
}

}  // namespace

void MlHmm::validate() const {
  const int j = states();
  if (j == 0) throw std::invalid_argument("MlHmm: no states");
  if (std::abs(pi.sum() - 1.0) > 1e-10) throw std::invalid_argument("MlHmm: pi must sum to 1");
  if (a.rows() != j || a.cols() != j) throw std::invalid_argument("MlHmm: A shape mismatch");
  for (int row = 0; row < j; ++row) {
    if (std::abs(a.row(row).sum() - 1.0) > 1e-10) {
      throw std::invalid_argument("MlHmm: A rows must sum to 1");
    }
  }
  if (static_cast<int>(means.size()) != j || static_cast<int>(covariances.size()) != j) {
    throw std::invalid_argument("MlHmm: per-state parameter count mismatch");
  }
  const int d = dim();
  for (int state = 0; state < j; ++state) {
    if (means[state].size() != d || covariances[state].rows() != d ||
        covariances[state].cols() != d) {
      throw std::invalid_argument("MlHmm: per-state parameter shape mismatch");
    }
    Eigen::LLT<Eigen::MatrixXd> llt(covariances[state]);
    if (llt.info() != Eigen::Success) {
      throw std::invalid_argument("MlHmm: covariance not positive definite");
    }
  }
}

EmReport baum_welch_fit(const std::vector<ObservationSequence>& data, int states,
                        std::uint64_t seed, int max_iters, double tol, double cov_floor) {
  if (data.empty()) throw std::invalid_argument("baum_welch_fit: no sequences");
  if (states < 1 || max_iters < 1 || !(tol > 0.0) || cov_floor < 0.0) {
    throw std::invalid_argument("baum_welch_fit: invalid configuration");
  }
  const int d = static_cast<int>(data.front().cols());
  for (const auto& seq : data) {
    if (seq.rows() == 0 || seq.cols() != d || !seq.allFinite()) {
      throw std::invalid_argument("baum_welch_fit: invalid sequence");
    }
  }

  // Random-responsibility init, then one M-step for starting parameters.
  rng::Stream stream(seed);
  std::vector<Eigen::MatrixXd> gammas;
  std::vector<std::vector<Eigen::MatrixXd>> xis;
  for (const auto& seq : data) {
    Eigen::MatrixXd g(seq.rows(), states);
    for (Eigen::Index t = 0; t < seq.rows(); ++t) {
      double sum = 0.0;
      for (int k = 0; k < states; ++k) {
        g(t, k) = stream.next_exponential();
        sum += g(t, k);
      }
      g.row(t) /= sum;
    }
    std::vector<Eigen::MatrixXd> xi;
    for (Eigen::Index t = 0; t + 1 < seq.rows(); ++t) {
      xi.emplace_back(g.row(t).transpose() * g.row(t + 1));
    }
    gammas.push_back(std::move(g));
    xis.push_back(std::move(xi));
  }

  EmReport report;
  report.model = MlHmm{Eigen::VectorXd::Constant(states, 1.0 / states),
                       Eigen::MatrixXd::Constant(states, states, 1.0 / states),
                       std::vector<Eigen::VectorXd>(states, Eigen::VectorXd::Zero(d)),
                       std::vector<Eigen::MatrixXd>(states, Eigen::MatrixXd::Identity(d, d))};
  report.model = m_step(data, gammas, xis, report.model, cov_floor);

  for (int iter = 1; iter <= max_iters; ++iter) {
    double loglik = 0.0;
    bool ok = true;
    for (std::size_t i = 0; i < data.size(); ++i) {
      Eigen::MatrixXd log_pdf;
      if (!try_log_pdf_matrix(report.model, data[i], log_pdf)) {
        ok = false;
        break;
      }
      EStepResult r = forward_backward(report.model.pi.array().log(),
                                       report.model.a.array().log(), log_pdf);
      loglik += r.log_z_tilde;
      gammas[i] = std::move(r.gamma);
      xis[i] = std::move(r.xi);
    }
    if (!ok || !std::isfinite(loglik)) {
      report.diverged = true;
      break;
    }
    report.loglik_trace.push_back(loglik);
    report.iterations = iter;
    if (report.loglik_trace.size() >= 2) {
      const double prev = report.loglik_trace[report.loglik_trace.size() - 2];
      if (std::abs(loglik - prev) / (1.0 + std::abs(loglik)) < tol) {
        report.converged = true;
        break;
      }
    }
    report.model = m_step(data, gammas, xis, report.model, cov_floor);
  }
  return report;
}

Eigen::MatrixXd gaussian_log_pdf_matrix(const MlHmm& model, const ObservationSequence& seq) {
  model.validate();
  if (seq.cols() != model.dim()) {
    throw std::invalid_argument("gaussian_log_pdf_matrix: dimension mismatch");
  }
  Eigen::MatrixXd out;
  if (!try_log_pdf_matrix(model, seq, out)) {
    throw NumericError("gaussian_log_pdf_matrix: covariance not positive definite");
  }
  return out;
}

double log_likelihood(const MlHmm& model, const ObservationSequence& seq) {
  const Eigen::MatrixXd log_pdf = gaussian_log_pdf_matrix(model, seq);
  return forward_backward(model.pi.array().log(), model.a.array().log(), log_pdf).log_z_tilde;
}

}  // namespace vbhmm
