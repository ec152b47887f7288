#include "vbhmm/posteriors.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

#include "vbhmm/special_functions.hpp"

namespace vbhmm {

namespace {

constexpr double kLn2 = 0.69314718055994530941723212145818;

Eigen::MatrixXd spd_inverse(const Eigen::MatrixXd& a, const char* what) {
  const auto llt = detail::spd_llt(a, what);
  Eigen::MatrixXd inv = llt.solve(Eigen::MatrixXd::Identity(a.rows(), a.cols()));
  return 0.5 * (inv + inv.transpose());
}

}  // namespace

DirichletRow::DirichletRow(Eigen::VectorXd a) : alpha(std::move(a)) {
  if (alpha.size() == 0) throw std::domain_error("DirichletRow: empty pseudo-count vector");
  for (Eigen::Index k = 0; k < alpha.size(); ++k) {
    if (!std::isfinite(alpha[k]) || alpha[k] <= 0.0) {
      throw std::domain_error("DirichletRow: pseudo-counts must be positive and finite");
    }
  }
}

GaussWishart::GaussWishart(Eigen::VectorXd m_in, double beta_in, Eigen::MatrixXd w_in,
                           double nu_in)
    : m(std::move(m_in)), beta(beta_in), w(std::move(w_in)), nu(nu_in) {
  if (m.size() == 0 || !m.allFinite()) {
    throw std::domain_error("GaussWishart: invalid mean location");
  }
  if (!std::isfinite(beta) || beta <= 0.0) {
    throw std::domain_error("GaussWishart: beta must be positive");
  }
  if (w.rows() != m.size() || w.cols() != m.size()) {
    throw std::domain_error("GaussWishart: scale matrix shape mismatch");
  }
  if (!std::isfinite(nu) || nu <= static_cast<double>(dim()) - 1.0) {
    throw std::domain_error("GaussWishart: nu must exceed D - 1");
  }
  detail::spd_llt(w, "GaussWishart");
}

void HmmPriors::validate() const {
  const int j = states();
  if (j == 0) throw std::domain_error("HmmPriors: no transition rows");
  if (initial_alpha0.size() != j) {
    throw std::domain_error("HmmPriors: initial row length != state count");
  }
  for (const auto& row : transition_alpha0) {
    if (row.size() != j) throw std::domain_error("HmmPriors: ragged transition prior");
  }
}

int HmmPosterior::dim() const {
  if (emissions.empty()) throw std::domain_error("HmmPosterior: no emission components");
  return emissions.front().dim();
}

void HmmPosterior::validate() const {
  const int j = states();
  if (j == 0) throw std::domain_error("HmmPosterior: no states");
  if (initial.size() != j || static_cast<int>(transitions.size()) != j) {
    throw std::domain_error("HmmPosterior: row count mismatch");
  }
  for (const auto& row : transitions) {
    if (row.size() != j) throw std::domain_error("HmmPosterior: ragged transition row");
  }
  const int d = dim();
  for (const auto& gw : emissions) {
    if (gw.dim() != d) throw std::domain_error("HmmPosterior: emission dimension mismatch");
  }
}

Eigen::VectorXd expected_log_pi(const DirichletRow& row) {
  const double psi_sum = digamma(row.alpha.sum());
  Eigen::VectorXd out(row.size());
  for (int k = 0; k < row.size(); ++k) {
    out[k] = digamma(row.alpha[k]) - psi_sum;
  }
  return out;
}

double expected_log_det_lambda(const GaussWishart& gw) {
  const int d = gw.dim();
  double value = d * kLn2 + detail::ln_det(detail::spd_llt(gw.w, "expected_log_det_lambda"));
  for (int i = 1; i <= d; ++i) {
    value += digamma(0.5 * (gw.nu + 1 - i));
  }
  return value;
}

double expected_quadratic(const Eigen::VectorXd& x, const GaussWishart& gw) {
  if (x.size() != gw.m.size()) {
    throw std::invalid_argument("expected_quadratic: dimension mismatch");
  }
  const Eigen::VectorXd diff = x - gw.m;
  return gw.dim() / gw.beta + gw.nu * diff.dot(gw.w * diff);
}

double log_b(const Eigen::VectorXd& x, const GaussWishart& gw) {
  constexpr double kLn2Pi = 1.8378770664093454835606594728112;
  return 0.5 * expected_log_det_lambda(gw) - 0.5 * gw.dim() * kLn2Pi -
         0.5 * expected_quadratic(x, gw);
}

GaussWishart from_stats(const GaussWishart& prior, double n, const Eigen::VectorXd& xbar,
                        const Eigen::MatrixXd& s, int* jitter_events) {
  if (!std::isfinite(n) || n < 0.0) {
    throw std::invalid_argument("from_stats: occupancy must be nonnegative");
  }
  if (n < kEmptyStateThreshold) return prior;
  const int d = prior.dim();
  if (xbar.size() != d || s.rows() != d || s.cols() != d) {
    throw std::invalid_argument("from_stats: statistic shape mismatch");
  }

  const double beta = prior.beta + n;
  const double nu = prior.nu + n;
  const Eigen::VectorXd m = (prior.beta * prior.m + n * xbar) / beta;

  const Eigen::VectorXd dev = xbar - prior.m;
  Eigen::MatrixXd w_inv = spd_inverse(prior.w, "from_stats: prior scale");
  w_inv += n * 0.5 * (s + s.transpose());
  w_inv += (prior.beta * n / (prior.beta + n)) * (dev * dev.transpose());

  // The assembly is PSD up to roundoff; escalate jitter only if the
  // factorization rejects it.
  Eigen::LLT<Eigen::MatrixXd> llt(w_inv);
  if (llt.info() != Eigen::Success) {
    double jitter = 1e-12 * w_inv.trace();
    if (jitter <= 0.0) jitter = 1e-300;
    for (int attempt = 0; attempt <= 3; ++attempt) {
      if (jitter_events != nullptr) ++*jitter_events;
      llt.compute(w_inv + jitter * Eigen::MatrixXd::Identity(d, d));
      if (llt.info() == Eigen::Success) break;
      jitter *= 2.0;
    }
    if (llt.info() != Eigen::Success) {
      throw NumericError("from_stats: assembled scale is not positive definite");
    }
  }
  Eigen::MatrixXd w = llt.solve(Eigen::MatrixXd::Identity(d, d));
  w = 0.5 * (w + w.transpose());
  return GaussWishart(m, beta, std::move(w), nu);
}

}  // namespace vbhmm
