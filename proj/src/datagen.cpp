#include "vbhmm/datagen.hpp"

#include <cmath>
#include <stdexcept>

#include "vbhmm/rng.hpp"

namespace vbhmm {

void GroundTruthHmm::validate() const {
  const int j = states();
  if (j == 0) throw std::invalid_argument("GroundTruthHmm: no states");
  if (std::abs(pi.sum() - 1.0) > 1e-10 || pi.minCoeff() < 0.0) {
    throw std::invalid_argument("GroundTruthHmm: pi is not a probability vector");
  }
  if (a.rows() != j || a.cols() != j || a.minCoeff() < 0.0) {
    throw std::invalid_argument("GroundTruthHmm: invalid transition matrix");
  }
  for (int row = 0; row < j; ++row) {
    if (std::abs(a.row(row).sum() - 1.0) > 1e-10) {
      throw std::invalid_argument("GroundTruthHmm: transition rows must sum to 1");
    }
  }
  if (static_cast<int>(means.size()) != j || static_cast<int>(covariances.size()) != j) {
    throw std::invalid_argument("GroundTruthHmm: per-state parameter count mismatch");
  }
  const int d = dim();
  for (int state = 0; state < j; ++state) {
    if (means[state].size() != d || covariances[state].rows() != d ||
        covariances[state].cols() != d) {
      throw std::invalid_argument("GroundTruthHmm: parameter shape mismatch");
    }
    if (Eigen::LLT<Eigen::MatrixXd>(covariances[state]).info() != Eigen::Success) {
      throw std::invalid_argument("GroundTruthHmm: covariance not positive definite");
    }
  }
}

SampleResult sample(const GroundTruthHmm& model, int length, std::uint64_t seed) {
  model.validate();
  if (length < 1) throw std::invalid_argument("sample: length must be >= 1");
  const int d = model.dim();

  std::vector<Eigen::MatrixXd> chol;
  chol.reserve(model.states());
  for (const auto& cov : model.covariances) {
    chol.push_back(Eigen::LLT<Eigen::MatrixXd>(cov).matrixL());
  }

  SampleResult result;
  result.observations.resize(length, d);
  result.states.resize(length);
  int state = 0;
  for (int t = 0; t < length; ++t) {
    rng::Stream step(rng::derive(seed, static_cast<std::uint64_t>(t)));
    state = t == 0 ? step.next_categorical(model.pi)
                   : step.next_categorical(model.a.row(state));
    result.states[t] = state;
    Eigen::VectorXd z(d);
    for (int k = 0; k < d; ++k) z[k] = step.next_normal();
    result.observations.row(t) = (model.means[state] + chol[state] * z).transpose();
  }
  return result;
}

}  // namespace vbhmm
