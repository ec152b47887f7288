#include "oracles/samplers.hpp"

#include <cmath>

#include "oracles/reference_functions.hpp"

namespace oracle {

namespace {

constexpr double kLn2Pi = 1.8378770664093454835606594728112;

}  // namespace

double gamma_draw(vbhmm::rng::Stream& stream, double shape) {
  // Marsaglia-Tsang squeeze; boost for shape < 1.
  if (shape < 1.0) {
    const double u = stream.next_open_double();
    return gamma_draw(stream, shape + 1.0) * std::pow(u, 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  while (true) {
    double x = stream.next_normal();
    double v = 1.0 + c * x;
    if (v <= 0.0) continue;
    v = v * v * v;
    const double u = stream.next_open_double();
    if (std::log(u) < 0.5 * x * x + d - d * v + d * std::log(v)) return d * v;
  }
}

Eigen::VectorXd dirichlet_draw(vbhmm::rng::Stream& stream, const Eigen::VectorXd& alpha) {
  Eigen::VectorXd out(alpha.size());
  for (Eigen::Index k = 0; k < alpha.size(); ++k) out[k] = gamma_draw(stream, alpha[k]);
  return out / out.sum();
}

Eigen::MatrixXd wishart_draw(vbhmm::rng::Stream& stream, const Eigen::MatrixXd& w, double nu) {
  const int d = static_cast<int>(w.rows());
  const Eigen::MatrixXd l = Eigen::LLT<Eigen::MatrixXd>(w).matrixL();
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(d, d);
  for (int i = 0; i < d; ++i) {
    a(i, i) = std::sqrt(2.0 * gamma_draw(stream, 0.5 * (nu - i)));
    for (int k = 0; k < i; ++k) a(i, k) = stream.next_normal();
  }
  const Eigen::MatrixXd la = l * a;
  return la * la.transpose();
}

NwDraw gauss_wishart_draw(vbhmm::rng::Stream& stream, const Eigen::VectorXd& m, double beta,
                          const Eigen::MatrixXd& w, double nu) {
  NwDraw draw;
  draw.lambda = wishart_draw(stream, w, nu);
  const int d = static_cast<int>(m.size());
  // mu | Lambda ~ N(m, (beta Lambda)^-1): solve L^T y = z with Lambda = L L^T.
  const Eigen::LLT<Eigen::MatrixXd> llt(draw.lambda);
  Eigen::VectorXd z(d);
  for (int k = 0; k < d; ++k) z[k] = stream.next_normal();
  draw.mu = m + llt.matrixU().solve(z) / std::sqrt(beta);
  return draw;
}

double log_dirichlet_pdf(const Eigen::VectorXd& x, const Eigen::VectorXd& alpha) {
  double value = std::lgamma(alpha.sum());
  for (Eigen::Index k = 0; k < alpha.size(); ++k) {
    value -= std::lgamma(alpha[k]);
    value += (alpha[k] - 1.0) * std::log(x[k]);
  }
  return value;
}

double log_gauss_wishart_pdf(const NwDraw& draw, const Eigen::VectorXd& m, double beta,
                             const Eigen::MatrixXd& w, double nu) {
  const int d = static_cast<int>(m.size());
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(draw.lambda);
  const double ln_det_lambda = es.eigenvalues().array().log().sum();
  const Eigen::VectorXd dev = draw.mu - m;
  double value = -0.5 * d * kLn2Pi + 0.5 * d * std::log(beta) + 0.5 * ln_det_lambda -
                 0.5 * beta * dev.dot(draw.lambda * dev);
  value += ref_ln_wishart_norm(w, nu) + 0.5 * (nu - d - 1) * ln_det_lambda -
           0.5 * (w.inverse() * draw.lambda).trace();
  return value;
}

}  // namespace oracle
