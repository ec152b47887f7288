#pragma once

#include <Eigen/Dense>

namespace vbhmm {

// psi(x) = d/dx ln Gamma(x) for x > 0. Absolute error <= 1e-12 on
// [1e-3, 1e6]; in practice the result is the correctly rounded double.
// Throws std::domain_error for non-positive or non-finite x.
double digamma(double x);

// ln Gamma(x) for x > 0, same accuracy contract as digamma.
double ln_gamma(double x);

// ln C(alpha) = ln Gamma(sum_k alpha_k) - sum_k ln Gamma(alpha_k), the log
// normalizer of a Dirichlet. All entries must be positive.
double ln_dirichlet_norm(const Eigen::VectorXd& alpha);

// Differential entropy of Dir(alpha):
//   H = -sum_k (alpha_k - 1) {psi(alpha_k) - psi(alpha_hat)} - ln C(alpha).
double dirichlet_entropy(const Eigen::VectorXd& alpha);

// ln B(W, nu), the log normalizer of the Wishart density
//   W(Lambda | W, nu) = B(W, nu) |Lambda|^{(nu-D-1)/2} exp{-tr(W^-1 Lambda)/2}.
// Requires W symmetric positive definite and nu > D - 1.
double ln_wishart_norm(const Eigen::MatrixXd& w, double nu);

// Differential entropy of W(Lambda | W, nu):
//   H = -ln B(W, nu) - ((nu - D - 1)/2) E[ln|Lambda|] + nu D / 2.
// expected_ln_det must be E[ln|Lambda|] for the same (W, nu).
double wishart_entropy(const Eigen::MatrixXd& w, double nu, double expected_ln_det);

namespace detail {
// Cholesky factor of a symmetric positive definite matrix, or throws
// std::domain_error with `what` in the message. Symmetry tolerance:
// max|W - W^T| <= 1e-10 * max|W|.
Eigen::LLT<Eigen::MatrixXd> spd_llt(const Eigen::MatrixXd& w, const char* what);

// ln|A| from a Cholesky factor.
double ln_det(const Eigen::LLT<Eigen::MatrixXd>& llt);
}  // namespace detail

}  // namespace vbhmm
