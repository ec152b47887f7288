#include "vbhmm/special_functions.hpp"

#include <array>
#include <cmath>
#include <stdexcept>

#include <quadmath.h>

namespace vbhmm {

namespace {

// Bernoulli numbers B_2..B_40 as exact rationals. Numerators up to ~2.6e20
// exceed 64 bits, so they are parsed into binary128 (exact below 2^113).
struct BernoulliRational {
  const char* numerator;
  double denominator;
};

constexpr std::array<BernoulliRational, 20> kBernoulli = {{
    {"1", 6.0},
    {"-1", 30.0},
    {"1", 42.0},
    {"-1", 30.0},
    {"5", 66.0},
    {"-691", 2730.0},
    {"7", 6.0},
    {"-3617", 510.0},
    {"43867", 798.0},
    {"-174611", 330.0},
    {"854513", 138.0},
    {"-236364091", 2730.0},
    {"8553103", 6.0},
    {"-23749461029", 870.0},
    {"8615841276005", 14322.0},
    {"-7709321041217", 510.0},
    {"2577687858367", 6.0},
    {"-26315271553053477373", 1919190.0},
    {"2929993913841559", 6.0},
    {"-261082718496449122051", 13530.0},
}};

// Recurrence is applied upward to this point before the asymptotic series;
// at x >= 40 the truncated series is accurate far beyond binary128 epsilon,
// so the final double is correctly rounded.
constexpr double kAsymptoticThreshold = 40.0;

struct SeriesCoefficients {
  // digamma tail:  sum_k B_2k / (2k) / x^2k
  std::array<__float128, 20> psi;
  // ln-gamma tail: sum_k B_2k / (2k (2k-1)) / x^(2k-1)
  std::array<__float128, 20> lgam;
  __float128 half_ln_two_pi;
};

SeriesCoefficients build_coefficients() {
  SeriesCoefficients c{};
  for (std::size_t k = 0; k < kBernoulli.size(); ++k) {
    const __float128 b =
        strtoflt128(kBernoulli[k].numerator, nullptr) / (__float128)kBernoulli[k].denominator;
    const __float128 two_k = (__float128)(2.0 * (double)(k + 1));
    c.psi[k] = b / two_k;
    c.lgam[k] = b / (two_k * (two_k - 1));
  }
  c.half_ln_two_pi = logq(2 * M_PIq) / 2;
  return c;
}

const SeriesCoefficients& coefficients() {
  static const SeriesCoefficients c = build_coefficients();
  return c;
}

void require_positive(double x, const char* name) {
  if (!std::isfinite(x) || x <= 0.0) {
    throw std::domain_error(std::string(name) + ": argument must be positive and finite");
  }
}

__float128 digamma_asymptotic(__float128 y) {
  const auto& c = coefficients();
  const __float128 z = 1 / (y * y);
  __float128 s = 0;
  for (int k = static_cast<int>(c.psi.size()) - 1; k >= 0; --k) {
    s = (s + c.psi[k]) * z;
  }
  return logq(y) - 1 / (2 * y) - s;
}

__float128 ln_gamma_asymptotic(__float128 y) {
  const auto& c = coefficients();
  const __float128 z = 1 / (y * y);
  __float128 s = 0;
  for (int k = static_cast<int>(c.lgam.size()) - 1; k >= 0; --k) {
    s = s * z + c.lgam[k];
  }
  return (y - 0.5Q) * logq(y) - y + c.half_ln_two_pi + s / y;
}

}  // namespace

double digamma(double x) {
  require_positive(x, "digamma");
  __float128 y = x;
  __float128 shift = 0;
  while (y < kAsymptoticThreshold) {
    shift -= 1 / y;
    y += 1;
  }
  return static_cast<double>(shift + digamma_asymptotic(y));
}

double ln_gamma(double x) {
  require_positive(x, "ln_gamma");
  if (x == 1.0 || x == 2.0) return 0.0;  // exact zeros of ln Gamma
  __float128 y = x;
  __float128 shift = 0;
  while (y < kAsymptoticThreshold) {
    shift -= logq(y);
    y += 1;
  }
  return static_cast<double>(shift + ln_gamma_asymptotic(y));
}

double ln_dirichlet_norm(const Eigen::VectorXd& alpha) {
  if (alpha.size() == 0) throw std::domain_error("ln_dirichlet_norm: empty alpha");
  double sum = 0.0;
  double acc = 0.0;
  for (Eigen::Index k = 0; k < alpha.size(); ++k) {
    require_positive(alpha[k], "ln_dirichlet_norm");
    sum += alpha[k];
    acc -= ln_gamma(alpha[k]);
  }
  return acc + ln_gamma(sum);
}

double dirichlet_entropy(const Eigen::VectorXd& alpha) {
  if (alpha.size() == 0) throw std::domain_error("dirichlet_entropy: empty alpha");
  double sum = 0.0;
  for (Eigen::Index k = 0; k < alpha.size(); ++k) {
    require_positive(alpha[k], "dirichlet_entropy");
    sum += alpha[k];
  }
  const double psi_sum = digamma(sum);
  double h = -ln_dirichlet_norm(alpha);
  for (Eigen::Index k = 0; k < alpha.size(); ++k) {
    h -= (alpha[k] - 1.0) * (digamma(alpha[k]) - psi_sum);
  }
  return h;
}

namespace detail {

Eigen::LLT<Eigen::MatrixXd> spd_llt(const Eigen::MatrixXd& w, const char* what) {
  if (w.rows() == 0 || w.rows() != w.cols()) {
    throw std::domain_error(std::string(what) + ": matrix must be square and nonempty");
  }
  if (!w.allFinite()) {
    throw std::domain_error(std::string(what) + ": matrix has non-finite entries");
  }
  const double scale = w.cwiseAbs().maxCoeff();
  const double asym = (w - w.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-10 * scale) {
    throw std::domain_error(std::string(what) + ": matrix is not symmetric");
  }
  Eigen::LLT<Eigen::MatrixXd> llt(w);
  if (llt.info() != Eigen::Success) {
    throw std::domain_error(std::string(what) + ": matrix is not positive definite");
  }
  return llt;
}

double ln_det(const Eigen::LLT<Eigen::MatrixXd>& llt) {
  return 2.0 * llt.matrixLLT().diagonal().array().log().sum();
}

}  // namespace detail

double ln_wishart_norm(const Eigen::MatrixXd& w, double nu) {
  const auto llt = detail::spd_llt(w, "ln_wishart_norm");
  const int d = static_cast<int>(w.rows());
  if (!std::isfinite(nu) || nu <= d - 1) {
    throw std::domain_error("ln_wishart_norm: nu must exceed D - 1");
  }
  constexpr double kLn2 = 0.69314718055994530941723212145818;
  constexpr double kLnPi = 1.1447298858494001741434273513531;
  double value = -0.5 * nu * detail::ln_det(llt);
  value -= 0.5 * nu * d * kLn2;
  value -= 0.25 * d * (d - 1) * kLnPi;
  for (int i = 1; i <= d; ++i) {
    value -= ln_gamma(0.5 * (nu + 1 - i));
  }
  return value;
}

double wishart_entropy(const Eigen::MatrixXd& w, double nu, double expected_ln_det) {
  const int d = static_cast<int>(w.rows());
  const double ln_b = ln_wishart_norm(w, nu);
  return -ln_b - 0.5 * (nu - d - 1) * expected_ln_det + 0.5 * nu * d;
}

}  // namespace vbhmm
