#include "oracles/reference_functions.hpp"

#include <cmath>

#include <mpfr.h>

namespace oracle {

namespace {

double with_mpfr(double x, int (*fn)(mpfr_t, const mpfr_t, mpfr_rnd_t)) {
  mpfr_t in, out;
  mpfr_init2(in, 256);
  mpfr_init2(out, 256);
  mpfr_set_d(in, x, MPFR_RNDN);
  fn(out, in, MPFR_RNDN);
  const double value = mpfr_get_d(out, MPFR_RNDN);
  mpfr_clear(in);
  mpfr_clear(out);
  return value;
}

double simpson(const std::function<double(double)>& f, double a, double b, double fa,
               double fm, double fb, double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  if (depth <= 0 || std::abs(left + right - whole) < 15.0 * tol) {
    return left + right + (left + right - whole) / 15.0;
  }
  return simpson(f, a, m, fa, flm, fm, left, tol * 0.5, depth - 1) +
         simpson(f, m, b, fm, frm, fb, right, tol * 0.5, depth - 1);
}

}  // namespace

double ref_digamma(double x) { return with_mpfr(x, mpfr_digamma); }

double ref_ln_gamma(double x) { return with_mpfr(x, mpfr_lngamma); }

double ref_ln_wishart_norm(const Eigen::MatrixXd& w, double nu) {
  const int d = static_cast<int>(w.rows());
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(w);
  const double ln_det = es.eigenvalues().array().log().sum();
  constexpr double kLn2 = 0.69314718055994530941723212145818;
  constexpr double kLnPi = 1.1447298858494001741434273513531;
  double value = -0.5 * nu * ln_det - 0.5 * nu * d * kLn2 - 0.25 * d * (d - 1) * kLnPi;
  for (int i = 1; i <= d; ++i) value -= std::lgamma(0.5 * (nu + 1 - i));
  return value;
}

double integrate(const std::function<double(double)>& f, double a, double b, double tol,
                 int max_depth) {
  const double fa = f(a);
  const double fb = f(b);
  const double m = 0.5 * (a + b);
  const double fm = f(m);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return simpson(f, a, b, fa, fm, fb, whole, tol, max_depth);
}

double beta_entropy_quadrature(double a, double b) {
  const double ln_norm = std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
  auto neg_p_ln_p = [&](double x) {
    if (x <= 0.0 || x >= 1.0) return 0.0;
    const double ln_p = (a - 1.0) * std::log(x) + (b - 1.0) * std::log1p(-x) - ln_norm;
    const double p = std::exp(ln_p);
    return p > 0.0 ? -p * ln_p : 0.0;
  };
  return integrate(neg_p_ln_p, 0.0, 1.0, 1e-13);
}

double wishart1d_entropy_quadrature(double w, double nu) {
  // lambda = t^2 keeps the integrand bounded at the origin for nu >= 2.
  const double ln_b = ref_ln_wishart_norm(Eigen::MatrixXd::Constant(1, 1, w), nu);
  auto integrand = [&](double t) {
    const double lambda = t * t;
    if (lambda <= 0.0) return 0.0;
    const double ln_p = ln_b + 0.5 * (nu - 2.0) * std::log(lambda) - 0.5 * lambda / w;
    return -2.0 * t * std::exp(ln_p) * ln_p;
  };
  const double upper = std::sqrt(w * (nu + 120.0) + 120.0);
  return integrate(integrand, 0.0, upper, 1e-12);
}

double gamma_form_wishart1d_entropy(double w, double nu) {
  const double shape = 0.5 * nu;
  const double rate = 0.5 / w;
  return shape - std::log(rate) + ref_ln_gamma(shape) + (1.0 - shape) * ref_digamma(shape);
}

}  // namespace oracle
