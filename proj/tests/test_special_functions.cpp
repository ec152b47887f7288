#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "oracles/reference_functions.hpp"
#include "vbhmm/rng.hpp"
#include "vbhmm/special_functions.hpp"

using namespace vbhmm;

namespace {

Eigen::VectorXd vec(std::initializer_list<double> values) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (const double x : values) v[i++] = x;
  return v;
}

}  // namespace

TEST_CASE("digamma matches frozen references") {
  CHECK(digamma(1.0) == doctest::Approx(-0.57721566490153286061).epsilon(1e-15));
  CHECK(digamma(2.0) == doctest::Approx(0.42278433509846713939).epsilon(1e-15));
  CHECK(digamma(0.5) == doctest::Approx(-1.9635100260214234794).epsilon(1e-15));
  CHECK(std::abs(digamma(1.0) - oracle::ref_digamma(1.0)) <= 1e-15);
}

TEST_CASE("digamma tracks the high-precision oracle across the range") {
  rng::Stream stream(11);
  for (int i = 0; i < 2000; ++i) {
    const double x = std::pow(10.0, -3.0 + 9.0 * stream.next_double());
    CHECK(std::abs(digamma(x) - oracle::ref_digamma(x)) <= 1e-12);
  }
}

TEST_CASE("digamma recurrence psi(x+1) = psi(x) + 1/x") {
  rng::Stream stream(12);
  for (int i = 0; i < 1000; ++i) {
    const double x = 100.0 * stream.next_open_double();
    CHECK(std::abs(digamma(x + 1.0) - digamma(x) - 1.0 / x) <= 1e-12);
  }
}

TEST_CASE("digamma rejects bad input") {
  CHECK_THROWS_AS(digamma(0.0), std::domain_error);
  CHECK_THROWS_AS(digamma(-1.5), std::domain_error);
  CHECK_THROWS_AS(digamma(std::nan("")), std::domain_error);
}

TEST_CASE("ln_gamma matches frozen references") {
  CHECK(ln_gamma(1.0) == 0.0);
  CHECK(ln_gamma(4.0) == doctest::Approx(1.7917594692280550008).epsilon(1e-15));
  CHECK(ln_gamma(0.5) == doctest::Approx(0.57236494292470008707).epsilon(1e-15));
}

TEST_CASE("ln_gamma tracks the high-precision oracle across the range") {
  rng::Stream stream(13);
  for (int i = 0; i < 2000; ++i) {
    const double x = std::pow(10.0, -3.0 + 9.0 * stream.next_double());
    CHECK(std::abs(ln_gamma(x) - oracle::ref_ln_gamma(x)) <= 1e-12);
  }
}

TEST_CASE("ln_gamma recurrence lnG(x+1) = lnG(x) + ln x") {
  rng::Stream stream(14);
  for (int i = 0; i < 1000; ++i) {
    const double x = 100.0 * stream.next_open_double();
    CHECK(std::abs(ln_gamma(x + 1.0) - ln_gamma(x) - std::log(x)) <= 1e-12);
  }
  CHECK_THROWS_AS(ln_gamma(-2.0), std::domain_error);
}

TEST_CASE("determinism: identical inputs give bit-identical outputs") {
  for (const double x : {1e-3, 0.37, 5.5, 123.0, 9e5}) {
    CHECK(digamma(x) == digamma(x));
    CHECK(ln_gamma(x) == ln_gamma(x));
  }
}

TEST_CASE("ln_dirichlet_norm on frozen cases") {
  CHECK(ln_dirichlet_norm(vec({1, 1})) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(ln_dirichlet_norm(vec({1, 1, 1})) ==
        doctest::Approx(0.69314718055994530942).epsilon(1e-15));
  CHECK(ln_dirichlet_norm(vec({2, 2})) ==
        doctest::Approx(1.7917594692280550008).epsilon(1e-15));
  CHECK_THROWS_AS(ln_dirichlet_norm(Eigen::VectorXd()), std::domain_error);
  CHECK_THROWS_AS(ln_dirichlet_norm(vec({1.0, 0.0})), std::domain_error);
}

TEST_CASE("dirichlet_entropy on frozen cases") {
  CHECK(dirichlet_entropy(vec({1, 1})) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(dirichlet_entropy(vec({1, 1, 1})) ==
        doctest::Approx(-0.69314718055994530942).epsilon(1e-15));
  // Quadrature oracle for Beta(2, 2).
  const double h_beta = oracle::beta_entropy_quadrature(2.0, 2.0);
  CHECK(dirichlet_entropy(vec({2, 2})) == doctest::Approx(h_beta).epsilon(1e-9));
  CHECK(dirichlet_entropy(vec({2, 2})) ==
        doctest::Approx(-0.12509280256138833415).epsilon(1e-14));
}

TEST_CASE("dirichlet_entropy of the flat K-vector equals -ln Gamma(K)") {
  for (int k = 2; k <= 8; ++k) {
    const Eigen::VectorXd alpha = Eigen::VectorXd::Ones(k);
    CHECK(std::abs(dirichlet_entropy(alpha) + ln_gamma(static_cast<double>(k))) <= 1e-12);
  }
}

TEST_CASE("ln_wishart_norm on frozen cases") {
  const Eigen::MatrixXd w1 = Eigen::MatrixXd::Constant(1, 1, 1.0);
  CHECK(ln_wishart_norm(w1, 1.0) ==
        doctest::Approx(-0.91893853320467274178).epsilon(1e-14));
  const Eigen::MatrixXd w2 = Eigen::MatrixXd::Constant(1, 1, 2.0);
  CHECK(ln_wishart_norm(w2, 3.0) ==
        doctest::Approx(-1.9586593040445907059).epsilon(1e-14));
  const Eigen::MatrixXd eye2 = Eigen::MatrixXd::Identity(2, 2);
  CHECK(ln_wishart_norm(eye2, 2.0) ==
        doctest::Approx(-2.531024246969290793).epsilon(1e-14));
  CHECK(ln_wishart_norm(eye2, 2.0) ==
        doctest::Approx(oracle::ref_ln_wishart_norm(eye2, 2.0)).epsilon(1e-13));
}

TEST_CASE("ln_wishart_norm rejects invalid input") {
  Eigen::MatrixXd not_spd(2, 2);
  not_spd << 1.0, 2.0, 2.0, 1.0;
  CHECK_THROWS_AS(ln_wishart_norm(not_spd, 3.0), std::domain_error);
  Eigen::MatrixXd asym(2, 2);
  asym << 1.0, 0.5, 0.2, 1.0;
  CHECK_THROWS_AS(ln_wishart_norm(asym, 3.0), std::domain_error);
  CHECK_THROWS_AS(ln_wishart_norm(Eigen::MatrixXd::Identity(2, 2), 1.0), std::domain_error);
}

TEST_CASE("ln_wishart_norm is invariant under orthogonal conjugation") {
  Eigen::MatrixXd w(3, 3);
  w << 2.0, 0.3, 0.1, 0.3, 1.5, -0.2, 0.1, -0.2, 1.0;
  const double theta = 0.7;
  Eigen::MatrixXd q = Eigen::MatrixXd::Identity(3, 3);
  q(0, 0) = std::cos(theta);
  q(0, 1) = -std::sin(theta);
  q(1, 0) = std::sin(theta);
  q(1, 1) = std::cos(theta);
  const Eigen::MatrixXd rotated = q.transpose() * w * q;
  CHECK(ln_wishart_norm(w, 4.5) == doctest::Approx(ln_wishart_norm(rotated, 4.5)).epsilon(1e-12));
}

TEST_CASE("wishart_entropy matches the independent oracles") {
  const Eigen::MatrixXd w1 = Eigen::MatrixXd::Constant(1, 1, 1.0);
  // E[ln lambda] references from the closed form psi(nu/2) + ln 2 + ln w.
  const double eld_nu1 = oracle::ref_digamma(0.5) + std::log(2.0);
  const double eld_nu3 = oracle::ref_digamma(1.5) + std::log(2.0);
  CHECK(wishart_entropy(w1, 1.0, eld_nu1) ==
        doctest::Approx(oracle::gamma_form_wishart1d_entropy(1.0, 1.0)).epsilon(1e-13));
  CHECK(wishart_entropy(w1, 1.0, eld_nu1) ==
        doctest::Approx(0.78375711047393365677).epsilon(1e-13));
  CHECK(wishart_entropy(w1, 3.0, eld_nu3) ==
        doctest::Approx(oracle::gamma_form_wishart1d_entropy(1.0, 3.0)).epsilon(1e-13));
  CHECK(wishart_entropy(w1, 3.0, eld_nu3) ==
        doctest::Approx(oracle::wishart1d_entropy_quadrature(1.0, 3.0)).epsilon(1e-8));
  // Scale-parameter sweep against the quadrature oracle.
  for (const double scale : {0.5, 2.0, 7.5}) {
    const Eigen::MatrixXd w = Eigen::MatrixXd::Constant(1, 1, scale);
    const double eld = oracle::ref_digamma(2.0) + std::log(2.0) + std::log(scale);
    CHECK(wishart_entropy(w, 4.0, eld) ==
          doctest::Approx(oracle::wishart1d_entropy_quadrature(scale, 4.0)).epsilon(1e-8));
  }
}

TEST_CASE("wishart_entropy is invariant under orthogonal conjugation") {
  Eigen::MatrixXd w(2, 2);
  w << 1.8, 0.4, 0.4, 0.9;
  const double theta = -0.4;
  Eigen::MatrixXd q(2, 2);
  q << std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta);
  const Eigen::MatrixXd rotated = q.transpose() * w * q;
  // |Q^T W Q| = |W|, so the expected log-determinant carries over.
  const double eld = oracle::ref_digamma(1.6) + oracle::ref_digamma(1.1) + 2.0 * std::log(2.0) +
                     std::log(w.determinant());
  CHECK(wishart_entropy(w, 3.2, eld) ==
        doctest::Approx(wishart_entropy(rotated, 3.2, eld)).epsilon(1e-12));
}
