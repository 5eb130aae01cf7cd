#include <doctest.h>

#include <cmath>
#include <limits>

#include <glogit/error.hpp>
#include <glogit/model.hpp>

#include "helpers.hpp"

using namespace glogit;

namespace {
Vector v2(double a, double b) {
  Vector v(2);
  v << a, b;
  return v;
}
}  // namespace

TEST_CASE("success probability at reference margins") {
  const Vector x = v2(1.0, 0.0);
  CHECK(success_prob(x, v2(0.0, 3.0)) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(success_prob(x, v2(std::log(2.0), 0.0)) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  const double tiny = success_prob(x, v2(-700.0, 0.0));
  CHECK(tiny > 0.0);
  CHECK(tiny <= 1e-300);
  CHECK(success_prob(x, v2(1000.0, 0.0)) == 1.0);
  CHECK(std::isfinite(success_prob(x, v2(-1000.0, 0.0))));
}

TEST_CASE("success probability is monotone in the margin") {
  double prev = 0.0;
  for (double t = -800.0; t <= 800.0; t += 0.37) {
    const double p = logistic(t);
    CHECK(p >= prev);
    prev = p;
  }
}

TEST_CASE("margin rejects mismatched or non-finite input") {
  CHECK_THROWS_AS(success_prob(Vector::Ones(3), Vector::Ones(2)), ValidationError);
  Vector bad = Vector::Ones(2);
  bad(1) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(success_prob(Vector::Ones(2), bad), ValidationError);
  CHECK_THROWS_AS(label_pmf(2, Vector::Ones(2), Vector::Ones(2)), ValidationError);
}

TEST_CASE("label pmf values and normalization") {
  const Vector x = v2(1.0, 0.0);
  CHECK(label_pmf(1, x, v2(0.0, 0.0)) == doctest::Approx(0.5));
  CHECK(label_pmf(0, x, v2(std::log(2.0), 0.0)) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  Philox4x32 rng(3, 0);
  for (int k = 0; k < 500; ++k) {
    const Vector xx = testutil::random_vector(rng, 4, 2.0);
    const Vector b = testutil::random_vector(rng, 4, 3.0);
    CHECK(std::abs(label_pmf(0, xx, b) + label_pmf(1, xx, b) - 1.0) < 1e-15);
  }
}

TEST_CASE("log_logistic is accurate in both tails") {
  CHECK(log_logistic(0.0) == doctest::Approx(std::log(0.5)));
  CHECK(log_logistic(-800.0) == doctest::Approx(-800.0));
  CHECK(log_logistic(40.0) == doctest::Approx(-std::exp(-40.0)).epsilon(1e-10));
  for (double t = -30.0; t <= 30.0; t += 0.7)
    CHECK(log_logistic(t) == doctest::Approx(std::log(testutil::ref_pi(t))).epsilon(1e-12));
}

TEST_CASE("pmf gamma norm reference values") {
  const Vector x = v2(1.0, 0.0);
  CHECK(pmf_gamma_norm(x, v2(0.0, 0.0), 1.0) == doctest::Approx(std::sqrt(0.5)).epsilon(1e-14));
  CHECK(pmf_gamma_norm(x, v2(0.0, 0.0), 0.1) == doctest::Approx(std::pow(2.0, -0.1 / 1.1)).epsilon(1e-14));
  CHECK(pmf_gamma_norm(x, v2(0.0, 0.0), 0.1) == doctest::Approx(0.93895).epsilon(1e-5));
  CHECK(pmf_gamma_norm(x, v2(800.0, 0.0), 2.0) == doctest::Approx(1.0));
  CHECK_THROWS_AS(pmf_gamma_norm(x, v2(0.0, 0.0), 0.0), ValidationError);
  CHECK_THROWS_AS(pmf_gamma_norm(x, v2(0.0, 0.0), -1.0), ValidationError);
}

TEST_CASE("pmf gamma norm bounds, symmetry and minimum at one half") {
  for (double g : {0.1, 0.5, 1.0, 2.5, 7.0}) {
    const double lo = std::pow(2.0, -g / (g + 1.0));
    CHECK(gamma_norm_margin(0.0, g) == doctest::Approx(lo).epsilon(1e-14));
    for (double t = -20.0; t <= 20.0; t += 0.25) {
      const double v = gamma_norm_margin(t, g);
      CHECK(v >= lo - 1e-15);
      CHECK(v <= 1.0);
      CHECK(v == doctest::Approx(gamma_norm_margin(-t, g)).epsilon(1e-14));
      if (std::abs(t) < 10.0) CHECK(v == doctest::Approx(testutil::ref_norm(t, g)).epsilon(1e-12));
    }
  }
}

TEST_CASE("gamma weight reference values and limits") {
  const Vector x = v2(1.0, 0.0);
  CHECK(weight_gamma(1, x, v2(0.0, 0.0), 1.0) == doctest::Approx(std::sqrt(0.5)).epsilon(1e-14));
  for (double t : {-5.0, 0.0, 3.0}) {
    CHECK(weight_gamma_margin(1, t, 0.0) == 1.0);
    CHECK(weight_gamma_margin(0, t, 0.0) == 1.0);
  }
  CHECK(weight_gamma_margin(1, -900.0, 1.0) == doctest::Approx(0.0));
  CHECK(weight_gamma_margin(0, 900.0, 1.0) == doctest::Approx(0.0));
  for (double g : {0.5, 2.0})
    for (double t = -8.0; t <= 8.0; t += 0.5)
      for (int y : {0, 1})
        CHECK(weight_gamma_margin(y, t, g) == doctest::Approx(testutil::ref_weight_gamma(y, t, g)).epsilon(1e-12));
}

TEST_CASE("gamma weight is monotone in the margin") {
  for (double g : {0.3, 1.0, 2.5}) {
    double up = 0.0, down = 1.0;
    for (double t = -50.0; t <= 50.0; t += 0.1) {
      const double w1 = weight_gamma_margin(1, t, g);
      const double w0 = weight_gamma_margin(0, t, g);
      CHECK(w1 >= up);
      CHECK(w0 <= down);
      up = w1;
      down = w0;
    }
  }
}

TEST_CASE("conditional weight equals the pmf norm") {
  Philox4x32 rng(17, 0);
  for (int k = 0; k < 1000; ++k) {
    const Vector x = testutil::random_vector(rng, 3, 1.5);
    const Vector b = testutil::random_vector(rng, 3, 1.5);
    const double g = 0.05 + 3.0 * rng.uniform();
    double s = 0.0;
    for (int y : {0, 1}) s += weight_gamma(y, x, b, g) * label_pmf(y, x, b);
    CHECK(std::abs(s - pmf_gamma_norm(x, b, g)) < 1e-12);
  }
}

TEST_CASE("mixture decomposition examples") {
  const auto clean = mixture_decompose({0.0, 0.0});
  CHECK(clean.c == 1.0);
  CHECK(clean.h1 == 0.0);
  const auto m = mixture_decompose({0.1, 0.2});
  CHECK(m.c == doctest::Approx(0.7).epsilon(1e-15));
  CHECK(m.h1 == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK_THROWS_AS(mixture_decompose({0.6, 0.4}), ValidationError);
  CHECK_THROWS_AS(mixture_decompose({-0.1, 0.2}), ValidationError);
}

TEST_CASE("mixture reconstruction reproduces the flipped-label pmf") {
  Philox4x32 rng(23, 0);
  for (int k = 0; k < 1000; ++k) {
    const double e0 = 0.5 * rng.uniform();
    const double e1 = 0.5 * rng.uniform();
    const double pi = rng.uniform();
    const auto mix = mixture_decompose({e0, e1});
    const double p1 = e0 * (1.0 - pi) + (1.0 - e1) * pi;
    CHECK(std::abs(mixture_pmf(1, pi, mix) - p1) < 1e-14);
    CHECK(std::abs(mixture_pmf(0, pi, mix) - (1.0 - p1)) < 1e-14);
    CHECK(std::abs(contaminated_success_prob(pi, {e0, e1}) - p1) < 1e-14);
  }
}

TEST_CASE("bias term examples") {
  const Vector x = v2(1.0, 0.0);
  for (double g : {0.5, 1.0, 4.0}) {
    const double b = bias_term_B(x, v2(0.0, 0.0), g, {0.1, 0.2});
    CHECK(b == doctest::Approx(0.3 * std::pow(0.5, g / (g + 1.0))).epsilon(1e-14));
  }
  CHECK(std::abs(bias_term_B(x, v2(0.7, 0.0), 1e4, {0.1, 0.2}) - 0.1) < 1e-3);
  CHECK(std::abs(bias_term_B(x, v2(-0.7, 0.0), 1e4, {0.1, 0.2}) - 0.2) < 1e-3);
  double lo = 1.0, hi = 0.0;
  for (double t = -5.0; t <= 5.0; t += 0.1) {
    const double b = bias_term_B(x, v2(t, 0.0), 1e4, {0.15, 0.15});
    CHECK(std::abs(b - 0.15) < 1e-3);
    lo = std::min(lo, b);
    hi = std::max(hi, b);
  }
  CHECK(hi - lo < 1e-3);
}

TEST_CASE("bias term symmetry under swapping labels and coefficients") {
  Philox4x32 rng(29, 0);
  for (int k = 0; k < 200; ++k) {
    const Vector x = testutil::random_vector(rng, 3, 1.0);
    const Vector b = testutil::random_vector(rng, 3, 1.0);
    const double e0 = 0.4 * rng.uniform(), e1 = 0.4 * rng.uniform();
    const double g = 0.1 + 2.0 * rng.uniform();
    CHECK(bias_term_B(x, b, g, {e0, e1}) == doctest::Approx(bias_term_B(x, -b, g, {e1, e0})).epsilon(1e-13));
  }
}
