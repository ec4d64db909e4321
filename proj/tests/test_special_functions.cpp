#include <doctest.h>

#include <cmath>

#include "evora/special_functions.hpp"

using namespace evora;

namespace {
constexpr double kEulerMascheroni = 0.57721566490153286060651209;
}

TEST_CASE("digamma reference values") {
  CHECK(std::abs(digamma(1.0) + kEulerMascheroni) < 1e-10);
  CHECK(std::abs(digamma(2.0) - (1.0 - kEulerMascheroni)) < 1e-10);
  CHECK(std::abs(digamma(0.5) - (-kEulerMascheroni - 2.0 * std::log(2.0))) <
        1e-10);
}

TEST_CASE("digamma recurrence psi(x+1) = psi(x) + 1/x") {
  for (double x : {0.1, 0.37, 1.0, 2.5, 5.9, 17.3, 123.4}) {
    CHECK(std::abs(digamma(x + 1.0) - (digamma(x) + 1.0 / x)) < 1e-10);
  }
}

TEST_CASE("digamma rejects non-positive input") {
  CHECK_THROWS(digamma(0.0));
  CHECK_THROWS(digamma(-1.0));
}

TEST_CASE("trigamma reference values and recurrence") {
  // psi'(1) = pi^2 / 6
  CHECK(std::abs(trigamma(1.0) - M_PI * M_PI / 6.0) < 1e-10);
  // psi'(0.5) = pi^2 / 2
  CHECK(std::abs(trigamma(0.5) - M_PI * M_PI / 2.0) < 1e-10);
  for (double x : {0.2, 0.9, 3.1, 8.8, 44.0}) {
    CHECK(std::abs(trigamma(x + 1.0) - (trigamma(x) - 1.0 / (x * x))) < 1e-10);
  }
  CHECK_THROWS(trigamma(-0.5));
}

TEST_CASE("trigamma matches central differences of digamma") {
  for (double x : {0.4, 1.3, 2.0, 9.7, 31.0}) {
    const double h = 1e-6 * std::max(1.0, x);
    const double fd = (digamma(x + h) - digamma(x - h)) / (2.0 * h);
    CHECK(std::abs(trigamma(x) - fd) < 1e-6 * std::max(1.0, trigamma(x)));
  }
}

TEST_CASE("log multivariate beta") {
  Vec b2(2);
  b2 << 1.0, 1.0;
  CHECK(std::abs(log_multivariate_beta(b2)) < 1e-12);
  b2 << 2.0, 2.0;
  CHECK(std::abs(log_multivariate_beta(b2) - std::log(1.0 / 6.0)) < 1e-10);
  Vec b3 = Vec::Ones(3);
  CHECK(std::abs(log_multivariate_beta(b3) - std::log(0.5)) < 1e-10);

  Vec bad(2);
  bad << 1.0, 0.0;
  CHECK_THROWS(log_multivariate_beta(bad));
}
