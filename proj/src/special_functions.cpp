#include "evora/special_functions.hpp"

#include <cmath>

namespace evora {

double digamma(double x) {
  require(x > 0.0, "digamma: input must be positive");
  double result = 0.0;
  while (x < 6.0) {
    result -= 1.0 / x;
    x += 1.0;
  }
  const double inv = 1.0 / x;
  const double inv2 = inv * inv;
  // psi(x) ~ ln x - 1/(2x) - sum_n B_{2n} / (2n x^{2n})
  const double series =
      inv2 * (1.0 / 12.0 -
              inv2 * (1.0 / 120.0 -
                      inv2 * (1.0 / 252.0 -
                              inv2 * (1.0 / 240.0 -
                                      inv2 * (1.0 / 132.0 -
                                              inv2 * (691.0 / 32760.0))))));
  return result + std::log(x) - 0.5 * inv - series;
}

double trigamma(double x) {
  require(x > 0.0, "trigamma: input must be positive");
  double result = 0.0;
  while (x < 6.0) {
    result += 1.0 / (x * x);
    x += 1.0;
  }
  const double inv = 1.0 / x;
  const double inv2 = inv * inv;
  // psi'(x) ~ 1/x + 1/(2x^2) + sum_n B_{2n} / x^{2n+1}
  const double series =
      inv * inv2 *
      (1.0 / 6.0 -
       inv2 * (1.0 / 30.0 -
               inv2 * (1.0 / 42.0 -
                       inv2 * (1.0 / 30.0 -
                               inv2 * (5.0 / 66.0 -
                                       inv2 * (691.0 / 2730.0))))));
  return result + inv + 0.5 * inv2 + series;
}

double log_multivariate_beta(const Vec& beta) {
  require(beta.size() >= 1, "log_multivariate_beta: empty vector");
  double sum_lg = 0.0;
  double beta0 = 0.0;
  for (Eigen::Index i = 0; i < beta.size(); ++i) {
    require(beta[i] > 0.0, "log_multivariate_beta: entries must be positive");
    sum_lg += std::lgamma(beta[i]);
    beta0 += beta[i];
  }
  return sum_lg - std::lgamma(beta0);
}

}  // namespace evora
