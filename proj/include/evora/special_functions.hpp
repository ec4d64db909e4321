#pragma once

#include "evora/types.hpp"

namespace evora {

// Digamma via recurrence shift to x >= 6 followed by the asymptotic series
// with Bernoulli terms through x^-12; absolute error below 1e-10 over the
// positive axis. Rejects non-positive input.
double digamma(double x);

// Trigamma (derivative of digamma), same shift-plus-series scheme.
double trigamma(double x);

// log of the multivariate beta function: sum lgamma(beta_b) - lgamma(beta0).
double log_multivariate_beta(const Vec& beta);

}  // namespace evora
