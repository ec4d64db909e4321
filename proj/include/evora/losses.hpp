#pragma once

#include <cstdint>

#include "evora/dirichlet.hpp"
#include "evora/pmf.hpp"
#include "evora/types.hpp"

namespace evora {

struct LossWeights {
  double w1 = 1.0;   // expected cross entropy
  double w2 = 1.0;   // expected squared EMD
  double w3 = 1e-5;  // Dirichlet entropy regularizer

  void validate() const {
    require(w1 >= 0.0 && w2 >= 0.0 && w3 >= 0.0,
            "LossWeights: weights must be non-negative");
  }
};

// Expected cross entropy under the Dirichlet: -sum_b y_b (psi(beta_b) -
// psi(beta0)).
double uce_loss(const DirichletBelief& d, const Vec& y);

// Squared EMD between cumulative PMFs, ||cs(p) - cs(y)||^2 (the constant
// (1/B)^{2/l} normalization is dropped throughout).
double emd2_loss(const Vec& p, const Vec& y);
double emd2_loss(const Pmf& p, const Pmf& y);

// Closed-form expectation of emd2 under the Dirichlet:
// cs(mean)' (cs(beta) + 1) / (beta0 + 1) + eta(q, y).
double uemd2_loss(const DirichletBelief& d, const Vec& y);

// w1 * UCE + w2 * UEMD2 - w3 * H(q)
double combined_loss(const DirichletBelief& d, const Vec& y,
                     const LossWeights& w);

// Analytic d(combined)/d(beta); finite differences are a test oracle only.
Vec grad_combined_loss(const DirichletBelief& d, const Vec& y,
                       const LossWeights& w);

// Monte-Carlo estimate of E[emd2(p, y)], p ~ Dir(beta), via normalized
// independent Gamma draws; deterministic per seed.
double mc_uemd2_oracle(const DirichletBelief& d, const Vec& y,
                       std::int64_t n_samples, std::uint64_t seed);

// Same sampler, estimating both expectations from shared draws.
struct McLossEstimate {
  double uemd2 = 0.0;
  double uce = 0.0;
};
McLossEstimate mc_dirichlet_loss_oracle(const DirichletBelief& d, const Vec& y,
                                        std::int64_t n_samples,
                                        std::uint64_t seed);

}  // namespace evora
