#pragma once

#include "evora/pmf.hpp"
#include "evora/types.hpp"

namespace evora {

// Dirichlet concentration over B bins; beta0 caches the total evidence.
struct DirichletBelief {
  Vec beta;
  double beta0 = 0.0;

  DirichletBelief() = default;
  explicit DirichletBelief(Vec b) : beta(std::move(b)), beta0(beta.sum()) {
    validate();
  }

  Eigen::Index bins() const { return beta.size(); }

  void validate() const {
    require(beta.size() >= 2, "DirichletBelief: need at least two bins");
    for (Eigen::Index i = 0; i < beta.size(); ++i) {
      require(beta[i] > 0.0, "DirichletBelief: concentrations must be positive");
    }
    require(std::abs(beta.sum() - beta0) <= 1e-12 * std::max(1.0, beta0),
            "DirichletBelief: stale beta0 cache");
  }
};

// Expected PMF beta / beta0.
Vec dirichlet_mean_probs(const DirichletBelief& d);
Pmf dirichlet_mean(const DirichletBelief& d);

// log B(beta) + (beta0 - B) psi(beta0) - sum (beta_b - 1) psi(beta_b)
double dirichlet_entropy(const DirichletBelief& d);

// (n_prior * p_prior + n_obs * p_pred) / (n_prior + n_obs)
Vec dirichlet_posterior(double n_prior, const Vec& p_prior, double n_obs,
                        const Vec& p_pred);
Pmf dirichlet_posterior(double n_prior, const Pmf& p_prior, double n_obs,
                        const Pmf& p_pred);

}  // namespace evora
