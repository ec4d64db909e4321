#include "evora/dirichlet.hpp"

#include <cmath>

#include "evora/special_functions.hpp"

namespace evora {

Vec dirichlet_mean_probs(const DirichletBelief& d) { return d.beta / d.beta0; }

Pmf dirichlet_mean(const DirichletBelief& d) {
  return make_pmf(dirichlet_mean_probs(d));
}

double dirichlet_entropy(const DirichletBelief& d) {
  const auto bins = static_cast<double>(d.bins());
  double acc = log_multivariate_beta(d.beta);
  acc += (d.beta0 - bins) * digamma(d.beta0);
  for (Eigen::Index i = 0; i < d.bins(); ++i) {
    acc -= (d.beta[i] - 1.0) * digamma(d.beta[i]);
  }
  return acc;
}

Vec dirichlet_posterior(double n_prior, const Vec& p_prior, double n_obs,
                        const Vec& p_pred) {
  require(p_prior.size() == p_pred.size(),
          "dirichlet_posterior: bin mismatch");
  require(n_prior >= 0.0 && n_obs >= 0.0,
          "dirichlet_posterior: negative evidence");
  require(n_prior + n_obs > 0.0, "dirichlet_posterior: zero total evidence");
  return (n_prior * p_prior + n_obs * p_pred) / (n_prior + n_obs);
}

Pmf dirichlet_posterior(double n_prior, const Pmf& p_prior, double n_obs,
                        const Pmf& p_pred) {
  Pmf out;
  out.probs = dirichlet_posterior(n_prior, p_prior.probs, n_obs, p_pred.probs);
  out.bin_edges = p_prior.bin_edges;
  return out;
}

}  // namespace evora
