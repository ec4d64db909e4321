#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "evora/types.hpp"

namespace evora {

double softplus(double x);
double logistic(double x);

// Radial bump z + beta * (z - z0) / (alpha + ||z - z0||). The raw parameters
// map to alpha = softplus(alpha_raw) > 0 and beta = -alpha +
// softplus(beta_raw), which keeps the layer invertible.
struct RadialLayer {
  Vec center;
  double alpha_raw = 0.0;
  double beta_raw = 0.0;

  double alpha() const { return softplus(alpha_raw); }
  double beta() const { return -alpha() + softplus(beta_raw); }
};

struct FlowModel {
  std::vector<RadialLayer> layers;
  int latent_dim = 0;
};

// Near-identity initialization: small Gaussian centers, beta ~ 0.
FlowModel make_flow(int latent_dim, int n_layers, std::uint64_t seed);

// Returns (f(z), log |det df/dz|).
std::pair<Vec, double> radial_forward(const Vec& z, const RadialLayer& layer);

// log density of z under the pulled-back model:
// log N(f(z); 0, I) + sum of per-layer log-determinants.
double flow_log_density(const Vec& z, const FlowModel& model);

// Certainty budget N_H = exp(c * H).
double certainty_budget(int latent_dim, double scale);

struct ConfidenceCalibration {
  double p_min = 0.0;
  double p_max = 1.0;

  void validate() const {
    require(p_max > p_min && p_min >= 0.0,
            "ConfidenceCalibration: need p_max > p_min >= 0");
  }
};

// (density - p_min) / (p_max - p_min); not clipped to [0, 1].
double confidence_score(double density, const ConfidenceCalibration& cal);

// --- parameter packing (per layer: [center; alpha_raw; beta_raw]) ---

Eigen::Index flow_param_count(const FlowModel& model);
Vec flow_get_params(const FlowModel& model);
void flow_set_params(FlowModel& model, const Vec& params);

// Reverse-mode derivatives of the log density w.r.t. the input point and all
// packed raw parameters.
struct FlowGradients {
  double log_density = 0.0;
  Vec d_input;   // d log p / d z
  Vec d_params;  // d log p / d raw params
};
FlowGradients flow_log_density_backward(const Vec& z, const FlowModel& model);

// Mean negative log density over a batch and its parameter gradient.
double flow_mean_nll(const std::vector<Vec>& batch, const FlowModel& model);
Vec flow_nll_grad(const std::vector<Vec>& batch, const FlowModel& model);

}  // namespace evora
