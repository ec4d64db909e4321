#include "evora/flow.hpp"

#include <cmath>

#include "evora/rng.hpp"

namespace evora {

double softplus(double x) {
  if (x > 0.0) return x + std::log1p(std::exp(-x));
  return std::log1p(std::exp(x));
}

double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }

FlowModel make_flow(int latent_dim, int n_layers, std::uint64_t seed) {
  require(latent_dim >= 1 && n_layers >= 0, "make_flow: bad dimensions");
  Rng rng(seed);
  FlowModel model;
  model.latent_dim = latent_dim;
  model.layers.resize(n_layers);
  for (auto& layer : model.layers) {
    layer.center = Vec::NullaryExpr(
        latent_dim, [&](Eigen::Index) { return 0.5 * rng.normal(); });
    layer.alpha_raw = 0.1 * rng.normal();
    // beta_raw tracks alpha_raw so the initial bump strength is ~0
    layer.beta_raw = layer.alpha_raw + 0.01 * rng.normal();
  }
  return model;
}

namespace {

struct LayerTrace {
  Vec input;
  Vec w;
  double r, h, alpha, beta, c1, c2;
};

LayerTrace trace_layer(const Vec& x, const RadialLayer& layer) {
  LayerTrace t;
  t.input = x;
  t.w = x - layer.center;
  t.r = t.w.norm();
  t.alpha = layer.alpha();
  t.beta = layer.beta();
  t.h = 1.0 / (t.alpha + t.r);
  t.c1 = 1.0 + t.beta * t.h;
  t.c2 = 1.0 + t.beta * t.alpha * t.h * t.h;
  return t;
}

double layer_log_det(const LayerTrace& t, int latent_dim) {
  return (latent_dim - 1) * std::log(t.c1) + std::log(t.c2);
}

}  // namespace

std::pair<Vec, double> radial_forward(const Vec& z, const RadialLayer& layer) {
  const LayerTrace t = trace_layer(z, layer);
  Vec out = z + (t.beta * t.h) * t.w;
  return {std::move(out), layer_log_det(t, static_cast<int>(z.size()))};
}

double flow_log_density(const Vec& z, const FlowModel& model) {
  require(model.latent_dim == z.size(), "flow_log_density: dimension mismatch");
  const int dim = model.latent_dim;
  Vec u = z;
  double log_det = 0.0;
  for (const auto& layer : model.layers) {
    const LayerTrace t = trace_layer(u, layer);
    u += (t.beta * t.h) * t.w;
    log_det += layer_log_det(t, dim);
  }
  const double log_base =
      -0.5 * dim * std::log(2.0 * M_PI) - 0.5 * u.squaredNorm();
  return log_base + log_det;
}

double certainty_budget(int latent_dim, double scale) {
  require(latent_dim >= 1, "certainty_budget: latent_dim must be >= 1");
  require(scale >= 0.0, "certainty_budget: scale must be non-negative");
  return std::exp(scale * static_cast<double>(latent_dim));
}

double confidence_score(double density, const ConfidenceCalibration& cal) {
  cal.validate();
  return (density - cal.p_min) / (cal.p_max - cal.p_min);
}

Eigen::Index flow_param_count(const FlowModel& model) {
  return static_cast<Eigen::Index>(model.layers.size()) *
         (model.latent_dim + 2);
}

Vec flow_get_params(const FlowModel& model) {
  Vec params(flow_param_count(model));
  Eigen::Index at = 0;
  for (const auto& layer : model.layers) {
    params.segment(at, model.latent_dim) = layer.center;
    at += model.latent_dim;
    params[at++] = layer.alpha_raw;
    params[at++] = layer.beta_raw;
  }
  return params;
}

void flow_set_params(FlowModel& model, const Vec& params) {
  require(params.size() == flow_param_count(model),
          "flow_set_params: size mismatch");
  Eigen::Index at = 0;
  for (auto& layer : model.layers) {
    layer.center = params.segment(at, model.latent_dim);
    at += model.latent_dim;
    layer.alpha_raw = params[at++];
    layer.beta_raw = params[at++];
  }
}

FlowGradients flow_log_density_backward(const Vec& z, const FlowModel& model) {
  require(model.latent_dim == z.size(),
          "flow_log_density_backward: dimension mismatch");
  const int dim = model.latent_dim;
  const auto n_layers = static_cast<Eigen::Index>(model.layers.size());

  std::vector<LayerTrace> traces(n_layers);
  Vec u = z;
  double log_det = 0.0;
  for (Eigen::Index i = 0; i < n_layers; ++i) {
    traces[i] = trace_layer(u, model.layers[i]);
    const auto& t = traces[i];
    u += (t.beta * t.h) * t.w;
    log_det += layer_log_det(t, dim);
  }

  FlowGradients out;
  out.log_density =
      -0.5 * dim * std::log(2.0 * M_PI) - 0.5 * u.squaredNorm() + log_det;
  out.d_params = Vec::Zero(flow_param_count(model));

  Vec g = -u;  // d log N(u) / d u
  for (Eigen::Index i = n_layers - 1; i >= 0; --i) {
    const auto& t = traces[i];
    const auto& layer = model.layers[i];
    const double wg = t.w.dot(g);

    // vector path: J is symmetric, J = c1 I - (beta h^2 / r) w w'
    Vec jt_g = t.c1 * g;
    if (t.r > 1e-300) jt_g -= (t.beta * t.h * t.h / t.r) * wg * t.w;
    Vec d_center = g - jt_g;
    double d_alpha = -t.beta * t.h * t.h * wg;
    double d_beta = t.h * wg;

    // log-det path
    const double h2 = t.h * t.h;
    const double h3 = h2 * t.h;
    const double dld_dr = (dim - 1) * (-t.beta * h2) / t.c1 +
                          (-2.0 * t.beta * t.alpha * h3) / t.c2;
    d_alpha += (dim - 1) * (-t.beta * h2) / t.c1 +
               (t.beta * h2 - 2.0 * t.beta * t.alpha * h3) / t.c2;
    d_beta += (dim - 1) * t.h / t.c1 + t.alpha * h2 / t.c2;
    Vec d_input = jt_g;
    if (t.r > 1e-300) {
      const Vec dir = t.w / t.r;
      d_input += dld_dr * dir;
      d_center -= dld_dr * dir;
    }

    const Eigen::Index at = i * (dim + 2);
    out.d_params.segment(at, dim) += d_center;
    // alpha = softplus(alpha_raw), beta = -alpha + softplus(beta_raw)
    out.d_params[at + dim] += (d_alpha - d_beta) * logistic(layer.alpha_raw);
    out.d_params[at + dim + 1] += d_beta * logistic(layer.beta_raw);

    g = std::move(d_input);
  }
  out.d_input = std::move(g);
  return out;
}

double flow_mean_nll(const std::vector<Vec>& batch, const FlowModel& model) {
  require(!batch.empty(), "flow_mean_nll: empty batch");
  double acc = 0.0;
  for (const auto& z : batch) acc -= flow_log_density(z, model);
  return acc / static_cast<double>(batch.size());
}

Vec flow_nll_grad(const std::vector<Vec>& batch, const FlowModel& model) {
  require(!batch.empty(), "flow_nll_grad: empty batch");
  Vec grad = Vec::Zero(flow_param_count(model));
  for (const auto& z : batch) {
    grad -= flow_log_density_backward(z, model).d_params;
  }
  return grad / static_cast<double>(batch.size());
}

}  // namespace evora
