#pragma once

#include <cmath>

#include "evora/types.hpp"

namespace evora {

// Adaptive-moment gradient descent with bias correction.
struct AdamOptimizer {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;

  void reset(Eigen::Index n) {
    m_ = Vec::Zero(n);
    v_ = Vec::Zero(n);
    t_ = 0;
  }

  void step(Vec& params, const Vec& grad) {
    if (m_.size() != params.size()) reset(params.size());
    ++t_;
    m_ = beta1 * m_ + (1.0 - beta1) * grad;
    v_ = beta2 * v_ + (1.0 - beta2) * grad.cwiseProduct(grad);
    const double c1 = 1.0 - std::pow(beta1, static_cast<double>(t_));
    const double c2 = 1.0 - std::pow(beta2, static_cast<double>(t_));
    params.array() -=
        lr * (m_.array() / c1) / ((v_.array() / c2).sqrt() + eps);
  }

 private:
  Vec m_, v_;
  long t_ = 0;
};

}  // namespace evora
