#pragma once

#include "evora/types.hpp"

namespace evora {

// Per-cell input to the traction predictor: elevation in meters plus the
// one-hot semantic encoding.
struct TerrainFeature {
  double elevation = 0.0;
  Vec semantic_onehot;

  void validate() const {
    require(std::isfinite(elevation), "TerrainFeature: non-finite elevation");
    require(std::abs(semantic_onehot.sum() - 1.0) <= 1e-9,
            "TerrainFeature: one-hot must sum to 1");
  }
};

inline TerrainFeature make_feature(double elevation, int semantic,
                                   int n_classes) {
  TerrainFeature f;
  f.elevation = elevation;
  f.semantic_onehot = Vec::Zero(n_classes);
  f.semantic_onehot[semantic] = 1.0;
  return f;
}

inline Vec feature_vector(const TerrainFeature& f) {
  Vec x(1 + f.semantic_onehot.size());
  x[0] = f.elevation;
  x.tail(f.semantic_onehot.size()) = f.semantic_onehot;
  return x;
}

}  // namespace evora
