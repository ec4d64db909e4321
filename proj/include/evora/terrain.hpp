#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "evora/maps.hpp"
#include "evora/types.hpp"

namespace evora {

// One dataset-kind row: elevation ranges, slope caps and the vegetation/OOD
// ratios. veg_* are NaN for kinds without vegetation; ood_ratio is NaN for
// kinds without an OOD mask target.
struct KindRanges {
  std::string kind;
  double dirt_lo = 0.0, dirt_hi = 0.0;
  double veg_lo = 0.0, veg_hi = 0.0;
  double dirt_max_slope = 0.0, veg_max_slope = 0.0;
  double veg_ratio = 0.0;
  double ood_ratio = 0.0;

  bool has_vegetation() const { return veg_ratio > 0.0; }
  bool has_ood_target() const { return std::isfinite(ood_ratio); }
};

// kinds: train, test, ood1, ood2
KindRanges kind_ranges(const std::string& kind);

struct TerrainConfig {
  int width = 60, height = 60;
  double resolution = 0.5;
  int bins = 20;
  std::string kind = "train";
  // optional override of the kind's vegetation ratio (tests / arenas)
  double veg_ratio_override = std::numeric_limits<double>::quiet_NaN();
};

// Random smooth terrain: cosine-bump elevation fields rescaled to the kind's
// ranges and kept under the kind's slope caps, vegetation patches hitting the
// vegetation ratio, OOD flags where elevation/slope leave the train-kind
// envelope, and GT traction PMFs attached per cell.
TerrainMap gen_terrain(const TerrainConfig& cfg, std::uint64_t seed);

// GT traction: dirt is a discretized truncated Gaussian whose mean decreases
// with slope; vegetation mixes low/high modes weighted by the elevation's
// position in the kind's vegetation range. Linear and angular tractions share
// the distribution.
std::pair<Pmf, Pmf> gt_traction_dist(int semantic, double elevation,
                                     double slope, const KindRanges& ranges,
                                     int bins);

// Gradient magnitude of the elevation by central differences (one-sided at
// map borders), resolution aware.
std::vector<double> slope_field(const std::vector<double>& elevation, int width,
                                int height, double resolution);

struct CollectionPath {
  std::vector<Eigen::Vector2d> waypoints;  // meters, inside map bounds
  int samples_per_cell = 3;                // base measurement count
  int multiplier = 1;                      // 10^k data-abundance factor
};

CollectionPath circular_path(const TerrainMap& map, int samples_per_cell = 3,
                             int multiplier = 1);

// Draw (base * multiplier) iid traction pairs from the GT PMFs of every
// distinct cell visited by the path; deterministic per seed.
std::vector<TractionSample> simulate_collection(const TerrainMap& map,
                                                const CollectionPath& path,
                                                int multiplier,
                                                std::uint64_t seed);

// Rank-statistic AUC-ROC (tie-averaged) and step-integrated AUC-PR.
double auc_roc(const std::vector<double>& scores,
               const std::vector<bool>& labels);
double auc_pr(const std::vector<double>& scores,
              const std::vector<bool>& labels);

// Scores are negated confidences; labels are the map's OOD flags.
std::pair<double, double> ood_detection_metrics(const PlanningMap& pm,
                                                const TerrainMap& map);

}  // namespace evora
