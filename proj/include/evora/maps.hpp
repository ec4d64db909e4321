#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "evora/feature.hpp"
#include "evora/pmf.hpp"

namespace evora {

inline constexpr int kDirt = 0;
inline constexpr int kVegetation = 1;
inline constexpr int kSemanticClasses = 2;

const std::vector<std::string>& semantic_table();

struct TerrainCell {
  int semantic = kDirt;
  double elevation = 0.0;
  double slope = 0.0;
  Pmf gt_lin, gt_ang;
  bool ood = false;
};

struct TerrainMap {
  int width = 0, height = 0;
  double resolution = 0.5;
  int bins = 20;
  std::string kind = "train";
  std::vector<TerrainCell> cells;  // row-major
  nlohmann::json metadata;

  TerrainCell& cell(int row, int col) { return cells[row * width + col]; }
  const TerrainCell& cell(int row, int col) const {
    return cells[row * width + col];
  }
  bool in_bounds(double x, double y) const {
    return x >= 0.0 && y >= 0.0 && x < width * resolution &&
           y < height * resolution;
  }
  int col_at(double x) const { return static_cast<int>(x / resolution); }
  int row_at(double y) const { return static_cast<int>(y / resolution); }

  TerrainFeature feature_at(int row, int col) const {
    return make_feature(cell(row, col).elevation, cell(row, col).semantic,
                        kSemanticClasses);
  }
};

struct PlanningCell {
  Pmf post_lin, post_ang;
  double confidence = 1.0;
  double aux_penalty = 0.0;
};

struct PlanningMap {
  int width = 0, height = 0;
  double resolution = 0.5;
  int bins = 20;
  std::vector<PlanningCell> cells;  // row-major

  PlanningCell& cell(int row, int col) { return cells[row * width + col]; }
  const PlanningCell& cell(int row, int col) const {
    return cells[row * width + col];
  }
  bool in_bounds(double x, double y) const {
    return x >= 0.0 && y >= 0.0 && x < width * resolution &&
           y < height * resolution;
  }
  int col_at(double x) const { return static_cast<int>(x / resolution); }
  int row_at(double y) const { return static_cast<int>(y / resolution); }
};

// Samples gathered along a collection path.
struct TractionSample {
  TerrainFeature feature;
  double psi_lin = 0.0;
  double psi_ang = 0.0;
  int row = 0, col = 0;
};

// Versioned JSON map files: a header object followed by row-major cell
// records. Doubles round-trip exactly through the serializer.
void save_terrain_map(const TerrainMap& map, const std::filesystem::path& path);
TerrainMap load_terrain_map(const std::filesystem::path& path);
nlohmann::json terrain_map_to_json(const TerrainMap& map);
TerrainMap terrain_map_from_json(const nlohmann::json& j);

void save_planning_map(const PlanningMap& map,
                       const std::filesystem::path& path);
PlanningMap load_planning_map(const std::filesystem::path& path);
nlohmann::json planning_map_to_json(const PlanningMap& map);
PlanningMap planning_map_from_json(const nlohmann::json& j);

// JSONL, one sample per line:
// {elevation, semantic, psi_lin, psi_ang, cell_row, cell_col}
void save_traction_samples(const std::vector<TractionSample>& samples,
                           const std::filesystem::path& path);
std::vector<TractionSample> load_traction_samples(
    const std::filesystem::path& path);

}  // namespace evora
