#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "evora/rng.hpp"
#include "evora/terrain.hpp"

using namespace evora;

namespace {

int local_maxima(const Vec& probs) {
  int count = 0;
  for (Eigen::Index b = 0; b < probs.size(); ++b) {
    const double left = b > 0 ? probs[b - 1] : -1.0;
    const double right = b + 1 < probs.size() ? probs[b + 1] : -1.0;
    if (probs[b] > left && probs[b] > right && probs[b] > 1e-6) ++count;
  }
  return count;
}

double argmax_center(const Pmf& pmf) {
  Eigen::Index best = 0;
  pmf.probs.maxCoeff(&best);
  return 0.5 * (pmf.bin_edges[best] + pmf.bin_edges[best + 1]);
}

}  // namespace

TEST_CASE("gt traction distributions") {
  const KindRanges train = kind_ranges("train");

  // flat dirt: unimodal near 0.9
  auto [dirt_lin, dirt_ang] = gt_traction_dist(kDirt, -0.1, 0.0, train, 20);
  CHECK(std::abs(argmax_center(dirt_lin) - 0.9) < 0.051);
  CHECK(local_maxima(dirt_lin.probs) == 1);
  CHECK(dirt_lin.probs.sum() == doctest::Approx(1.0).epsilon(1e-9));
  CHECK((dirt_lin.probs - dirt_ang.probs).norm() == 0.0);

  // steep dirt: mean drops to 0.4
  auto [steep, steep_ang] = gt_traction_dist(kDirt, -0.1, 0.3, train, 20);
  CHECK(std::abs(argmax_center(steep) - 0.4) < 0.051);

  // vegetation at the range midpoint: bimodal near 0.1 and 0.9
  auto [veg_mid, mid_ang] = gt_traction_dist(kVegetation, 0.5, 0.0, train, 20);
  CHECK(local_maxima(veg_mid.probs) == 2);
  CHECK(veg_mid.probs.head(6).sum() == doctest::Approx(0.5).epsilon(0.01));

  // vegetation at the range extremes: unimodal
  auto [veg_max, a1] = gt_traction_dist(kVegetation, 0.7, 0.0, train, 20);
  CHECK(local_maxima(veg_max.probs) == 1);
  CHECK(std::abs(argmax_center(veg_max) - 0.9) < 0.051);
  auto [veg_min, a2] = gt_traction_dist(kVegetation, 0.3, 0.0, train, 20);
  CHECK(local_maxima(veg_min.probs) == 1);
  CHECK(std::abs(argmax_center(veg_min) - 0.1) < 0.051);
}

TEST_CASE("train terrain honors table ranges") {
  TerrainConfig cfg;
  const TerrainMap map = gen_terrain(cfg, 101);
  REQUIRE(map.width == 60);
  REQUIRE(map.height == 60);
  REQUIRE(static_cast<int>(map.cells.size()) == 3600);

  const KindRanges train = kind_ranges("train");
  int veg = 0;
  for (const auto& cell : map.cells) {
    if (cell.semantic == kDirt) {
      CHECK(cell.elevation >= train.dirt_lo - 1e-12);
      CHECK(cell.elevation <= train.dirt_hi + 1e-12);
      CHECK(cell.slope <= train.dirt_max_slope + 1e-9);
    } else {
      ++veg;
      CHECK(cell.slope <= train.veg_max_slope + 1e-9);
      CHECK(cell.elevation <= train.veg_hi + 1e-12);
    }
    validate_pmf(cell.gt_lin);
    validate_pmf(cell.gt_ang);
  }
  const double ratio = static_cast<double>(veg) / 3600.0;
  CHECK(ratio == doctest::Approx(0.2).epsilon(0.25));
  CHECK(std::abs(ratio - 0.2) <= 0.05);

  // stored slope equals recomputed central differences
  std::vector<double> elev(map.cells.size());
  for (std::size_t i = 0; i < map.cells.size(); ++i) elev[i] = map.cells[i].elevation;
  const auto recomputed = slope_field(elev, map.width, map.height, map.resolution);
  for (std::size_t i = 0; i < map.cells.size(); ++i) {
    CHECK(std::abs(recomputed[i] - map.cells[i].slope) < 1e-9);
  }
}

TEST_CASE("terrain generation is deterministic") {
  TerrainConfig cfg;
  cfg.kind = "ood1";
  const TerrainMap a = gen_terrain(cfg, 7);
  const TerrainMap b = gen_terrain(cfg, 7);
  for (std::size_t i = 0; i < a.cells.size(); ++i) {
    CHECK(a.cells[i].elevation == b.cells[i].elevation);
    CHECK(a.cells[i].semantic == b.cells[i].semantic);
    CHECK(a.cells[i].ood == b.cells[i].ood);
  }
  const TerrainMap c = gen_terrain(cfg, 8);
  bool any_diff = false;
  for (std::size_t i = 0; i < a.cells.size(); ++i) {
    any_diff = any_diff || (a.cells[i].elevation != c.cells[i].elevation);
  }
  CHECK(any_diff);
}

TEST_CASE("ood kinds hit the mask ratio and slope caps") {
  for (const char* kind : {"ood1", "ood2"}) {
    for (std::uint64_t seed : {11u, 12u, 13u}) {
      TerrainConfig cfg;
      cfg.kind = kind;
      const TerrainMap map = gen_terrain(cfg, seed);
      const KindRanges R = kind_ranges(kind);
      int flagged = 0, veg = 0;
      for (const auto& cell : map.cells) {
        flagged += cell.ood;
        veg += cell.semantic == kVegetation;
        CHECK(cell.elevation >= R.dirt_lo - 1e-9);
        CHECK(cell.elevation <= std::max(R.dirt_hi, R.has_vegetation() ? R.veg_hi : R.dirt_hi) + 1e-9);
        if (cell.semantic == kDirt) {
          CHECK(cell.slope <= R.dirt_max_slope + 1e-9);
        } else {
          CHECK(cell.slope <= R.veg_max_slope + 1e-9);
        }
      }
      const double ratio = flagged / 3600.0;
      CHECK(std::abs(ratio - 0.5) <= 0.05);
      if (std::string(kind) == "ood2") CHECK(veg == 0);
    }
  }
}

TEST_CASE("invalid configs are rejected") {
  TerrainConfig cfg;
  cfg.kind = "swamp";
  CHECK_THROWS_AS(gen_terrain(cfg, 1), ConfigError);
  TerrainConfig ratio_cfg;
  ratio_cfg.veg_ratio_override = 1.5;
  CHECK_THROWS_AS(gen_terrain(ratio_cfg, 1), ConfigError);
}

TEST_CASE("collection counting and support") {
  TerrainConfig cfg;
  cfg.width = 20;
  cfg.height = 20;
  const TerrainMap map = gen_terrain(cfg, 3);

  CollectionPath path;
  path.samples_per_cell = 3;
  for (int c = 0; c < 10; ++c) {
    path.waypoints.emplace_back((c + 0.5) * map.resolution, 2.25);
    path.waypoints.emplace_back((c + 0.6) * map.resolution, 2.25);  // repeat
  }
  const auto samples = simulate_collection(map, path, 1, 17);
  CHECK(samples.size() == 30);
  for (const auto& s : samples) {
    CHECK(s.psi_lin >= 0.0);
    CHECK(s.psi_lin <= 1.0);
    CHECK(s.psi_ang >= 0.0);
    CHECK(s.psi_ang <= 1.0);
  }

  // law of large numbers: the empirical histogram approaches the GT PMF
  CollectionPath one_cell;
  one_cell.samples_per_cell = 10000;
  one_cell.waypoints.emplace_back(5.25, 5.25);
  const auto big = simulate_collection(map, one_cell, 1, 23);
  REQUIRE(big.size() == 10000);
  std::vector<double> values;
  values.reserve(big.size());
  for (const auto& s : big) values.push_back(s.psi_lin);
  const auto [hist, count] = empirical_pmf(values, map.bins);
  const auto& cell = map.cell(map.row_at(5.25), map.col_at(5.25));
  CHECK(total_variation(hist.probs, cell.gt_lin.probs) < 0.05);

  // deterministic per seed
  const auto again = simulate_collection(map, one_cell, 1, 23);
  CHECK(again[123].psi_lin == big[123].psi_lin);

  // circular path fits in bounds and touches many cells
  const auto circle = circular_path(map);
  CHECK(circle.waypoints.size() == 720);
  const auto circle_samples = simulate_collection(map, circle, 1, 5);
  CHECK(circle_samples.size() > 100);
}

TEST_CASE("auc metrics") {
  // perfect separation
  std::vector<double> scores = {0.9, 0.8, 0.2, 0.1};
  std::vector<bool> labels = {true, true, false, false};
  CHECK(auc_roc(scores, labels) == doctest::Approx(1.0));
  CHECK(auc_pr(scores, labels) == doctest::Approx(1.0));

  // random scores on shuffled labels hover near chance
  Rng rng(9);
  std::vector<double> rand_scores(10000);
  std::vector<bool> rand_labels(10000);
  for (int i = 0; i < 10000; ++i) {
    rand_scores[i] = rng.uniform();
    rand_labels[i] = rng.uniform() < 0.4;
  }
  CHECK(std::abs(auc_roc(rand_scores, rand_labels) - 0.5) < 0.02);

  // duplicating the dataset leaves both metrics unchanged
  std::vector<double> dup_scores = scores;
  std::vector<bool> dup_labels = labels;
  scores.push_back(0.5);
  labels.push_back(false);
  dup_scores = scores;
  dup_labels = labels;
  dup_scores.insert(dup_scores.end(), scores.begin(), scores.end());
  dup_labels.insert(dup_labels.end(), labels.begin(), labels.end());
  CHECK(auc_roc(dup_scores, dup_labels) == doctest::Approx(auc_roc(scores, labels)));
  CHECK(auc_pr(dup_scores, dup_labels) == doctest::Approx(auc_pr(scores, labels)));

  // single-class labels rejected
  std::vector<bool> ones = {true, true, true, true, true};
  CHECK_THROWS_AS(auc_roc(scores, ones), DataError);
}

TEST_CASE("map and sample serialization round-trips") {
  TerrainConfig cfg;
  cfg.width = 12;
  cfg.height = 10;
  cfg.kind = "test";
  const TerrainMap map = gen_terrain(cfg, 31);

  const auto dir = std::filesystem::temp_directory_path() / "evora_test_io";
  std::filesystem::create_directories(dir);
  const auto map_path = dir / "map.json";
  save_terrain_map(map, map_path);
  const TerrainMap loaded = load_terrain_map(map_path);
  REQUIRE(loaded.cells.size() == map.cells.size());
  CHECK(loaded.kind == map.kind);
  for (std::size_t i = 0; i < map.cells.size(); ++i) {
    CHECK(loaded.cells[i].elevation == map.cells[i].elevation);
    CHECK(loaded.cells[i].slope == map.cells[i].slope);
    CHECK(loaded.cells[i].semantic == map.cells[i].semantic);
    CHECK(loaded.cells[i].ood == map.cells[i].ood);
    CHECK((loaded.cells[i].gt_lin.probs - map.cells[i].gt_lin.probs).norm() == 0.0);
  }

  const auto samples = simulate_collection(map, circular_path(map), 1, 3);
  const auto samples_path = dir / "samples.jsonl";
  save_traction_samples(samples, samples_path);
  const auto loaded_samples = load_traction_samples(samples_path);
  REQUIRE(loaded_samples.size() == samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    CHECK(loaded_samples[i].psi_lin == samples[i].psi_lin);
    CHECK(loaded_samples[i].psi_ang == samples[i].psi_ang);
    CHECK(loaded_samples[i].feature.elevation == samples[i].feature.elevation);
    CHECK(loaded_samples[i].row == samples[i].row);
  }

  PlanningMap pm;
  pm.width = 3;
  pm.height = 2;
  pm.bins = 5;
  pm.cells.resize(6);
  for (auto& cell : pm.cells) {
    cell.post_lin = uniform_pmf(5);
    cell.post_ang = point_mass_pmf(5, 2);
    cell.confidence = 0.25;
    cell.aux_penalty = 1.5;
  }
  const auto pm_path = dir / "pm.json";
  save_planning_map(pm, pm_path);
  const PlanningMap pm2 = load_planning_map(pm_path);
  CHECK(pm2.cells[3].confidence == 0.25);
  CHECK(pm2.cells[3].aux_penalty == 1.5);
  CHECK((pm2.cells[3].post_lin.probs - pm.cells[3].post_lin.probs).norm() == 0.0);

  std::filesystem::remove_all(dir);
}
