#include "evora/maps.hpp"

#include <fstream>

namespace evora {

using nlohmann::json;

namespace {
constexpr int kMapFormatVersion = 1;

json pmf_probs_json(const Pmf& pmf) {
  json arr = json::array();
  for (Eigen::Index i = 0; i < pmf.bins(); ++i) arr.push_back(pmf.probs[i]);
  return arr;
}

Pmf pmf_from_probs_json(const json& arr, int bins) {
  require(static_cast<int>(arr.size()) == bins, "map file: pmf size mismatch");
  Vec probs(bins);
  for (int i = 0; i < bins; ++i) probs[i] = arr[i].get<double>();
  return make_pmf(std::move(probs));
}

json map_header(int width, int height, double resolution, int bins) {
  return json{{"version", kMapFormatVersion},
              {"width", width},
              {"height", height},
              {"resolution", resolution},
              {"bins", bins},
              {"semantics", semantic_table()}};
}

void check_header(const json& j) {
  if (!j.contains("version") || j["version"].get<int>() != kMapFormatVersion) {
    throw DataError("map file: unsupported version");
  }
}

void write_json(const json& j, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open for writing: " + path.string());
  out << j.dump() << "\n";
}

json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open: " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw DataError("bad JSON in " + path.string() + ": " + e.what());
  }
  return j;
}

}  // namespace

const std::vector<std::string>& semantic_table() {
  static const std::vector<std::string> table = {"dirt", "vegetation"};
  return table;
}

json terrain_map_to_json(const TerrainMap& map) {
  json j = map_header(map.width, map.height, map.resolution, map.bins);
  j["format"] = "terrain_map";
  j["kind"] = map.kind;
  j["metadata"] = map.metadata;
  json cells = json::array();
  for (const auto& cell : map.cells) {
    cells.push_back(json{{"sem", cell.semantic},
                         {"elev", cell.elevation},
                         {"slope", cell.slope},
                         {"ood", cell.ood},
                         {"gt_lin", pmf_probs_json(cell.gt_lin)},
                         {"gt_ang", pmf_probs_json(cell.gt_ang)}});
  }
  j["cells"] = std::move(cells);
  return j;
}

TerrainMap terrain_map_from_json(const json& j) {
  check_header(j);
  TerrainMap map;
  map.width = j.at("width").get<int>();
  map.height = j.at("height").get<int>();
  map.resolution = j.at("resolution").get<double>();
  map.bins = j.at("bins").get<int>();
  map.kind = j.value("kind", "train");
  map.metadata = j.value("metadata", json::object());
  const auto& cells = j.at("cells");
  if (static_cast<int>(cells.size()) != map.width * map.height) {
    throw DataError("map file: cell count mismatch");
  }
  map.cells.reserve(cells.size());
  for (const auto& c : cells) {
    TerrainCell cell;
    cell.semantic = c.at("sem").get<int>();
    cell.elevation = c.at("elev").get<double>();
    cell.slope = c.at("slope").get<double>();
    cell.ood = c.at("ood").get<bool>();
    cell.gt_lin = pmf_from_probs_json(c.at("gt_lin"), map.bins);
    cell.gt_ang = pmf_from_probs_json(c.at("gt_ang"), map.bins);
    map.cells.push_back(std::move(cell));
  }
  return map;
}

void save_terrain_map(const TerrainMap& map,
                      const std::filesystem::path& path) {
  write_json(terrain_map_to_json(map), path);
}

TerrainMap load_terrain_map(const std::filesystem::path& path) {
  return terrain_map_from_json(read_json(path));
}

json planning_map_to_json(const PlanningMap& map) {
  json j = map_header(map.width, map.height, map.resolution, map.bins);
  j["format"] = "planning_map";
  json cells = json::array();
  for (const auto& cell : map.cells) {
    cells.push_back(json{{"post_lin", pmf_probs_json(cell.post_lin)},
                         {"post_ang", pmf_probs_json(cell.post_ang)},
                         {"confidence", cell.confidence},
                         {"aux", cell.aux_penalty}});
  }
  j["cells"] = std::move(cells);
  return j;
}

PlanningMap planning_map_from_json(const json& j) {
  check_header(j);
  PlanningMap map;
  map.width = j.at("width").get<int>();
  map.height = j.at("height").get<int>();
  map.resolution = j.at("resolution").get<double>();
  map.bins = j.at("bins").get<int>();
  const auto& cells = j.at("cells");
  if (static_cast<int>(cells.size()) != map.width * map.height) {
    throw DataError("map file: cell count mismatch");
  }
  map.cells.reserve(cells.size());
  for (const auto& c : cells) {
    PlanningCell cell;
    cell.post_lin = pmf_from_probs_json(c.at("post_lin"), map.bins);
    cell.post_ang = pmf_from_probs_json(c.at("post_ang"), map.bins);
    cell.confidence = c.at("confidence").get<double>();
    cell.aux_penalty = c.at("aux").get<double>();
    map.cells.push_back(std::move(cell));
  }
  return map;
}

void save_planning_map(const PlanningMap& map,
                       const std::filesystem::path& path) {
  write_json(planning_map_to_json(map), path);
}

PlanningMap load_planning_map(const std::filesystem::path& path) {
  return planning_map_from_json(read_json(path));
}

void save_traction_samples(const std::vector<TractionSample>& samples,
                           const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open for writing: " + path.string());
  for (const auto& s : samples) {
    int semantic = 0;
    for (Eigen::Index i = 0; i < s.feature.semantic_onehot.size(); ++i) {
      if (s.feature.semantic_onehot[i] > 0.5) semantic = static_cast<int>(i);
    }
    out << json{{"elevation", s.feature.elevation},
                {"semantic", semantic},
                {"psi_lin", s.psi_lin},
                {"psi_ang", s.psi_ang},
                {"cell_row", s.row},
                {"cell_col", s.col}}
               .dump()
        << "\n";
  }
}

std::vector<TractionSample> load_traction_samples(
    const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open: " + path.string());
  std::vector<TractionSample> samples;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw DataError("bad JSONL in " + path.string() + ": " + e.what());
    }
    TractionSample s;
    s.feature = make_feature(j.at("elevation").get<double>(),
                             j.at("semantic").get<int>(), kSemanticClasses);
    s.psi_lin = j.at("psi_lin").get<double>();
    s.psi_ang = j.at("psi_ang").get<double>();
    s.row = j.at("cell_row").get<int>();
    s.col = j.at("cell_col").get<int>();
    samples.push_back(std::move(s));
  }
  return samples;
}

}  // namespace evora
