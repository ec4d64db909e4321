#include "evora/terrain.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "evora/rng.hpp"

namespace evora {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
}

KindRanges kind_ranges(const std::string& kind) {
  KindRanges r;
  r.kind = kind;
  if (kind == "train") {
    r.dirt_lo = -0.2;
    r.dirt_hi = 0.0;
    r.veg_lo = 0.3;
    r.veg_hi = 0.7;
    r.dirt_max_slope = 0.3;
    r.veg_max_slope = 0.4;
    r.veg_ratio = 0.2;
    r.ood_ratio = kNaN;
  } else if (kind == "test") {
    r.dirt_lo = -0.3;
    r.dirt_hi = 0.0;
    r.veg_lo = 0.5;
    r.veg_hi = 1.8;
    r.dirt_max_slope = 0.7;
    r.veg_max_slope = 0.9;
    r.veg_ratio = 0.3;
    r.ood_ratio = kNaN;
  } else if (kind == "ood1") {
    r.dirt_lo = -0.5;
    r.dirt_hi = 0.1;
    r.veg_lo = 0.4;
    r.veg_hi = 1.8;
    r.dirt_max_slope = 0.7;
    r.veg_max_slope = 1.0;
    r.veg_ratio = 0.3;
    r.ood_ratio = 0.5;
  } else if (kind == "ood2") {
    r.dirt_lo = -0.6;
    r.dirt_hi = 2.0;
    r.veg_lo = kNaN;
    r.veg_hi = kNaN;
    r.dirt_max_slope = 0.9;
    r.veg_max_slope = kNaN;
    r.veg_ratio = 0.0;
    r.ood_ratio = 0.5;
  } else {
    throw ConfigError("unknown terrain kind: " + kind);
  }
  return r;
}

std::vector<double> slope_field(const std::vector<double>& elevation, int width,
                                int height, double resolution) {
  std::vector<double> slope(elevation.size());
  for (int r = 0; r < height; ++r) {
    for (int c = 0; c < width; ++c) {
      const int c0 = std::max(c - 1, 0), c1 = std::min(c + 1, width - 1);
      const int r0 = std::max(r - 1, 0), r1 = std::min(r + 1, height - 1);
      const double gx = (elevation[r * width + c1] - elevation[r * width + c0]) /
                        ((c1 - c0) * resolution);
      const double gy = (elevation[r1 * width + c] - elevation[r0 * width + c]) /
                        ((r1 - r0) * resolution);
      slope[r * width + c] = std::hypot(gx, gy);
    }
  }
  return slope;
}

namespace {

std::vector<double> cosine_field(int width, int height, double resolution,
                                 double min_wavelength, int n_bumps,
                                 std::uint64_t seed) {
  Rng rng(seed);
  struct Bump {
    double kx, ky, phase, amp;
  };
  std::vector<Bump> bumps(n_bumps);
  const double max_wavelength =
      std::max(4.0 * min_wavelength, std::max(width, height) * resolution);
  for (auto& b : bumps) {
    const double wavelength = rng.uniform(min_wavelength, max_wavelength);
    const double heading = rng.uniform(0.0, 2.0 * M_PI);
    const double k = 2.0 * M_PI / wavelength;
    b.kx = k * std::cos(heading);
    b.ky = k * std::sin(heading);
    b.phase = rng.uniform(0.0, 2.0 * M_PI);
    b.amp = rng.uniform(0.5, 1.0);
  }
  std::vector<double> field(static_cast<std::size_t>(width) * height);
  double lo = 1e300, hi = -1e300;
  for (int r = 0; r < height; ++r) {
    for (int c = 0; c < width; ++c) {
      const double x = (c + 0.5) * resolution;
      const double y = (r + 0.5) * resolution;
      double v = 0.0;
      for (const auto& b : bumps) {
        v += b.amp * std::cos(b.kx * x + b.ky * y + b.phase);
      }
      field[r * width + c] = v;
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  const double span = hi - lo;
  for (auto& v : field) v = span > 1e-12 ? (v - lo) / span : 0.5;
  return field;
}

// Chebyshev distance to the nearest cell outside the mask; map borders count
// as outside, so masked border cells get distance 1.
std::vector<int> interior_distance(const std::vector<char>& mask, int width,
                                   int height) {
  constexpr int kInf = 1 << 20;
  std::vector<int> dist(mask.size());
  for (std::size_t i = 0; i < mask.size(); ++i) dist[i] = mask[i] ? kInf : 0;
  auto at = [&](int r, int c) -> int {
    if (r < 0 || c < 0 || r >= height || c >= width) return 0;
    return dist[r * width + c];
  };
  for (int r = 0; r < height; ++r) {
    for (int c = 0; c < width; ++c) {
      if (!mask[r * width + c]) continue;
      int best = dist[r * width + c];
      best = std::min(best, at(r - 1, c - 1) + 1);
      best = std::min(best, at(r - 1, c) + 1);
      best = std::min(best, at(r - 1, c + 1) + 1);
      best = std::min(best, at(r, c - 1) + 1);
      dist[r * width + c] = best;
    }
  }
  for (int r = height - 1; r >= 0; --r) {
    for (int c = width - 1; c >= 0; --c) {
      if (!mask[r * width + c]) continue;
      int best = dist[r * width + c];
      best = std::min(best, at(r + 1, c + 1) + 1);
      best = std::min(best, at(r + 1, c) + 1);
      best = std::min(best, at(r + 1, c - 1) + 1);
      best = std::min(best, at(r, c + 1) + 1);
      dist[r * width + c] = best;
    }
  }
  return dist;
}

// top-count cells of a field (ties broken by index)
std::vector<char> top_fraction_mask(const std::vector<double>& field,
                                    int count) {
  std::vector<int> order(field.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (field[a] != field[b]) return field[a] > field[b];
    return a < b;
  });
  std::vector<char> mask(field.size(), 0);
  for (int i = 0; i < count && i < static_cast<int>(order.size()); ++i) {
    mask[order[i]] = 1;
  }
  return mask;
}

// affine map of a normalized field into [lo, hi], shrunk around the interval
// center until the central-difference slope stays within budget
std::vector<double> scale_to_range(const std::vector<double>& field, int width,
                                   int height, double resolution, double lo,
                                   double hi, double slope_budget) {
  std::vector<double> mapped(field.size());
  for (std::size_t i = 0; i < field.size(); ++i) mapped[i] = lo + (hi - lo) * field[i];
  const auto slopes = slope_field(mapped, width, height, resolution);
  const double peak = *std::max_element(slopes.begin(), slopes.end());
  if (peak > slope_budget && peak > 0.0) {
    const double shrink = slope_budget / peak;
    const double center = 0.5 * (lo + hi);
    for (auto& v : mapped) v = center + shrink * (v - center);
  }
  return mapped;
}

struct Piecewise {
  // the kind range minus the train range, in one or two pieces
  bool has_low = false, has_high = false;
  double low_lo = 0, low_hi = 0, high_lo = 0, high_hi = 0;

  // Plateau draw: pieces are chosen proportionally to their width and the
  // value lands in the 60% of the piece farthest from the train boundary, so
  // every blob separates cleanly from in-distribution elevations.
  double plateau(double u_select, double u_position) const {
    const double w_low = has_low ? low_hi - low_lo : 0.0;
    const double w_high = has_high ? high_hi - high_lo : 0.0;
    const bool pick_low =
        has_low && (!has_high || u_select < w_low / (w_low + w_high));
    if (pick_low) return low_lo + 0.6 * u_position * w_low;
    return high_lo + (0.4 + 0.6 * u_position) * w_high;
  }
};

Piecewise out_of_train_pieces(double kind_lo, double kind_hi, double train_lo,
                              double train_hi, double margin) {
  Piecewise p;
  if (kind_lo < train_lo - margin) {
    p.has_low = true;
    p.low_lo = kind_lo;
    p.low_hi = train_lo - margin;
  }
  if (kind_hi > train_hi + margin) {
    p.has_high = true;
    p.high_lo = train_hi + margin;
    p.high_hi = kind_hi;
  }
  require(p.has_low || p.has_high,
          "terrain: kind range does not extend beyond the train range");
  return p;
}

double lerp(double a, double b, double t) { return a + (b - a) * t; }

double gaussian_cdf(double x) { return 0.5 * (1.0 + std::erf(x / M_SQRT2)); }

}  // namespace

std::pair<Pmf, Pmf> gt_traction_dist(int semantic, double elevation,
                                     double slope, const KindRanges& ranges,
                                     int bins) {
  require(bins >= 2, "gt_traction_dist: need at least two bins");
  constexpr double kStd = 0.05;
  const Vec edges = uniform_edges(bins);
  Vec probs = Vec::Zero(bins);
  auto add_gaussian = [&](double mu, double weight) {
    if (weight <= 0.0) return;
    for (int b = 0; b < bins; ++b) {
      probs[b] += weight * (gaussian_cdf((edges[b + 1] - mu) / kStd) -
                            gaussian_cdf((edges[b] - mu) / kStd));
    }
  };
  if (semantic == kDirt) {
    const double ratio =
        std::clamp(slope / ranges.dirt_max_slope, 0.0, 1.0);
    add_gaussian(0.9 - 0.5 * ratio, 1.0);
  } else {
    require(std::isfinite(ranges.veg_lo) && std::isfinite(ranges.veg_hi),
            "gt_traction_dist: kind has no vegetation ranges");
    const double w = std::clamp(
        (elevation - ranges.veg_lo) / (ranges.veg_hi - ranges.veg_lo), 0.0, 1.0);
    add_gaussian(0.9, w);
    add_gaussian(0.1, 1.0 - w);
  }
  probs /= probs.sum();
  Pmf pmf = make_pmf(std::move(probs));
  return {pmf, pmf};
}

namespace {

struct GenFields {
  std::vector<double> ground_in;  // dirt elevation inside the working range
  std::vector<double> veg_in;     // canopy target inside the working range
  std::vector<char> veg_mask;
  std::vector<int> veg_dist;
  Piecewise dirt_out, veg_out;
  std::uint64_t plateau_seed = 0;
  int ramp_veg = 4;
  int ramp_ood_dirt = 4, ramp_ood_veg = 4;
};

// 8-connected components of the mask, labeled in scan order; -1 outside.
std::vector<int> label_blobs(const std::vector<char>& mask, int width,
                             int height) {
  std::vector<int> label(mask.size(), -1);
  std::vector<int> stack;
  int next = 0;
  for (int start = 0; start < static_cast<int>(mask.size()); ++start) {
    if (!mask[start] || label[start] >= 0) continue;
    const int id = next++;
    stack.push_back(start);
    label[start] = id;
    while (!stack.empty()) {
      const int at = stack.back();
      stack.pop_back();
      const int r = at / width, c = at % width;
      for (int dr = -1; dr <= 1; ++dr) {
        for (int dc = -1; dc <= 1; ++dc) {
          const int rr = r + dr, cc = c + dc;
          if (rr < 0 || cc < 0 || rr >= height || cc >= width) continue;
          const int idx = rr * width + cc;
          if (mask[idx] && label[idx] < 0) {
            label[idx] = id;
            stack.push_back(idx);
          }
        }
      }
    }
  }
  return label;
}

struct BuiltTerrain {
  std::vector<double> elevation;
  std::vector<double> slope;
  std::vector<char> flags;
  double flag_ratio = 0.0;
};

BuiltTerrain build_terrain(const GenFields& f, const KindRanges& R,
                           const KindRanges& train, int width, int height,
                           double resolution,
                           const std::vector<char>* region) {
  const std::size_t n = f.ground_in.size();
  std::vector<int> region_dist, blob;
  if (region != nullptr) {
    region_dist = interior_distance(*region, width, height);
    blob = label_blobs(*region, width, height);
  }
  // each OOD blob rises (or sinks) to one out-of-train plateau; constant
  // plateaus keep the interior gradient at zero so only the budgeted edge
  // ramps contribute slope
  auto dirt_plateau = [&](int id) {
    return f.dirt_out.plateau(hash_uniform(f.plateau_seed, id, 2, 0),
                              hash_uniform(f.plateau_seed, id, 0, 0));
  };
  auto veg_plateau = [&](int id) {
    return f.veg_out.plateau(hash_uniform(f.plateau_seed, id, 3, 0),
                             hash_uniform(f.plateau_seed, id, 1, 0));
  };

  BuiltTerrain out;
  out.elevation.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    int blob_id = -1;
    double push_dirt = 0.0, push_veg = 0.0;
    if (region != nullptr && (*region)[i]) {
      blob_id = blob[i];
      push_dirt =
          std::clamp((region_dist[i] - 1.0) / f.ramp_ood_dirt, 0.0, 1.0);
      push_veg = std::clamp((region_dist[i] - 1.0) / f.ramp_ood_veg, 0.0, 1.0);
    }
    double base = f.ground_in[i];
    if (push_dirt > 0.0) base = lerp(base, dirt_plateau(blob_id), push_dirt);
    if (!f.veg_mask.empty() && f.veg_mask[i]) {
      double target = f.veg_in[i];
      if (push_veg > 0.0) target = lerp(target, veg_plateau(blob_id), push_veg);
      const double edge =
          std::clamp((f.veg_dist[i] - 1.0) / f.ramp_veg, 0.0, 1.0);
      out.elevation[i] = lerp(base, target, edge);
    } else {
      out.elevation[i] = base;
    }
  }

  // relaxation safety net: where additive gradient sources exceed the class
  // slope cap, blend toward the 4-neighbor mean (convex, range preserving)
  const auto cap_of = [&](std::size_t i) {
    return (!f.veg_mask.empty() && f.veg_mask[i]) ? R.veg_max_slope
                                                  : R.dirt_max_slope;
  };
  for (int sweep = 0; sweep < 80; ++sweep) {
    const auto slopes = slope_field(out.elevation, width, height, resolution);
    int violations = 0;
    std::vector<double> next = out.elevation;
    for (int r = 0; r < height; ++r) {
      for (int c = 0; c < width; ++c) {
        const std::size_t i = static_cast<std::size_t>(r) * width + c;
        if (slopes[i] <= 0.98 * cap_of(i)) continue;
        ++violations;
        double total = 0.0;
        int count = 0;
        for (const auto [dr, dc] :
             {std::pair{-1, 0}, {1, 0}, {0, -1}, {0, 1}}) {
          const int rr = r + dr, cc = c + dc;
          if (rr < 0 || cc < 0 || rr >= height || cc >= width) continue;
          total += out.elevation[rr * width + cc];
          ++count;
        }
        next[i] = 0.5 * out.elevation[i] + 0.5 * total / count;
      }
    }
    if (violations == 0) break;
    out.elevation = std::move(next);
  }
  out.slope = slope_field(out.elevation, width, height, resolution);

  // OOD flag: the (elevation, slope) pair leaves the train-kind envelope for
  // the cell's semantic class. Vegetation rims taper down to the dirt ground,
  // so the vegetation envelope's lower bound is the train dirt floor.
  constexpr double kEps = 1e-9;
  out.flags.resize(n);
  int flagged = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double e = out.elevation[i];
    const double s = out.slope[i];
    bool ood;
    if (!f.veg_mask.empty() && f.veg_mask[i]) {
      ood = e < train.dirt_lo - kEps || e > train.veg_hi + kEps ||
            s > train.veg_max_slope + kEps;
    } else {
      ood = e < train.dirt_lo - kEps || e > train.dirt_hi + kEps ||
            s > train.dirt_max_slope + kEps;
    }
    out.flags[i] = ood;
    flagged += ood;
  }
  out.flag_ratio = static_cast<double>(flagged) / static_cast<double>(n);
  return out;
}

}  // namespace

TerrainMap gen_terrain(const TerrainConfig& cfg, std::uint64_t seed) {
  if (cfg.width < 8 || cfg.height < 8) {
    throw ConfigError("gen_terrain: map must be at least 8x8 cells");
  }
  if (cfg.bins < 2) throw ConfigError("gen_terrain: need at least two bins");
  if (cfg.resolution <= 0.0) throw ConfigError("gen_terrain: bad resolution");

  KindRanges R = kind_ranges(cfg.kind);
  const KindRanges train = kind_ranges("train");
  if (std::isfinite(cfg.veg_ratio_override)) {
    if (cfg.veg_ratio_override < 0.0 || cfg.veg_ratio_override > 1.0) {
      throw ConfigError("gen_terrain: vegetation ratio must be in [0, 1]");
    }
    if (cfg.veg_ratio_override > 0.0 && !std::isfinite(R.veg_lo)) {
      throw ConfigError("gen_terrain: kind has no vegetation ranges");
    }
    R.veg_ratio = cfg.veg_ratio_override;
  }

  const int width = cfg.width, height = cfg.height;
  const double res = cfg.resolution;
  const std::size_t n = static_cast<std::size_t>(width) * height;
  const bool is_ood_kind = R.has_ood_target();

  GenFields f;
  f.plateau_seed = derive_seed(seed, "plateau");

  // Diagonal ramps contribute sqrt(2) times the per-axis step, and the base
  // field ripple rides on top of every ramp; both enter the ramp budgets.
  constexpr double kDiag = 1.4142135623730951;

  // dirt ground: the train range for OOD kinds (in-distribution backdrop),
  // the kind's own range otherwise
  const double dirt_in_lo = is_ood_kind ? std::max(R.dirt_lo, train.dirt_lo) : R.dirt_lo;
  const double dirt_in_hi = is_ood_kind ? std::min(R.dirt_hi, train.dirt_hi) : R.dirt_hi;
  const double dirt_cap = is_ood_kind ? train.dirt_max_slope : R.dirt_max_slope;
  f.ground_in = scale_to_range(
      cosine_field(width, height, res, 8.0 * res, 6, derive_seed(seed, "ground")),
      width, height, res, dirt_in_lo, dirt_in_hi, 0.5 * dirt_cap);

  if (R.veg_ratio > 0.0) {
    const auto veg_sel = cosine_field(width, height, res, 20.0 * res, 4,
                                      derive_seed(seed, "veg-select"));
    const int veg_count = static_cast<int>(std::lround(R.veg_ratio * n));
    f.veg_mask = top_fraction_mask(veg_sel, veg_count);
    f.veg_dist = interior_distance(f.veg_mask, width, height);

    const double veg_in_lo =
        is_ood_kind ? std::max(R.veg_lo, train.veg_lo) : R.veg_lo;
    const double veg_in_hi =
        is_ood_kind ? std::min(R.veg_hi, train.veg_hi) : R.veg_hi;
    const double veg_cap = is_ood_kind ? train.veg_max_slope : R.veg_max_slope;
    f.veg_in = scale_to_range(
        cosine_field(width, height, res, 16.0 * res, 5, derive_seed(seed, "canopy")),
        width, height, res, veg_in_lo, veg_in_hi, 0.5 * veg_cap);

    // canopy edge ramp: under the train cap while on in-range dirt, under the
    // kind cap when climbing from a blob floor to an OOD plateau
    int ramp = static_cast<int>(std::ceil(
        (veg_in_hi - train.dirt_lo) * kDiag / (0.9 * veg_cap * res)));
    if (is_ood_kind) {
      ramp = std::max(ramp, static_cast<int>(std::ceil(
                                (R.veg_hi - R.dirt_lo) * kDiag /
                                (0.9 * R.veg_max_slope * res))));
      f.veg_out = out_of_train_pieces(R.veg_lo, R.veg_hi, train.veg_lo,
                                      train.veg_hi, 0.02);
    }
    f.ramp_veg = std::max(3, ramp);
  } else {
    f.veg_mask.assign(n, 0);
    f.veg_dist.assign(n, 0);
  }

  if (is_ood_kind) {
    f.dirt_out = out_of_train_pieces(R.dirt_lo, R.dirt_hi, train.dirt_lo,
                                     train.dirt_hi, 0.02);
    f.ramp_ood_dirt = std::max(
        3, static_cast<int>(std::ceil((R.dirt_hi - R.dirt_lo) * kDiag /
                                      (0.9 * R.dirt_max_slope * res))));
    if (R.veg_ratio > 0.0) {
      f.ramp_ood_veg = std::max(
          3, static_cast<int>(std::ceil((R.veg_hi - R.dirt_lo) * kDiag /
                                        (0.9 * R.veg_max_slope * res))));
    }
  }

  BuiltTerrain built;
  if (is_ood_kind) {
    // scan the designated-region quantile for the realized flag ratio; the
    // relation is close to monotone but blob topology makes it jumpy, so a
    // coarse-to-fine scan beats bisection
    const auto region_field = cosine_field(width, height, res, 16.0 * res, 4,
                                           derive_seed(seed, "ood-region"));
    auto evaluate = [&](double q) {
      const auto candidate =
          top_fraction_mask(region_field, static_cast<int>(std::lround(q * n)));
      return build_terrain(f, R, train, width, height, res, &candidate);
    };
    double best_err = 1e9, best_q = 0.0;
    for (double q = 0.20; q <= 0.96; q += 0.04) {
      const BuiltTerrain trial = evaluate(q);
      const double err = std::abs(trial.flag_ratio - R.ood_ratio);
      if (err < best_err) {
        best_err = err;
        best_q = q;
        built = trial;
      }
    }
    if (best_err > 0.02) {
      for (double dq = -0.035; dq <= 0.035; dq += 0.005) {
        const double q = best_q + dq;
        if (q <= 0.05 || q >= 0.99) continue;
        const BuiltTerrain trial = evaluate(q);
        const double err = std::abs(trial.flag_ratio - R.ood_ratio);
        if (err < best_err) {
          best_err = err;
          built = trial;
        }
      }
    }
    if (best_err > 0.05) {
      throw InternalError("gen_terrain: could not reach the OOD ratio target");
    }
  } else {
    built = build_terrain(f, R, train, width, height, res, nullptr);
  }

  TerrainMap map;
  map.width = width;
  map.height = height;
  map.resolution = res;
  map.bins = cfg.bins;
  map.kind = cfg.kind;
  map.cells.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    TerrainCell& cell = map.cells[i];
    cell.semantic = f.veg_mask[i] ? kVegetation : kDirt;
    cell.elevation = built.elevation[i];
    cell.slope = built.slope[i];
    cell.ood = built.flags[i];
    auto [lin, ang] =
        gt_traction_dist(cell.semantic, cell.elevation, cell.slope, R, cfg.bins);
    cell.gt_lin = std::move(lin);
    cell.gt_ang = std::move(ang);
  }

  int veg_cells = 0, flag_cells = 0;
  for (std::size_t i = 0; i < n; ++i) {
    veg_cells += f.veg_mask[i] != 0;
    flag_cells += built.flags[i] != 0;
  }
  map.metadata = {
      {"seed", seed},
      {"kind", cfg.kind},
      {"veg_ratio_target", R.veg_ratio},
      {"veg_ratio", static_cast<double>(veg_cells) / static_cast<double>(n)},
      {"ood_ratio", static_cast<double>(flag_cells) / static_cast<double>(n)},
      {"gt", {{"dirt_mean_top", 0.9},
              {"dirt_mean_slope_drop", 0.5},
              {"veg_mode_high", 0.9},
              {"veg_mode_low", 0.1},
              {"std", 0.05}}},
      {"ranges", {{"dirt_lo", R.dirt_lo},
                  {"dirt_hi", R.dirt_hi},
                  {"veg_lo", R.veg_lo},
                  {"veg_hi", R.veg_hi},
                  {"dirt_max_slope", R.dirt_max_slope},
                  {"veg_max_slope", R.veg_max_slope}}},
      {"ramp_veg", f.ramp_veg},
      {"ramp_ood", f.ramp_ood_dirt}};
  return map;
}

CollectionPath circular_path(const TerrainMap& map, int samples_per_cell,
                             int multiplier) {
  CollectionPath path;
  path.samples_per_cell = samples_per_cell;
  path.multiplier = multiplier;
  const double cx = 0.5 * map.width * map.resolution;
  const double cy = 0.5 * map.height * map.resolution;
  const double radius = 0.35 * std::min(map.width, map.height) * map.resolution;
  const int n_waypoints = 720;
  path.waypoints.reserve(n_waypoints);
  for (int i = 0; i < n_waypoints; ++i) {
    const double angle = 2.0 * M_PI * i / n_waypoints;
    path.waypoints.emplace_back(cx + radius * std::cos(angle),
                                cy + radius * std::sin(angle));
  }
  return path;
}

namespace {

double draw_within_bin(const Pmf& pmf, Rng& rng) {
  const double u = rng.uniform();
  double acc = 0.0;
  Eigen::Index bin = pmf.bins() - 1;
  for (Eigen::Index b = 0; b < pmf.bins(); ++b) {
    acc += pmf.probs[b];
    if (u < acc) {
      bin = b;
      break;
    }
  }
  return rng.uniform(pmf.bin_edges[bin], pmf.bin_edges[bin + 1]);
}

}  // namespace

std::vector<TractionSample> simulate_collection(const TerrainMap& map,
                                                const CollectionPath& path,
                                                int multiplier,
                                                std::uint64_t seed) {
  require(multiplier >= 1, "simulate_collection: multiplier must be >= 1");
  require(path.samples_per_cell >= 1,
          "simulate_collection: need a positive base count");
  std::vector<char> seen(map.cells.size(), 0);
  std::vector<std::pair<int, int>> visited;
  for (const auto& wp : path.waypoints) {
    require(map.in_bounds(wp.x(), wp.y()),
            "simulate_collection: waypoint outside the map");
    const int row = map.row_at(wp.y());
    const int col = map.col_at(wp.x());
    if (!seen[row * map.width + col]) {
      seen[row * map.width + col] = 1;
      visited.emplace_back(row, col);
    }
  }

  const int per_cell = path.samples_per_cell * multiplier;
  std::vector<TractionSample> samples;
  samples.reserve(visited.size() * per_cell);
  for (const auto& [row, col] : visited) {
    Rng rng(derive_seed(seed, "collect", row, col));
    const TerrainCell& cell = map.cell(row, col);
    for (int k = 0; k < per_cell; ++k) {
      TractionSample s;
      s.feature = map.feature_at(row, col);
      s.psi_lin = draw_within_bin(cell.gt_lin, rng);
      s.psi_ang = draw_within_bin(cell.gt_ang, rng);
      s.row = row;
      s.col = col;
      samples.push_back(std::move(s));
    }
  }
  return samples;
}

double auc_roc(const std::vector<double>& scores,
               const std::vector<bool>& labels) {
  require(scores.size() == labels.size() && !scores.empty(),
          "auc_roc: bad inputs");
  std::size_t n_pos = 0;
  for (bool label : labels) n_pos += label;
  const std::size_t n_neg = labels.size() - n_pos;
  if (n_pos == 0 || n_neg == 0) {
    throw DataError("auc_roc: labels contain a single class");
  }
  std::vector<int> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return scores[a] < scores[b]; });
  double rank_sum_pos = 0.0;
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) ++j;
    const double midrank = 0.5 * (static_cast<double>(i + 1) + static_cast<double>(j));
    for (std::size_t k = i; k < j; ++k) {
      if (labels[order[k]]) rank_sum_pos += midrank;
    }
    i = j;
  }
  return (rank_sum_pos - 0.5 * n_pos * (n_pos + 1)) /
         (static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

double auc_pr(const std::vector<double>& scores,
              const std::vector<bool>& labels) {
  require(scores.size() == labels.size() && !scores.empty(),
          "auc_pr: bad inputs");
  std::size_t n_pos = 0;
  for (bool label : labels) n_pos += label;
  if (n_pos == 0 || n_pos == labels.size()) {
    throw DataError("auc_pr: labels contain a single class");
  }
  std::vector<int> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return scores[a] > scores[b]; });
  double ap = 0.0;
  double prev_recall = 0.0;
  std::size_t tp = 0, fp = 0;
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) ++j;
    for (std::size_t k = i; k < j; ++k) {
      if (labels[order[k]]) {
        ++tp;
      } else {
        ++fp;
      }
    }
    const double precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
    const double recall = static_cast<double>(tp) / static_cast<double>(n_pos);
    ap += (recall - prev_recall) * precision;
    prev_recall = recall;
    i = j;
  }
  return ap;
}

std::pair<double, double> ood_detection_metrics(const PlanningMap& pm,
                                                const TerrainMap& map) {
  require(pm.width == map.width && pm.height == map.height,
          "ood_detection_metrics: map dimension mismatch");
  std::vector<double> scores(pm.cells.size());
  std::vector<bool> labels(pm.cells.size());
  for (std::size_t i = 0; i < pm.cells.size(); ++i) {
    scores[i] = -pm.cells[i].confidence;
    labels[i] = map.cells[i].ood;
  }
  return {auc_roc(scores, labels), auc_pr(scores, labels)};
}

}  // namespace evora
