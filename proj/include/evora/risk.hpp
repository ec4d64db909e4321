#pragma once

#include <cstdint>
#include <vector>

#include "evora/dynamics.hpp"
#include "evora/maps.hpp"
#include "evora/pmf.hpp"
#include "evora/types.hpp"

namespace evora {

struct GoalSpec {
  Eigen::Vector2d center{0.0, 0.0};
  double radius = 0.5;     // m
  double s_default = 1.0;  // m/s, time-to-go estimate for the terminal cost

  void validate() const {
    require(radius > 0.0 && s_default > 0.0, "GoalSpec: bad radius or speed");
  }
  bool contains(const State& x) const {
    const double dx = x.px - center.x();
    const double dy = x.py - center.y();
    return dx * dx + dy * dy <= radius * radius;
  }
};

enum class RiskMode { nominal, expected, cvar_dyn, cvar_cost };

struct RiskConfig {
  RiskMode mode = RiskMode::cvar_dyn;
  double alpha = 1.0;
  int traction_samples = 64;  // M, cvar_cost only

  void validate() const {
    require(alpha > 0.0 && alpha <= 1.0, "RiskConfig: alpha in (0, 1]");
    require(mode != RiskMode::cvar_cost || traction_samples >= 1,
            "RiskConfig: cvar_cost needs at least one sampled map");
  }
};

// Discrete (left/right) value at risk over massy atoms:
//   right: min { z | P(Z > z) <= alpha }
//   left:  max { z | P(Z < z) <= alpha }
// Candidates range over atoms with positive mass; at alpha = 1 this yields
// the extreme massy atoms.
double left_var(const Vec& values, const Vec& probs, double alpha);
double right_var(const Vec& values, const Vec& probs, double alpha);

// Tail expectations with fractional splitting of the boundary atom; both
// coincide with the mean at alpha = 1 and are continuous in alpha.
double left_cvar(const Vec& values, const Vec& probs, double alpha);
double right_cvar(const Vec& values, const Vec& probs, double alpha);

// Pmf overloads evaluate on bin centers.
double left_var(const Pmf& pmf, double alpha);
double right_var(const Pmf& pmf, double alpha);
double left_cvar(const Pmf& pmf, double alpha);
double right_cvar(const Pmf& pmf, double alpha);

// Minimum-time objective: stage costs accumulate dt until any prefix state
// reaches the goal; the terminal cost adds distance/s_default if it never
// does.
double objective_cost(const std::vector<State>& states, const GoalSpec& goal,
                      double dt);

// Dense per-cell traction plus auxiliary penalty, ready for fast rollouts.
struct TractionGrid {
  int width = 0, height = 0;
  double resolution = 0.5;
  std::vector<double> psi_lin, psi_ang, aux;

  std::pair<double, double> traction_at(const State& x) const {
    const int col = static_cast<int>(x.px / resolution);
    const int row = static_cast<int>(x.py / resolution);
    if (x.px < 0.0 || x.py < 0.0 || col >= width || row >= height) {
      return {0.0, 0.0};  // immobilizing boundary
    }
    const int i = row * width + col;
    return {psi_lin[i], psi_ang[i]};
  }
  double aux_at(const State& x) const {
    const int col = static_cast<int>(x.px / resolution);
    const int row = static_cast<int>(x.py / resolution);
    if (x.px < 0.0 || x.py < 0.0 || col >= width || row >= height) return 0.0;
    return aux[row * width + col];
  }
};

// Per-cell left-tail CVaR of the posterior traction PMFs; alpha = 1 recovers
// the per-cell means. Build once per (map, alpha) and reuse across rollouts.
TractionGrid worst_case_traction_map(const PlanningMap& pm, double alpha);

// Per-cell constant traction (nominal = 1).
TractionGrid constant_traction_map(const PlanningMap& pm, double value);

// One sampled traction realization; cell values are bin centers drawn by
// inverse CDF from hash_uniform(seed, m, row, col [, channel]), so a value
// depends only on (seed, m, cell).
TractionGrid sample_traction_map(const PlanningMap& pm, std::uint64_t seed,
                                 int m);

// Objective plus auxiliary penalties accrued at each pre-step state while the
// goal has not been reached.
double rollout_cost(const State& x0, const std::vector<Control>& controls,
                    const TractionGrid& grid, const GoalSpec& goal,
                    const DynamicsConfig& cfg);

// Single rollout with the worst-case expected traction.
double cvar_dyn_cost(const State& x0, const std::vector<Control>& controls,
                     const PlanningMap& pm, const GoalSpec& goal, double alpha,
                     const DynamicsConfig& cfg);

// Right-tail CVaR over the costs of M sampled traction maps. Sharing the seed
// across calls within one planning iteration reuses the same maps.
double cvar_cost_cost(const State& x0, const std::vector<Control>& controls,
                      const PlanningMap& pm, const GoalSpec& goal, double alpha,
                      int traction_samples, std::uint64_t seed,
                      const DynamicsConfig& cfg);

struct PenaltyRule {
  enum class Kind {
    ood_zero_traction,  // confidence < g_thres: point mass at the lowest bin
    ood_penalty,        // confidence < g_thres: aux += weight
    semantic_penalty,   // terrain semantic == semantic_class: aux += weight
    elevation_penalty   // terrain elevation > h_max: aux += weight
  };
  Kind kind = Kind::ood_penalty;
  double g_thres = 0.0;
  double weight = 0.0;
  int semantic_class = kVegetation;
  double h_max = 0.0;
};

// Semantic and elevation rules read the aligned terrain map.
PlanningMap apply_aux_penalties(PlanningMap pm, const PenaltyRule& rule,
                                const TerrainMap* terrain = nullptr);

}  // namespace evora
