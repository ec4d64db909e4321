#include "evora/risk.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "evora/rng.hpp"

namespace evora {

namespace {

constexpr double kMassTol = 1e-15;
constexpr double kAlphaTol = 1e-12;

struct Atom {
  double value;
  double prob;
};

std::vector<Atom> massy_atoms_sorted(const Vec& values, const Vec& probs) {
  require(values.size() == probs.size(), "var/cvar: size mismatch");
  require(values.size() >= 1, "var/cvar: empty distribution");
  std::vector<Atom> atoms;
  atoms.reserve(values.size());
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    require(probs[i] >= 0.0, "var/cvar: negative probability");
    if (probs[i] > kMassTol) atoms.push_back({values[i], probs[i]});
  }
  require(!atoms.empty(), "var/cvar: distribution has no mass");
  std::sort(atoms.begin(), atoms.end(),
            [](const Atom& a, const Atom& b) { return a.value < b.value; });
  // merge equal values so tail masses are well defined
  std::vector<Atom> merged;
  for (const Atom& a : atoms) {
    if (!merged.empty() && merged.back().value == a.value) {
      merged.back().prob += a.prob;
    } else {
      merged.push_back(a);
    }
  }
  return merged;
}

void check_alpha(double alpha) {
  require(alpha > 0.0 && alpha <= 1.0, "var/cvar: alpha must be in (0, 1]");
}

}  // namespace

double left_var(const Vec& values, const Vec& probs, double alpha) {
  check_alpha(alpha);
  const auto atoms = massy_atoms_sorted(values, probs);
  double best = atoms.front().value;
  double below = 0.0;  // P(Z < z)
  for (const Atom& a : atoms) {
    if (below <= alpha + kAlphaTol) best = a.value;
    below += a.prob;
  }
  return best;
}

double right_var(const Vec& values, const Vec& probs, double alpha) {
  check_alpha(alpha);
  const auto atoms = massy_atoms_sorted(values, probs);
  double best = atoms.back().value;
  double above = 0.0;  // P(Z > z)
  for (auto it = atoms.rbegin(); it != atoms.rend(); ++it) {
    if (above <= alpha + kAlphaTol) best = it->value;
    above += it->prob;
  }
  return best;
}

double left_cvar(const Vec& values, const Vec& probs, double alpha) {
  check_alpha(alpha);
  const auto atoms = massy_atoms_sorted(values, probs);
  double acc = 0.0, tail = 0.0;
  for (const Atom& a : atoms) {
    const double take = std::min(a.prob, alpha - acc);
    if (take <= 0.0) break;
    tail += take * a.value;
    acc += take;
  }
  return tail / alpha;
}

double right_cvar(const Vec& values, const Vec& probs, double alpha) {
  check_alpha(alpha);
  const auto atoms = massy_atoms_sorted(values, probs);
  double acc = 0.0, tail = 0.0;
  for (auto it = atoms.rbegin(); it != atoms.rend(); ++it) {
    const double take = std::min(it->prob, alpha - acc);
    if (take <= 0.0) break;
    tail += take * it->value;
    acc += take;
  }
  return tail / alpha;
}

double left_var(const Pmf& pmf, double alpha) {
  return left_var(bin_centers(pmf.bin_edges), pmf.probs, alpha);
}
double right_var(const Pmf& pmf, double alpha) {
  return right_var(bin_centers(pmf.bin_edges), pmf.probs, alpha);
}
double left_cvar(const Pmf& pmf, double alpha) {
  return left_cvar(bin_centers(pmf.bin_edges), pmf.probs, alpha);
}
double right_cvar(const Pmf& pmf, double alpha) {
  return right_cvar(bin_centers(pmf.bin_edges), pmf.probs, alpha);
}

double objective_cost(const std::vector<State>& states, const GoalSpec& goal,
                      double dt) {
  goal.validate();
  require(states.size() >= 2, "objective_cost: need at least one step");
  require(dt > 0.0, "objective_cost: dt must be positive");
  double cost = 0.0;
  bool done = false;
  for (std::size_t t = 0; t + 1 < states.size(); ++t) {
    done = done || goal.contains(states[t]);
    if (!done) cost += dt;
  }
  done = done || goal.contains(states.back());
  if (!done) {
    const double dx = states.back().px - goal.center.x();
    const double dy = states.back().py - goal.center.y();
    cost += std::sqrt(dx * dx + dy * dy) / goal.s_default;
  }
  return cost;
}

TractionGrid worst_case_traction_map(const PlanningMap& pm, double alpha) {
  check_alpha(alpha);
  TractionGrid grid;
  grid.width = pm.width;
  grid.height = pm.height;
  grid.resolution = pm.resolution;
  const std::size_t n = pm.cells.size();
  grid.psi_lin.resize(n);
  grid.psi_ang.resize(n);
  grid.aux.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    grid.psi_lin[i] = left_cvar(pm.cells[i].post_lin, alpha);
    grid.psi_ang[i] = left_cvar(pm.cells[i].post_ang, alpha);
    grid.aux[i] = pm.cells[i].aux_penalty;
  }
  return grid;
}

TractionGrid constant_traction_map(const PlanningMap& pm, double value) {
  TractionGrid grid;
  grid.width = pm.width;
  grid.height = pm.height;
  grid.resolution = pm.resolution;
  const std::size_t n = pm.cells.size();
  grid.psi_lin.assign(n, value);
  grid.psi_ang.assign(n, value);
  grid.aux.resize(n);
  for (std::size_t i = 0; i < n; ++i) grid.aux[i] = pm.cells[i].aux_penalty;
  return grid;
}

namespace {

double draw_bin_center(const Pmf& pmf, double u) {
  double acc = 0.0;
  for (Eigen::Index b = 0; b < pmf.bins(); ++b) {
    acc += pmf.probs[b];
    if (u < acc) return 0.5 * (pmf.bin_edges[b] + pmf.bin_edges[b + 1]);
  }
  const Eigen::Index last = pmf.bins() - 1;
  return 0.5 * (pmf.bin_edges[last] + pmf.bin_edges[last + 1]);
}

}  // namespace

TractionGrid sample_traction_map(const PlanningMap& pm, std::uint64_t seed,
                                 int m) {
  TractionGrid grid;
  grid.width = pm.width;
  grid.height = pm.height;
  grid.resolution = pm.resolution;
  const std::size_t n = pm.cells.size();
  grid.psi_lin.resize(n);
  grid.psi_ang.resize(n);
  grid.aux.resize(n);
  for (int row = 0; row < pm.height; ++row) {
    for (int col = 0; col < pm.width; ++col) {
      const std::size_t i = static_cast<std::size_t>(row) * pm.width + col;
      grid.psi_lin[i] = draw_bin_center(
          pm.cells[i].post_lin, hash_uniform(seed, m, row, col, 0));
      grid.psi_ang[i] = draw_bin_center(
          pm.cells[i].post_ang, hash_uniform(seed, m, row, col, 1));
      grid.aux[i] = pm.cells[i].aux_penalty;
    }
  }
  return grid;
}

double rollout_cost(const State& x0, const std::vector<Control>& controls,
                    const TractionGrid& grid, const GoalSpec& goal,
                    const DynamicsConfig& cfg) {
  goal.validate();
  cfg.validate();
  require(!controls.empty(), "rollout_cost: empty control sequence");
  State x = x0;
  double cost = 0.0;
  bool done = false;
  for (const Control& u : controls) {
    done = done || goal.contains(x);
    if (!done) cost += cfg.dt + grid.aux_at(x);
    x = dynamics_step(x, u, grid.traction_at(x), cfg);
  }
  done = done || goal.contains(x);
  if (!done) {
    const double dx = x.px - goal.center.x();
    const double dy = x.py - goal.center.y();
    cost += std::sqrt(dx * dx + dy * dy) / goal.s_default;
  }
  return cost;
}

double cvar_dyn_cost(const State& x0, const std::vector<Control>& controls,
                     const PlanningMap& pm, const GoalSpec& goal, double alpha,
                     const DynamicsConfig& cfg) {
  const TractionGrid grid = worst_case_traction_map(pm, alpha);
  return rollout_cost(x0, controls, grid, goal, cfg);
}

double cvar_cost_cost(const State& x0, const std::vector<Control>& controls,
                      const PlanningMap& pm, const GoalSpec& goal, double alpha,
                      int traction_samples, std::uint64_t seed,
                      const DynamicsConfig& cfg) {
  require(traction_samples >= 1, "cvar_cost_cost: need at least one map");
  Vec costs(traction_samples);
  for (int m = 0; m < traction_samples; ++m) {
    const TractionGrid grid = sample_traction_map(pm, seed, m);
    costs[m] = rollout_cost(x0, controls, grid, goal, cfg);
  }
  const Vec probs =
      Vec::Constant(traction_samples, 1.0 / static_cast<double>(traction_samples));
  return right_cvar(costs, probs, alpha);
}

PlanningMap apply_aux_penalties(PlanningMap pm, const PenaltyRule& rule,
                                const TerrainMap* terrain) {
  const bool needs_terrain = rule.kind == PenaltyRule::Kind::semantic_penalty ||
                             rule.kind == PenaltyRule::Kind::elevation_penalty;
  if (needs_terrain) {
    require(terrain != nullptr, "apply_aux_penalties: rule needs terrain");
    require(terrain->width == pm.width && terrain->height == pm.height,
            "apply_aux_penalties: map dimension mismatch");
  }
  for (std::size_t i = 0; i < pm.cells.size(); ++i) {
    auto& cell = pm.cells[i];
    switch (rule.kind) {
      case PenaltyRule::Kind::ood_zero_traction:
        if (cell.confidence < rule.g_thres) {
          cell.post_lin = point_mass_pmf(pm.bins, 0);
          cell.post_ang = point_mass_pmf(pm.bins, 0);
        }
        break;
      case PenaltyRule::Kind::ood_penalty:
        if (cell.confidence < rule.g_thres) cell.aux_penalty += rule.weight;
        break;
      case PenaltyRule::Kind::semantic_penalty:
        if (terrain->cells[i].semantic == rule.semantic_class) {
          cell.aux_penalty += rule.weight;
        }
        break;
      case PenaltyRule::Kind::elevation_penalty:
        if (terrain->cells[i].elevation > rule.h_max) {
          cell.aux_penalty += rule.weight;
        }
        break;
    }
  }
  return pm;
}

}  // namespace evora
