#include "evora/mppi.hpp"

#include <cmath>
#include <future>

#include <json.hpp>

#include "evora/rng.hpp"

namespace evora {

ControlSequence shift_sequence(ControlSequence u) {
  require(!u.empty(), "shift_sequence: empty sequence");
  for (std::size_t t = 0; t + 1 < u.size(); ++t) u[t] = u[t + 1];
  return u;
}

MppiPlanner::MppiPlanner(const PlanningMap& pm, const GoalSpec& goal,
                         const MppiConfig& cfg)
    : pm_(&pm), goal_(goal), cfg_(cfg) {
  cfg_.validate();
  goal_.validate();
  switch (cfg_.risk.mode) {
    case RiskMode::nominal:
      base_grid_ = constant_traction_map(pm, 1.0);
      break;
    case RiskMode::expected:
      base_grid_ = worst_case_traction_map(pm, 1.0);
      break;
    case RiskMode::cvar_dyn:
      base_grid_ = worst_case_traction_map(pm, cfg_.risk.alpha);
      break;
    case RiskMode::cvar_cost:
      base_grid_ = constant_traction_map(pm, 1.0);  // unused by the cost
      break;
  }
}

ControlSequence MppiPlanner::plan_step(const State& x0,
                                       const ControlSequence& nominal,
                                       std::uint64_t step_seed,
                                       PlanDiagnostics* diag) const {
  const int horizon = cfg_.horizon;
  const int n_rollouts = cfg_.rollouts;
  require(static_cast<int>(nominal.size()) == horizon,
          "plan_step: nominal length must equal the horizon");

  // Sampled traction maps are shared by all candidates of this iteration.
  std::vector<TractionGrid> sampled;
  if (cfg_.risk.mode == RiskMode::cvar_cost) {
    const std::uint64_t maps_seed = derive_seed(step_seed, "maps");
    sampled.reserve(cfg_.risk.traction_samples);
    for (int m = 0; m < cfg_.risk.traction_samples; ++m) {
      sampled.push_back(sample_traction_map(*pm_, maps_seed, m));
    }
  }

  std::vector<ControlSequence> noise(n_rollouts);
  std::vector<double> costs(n_rollouts);

  auto evaluate_range = [&](int begin, int end) {
    ControlSequence candidate(horizon);
    Vec map_costs(cfg_.risk.mode == RiskMode::cvar_cost
                      ? cfg_.risk.traction_samples
                      : 0);
    for (int k = begin; k < end; ++k) {
      Rng rng(derive_seed(step_seed, "noise", static_cast<std::uint64_t>(k)));
      auto& eps = noise[k];
      eps.resize(horizon);
      for (int t = 0; t < horizon; ++t) {
        eps[t].v = cfg_.noise_v * rng.normal();
        eps[t].steer = cfg_.noise_steer * rng.normal();
        candidate[t] = clamp_control(
            {nominal[t].v + eps[t].v, nominal[t].steer + eps[t].steer},
            cfg_.dyn);
      }
      if (cfg_.risk.mode == RiskMode::cvar_cost) {
        for (int m = 0; m < cfg_.risk.traction_samples; ++m) {
          map_costs[m] = rollout_cost(x0, candidate, sampled[m], goal_, cfg_.dyn);
        }
        const Vec probs = Vec::Constant(
            map_costs.size(), 1.0 / static_cast<double>(map_costs.size()));
        costs[k] = right_cvar(map_costs, probs, cfg_.risk.alpha);
      } else {
        costs[k] = rollout_cost(x0, candidate, base_grid_, goal_, cfg_.dyn);
      }
    }
  };

  if (cfg_.jobs <= 1 || n_rollouts < 2 * cfg_.jobs) {
    evaluate_range(0, n_rollouts);
  } else {
    const int chunk = (n_rollouts + cfg_.jobs - 1) / cfg_.jobs;
    std::vector<std::future<void>> futures;
    for (int begin = 0; begin < n_rollouts; begin += chunk) {
      const int end = std::min(begin + chunk, n_rollouts);
      futures.push_back(std::async(std::launch::async, evaluate_range, begin, end));
    }
    for (auto& f : futures) f.get();
  }

  double min_cost = costs[0];
  for (double c : costs) min_cost = std::min(min_cost, c);
  double weight_sum = 0.0, cost_sum = 0.0;
  std::vector<double> weights(n_rollouts);
  for (int k = 0; k < n_rollouts; ++k) {
    weights[k] = std::exp(-(costs[k] - min_cost) / cfg_.temperature);
    weight_sum += weights[k];
    cost_sum += costs[k];
  }

  ControlSequence out(horizon);
  double sq_sum = 0.0;
  for (int k = 0; k < n_rollouts; ++k) {
    weights[k] /= weight_sum;
    sq_sum += weights[k] * weights[k];
  }
  for (int t = 0; t < horizon; ++t) {
    double dv = 0.0, ds = 0.0;
    for (int k = 0; k < n_rollouts; ++k) {  // reduction order fixed by index
      dv += weights[k] * noise[k][t].v;
      ds += weights[k] * noise[k][t].steer;
    }
    out[t] = clamp_control({nominal[t].v + dv, nominal[t].steer + ds}, cfg_.dyn);
  }

  if (diag != nullptr) {
    diag->min_cost = min_cost;
    diag->mean_cost = cost_sum / static_cast<double>(n_rollouts);
    diag->ess = 1.0 / sq_sum;
  }
  return out;
}

ControlSequence plan_step(const State& x0, const ControlSequence& nominal,
                          const PlanningMap& pm, const GoalSpec& goal,
                          const MppiConfig& cfg, std::uint64_t step_seed,
                          PlanDiagnostics* diag) {
  return MppiPlanner(pm, goal, cfg).plan_step(x0, nominal, step_seed, diag);
}

namespace {

double gt_bin_center_draw(const Pmf& pmf, double u) {
  double acc = 0.0;
  for (Eigen::Index b = 0; b < pmf.bins(); ++b) {
    acc += pmf.probs[b];
    if (u < acc) return 0.5 * (pmf.bin_edges[b] + pmf.bin_edges[b + 1]);
  }
  const Eigen::Index last = pmf.bins() - 1;
  return 0.5 * (pmf.bin_edges[last] + pmf.bin_edges[last + 1]);
}

}  // namespace

EpisodeResult run_closed_loop(const TerrainMap& world, const PlanningMap& pm,
                              const State& start, const GoalSpec& goal,
                              const MppiConfig& cfg, double time_limit,
                              std::uint64_t seed,
                              std::ostream* diagnostics_jsonl) {
  cfg.validate();
  goal.validate();
  require(time_limit > 0.0, "run_closed_loop: time limit must be positive");

  EpisodeResult result;
  result.trajectory.push_back(start);
  if (goal.contains(start)) {
    result.success = true;
    result.time_to_goal = 0.0;
    return result;
  }

  const std::uint64_t world_seed = derive_seed(seed, "world");
  auto world_traction = [&](const State& x, int step) {
    if (!world.in_bounds(x.px, x.py)) return std::make_pair(0.0, 0.0);
    const int row = world.row_at(x.py);
    const int col = world.col_at(x.px);
    // fixed-per-trial realizations by default; per-step mode redraws
    const std::uint64_t draw = cfg.per_step_traction ? step : 0;
    const auto& cell = world.cell(row, col);
    return std::make_pair(
        gt_bin_center_draw(cell.gt_lin, hash_uniform(world_seed, draw, row, col, 0)),
        gt_bin_center_draw(cell.gt_ang, hash_uniform(world_seed, draw, row, col, 1)));
  };

  MppiPlanner planner(pm, goal, cfg);
  ControlSequence nominal(cfg.horizon);
  State x = start;
  double t = 0.0;
  const int max_steps =
      static_cast<int>(std::ceil(time_limit / cfg.dyn.dt - 1e-9));
  for (int step = 0; step < max_steps; ++step) {
    PlanDiagnostics diag;
    const ControlSequence plan =
        planner.plan_step(x, nominal, derive_seed(seed, "plan", step), &diag);
    ++result.plan_steps;

    if (world.in_bounds(x.px, x.py)) {
      const auto& cell = world.cell(world.row_at(x.py), world.col_at(x.px));
      if (cell.semantic == kVegetation) ++result.vegetation_steps;
      if (cell.ood) ++result.ood_steps;
    }

    x = dynamics_step(x, plan[0], world_traction(x, step), cfg.dyn);
    t += cfg.dyn.dt;
    result.trajectory.push_back(x);

    if (diagnostics_jsonl != nullptr) {
      *diagnostics_jsonl << nlohmann::json{{"step", step},
                                           {"sim_time", t},
                                           {"min_cost", diag.min_cost},
                                           {"mean_cost", diag.mean_cost},
                                           {"ess", diag.ess},
                                           {"px", x.px},
                                           {"py", x.py},
                                           {"theta", x.theta}}
                                .dump()
                         << "\n";
    }

    if (goal.contains(x)) {
      result.success = true;
      result.time_to_goal = t;
      return result;
    }
    nominal = shift_sequence(plan);
  }
  result.success = false;
  result.time_to_goal = time_limit;
  return result;
}

}  // namespace evora
