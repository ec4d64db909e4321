#pragma once

#include <cstdint>
#include <ostream>
#include <vector>

#include "evora/dynamics.hpp"
#include "evora/maps.hpp"
#include "evora/risk.hpp"

namespace evora {

using ControlSequence = std::vector<Control>;

struct MppiConfig {
  int horizon = 60;    // T
  int rollouts = 256;  // K
  double noise_v = 2.0;
  double noise_steer = 2.0;
  double temperature = 0.3;
  DynamicsConfig dyn;
  RiskConfig risk;
  int jobs = 1;
  bool per_step_traction = false;  // closed-loop world resampling mode

  void validate() const {
    require(horizon >= 1 && rollouts >= 1, "MppiConfig: bad horizon/rollouts");
    require(noise_v > 0.0 && noise_steer > 0.0, "MppiConfig: bad noise std");
    require(temperature > 0.0, "MppiConfig: temperature must be positive");
    require(jobs >= 1, "MppiConfig: jobs must be >= 1");
    dyn.validate();
    risk.validate();
  }
};

struct PlanDiagnostics {
  double min_cost = 0.0;
  double mean_cost = 0.0;
  double ess = 0.0;  // effective sample size of the candidate weights
};

// Drop the first control and repeat the last (receding-horizon warm start).
ControlSequence shift_sequence(ControlSequence u);

// One planning iteration: K seeded noise sequences, exponential weighting by
// the configured risk cost, weighted noise added to the nominal and clamped.
// Candidate evaluation is order-independent; jobs > 1 gives identical output.
class MppiPlanner {
 public:
  MppiPlanner(const PlanningMap& pm, const GoalSpec& goal,
              const MppiConfig& cfg);

  ControlSequence plan_step(const State& x0, const ControlSequence& nominal,
                            std::uint64_t step_seed,
                            PlanDiagnostics* diag = nullptr) const;

  const TractionGrid& base_grid() const { return base_grid_; }

 private:
  const PlanningMap* pm_;
  GoalSpec goal_;
  MppiConfig cfg_;
  TractionGrid base_grid_;  // nominal / expected / worst-case grid
};

// Free-function form of a single planning iteration.
ControlSequence plan_step(const State& x0, const ControlSequence& nominal,
                          const PlanningMap& pm, const GoalSpec& goal,
                          const MppiConfig& cfg, std::uint64_t step_seed,
                          PlanDiagnostics* diag = nullptr);

struct EpisodeResult {
  bool success = false;
  double time_to_goal = 0.0;  // simulated seconds until goal entry
  std::vector<State> trajectory;
  int plan_steps = 0;
  int vegetation_steps = 0;  // pre-step states on vegetation cells
  int ood_steps = 0;         // pre-step states on OOD-flagged cells
};

// Receding-horizon execution against the ground-truth world: the planner sees
// only the planning map while executed traction is drawn from the world's GT
// PMFs (fixed per trial by default, per-step when cfg.per_step_traction).
EpisodeResult run_closed_loop(const TerrainMap& world, const PlanningMap& pm,
                              const State& start, const GoalSpec& goal,
                              const MppiConfig& cfg, double time_limit,
                              std::uint64_t seed,
                              std::ostream* diagnostics_jsonl = nullptr);

}  // namespace evora
