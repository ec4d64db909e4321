#include <doctest.h>

#include <cmath>
#include <sstream>

#include "evora/mppi.hpp"
#include "evora/rng.hpp"

using namespace evora;

namespace {

TerrainMap flat_world(int width, int height, const Pmf& gt) {
  TerrainMap world;
  world.width = width;
  world.height = height;
  world.resolution = 0.5;
  world.bins = static_cast<int>(gt.bins());
  TerrainCell cell;
  cell.semantic = kDirt;
  cell.gt_lin = gt;
  cell.gt_ang = gt;
  world.cells.assign(static_cast<std::size_t>(width) * height, cell);
  return world;
}

PlanningMap planning_from_world(const TerrainMap& world) {
  PlanningMap pm;
  pm.width = world.width;
  pm.height = world.height;
  pm.resolution = world.resolution;
  pm.bins = world.bins;
  pm.cells.resize(world.cells.size());
  for (std::size_t i = 0; i < world.cells.size(); ++i) {
    pm.cells[i].post_lin = world.cells[i].gt_lin;
    pm.cells[i].post_ang = world.cells[i].gt_ang;
    pm.cells[i].confidence = 1.0;
  }
  return pm;
}

MppiConfig small_config() {
  MppiConfig cfg;
  cfg.horizon = 30;
  cfg.rollouts = 64;
  cfg.dyn.dt = 0.1;
  cfg.risk.mode = RiskMode::cvar_dyn;
  cfg.risk.alpha = 1.0;
  return cfg;
}

bool same_states(const std::vector<State>& a, const std::vector<State>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].px != b[i].px || a[i].py != b[i].py || a[i].theta != b[i].theta) {
      return false;
    }
  }
  return true;
}

}  // namespace

TEST_CASE("shift_sequence") {
  ControlSequence one = {{1.0, 0.5}};
  const ControlSequence kept = shift_sequence(one);
  CHECK(kept[0].v == 1.0);
  CHECK(kept[0].steer == 0.5);

  ControlSequence abc = {{1, 0}, {2, 0}, {3, 0}};
  const ControlSequence shifted = shift_sequence(abc);
  CHECK(shifted[0].v == 2);
  CHECK(shifted[1].v == 3);
  CHECK(shifted[2].v == 3);

  // shifting T times yields a constant sequence of the last entry
  ControlSequence seq = {{1, 9}, {2, 8}, {3, 7}, {4, 6}};
  for (std::size_t i = 0; i < seq.size(); ++i) seq = shift_sequence(seq);
  for (const auto& u : seq) {
    CHECK(u.v == 4);
    CHECK(u.steer == 6);
  }
}

TEST_CASE("plan_step degenerate noise returns the nominal") {
  const TerrainMap world = flat_world(12, 3, point_mass_pmf(10, 9));
  const PlanningMap pm = planning_from_world(world);
  GoalSpec goal;
  goal.center << 5.0, 0.75;

  MppiConfig cfg = small_config();
  cfg.noise_v = 1e-300;
  cfg.noise_steer = 1e-300;
  ControlSequence nominal(cfg.horizon, {1.0, 0.1});
  const State x0{0.5, 0.75, 0.0};
  const ControlSequence out = plan_step(x0, nominal, pm, goal, cfg, 5);
  for (int t = 0; t < cfg.horizon; ++t) {
    CHECK(out[t].v == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(out[t].steer == doctest::Approx(0.1).epsilon(1e-12));
  }
}

TEST_CASE("plan_step with a single rollout returns the clamped candidate") {
  const TerrainMap world = flat_world(12, 3, point_mass_pmf(10, 9));
  const PlanningMap pm = planning_from_world(world);
  GoalSpec goal;
  goal.center << 5.0, 0.75;

  MppiConfig cfg = small_config();
  cfg.rollouts = 1;
  const std::uint64_t step_seed = 99;
  ControlSequence nominal(cfg.horizon, {2.0, 0.0});
  const State x0{0.5, 0.75, 0.0};
  const ControlSequence out = plan_step(x0, nominal, pm, goal, cfg, step_seed);

  Rng rng(derive_seed(step_seed, "noise", 0));
  for (int t = 0; t < cfg.horizon; ++t) {
    const double ev = cfg.noise_v * rng.normal();
    const double es = cfg.noise_steer * rng.normal();
    const Control expected =
        clamp_control({2.0 + ev, 0.0 + es}, cfg.dyn);
    CHECK(out[t].v == doctest::Approx(expected.v));
    CHECK(out[t].steer == doctest::Approx(expected.steer));
  }
}

TEST_CASE("plan_step outputs respect control limits and report diagnostics") {
  const TerrainMap world = flat_world(12, 3, point_mass_pmf(10, 9));
  const PlanningMap pm = planning_from_world(world);
  GoalSpec goal;
  goal.center << 5.0, 0.75;
  MppiConfig cfg = small_config();
  cfg.noise_v = 6.0;
  cfg.noise_steer = 6.0;

  ControlSequence nominal(cfg.horizon, {2.9, 3.0});
  PlanDiagnostics diag;
  const ControlSequence out =
      plan_step({0.5, 0.75, 0.0}, nominal, pm, goal, cfg, 3, &diag);
  for (const auto& u : out) {
    CHECK(std::abs(u.v) <= cfg.dyn.v_max + 1e-12);
    CHECK(std::abs(u.steer) <= cfg.dyn.steer_max + 1e-12);
  }
  CHECK(diag.ess >= 1.0);
  CHECK(diag.ess <= cfg.rollouts + 1e-9);
  CHECK(diag.min_cost <= diag.mean_cost);
}

TEST_CASE("parallel candidate evaluation matches serial") {
  const TerrainMap world = flat_world(12, 3, point_mass_pmf(10, 9));
  const PlanningMap pm = planning_from_world(world);
  GoalSpec goal;
  goal.center << 5.0, 0.75;

  for (RiskMode mode : {RiskMode::cvar_dyn, RiskMode::cvar_cost}) {
    MppiConfig serial = small_config();
    serial.risk.mode = mode;
    serial.risk.alpha = 0.4;
    serial.risk.traction_samples = 8;
    MppiConfig parallel = serial;
    parallel.jobs = 2;

    ControlSequence nominal(serial.horizon, {1.0, 0.2});
    const State x0{0.5, 0.75, 0.0};
    const auto a = plan_step(x0, nominal, pm, goal, serial, 21);
    const auto b = plan_step(x0, nominal, pm, goal, parallel, 21);
    for (int t = 0; t < serial.horizon; ++t) {
      CHECK(a[t].v == b[t].v);
      CHECK(a[t].steer == b[t].steer);
    }
  }
}

TEST_CASE("closed loop reaches a goal in the open") {
  const TerrainMap world = flat_world(12, 3, point_mass_pmf(10, 9));
  const PlanningMap pm = planning_from_world(world);
  GoalSpec goal;
  goal.center << 3.5, 0.75;
  goal.radius = 0.5;
  MppiConfig cfg = small_config();

  // goal at the start pose
  GoalSpec at_start = goal;
  at_start.center << 0.5, 0.75;
  const EpisodeResult trivial = run_closed_loop(
      world, pm, {0.5, 0.75, 0.0}, at_start, cfg, 5.0, 1);
  CHECK(trivial.success);
  CHECK(trivial.time_to_goal == 0.0);

  // 3 m dash at v_max = 3 m/s
  const EpisodeResult dash =
      run_closed_loop(world, pm, {0.5, 0.75, 0.0}, goal, cfg, 10.0, 2);
  CHECK(dash.success);
  CHECK(dash.time_to_goal <= 2.0);

  // executed trajectory beats the initial (zero) nominal
  const double executed = objective_cost(dash.trajectory, goal, cfg.dyn.dt);
  std::vector<State> idle(dash.trajectory.size(), State{0.5, 0.75, 0.0});
  CHECK(executed < objective_cost(idle, goal, cfg.dyn.dt));
}

TEST_CASE("zero-traction world fails at the time limit") {
  const TerrainMap world = flat_world(12, 3, point_mass_pmf(10, 0));
  PlanningMap pm = planning_from_world(world);
  // the planner believes the world is fine
  for (auto& cell : pm.cells) {
    cell.post_lin = point_mass_pmf(10, 9);
    cell.post_ang = point_mass_pmf(10, 9);
  }
  GoalSpec goal;
  goal.center << 5.0, 0.75;
  MppiConfig cfg = small_config();
  const EpisodeResult r =
      run_closed_loop(world, pm, {0.5, 0.75, 0.0}, goal, cfg, 8.0, 3);
  CHECK_FALSE(r.success);
  CHECK(r.time_to_goal == doctest::Approx(8.0));
}

TEST_CASE("episodes are bitwise reproducible and jobs-invariant") {
  const TerrainMap world = flat_world(12, 3, point_mass_pmf(10, 9));
  const PlanningMap pm = planning_from_world(world);
  GoalSpec goal;
  goal.center << 4.5, 0.75;
  MppiConfig cfg = small_config();

  const auto a = run_closed_loop(world, pm, {0.5, 0.75, 0.0}, goal, cfg, 6.0, 7);
  const auto b = run_closed_loop(world, pm, {0.5, 0.75, 0.0}, goal, cfg, 6.0, 7);
  CHECK(a.success == b.success);
  CHECK(a.time_to_goal == b.time_to_goal);
  CHECK(same_states(a.trajectory, b.trajectory));

  MppiConfig cfg2 = cfg;
  cfg2.jobs = 2;
  const auto c =
      run_closed_loop(world, pm, {0.5, 0.75, 0.0}, goal, cfg2, 6.0, 7);
  CHECK(same_states(a.trajectory, c.trajectory));

  // diagnostics stream emits one JSONL record per executed step
  std::ostringstream diag;
  const auto d =
      run_closed_loop(world, pm, {0.5, 0.75, 0.0}, goal, cfg, 6.0, 7, &diag);
  int lines = 0;
  for (char ch : diag.str()) lines += (ch == '\n');
  CHECK(lines == d.plan_steps);
}
