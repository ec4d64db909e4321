#pragma once

#include <cmath>
#include <utility>
#include <vector>

#include "evora/types.hpp"

namespace evora {

struct State {
  double px = 0.0;     // m
  double py = 0.0;     // m
  double theta = 0.0;  // rad, wrapped to (-pi, pi]
};

// steer is the angular rate (unicycle) or the steering angle (bicycle).
struct Control {
  double v = 0.0;
  double steer = 0.0;
};

enum class ModelKind { unicycle, bicycle };

struct DynamicsConfig {
  ModelKind kind = ModelKind::unicycle;
  double dt = 0.1;         // s
  double wheelbase = 0.33; // m, bicycle only
  double v_max = 3.0;      // m/s
  double steer_max = M_PI; // rad/s or rad

  void validate() const {
    require(dt > 0.0, "DynamicsConfig: dt must be positive");
    require(kind != ModelKind::bicycle || wheelbase > 0.0,
            "DynamicsConfig: bicycle needs a positive wheelbase");
    require(v_max > 0.0 && steer_max > 0.0,
            "DynamicsConfig: control limits must be positive");
  }
};

// Wrap to (-pi, pi].
inline double wrap_angle(double theta) {
  double t = std::fmod(theta + M_PI, 2.0 * M_PI);
  if (t <= 0.0) t += 2.0 * M_PI;
  return t - M_PI;
}

inline Control clamp_control(const Control& u, const DynamicsConfig& cfg) {
  return {std::clamp(u.v, -cfg.v_max, cfg.v_max),
          std::clamp(u.steer, -cfg.steer_max, cfg.steer_max)};
}

// Euler update of the traction-scaled unicycle.
inline State unicycle_step(const State& x, const Control& u, double psi_lin,
                           double psi_ang, double dt) {
  State out;
  out.px = x.px + dt * psi_lin * u.v * std::cos(x.theta);
  out.py = x.py + dt * psi_lin * u.v * std::sin(x.theta);
  out.theta = wrap_angle(x.theta + dt * psi_ang * u.steer);
  return out;
}

// Euler update of the traction-scaled bicycle; the reference point sits at
// the center of the rear axle.
inline State bicycle_step(const State& x, const Control& u, double psi_lin,
                          double psi_ang, double dt, double wheelbase) {
  State out;
  out.px = x.px + dt * psi_lin * u.v * std::cos(x.theta);
  out.py = x.py + dt * psi_lin * u.v * std::sin(x.theta);
  out.theta =
      wrap_angle(x.theta + dt * psi_ang * u.v * std::tan(u.steer) / wheelbase);
  return out;
}

inline State dynamics_step(const State& x, const Control& u,
                           std::pair<double, double> psi,
                           const DynamicsConfig& cfg) {
  if (cfg.kind == ModelKind::bicycle) {
    return bicycle_step(x, u, psi.first, psi.second, cfg.dt, cfg.wheelbase);
  }
  return unicycle_step(x, u, psi.first, psi.second, cfg.dt);
}

// T+1 states from T controls; traction is looked up at the pre-step state.
// TractionFn: State -> pair(psi_lin, psi_ang); out-of-map states are expected
// to report (0, 0), which immobilizes the vehicle.
template <typename TractionFn>
std::vector<State> rollout(const State& x0, const std::vector<Control>& controls,
                           TractionFn&& traction, const DynamicsConfig& cfg) {
  std::vector<State> states;
  states.reserve(controls.size() + 1);
  states.push_back(x0);
  State x = x0;
  for (const Control& u : controls) {
    x = dynamics_step(x, u, traction(x), cfg);
    states.push_back(x);
  }
  return states;
}

}  // namespace evora
