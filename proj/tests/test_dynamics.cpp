#include <doctest.h>

#include <cmath>

#include "evora/dynamics.hpp"
#include "evora/rng.hpp"

using namespace evora;

TEST_CASE("unicycle hand-computed steps") {
  State x;
  // full traction straight line
  State a = unicycle_step(x, {1.0, 0.0}, 1.0, 1.0, 0.1);
  CHECK(a.px == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(a.py == doctest::Approx(0.0));
  CHECK(a.theta == doctest::Approx(0.0));

  // zero traction freezes the state
  State b = unicycle_step(x, {3.0, 2.0}, 0.0, 0.0, 0.1);
  CHECK(b.px == 0.0);
  CHECK(b.py == 0.0);
  CHECK(b.theta == 0.0);

  // half traction with turn rate pi
  State c = unicycle_step(x, {1.0, M_PI}, 0.5, 0.5, 0.1);
  CHECK(c.px == doctest::Approx(0.05).epsilon(1e-12));
  CHECK(c.py == doctest::Approx(0.0));
  CHECK(c.theta == doctest::Approx(0.05 * M_PI).epsilon(1e-12));
}

TEST_CASE("bicycle hand-computed steps") {
  State x;
  // zero steering reduces to a straight unicycle
  State a = bicycle_step(x, {1.0, 0.0}, 1.0, 1.0, 0.1, 0.33);
  State b = unicycle_step(x, {1.0, 0.0}, 1.0, 1.0, 0.1);
  CHECK(a.px == doctest::Approx(b.px).epsilon(1e-12));
  CHECK(a.theta == doctest::Approx(b.theta));

  State c = bicycle_step(x, {1.0, M_PI / 4.0}, 1.0, 1.0, 0.1, 0.33);
  CHECK(c.px == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(c.py == doctest::Approx(0.0));
  CHECK(c.theta == doctest::Approx(0.1 * std::tan(M_PI / 4.0) / 0.33));

  State d = bicycle_step(x, {2.0, 0.3}, 0.0, 0.0, 0.1, 0.33);
  CHECK(d.px == 0.0);
  CHECK(d.theta == 0.0);
}

TEST_CASE("angle stays wrapped") {
  Rng rng(7);
  State x;
  for (int i = 0; i < 500; ++i) {
    x = unicycle_step(x, {rng.uniform(-3, 3), rng.uniform(-4, 4)},
                      rng.uniform(), rng.uniform(), 0.3);
    CHECK(std::abs(x.theta) <= M_PI);
  }
  CHECK(wrap_angle(M_PI) == doctest::Approx(M_PI));
  CHECK(wrap_angle(-M_PI) == doctest::Approx(M_PI));
  CHECK(wrap_angle(3.0 * M_PI) == doctest::Approx(M_PI));
}

TEST_CASE("traction monotonicity on a straight line") {
  double prev = -1.0;
  for (double psi = 0.0; psi <= 1.0; psi += 0.05) {
    State x;
    for (int t = 0; t < 20; ++t) x = unicycle_step(x, {2.0, 0.0}, psi, psi, 0.1);
    CHECK(x.px >= prev);
    prev = x.px;
  }
}

TEST_CASE("rollout composes single steps and is pure") {
  DynamicsConfig cfg;
  cfg.dt = 0.1;
  std::vector<Control> controls(12, {1.5, 0.4});
  const State x0{0.2, -0.1, 0.3};

  auto uniform_traction = [](const State&) { return std::make_pair(0.8, 0.6); };
  auto states = rollout(x0, controls, uniform_traction, cfg);
  REQUIRE(states.size() == 13);
  State x = x0;
  for (const auto& u : controls) x = unicycle_step(x, u, 0.8, 0.6, cfg.dt);
  CHECK(states.back().px == doctest::Approx(x.px).epsilon(1e-15));
  CHECK(states.back().py == doctest::Approx(x.py).epsilon(1e-15));

  // empty control sequence
  auto empty = rollout(x0, {}, uniform_traction, cfg);
  REQUIRE(empty.size() == 1);
  CHECK(empty[0].px == x0.px);

  // heterogeneous traction matches an independent re-simulation
  auto patchy = [](const State& s) {
    return s.px < 1.0 ? std::make_pair(1.0, 1.0) : std::make_pair(0.3, 0.5);
  };
  auto states2 = rollout(x0, controls, patchy, cfg);
  State y = x0;
  for (const auto& u : controls) {
    const auto [p1, p2] = patchy(y);
    y = unicycle_step(y, u, p1, p2, cfg.dt);
  }
  CHECK(states2.back().px == doctest::Approx(y.px).epsilon(1e-15));
  CHECK(states2.back().theta == doctest::Approx(y.theta).epsilon(1e-15));

  // purity: same inputs, same outputs
  auto states3 = rollout(x0, controls, patchy, cfg);
  for (size_t i = 0; i < states2.size(); ++i) {
    CHECK(states2[i].px == states3[i].px);
    CHECK(states2[i].py == states3[i].py);
    CHECK(states2[i].theta == states3[i].theta);
  }
}
