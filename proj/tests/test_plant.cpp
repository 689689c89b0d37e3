#include <cmath>
#include <cstring>

#include "doctest.h"
#include "gfmi/plant.hpp"
#include "gfmi/rng.hpp"

using namespace gfmi;

TEST_CASE("inverter voltages: matrix evaluation and exact zero sum") {
  for (int s = 0; s < 8; ++s) {
    const SwitchState ss{s & 1, (s >> 1) & 1, (s >> 2) & 1};
    const ThreePhase u = inverter_voltages(ss, 700.0);
    CHECK(u.a + u.b + u.c == 0.0);  // rows of the matrix sum to zero
  }
  const ThreePhase u0 = inverter_voltages({0, 0, 0}, 700.0);
  CHECK(u0.a == 0.0);
  const ThreePhase u7 = inverter_voltages({1, 1, 1}, 700.0);
  CHECK(u7.a == 0.0);  // common mode cancels
  const ThreePhase u1 = inverter_voltages({1, 0, 0}, 700.0);
  CHECK(u1.a == doctest::Approx(466.6666667).epsilon(1e-9));
  CHECK(u1.b == doctest::Approx(-233.3333333).epsilon(1e-9));
  CHECK(u1.c == doctest::Approx(-233.3333333).epsilon(1e-9));
}

namespace {

// Counted duty over one carrier period at the 1 us micro-step grid.
double measured_duty(double u_ref, double u_bat) {
  int high = 0;
  const int steps = 100;  // 10 kHz carrier at 1 us
  for (int k = 0; k < steps; ++k) {
    const SwitchState ss =
        pwm_modulate({u_ref, 0.0, 0.0}, u_bat, static_cast<double>(k) / steps);
    high += ss.ss_a;
  }
  return static_cast<double>(high) / steps;
}

}  // namespace

TEST_CASE("pwm duty tracks the normalized reference") {
  CHECK(measured_duty(0.0, 700.0) == doctest::Approx(0.5).epsilon(0.021));
  CHECK(measured_duty(350.0, 700.0) == 1.0);      // saturated high pins the switch
  CHECK(measured_duty(-350.0, 700.0) <= 0.01);    // saturated low
  CHECK(std::abs(measured_duty(-175.0, 700.0) - 0.25) <= 0.0101);

  Rng rng(505);
  for (int i = 0; i < 100; ++i) {
    const double u = rng.uniform(-500.0, 500.0);  // reaches both clamp rails
    const double want = pwm_duty(u, 700.0);
    CHECK(std::abs(measured_duty(u, 700.0) - want) <= 0.0101);
  }
}

TEST_CASE("rectifier conduction: pair selection and conservation") {
  const NonlinearLoadParams p{};
  const RectifierOutput on = rectifier_conduction({300.0, -150.0, -150.0}, 10.0, 0.0, p);
  CHECK(on.bridge_voltage == doctest::Approx(448.4).epsilon(1e-12));
  CHECK(on.i_ac.a == 10.0);
  CHECK(on.i_ac.b == -10.0);  // tie on min resolves to the lowest phase index
  CHECK(on.i_ac.c == 0.0);

  const RectifierOutput off = rectifier_conduction({10.0, 10.0, 10.0}, 0.0, 100.0, p);
  CHECK(off.bridge_voltage == 0.0);
  CHECK(off.i_ac.a == 0.0);

  Rng rng(606);
  for (int i = 0; i < 200; ++i) {
    const ThreePhase u{rng.uniform(-400, 400), rng.uniform(-400, 400),
                       rng.uniform(-400, 400)};
    const RectifierOutput ro =
        rectifier_conduction(u, rng.uniform(0.0, 20.0), rng.uniform(0.0, 600.0), p);
    CHECK(ro.i_ac.a + ro.i_ac.b + ro.i_ac.c == 0.0);
  }
}

TEST_CASE("rectifier blocks until forward bias beats the dc-link voltage") {
  const NonlinearLoadParams p{};
  // line 300 - 2*0.8 = 298.4 against u_dc
  CHECK_FALSE(rectifier_select({200.0, -100.0, 0.0}, 0.0, 350.0, p).conducting);
  CHECK(rectifier_select({200.0, -100.0, 0.0}, 0.0, 200.0, p).conducting);
  CHECK(rectifier_select({200.0, -100.0, 0.0}, 5.0, 1000.0, p).conducting);
}

TEST_CASE("plant derivatives: equilibrium and per-phase RL terms") {
  const PlantParams pp{};
  const Topology topo{false, false};
  const PlantState zero{};
  const PlantDeriv d0 = plant_derivatives(zero, {0, 0, 0}, topo, pp, {}, {}, {});
  CHECK(d0.di_l.a == 0.0);
  CHECK(d0.du_c.b == 0.0);
  CHECK(d0.di_dc == 0.0);

  PlantState s;
  s.i_l = {1.0, -1.0, 0.0};
  const PlantDeriv d1 = plant_derivatives(s, {0, 0, 0}, topo, pp, {}, {}, {});
  CHECK(d1.di_l.a == doctest::Approx(-41.6666667).epsilon(1e-9));
  CHECK(d1.di_l.b == doctest::Approx(41.6666667).epsilon(1e-9));
  CHECK(d1.di_l.c == 0.0);
}

TEST_CASE("RK4 step: free RL decay against the closed form") {
  // giant C_s freezes the capacitor states so the inductor sees pure RL
  PlantParams pp{};
  pp.c_s = 1e12;
  Plant plant(pp, {}, {}, Topology{false, false});
  plant.state().i_l = {1.0, -1.0, 0.0};
  for (int k = 0; k < 1000; ++k) plant.step({0.0, 0.0, 0.0}, 1e-6);
  const double want = std::exp(-pp.r_s * 1e-3 / pp.l_s);  // 0.95918945710913816
  CHECK(plant.state().i_l.a == doctest::Approx(want).epsilon(1e-6));
  CHECK(plant.state().i_l.b == doctest::Approx(-want).epsilon(1e-6));
  CHECK(plant.state().i_l.c == 0.0);
  CHECK(plant.state().t == doctest::Approx(1e-3).epsilon(1e-9));
}

TEST_CASE("zero state and zero input stay at the origin") {
  Plant plant(PlantParams{}, {}, {}, Topology{true, true});
  for (int k = 0; k < 100; ++k) plant.step({0.0, 0.0, 0.0}, 1e-6);
  CHECK(plant.state().i_l.a == 0.0);
  CHECK(plant.state().u_c.c == 0.0);
  CHECK(plant.state().u_dc == 0.0);
}

TEST_CASE("stored energy never grows with sources off") {
  Plant plant(PlantParams{}, {9.0, 3e-3}, {}, Topology{true, true});
  plant.state().i_l = {5.0, -3.0, -2.0};
  plant.state().u_c = {100.0, -40.0, -60.0};
  plant.state().i_lin = {2.0, -1.0, -1.0};
  plant.state().i_dc = 1.0;
  plant.state().u_dc = 50.0;

  double prev = plant.stored_energy();
  const double e0 = prev;
  for (int k = 0; k < 10000; ++k) {
    plant.step({0.0, 0.0, 0.0}, 1e-6);
    const double e = plant.stored_energy();
    CHECK(e <= prev + 1e-12 * e0);
    prev = e;
  }
  CHECK(plant.finite());
}

TEST_CASE("three-wire currents keep summing to zero") {
  Plant plant(PlantParams{}, {9.0, 3e-3}, {}, Topology{true, true});
  plant.state().u_c = {300.0, -150.0, -150.0};
  plant.state().i_l = {10.0, -4.0, -6.0};
  for (int k = 0; k < 2000; ++k) {
    plant.advance({100.0, -50.0, -50.0}, 1, 1e-6);
    const PlantState& s = plant.state();
    CHECK(std::abs(s.i_l.a + s.i_l.b + s.i_l.c) < 1e-9);
    CHECK(std::abs(s.i_lin.a + s.i_lin.b + s.i_lin.c) < 1e-9);
    const ThreePhase i0 = plant.load_current();
    CHECK(std::abs(i0.a + i0.b + i0.c) < 1e-9);
  }
}

TEST_CASE("rectifier dc-link current never goes negative") {
  Plant plant(PlantParams{}, {}, {}, Topology{false, true});
  plant.state().u_c = {250.0, -120.0, -130.0};
  for (int k = 0; k < 5000; ++k) {
    // swinging bus voltage repeatedly starves the bridge
    const double th = 100.0 * 3.141592653589793 * plant.state().t;
    plant.state().u_c = {250.0 * std::cos(th), 250.0 * std::cos(th - 2.0944),
                         250.0 * std::cos(th + 2.0944)};
    plant.step({0.0, 0.0, 0.0}, 1e-6);
    CHECK(plant.state().i_dc >= 0.0);
  }
}

TEST_CASE("deterministic replay is bit identical") {
  auto run = [] {
    Plant plant(PlantParams{}, {9.0, 3e-3}, {}, Topology{true, true});
    plant.state().u_c = {10.0, -5.0, -5.0};
    for (int k = 0; k < 3000; ++k) plant.advance({120.0, -80.0, -40.0}, 1, 1e-6);
    return plant.state();
  };
  const PlantState a = run();
  const PlantState b = run();
  CHECK(std::memcmp(&a, &b, sizeof(PlantState)) == 0);
}

TEST_CASE("disconnecting the linear load zeroes its state") {
  Plant plant(PlantParams{}, {9.0, 3e-3}, {}, Topology{true, false});
  plant.state().u_c = {100.0, -50.0, -50.0};
  for (int k = 0; k < 500; ++k) plant.step({0, 0, 0}, 1e-6);
  CHECK(plant.state().i_lin.a != 0.0);
  plant.connect_linear(false);
  CHECK(plant.state().i_lin.a == 0.0);
  CHECK(plant.load_current().a == 0.0);
}

TEST_CASE("plant scaling mutates only L_s and R_s") {
  Plant plant(PlantParams{}, {}, {}, Topology{false, false});
  plant.scale_plant(1.4);
  CHECK(plant.params().l_s == doctest::Approx(2.4e-3 * 1.4));
  CHECK(plant.params().r_s == doctest::Approx(0.1 * 1.4));
  CHECK(plant.params().c_s == 15e-6);
  CHECK(plant.params().u_bat == 700.0);
}

TEST_CASE("runaway input drives the state out of the finite range") {
  Plant plant(PlantParams{}, {}, {}, Topology{false, false});
  for (int k = 0; k < 50 && plant.finite(); ++k)
    plant.step({1e300, -1e300, 0.0}, 1e-6);
  CHECK_FALSE(plant.finite());
}
