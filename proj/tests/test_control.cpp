#include "gfmi/control.hpp"

#include <cmath>
#include <random>

#include "doctest.h"
#include "gfmi/frames.hpp"
#include "gfmi/simloop.hpp"

using namespace gfmi;

namespace {
constexpr double kPi = 3.14159265358979323846;
}

TEST_CASE("voltage gain synthesis places the nominal poles") {
  const VoltageLoopGains g = synthesize_voltage_gains(1.0, 10e-3, 15e-6);
  CHECK(g.omega_v == doctest::Approx(628.3185307179587).epsilon(1e-14));
  CHECK(g.k_pv == doctest::Approx(0.018849555921538759).epsilon(1e-14));
  CHECK(g.k_iv == doctest::Approx(5.9217626406536155).epsilon(1e-14));
  CHECK(g.xi == 1.0);
  CHECK(g.t_vres == 10e-3);
}

TEST_CASE("voltage gain synthesis scales linearly in c_s and k_pv in xi") {
  const VoltageLoopGains base = synthesize_voltage_gains(1.0, 10e-3, 15e-6);
  const VoltageLoopGains twice_c = synthesize_voltage_gains(1.0, 10e-3, 30e-6);
  CHECK(twice_c.k_pv == doctest::Approx(2.0 * base.k_pv).epsilon(1e-13));
  CHECK(twice_c.k_iv == doctest::Approx(2.0 * base.k_iv).epsilon(1e-13));

  const VoltageLoopGains half_xi = synthesize_voltage_gains(0.5, 10e-3, 15e-6);
  CHECK(half_xi.k_pv == doctest::Approx(0.5 * base.k_pv).epsilon(1e-13));
  CHECK(half_xi.k_iv == doctest::Approx(base.k_iv).epsilon(1e-13));
}

TEST_CASE("voltage gain identity k_pv^2 / k_iv = 4 xi^2 c_s") {
  std::mt19937_64 eng(11);
  std::uniform_real_distribution<double> xi(0.2, 2.0);
  std::uniform_real_distribution<double> tv(1e-3, 50e-3);
  std::uniform_real_distribution<double> cs(1e-6, 100e-6);
  for (int k = 0; k < 200; ++k) {
    const double x = xi(eng), t = tv(eng), c = cs(eng);
    const VoltageLoopGains g = synthesize_voltage_gains(x, t, c);
    CHECK(g.k_pv * g.k_pv / g.k_iv ==
          doctest::Approx(4.0 * x * x * c).epsilon(1e-10));
  }
}

TEST_CASE("voltage gain synthesis rejects non-positive parameters") {
  CHECK_THROWS_AS(synthesize_voltage_gains(0.0, 10e-3, 15e-6), std::invalid_argument);
  CHECK_THROWS_AS(synthesize_voltage_gains(1.0, 0.0, 15e-6), std::invalid_argument);
  CHECK_THROWS_AS(synthesize_voltage_gains(1.0, 10e-3, -1e-6), std::invalid_argument);
  ControlConfig bad;
  bad.xi = -1.0;
  CHECK_THROWS_AS(Controller(bad, SmcGains{}), std::invalid_argument);
}

TEST_CASE("voltage loop on the setpoint passes load current plus coupling") {
  Controller ctl(ControlConfig{}, SmcGains{});
  // zero error: proportional and integral terms vanish, leaving the
  // feed-forward of i_0 and the +/- omega*C_s*u_c cross term
  const DqPair i_ref = ctl.voltage_loop({300.0, 0.0}, {300.0, 0.0}, {10.0, 0.0});
  CHECK(i_ref.d == doctest::Approx(10.0).epsilon(1e-14));
  CHECK(i_ref.q == doctest::Approx(1.413716694115407).epsilon(1e-13));
  CHECK(ctl.integrator().d == 0.0);
  CHECK(ctl.integrator().q == 0.0);
}

TEST_CASE("voltage loop integral term grows k_iv*t_sam per tick of error") {
  Controller ctl(ControlConfig{}, SmcGains{});
  const double k_iv = ctl.voltage_gains().k_iv;
  const double t_sam = ctl.config().t_sam;

  const DqPair first = ctl.voltage_loop({0.0, 0.0}, {1.0, 0.0}, {0.0, 0.0});
  DqPair last = first;
  for (int k = 1; k < 100; ++k)
    last = ctl.voltage_loop({0.0, 0.0}, {1.0, 0.0}, {0.0, 0.0});
  // constant unit error: only the integral state changes between calls
  CHECK(last.d - first.d == doctest::Approx(k_iv * 99.0 * t_sam).epsilon(1e-10));
  CHECK(last.q == doctest::Approx(first.q).epsilon(1e-12));
  CHECK(ctl.integrator().d == doctest::Approx(k_iv * 100.0 * t_sam).epsilon(1e-12));
}

TEST_CASE("voltage loop integral term clamps at the anti-windup limit") {
  Controller ctl(ControlConfig{}, SmcGains{});
  for (int k = 0; k < 5; ++k)
    ctl.voltage_loop({0.0, 0.0}, {1e9, -1e9}, {0.0, 0.0});
  CHECK(ctl.integrator().d == ctl.config().integral_clamp);
  CHECK(ctl.integrator().q == -ctl.config().integral_clamp);
}

TEST_CASE("saturation is linear inside the band and clips outside") {
  CHECK(sat(0.5) == 0.5);
  CHECK(sat(-0.25) == -0.25);
  CHECK(sat(1.0) == 1.0);
  CHECK(sat(2.0) == 1.0);
  CHECK(sat(-3.0) == -1.0);
}

TEST_CASE("current loop on the surface returns the equivalent control") {
  Controller ctl(ControlConfig{}, SmcGains{});
  // zero error and first-call zero reference slope: the law reduces to
  // R_s*i_L -/+ omega*L_s*i_L(cross) + u_C
  const DqPair u = ctl.smc_current_loop({10.0, 0.0}, {10.0, 0.0}, {300.0, 0.0});
  CHECK(u.d == doctest::Approx(301.0).epsilon(1e-14));
  CHECK(u.q == doctest::Approx(7.5398223686155035).epsilon(1e-13));
}

TEST_CASE("current loop reaching term pushes against the current error") {
  SmcGains g;
  g.k_cd = 1000.0;
  g.k_cq = 1000.0;
  g.k_sat = 1.0;
  Controller ctl(ControlConfig{}, g);
  // i_L two boundary layers above the reference: sat saturates at +1 and the
  // d command drops by L_s*k_cd below the resistive feed-forward
  const DqPair u = ctl.smc_current_loop({2.0, 0.0}, {0.0, 0.0}, {0.0, 0.0});
  CHECK(u.d == doctest::Approx(-2.4 + 0.2).epsilon(1e-12));
  CHECK(u.q == doctest::Approx(1.5079644737231007).epsilon(1e-12));

  Controller neg(ControlConfig{}, g);
  const DqPair v = neg.smc_current_loop({-2.0, 0.0}, {0.0, 0.0}, {0.0, 0.0});
  CHECK(v.d == doctest::Approx(2.4 - 0.2).epsilon(1e-12));
}

TEST_CASE("current loop reference slope is gated off on the first call") {
  Controller ctl(ControlConfig{}, SmcGains{});
  const SmcGains& g = ctl.gains();
  const ControlConfig& cfg = ctl.config();

  // first call: nonzero reference but no history, so no d/dt feed-forward
  const DqPair first = ctl.smc_current_loop({0.0, 0.0}, {0.0, 0.0}, {0.0, 0.0});
  CHECK(first.d == 0.0);
  CHECK(first.q == 0.0);

  // second call: reference stepped by 1 A, slope term is L_s/t_sam
  const DqPair second = ctl.smc_current_loop({1.0, 0.0}, {1.0, 0.0}, {0.0, 0.0});
  const double slope = cfg.l_s * 1.0 / cfg.t_sam;
  CHECK(second.d == doctest::Approx(slope + cfg.r_s * 1.0).epsilon(1e-12));
  CHECK(second.q == doctest::Approx(cfg.omega * cfg.l_s * 1.0).epsilon(1e-12));
  CHECK(g.k_ttd == 1.0);
}

TEST_CASE("current loop depends only on the k_c over k_tt ratios") {
  SmcGains scaled;
  scaled.k_cd = 500.0;
  scaled.k_cq = 250.0;
  scaled.k_ttd = 0.5;
  scaled.k_ttq = 0.25;
  SmcGains plain;
  plain.k_cd = 1000.0;
  plain.k_cq = 1000.0;

  Controller a(ControlConfig{}, scaled);
  Controller b(ControlConfig{}, plain);
  std::mt19937_64 eng(5);
  std::uniform_real_distribution<double> amp(-40.0, 40.0);
  for (int k = 0; k < 50; ++k) {
    const DqPair i_l{amp(eng), amp(eng)};
    const DqPair i_ref{amp(eng), amp(eng)};
    const DqPair u_c{10.0 * amp(eng), 10.0 * amp(eng)};
    const DqPair ua = a.smc_current_loop(i_l, i_ref, u_c);
    const DqPair ub = b.smc_current_loop(i_l, i_ref, u_c);
    CHECK(ua.d == ub.d);
    CHECK(ua.q == ub.q);
  }
}

TEST_CASE("grid-forming references rotate at omega and hold the d setpoint") {
  const ControlConfig cfg;
  const References r0 = generate_references(0.0, cfg);
  CHECK(r0.u_c_ref.d == 300.0);
  CHECK(r0.u_c_ref.q == 0.0);
  CHECK(r0.theta == 0.0);

  // half a period: theta lands on the +/- pi seam
  const References r1 = generate_references(10e-3, cfg);
  CHECK(std::abs(r1.theta) == doctest::Approx(kPi).epsilon(1e-12));

  // full period: back to zero
  const References r2 = generate_references(20e-3, cfg);
  CHECK(std::abs(r2.theta) <= 1e-12);

  const References r3 = generate_references(2.5e-3, cfg);
  CHECK(r3.theta == doctest::Approx(kPi / 4.0).epsilon(1e-12));
}

TEST_CASE("tick transforms samples into dq and the command back to abc") {
  Controller ctl(ControlConfig{}, SmcGains{});
  const double t = 1.23e-3;
  const double theta = wrap_angle(ctl.config().omega * t);

  const ThreePhase i_l = inverse_clarke(inverse_park({5.0, -2.0}, theta));
  const ThreePhase u_c = inverse_clarke(inverse_park({280.0, 4.0}, theta));
  const ThreePhase i_0 = inverse_clarke(inverse_park({3.0, 1.0}, theta));

  const TickResult out = ctl.tick(i_l, u_c, i_0, t);
  CHECK(out.theta == doctest::Approx(theta).epsilon(1e-14));
  CHECK(out.i_l.d == doctest::Approx(5.0).epsilon(1e-12));
  CHECK(out.i_l.q == doctest::Approx(-2.0).epsilon(1e-12));
  CHECK(out.u_c.d == doctest::Approx(280.0).epsilon(1e-12));
  CHECK(out.u_c.q == doctest::Approx(4.0).epsilon(1e-12));

  // the abc command is the dq command rotated back out, zero-sequence free
  const ThreePhase expect = inverse_clarke(inverse_park(out.u_ref, theta));
  CHECK(out.u_ref_abc.a == doctest::Approx(expect.a).epsilon(1e-12));
  CHECK(out.u_ref_abc.b == doctest::Approx(expect.b).epsilon(1e-12));
  CHECK(out.u_ref_abc.c == doctest::Approx(expect.c).epsilon(1e-12));
  CHECK(std::abs(out.u_ref_abc.a + out.u_ref_abc.b + out.u_ref_abc.c) <= 1e-9);
}

TEST_CASE("reset restores the freshly constructed controller state") {
  Controller used(ControlConfig{}, SmcGains{});
  const ThreePhase i_l{4.0, -1.0, -3.0};
  const ThreePhase u_c{200.0, -90.0, -110.0};
  const ThreePhase i_0{1.0, 0.5, -1.5};
  for (int k = 0; k < 10; ++k)
    used.tick(i_l, u_c, i_0, k * used.config().t_sam);
  used.reset();
  CHECK(used.integrator().d == 0.0);
  CHECK(used.integrator().q == 0.0);

  Controller fresh(ControlConfig{}, SmcGains{});
  const TickResult a = used.tick(i_l, u_c, i_0, 0.0);
  const TickResult b = fresh.tick(i_l, u_c, i_0, 0.0);
  CHECK(a.u_ref.d == b.u_ref.d);
  CHECK(a.u_ref.q == b.u_ref.q);
  CHECK(a.i_ref.d == b.i_ref.d);
  CHECK(a.i_ref.q == b.i_ref.q);
}

TEST_CASE("narrow boundary layer chatters harder in closed loop") {
  Scenario sc;
  sc.horizon = 0.06;
  sc.events.clear();

  auto activity = [&](double k_sat) {
    SmcGains g;
    g.k_sat = k_sat;
    SimOptions opt;
    opt.capture_trace = true;
    const CostResult res = run_scenario(g, sc, opt);
    REQUIRE_FALSE(res.diverged);
    REQUIRE(res.trace.has_value());
    const auto& rows = res.trace->rows;
    double sum = 0.0;
    for (std::size_t k = 1; k < rows.size(); ++k)
      if (rows[k].t >= 0.04)
        sum += std::abs(rows[k].u_dref - rows[k - 1].u_dref);
    return sum;
  };

  // shrinking the layer by 10x forces the reaching term through its full
  // swing more often once the loop is in steady state
  CHECK(activity(0.1) > activity(1.0));
}
