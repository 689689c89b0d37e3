#pragma once

#include <algorithm>
#include <cmath>

#include "gfmi/frames.hpp"

namespace gfmi {

struct PlantParams {
  double l_s = 2.4e-3;     // filter inductance (H)
  double r_s = 0.1;        // filter series resistance (Ohm)
  double c_s = 15e-6;      // filter capacitance (F)
  double u_bat = 700.0;    // dc bus voltage (V)
  double f_s = 10e3;       // switching frequency (Hz)
  double omega = 100.0 * 3.14159265358979323846;  // electrical angular frequency (rad/s)
};

struct LinearLoadParams {
  double r_l = 9.0;        // per-phase resistance (Ohm)
  double l_l = 3e-3;       // per-phase inductance (H)
};

struct NonlinearLoadParams {
  double l_n = 1.8e-3;     // dc-side inductance (H)
  double c_n = 2.2e-3;     // dc-side capacitance (F)
  double r_n = 460.0;      // dc-side resistance (Ohm)
  double u_f = 0.8;        // diode forward drop (V)
};

struct SwitchState {
  int ss_a = 0;
  int ss_b = 0;
  int ss_c = 0;
};

struct Topology {
  bool linear = false;
  bool nonlinear = false;
};

struct PlantState {
  ThreePhase i_l;          // filter inductor currents (A)
  ThreePhase u_c;          // filter capacitor voltages (V)
  ThreePhase i_lin;        // linear-load currents (A)
  double i_dc = 0.0;       // rectifier dc-link inductor current (A)
  double u_dc = 0.0;       // rectifier dc-link capacitor voltage (V)
  double t = 0.0;          // simulation time (s)
};

struct PlantDeriv {
  ThreePhase di_l;
  ThreePhase du_c;
  ThreePhase di_lin;
  double di_dc = 0.0;
  double du_dc = 0.0;
};

// Line-to-neutral inverter voltages for a two-level bridge, common mode removed.
inline ThreePhase inverter_voltages(const SwitchState& ss, double u_bat) {
  const double k = u_bat / 3.0;
  return {k * (2 * ss.ss_a - ss.ss_b - ss.ss_c),
          k * (-ss.ss_a + 2 * ss.ss_b - ss.ss_c),
          k * (-ss.ss_a - ss.ss_b + 2 * ss.ss_c)};
}

// Symmetric triangular carrier, value in [0, 1], minimum at phase 0.
inline double pwm_carrier(double carrier_phase) {
  return 1.0 - std::abs(2.0 * carrier_phase - 1.0);
}

// Normalized reference in [0, 1] for one phase voltage command.
inline double pwm_duty(double u_ref, double u_bat) {
  return std::clamp(0.5 + u_ref / u_bat, 0.0, 1.0);
}

// Carrier comparison per phase. Compare with >= so a saturated reference
// pins the switch for the whole period.
inline SwitchState pwm_modulate(const ThreePhase& u_ref_abc, double u_bat,
                                double carrier_phase) {
  const double carrier = pwm_carrier(carrier_phase);
  return {pwm_duty(u_ref_abc.a, u_bat) >= carrier ? 1 : 0,
          pwm_duty(u_ref_abc.b, u_bat) >= carrier ? 1 : 0,
          pwm_duty(u_ref_abc.c, u_bat) >= carrier ? 1 : 0};
}

// Which line pair of the diode bridge conducts; frozen across one RK4 step.
struct RectifierConduction {
  bool conducting = false;
  int hi = 0;              // phase index carrying +i_dc
  int lo = 0;              // phase index carrying -i_dc
};

struct RectifierOutput {
  double bridge_voltage = 0.0;
  ThreePhase i_ac;
};

namespace detail {
inline double phase(const ThreePhase& x, int i) {
  return i == 0 ? x.a : (i == 1 ? x.b : x.c);
}
inline void set_phase(ThreePhase& x, int i, double v) {
  (i == 0 ? x.a : (i == 1 ? x.b : x.c)) = v;
}
}  // namespace detail

// Pick the max/min phase pair; ties resolve to the lowest phase index.
RectifierConduction rectifier_select(const ThreePhase& u_c, double i_dc,
                                     double u_dc, const NonlinearLoadParams& p);

// Ideal max/min line-pair conduction with a 2*u_f series drop.
RectifierOutput rectifier_conduction(const ThreePhase& u_c, double i_dc,
                                     double u_dc, const NonlinearLoadParams& p);

// Evaluate bridge voltage / ac currents for a frozen conduction state.
RectifierOutput rectifier_evaluate(const RectifierConduction& cond,
                                   const ThreePhase& u_c, double i_dc,
                                   const NonlinearLoadParams& p);

// Time derivatives of every plant state. The rectifier conduction state is
// passed in frozen so all RK4 stages see one topology.
PlantDeriv plant_derivatives(const PlantState& s, const ThreePhase& u_inv,
                             const Topology& topo, const PlantParams& p,
                             const LinearLoadParams& lin,
                             const NonlinearLoadParams& nl,
                             const RectifierConduction& rect);

// Switching plant advanced by explicit RK4 micro-steps.
class Plant {
 public:
  Plant() = default;
  Plant(const PlantParams& p, const LinearLoadParams& lin,
        const NonlinearLoadParams& nl, const Topology& topo)
      : params_(p), linear_(lin), nonlinear_(nl), topo_(topo) {}

  // One micro-step with the switch and diode states frozen across the step.
  void step(const ThreePhase& u_inv, double dt);

  // n micro-steps with the voltage command held; the carrier comparison is
  // re-evaluated every micro-step from absolute simulation time.
  void advance(const ThreePhase& u_ref_abc, int n_micro, double dt);

  // Load current drawn at bus 1 (linear + rectifier phases).
  ThreePhase load_current() const;

  // Total stored energy in every connected L and C element (J).
  double stored_energy() const;

  bool finite() const;

  void connect_linear(bool on);
  void connect_nonlinear(bool on) { topo_.nonlinear = on; }
  void scale_linear_load(double factor) { linear_.r_l *= factor; }
  void scale_plant(double factor) {
    params_.l_s *= factor;
    params_.r_s *= factor;
  }

  const PlantState& state() const { return state_; }
  PlantState& state() { return state_; }
  const PlantParams& params() const { return params_; }
  const LinearLoadParams& linear_load() const { return linear_; }
  const NonlinearLoadParams& nonlinear_load() const { return nonlinear_; }
  const Topology& topology() const { return topo_; }

 private:
  PlantParams params_;
  LinearLoadParams linear_;
  NonlinearLoadParams nonlinear_;
  Topology topo_;
  PlantState state_;
};

}  // namespace gfmi
