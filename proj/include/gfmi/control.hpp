#pragma once

#include <stdexcept>

#include "gfmi/frames.hpp"

namespace gfmi {

struct VoltageLoopGains {
  double k_pv = 0.0;       // proportional gain
  double k_iv = 0.0;       // integral gain
  double xi = 1.0;         // damping factor
  double omega_v = 0.0;    // natural frequency (rad/s)
  double t_vres = 0.0;     // desired voltage response time (s)
};

// Pole-placement synthesis: omega_v = 2*pi/T_vres, K_pv = 2*xi*omega_v*C_s,
// K_iv = omega_v^2*C_s.
VoltageLoopGains synthesize_voltage_gains(double xi, double t_vres, double c_s);

// Tunable current-loop decision vector. k_tt scalings are kept at 1; the
// control law only ever uses the ratios k_c/k_tt. Defaults are the
// hand-tuned expert baseline the optimizers start from.
struct SmcGains {
  double k_cd = 1500.0;    // reaching gain, d axis (1/s)
  double k_cq = 1500.0;    // reaching gain, q axis (1/s)
  double k_sat = 0.2;      // boundary-layer width
  double k_ttd = 1.0;
  double k_ttq = 1.0;
};

// Boundary-layer saturation: linear inside |x| <= 1, clipped outside.
inline double sat(double x) {
  if (x > 1.0) return 1.0;
  if (x < -1.0) return -1.0;
  return x;
}

struct ControlConfig {
  double t_sam = 50e-6;    // sampling period (s)
  double t_vres = 10e-3;   // voltage response time (s)
  double t_cres = 0.5e-3;  // current response time (s), used as a settling bound
  double xi = 1.0;         // voltage-loop damping
  double u_amp = 300.0;    // reference voltage amplitude (V)
  double omega = 100.0 * 3.14159265358979323846;  // reference frequency (rad/s)
  // controller's model copies; the plant may drift away from these
  double l_s = 2.4e-3;
  double r_s = 0.1;
  double c_s = 15e-6;
  double integral_clamp = 50.0;  // anti-windup limit on the integral term (A)
};

struct References {
  DqPair u_c_ref;
  double theta = 0.0;
};

// Grid-forming reference: u_Cref = (u_amp, 0), theta = wrap(omega*t).
References generate_references(double t, const ControlConfig& cfg);

struct TickResult {
  ThreePhase u_ref_abc;    // voltage command handed to the modulator
  DqPair u_ref;            // dq voltage command
  DqPair i_ref;            // dq current reference from the voltage loop
  DqPair i_l;              // sampled dq inductor current
  DqPair u_c;              // sampled dq capacitor voltage
  double theta = 0.0;
};

// Cascaded PI voltage / sliding-mode current controller, executed once per
// sampling period on ZoH measurements.
class Controller {
 public:
  Controller(const ControlConfig& cfg, const SmcGains& gains);

  // PI voltage loop with load-current and capacitive-coupling feed-forward.
  DqPair voltage_loop(const DqPair& u_c, const DqPair& u_c_ref, const DqPair& i_0);

  // Sliding-mode current loop with dq decoupling feed-forward. The surface
  // per axis is the current error i_L - i_Lref, so the -L_s*k_c*sat(S/k_sat)
  // reaching term drives the error to zero.
  DqPair smc_current_loop(const DqPair& i_l, const DqPair& i_l_ref, const DqPair& u_c);

  // Full tick: transform abc samples, run both loops, return the abc voltage
  // command to hold until the next tick.
  TickResult tick(const ThreePhase& i_l, const ThreePhase& u_c,
                  const ThreePhase& i_0, double t);

  void reset();

  const ControlConfig& config() const { return cfg_; }
  const VoltageLoopGains& voltage_gains() const { return vgains_; }
  const SmcGains& gains() const { return gains_; }
  DqPair integrator() const { return {integ_d_, integ_q_}; }
  double theta() const { return theta_; }

 private:
  ControlConfig cfg_;
  SmcGains gains_;
  VoltageLoopGains vgains_;
  double integ_d_ = 0.0;   // integral term contribution (A)
  double integ_q_ = 0.0;
  DqPair prev_i_ref_;      // previous current reference for d/dt estimate
  bool has_prev_i_ref_ = false;
  double theta_ = 0.0;
};

}  // namespace gfmi
