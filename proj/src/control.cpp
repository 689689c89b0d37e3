#include "gfmi/control.hpp"

#include <algorithm>
#include <cmath>

namespace gfmi {

VoltageLoopGains synthesize_voltage_gains(double xi, double t_vres, double c_s) {
  if (xi <= 0.0 || t_vres <= 0.0 || c_s <= 0.0)
    throw std::invalid_argument("synthesize_voltage_gains: xi, t_vres, c_s must be positive");
  VoltageLoopGains g;
  g.xi = xi;
  g.t_vres = t_vres;
  g.omega_v = 2.0 * 3.14159265358979323846 / t_vres;
  g.k_pv = 2.0 * xi * g.omega_v * c_s;
  g.k_iv = g.omega_v * g.omega_v * c_s;
  return g;
}

References generate_references(double t, const ControlConfig& cfg) {
  return {{cfg.u_amp, 0.0}, wrap_angle(cfg.omega * t)};
}

Controller::Controller(const ControlConfig& cfg, const SmcGains& gains)
    : cfg_(cfg),
      gains_(gains),
      vgains_(synthesize_voltage_gains(cfg.xi, cfg.t_vres, cfg.c_s)) {}

void Controller::reset() {
  integ_d_ = 0.0;
  integ_q_ = 0.0;
  prev_i_ref_ = {0.0, 0.0};
  has_prev_i_ref_ = false;
  theta_ = 0.0;
}

DqPair Controller::voltage_loop(const DqPair& u_c, const DqPair& u_c_ref,
                                const DqPair& i_0) {
  const double e_d = u_c_ref.d - u_c.d;
  const double e_q = u_c_ref.q - u_c.q;

  // forward-Euler integral with anti-windup clamp on the contribution
  integ_d_ = std::clamp(integ_d_ + vgains_.k_iv * e_d * cfg_.t_sam,
                        -cfg_.integral_clamp, cfg_.integral_clamp);
  integ_q_ = std::clamp(integ_q_ + vgains_.k_iv * e_q * cfg_.t_sam,
                        -cfg_.integral_clamp, cfg_.integral_clamp);

  const double wc = cfg_.omega * cfg_.c_s;
  return {vgains_.k_pv * e_d + integ_d_ + i_0.d - u_c.q * wc,
          vgains_.k_pv * e_q + integ_q_ + i_0.q + u_c.d * wc};
}

DqPair Controller::smc_current_loop(const DqPair& i_l, const DqPair& i_l_ref,
                                    const DqPair& u_c) {
  const double s_d = i_l.d - i_l_ref.d;
  const double s_q = i_l.q - i_l_ref.q;

  DqPair dref{0.0, 0.0};
  if (has_prev_i_ref_) {
    dref.d = (i_l_ref.d - prev_i_ref_.d) / cfg_.t_sam;
    dref.q = (i_l_ref.q - prev_i_ref_.q) / cfg_.t_sam;
  }
  prev_i_ref_ = i_l_ref;
  has_prev_i_ref_ = true;

  const double wl = cfg_.omega * cfg_.l_s;
  return {-cfg_.l_s * (gains_.k_cd / gains_.k_ttd) * sat(s_d / gains_.k_sat) +
              cfg_.l_s * dref.d - wl * i_l.q + cfg_.r_s * i_l.d + u_c.d,
          -cfg_.l_s * (gains_.k_cq / gains_.k_ttq) * sat(s_q / gains_.k_sat) +
              cfg_.l_s * dref.q + wl * i_l.d + cfg_.r_s * i_l.q + u_c.q};
}

TickResult Controller::tick(const ThreePhase& i_l, const ThreePhase& u_c,
                            const ThreePhase& i_0, double t) {
  const References ref = generate_references(t, cfg_);
  theta_ = ref.theta;

  TickResult out;
  out.theta = ref.theta;
  out.i_l = park(clarke(i_l), ref.theta);
  out.u_c = park(clarke(u_c), ref.theta);
  const DqPair i_0_dq = park(clarke(i_0), ref.theta);

  out.i_ref = voltage_loop(out.u_c, ref.u_c_ref, i_0_dq);
  out.u_ref = smc_current_loop(out.i_l, out.i_ref, out.u_c);
  out.u_ref_abc = inverse_clarke(inverse_park(out.u_ref, ref.theta));
  return out;
}

}  // namespace gfmi
