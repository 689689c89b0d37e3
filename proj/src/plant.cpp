#include "gfmi/plant.hpp"

namespace gfmi {

RectifierConduction rectifier_select(const ThreePhase& u_c, double i_dc,
                                     double u_dc, const NonlinearLoadParams& p) {
  const double v[3] = {u_c.a, u_c.b, u_c.c};
  int hi = 0, lo = 0;
  for (int i = 1; i < 3; ++i) {
    if (v[i] > v[hi]) hi = i;
    if (v[i] < v[lo]) lo = i;
  }
  RectifierConduction cond{false, hi, lo};
  const double line = v[hi] - v[lo] - 2.0 * p.u_f;
  if (i_dc > 0.0) {
    cond.conducting = true;
  } else {
    // forward bias against the dc-link voltage starts conduction
    cond.conducting = line > u_dc;
  }
  return cond;
}

RectifierOutput rectifier_evaluate(const RectifierConduction& cond,
                                   const ThreePhase& u_c, double i_dc,
                                   const NonlinearLoadParams& p) {
  RectifierOutput out;
  if (!cond.conducting) return out;
  out.bridge_voltage = detail::phase(u_c, cond.hi) - detail::phase(u_c, cond.lo) -
                       2.0 * p.u_f;
  const double i = std::max(i_dc, 0.0);
  detail::set_phase(out.i_ac, cond.hi, i);
  detail::set_phase(out.i_ac, cond.lo, -i);
  return out;
}

RectifierOutput rectifier_conduction(const ThreePhase& u_c, double i_dc,
                                     double u_dc, const NonlinearLoadParams& p) {
  return rectifier_evaluate(rectifier_select(u_c, i_dc, u_dc, p), u_c, i_dc, p);
}

PlantDeriv plant_derivatives(const PlantState& s, const ThreePhase& u_inv,
                             const Topology& topo, const PlantParams& p,
                             const LinearLoadParams& lin,
                             const NonlinearLoadParams& nl,
                             const RectifierConduction& rect) {
  PlantDeriv d;

  ThreePhase i_0{0.0, 0.0, 0.0};
  if (topo.linear) {
    if (lin.l_l > 0.0) {
      d.di_lin.a = (s.u_c.a - lin.r_l * s.i_lin.a) / lin.l_l;
      d.di_lin.b = (s.u_c.b - lin.r_l * s.i_lin.b) / lin.l_l;
      d.di_lin.c = (s.u_c.c - lin.r_l * s.i_lin.c) / lin.l_l;
      i_0.a += s.i_lin.a;
      i_0.b += s.i_lin.b;
      i_0.c += s.i_lin.c;
    } else {
      // purely resistive load, current is algebraic
      i_0.a += s.u_c.a / lin.r_l;
      i_0.b += s.u_c.b / lin.r_l;
      i_0.c += s.u_c.c / lin.r_l;
    }
  }

  if (topo.nonlinear) {
    const RectifierOutput ro = rectifier_evaluate(rect, s.u_c, s.i_dc, nl);
    i_0.a += ro.i_ac.a;
    i_0.b += ro.i_ac.b;
    i_0.c += ro.i_ac.c;
    if (rect.conducting) {
      d.di_dc = (ro.bridge_voltage - s.u_dc) / nl.l_n;
    } else if (s.i_dc > 0.0) {
      // dc link still carrying current with the bridge disconnected upstream
      d.di_dc = -s.u_dc / nl.l_n;
    }
    d.du_dc = (std::max(s.i_dc, 0.0) - s.u_dc / nl.r_n) / nl.c_n;
  } else if (s.i_dc > 0.0 || s.u_dc != 0.0) {
    // disconnected dc link keeps discharging through R_n
    if (s.i_dc > 0.0) d.di_dc = -s.u_dc / nl.l_n;
    d.du_dc = (std::max(s.i_dc, 0.0) - s.u_dc / nl.r_n) / nl.c_n;
  }

  d.di_l.a = (u_inv.a - s.u_c.a - p.r_s * s.i_l.a) / p.l_s;
  d.di_l.b = (u_inv.b - s.u_c.b - p.r_s * s.i_l.b) / p.l_s;
  d.di_l.c = (u_inv.c - s.u_c.c - p.r_s * s.i_l.c) / p.l_s;

  d.du_c.a = (s.i_l.a - i_0.a) / p.c_s;
  d.du_c.b = (s.i_l.b - i_0.b) / p.c_s;
  d.du_c.c = (s.i_l.c - i_0.c) / p.c_s;

  return d;
}

namespace {

inline PlantState offset(const PlantState& s, const PlantDeriv& d, double h) {
  PlantState r = s;
  r.i_l.a += h * d.di_l.a;
  r.i_l.b += h * d.di_l.b;
  r.i_l.c += h * d.di_l.c;
  r.u_c.a += h * d.du_c.a;
  r.u_c.b += h * d.du_c.b;
  r.u_c.c += h * d.du_c.c;
  r.i_lin.a += h * d.di_lin.a;
  r.i_lin.b += h * d.di_lin.b;
  r.i_lin.c += h * d.di_lin.c;
  r.i_dc += h * d.di_dc;
  r.u_dc += h * d.du_dc;
  return r;
}

inline void combine(PlantState& s, const PlantDeriv& k1, const PlantDeriv& k2,
                    const PlantDeriv& k3, const PlantDeriv& k4, double dt) {
  const double w = dt / 6.0;
  s.i_l.a += w * (k1.di_l.a + 2 * k2.di_l.a + 2 * k3.di_l.a + k4.di_l.a);
  s.i_l.b += w * (k1.di_l.b + 2 * k2.di_l.b + 2 * k3.di_l.b + k4.di_l.b);
  s.i_l.c += w * (k1.di_l.c + 2 * k2.di_l.c + 2 * k3.di_l.c + k4.di_l.c);
  s.u_c.a += w * (k1.du_c.a + 2 * k2.du_c.a + 2 * k3.du_c.a + k4.du_c.a);
  s.u_c.b += w * (k1.du_c.b + 2 * k2.du_c.b + 2 * k3.du_c.b + k4.du_c.b);
  s.u_c.c += w * (k1.du_c.c + 2 * k2.du_c.c + 2 * k3.du_c.c + k4.du_c.c);
  s.i_lin.a += w * (k1.di_lin.a + 2 * k2.di_lin.a + 2 * k3.di_lin.a + k4.di_lin.a);
  s.i_lin.b += w * (k1.di_lin.b + 2 * k2.di_lin.b + 2 * k3.di_lin.b + k4.di_lin.b);
  s.i_lin.c += w * (k1.di_lin.c + 2 * k2.di_lin.c + 2 * k3.di_lin.c + k4.di_lin.c);
  s.i_dc += w * (k1.di_dc + 2 * k2.di_dc + 2 * k3.di_dc + k4.di_dc);
  s.u_dc += w * (k1.du_dc + 2 * k2.du_dc + 2 * k3.du_dc + k4.du_dc);
}

}  // namespace

void Plant::step(const ThreePhase& u_inv, double dt) {
  const RectifierConduction rect =
      topo_.nonlinear ? rectifier_select(state_.u_c, state_.i_dc, state_.u_dc, nonlinear_)
                      : RectifierConduction{};

  const PlantDeriv k1 = plant_derivatives(state_, u_inv, topo_, params_, linear_, nonlinear_, rect);
  const PlantDeriv k2 = plant_derivatives(offset(state_, k1, 0.5 * dt), u_inv, topo_, params_, linear_, nonlinear_, rect);
  const PlantDeriv k3 = plant_derivatives(offset(state_, k2, 0.5 * dt), u_inv, topo_, params_, linear_, nonlinear_, rect);
  const PlantDeriv k4 = plant_derivatives(offset(state_, k3, dt), u_inv, topo_, params_, linear_, nonlinear_, rect);
  combine(state_, k1, k2, k3, k4, dt);

  // diodes block reverse current
  if (state_.i_dc < 0.0) state_.i_dc = 0.0;
  state_.t += dt;
}

void Plant::advance(const ThreePhase& u_ref_abc, int n_micro, double dt) {
  for (int n = 0; n < n_micro; ++n) {
    const double carrier_phase = state_.t * params_.f_s -
                                 std::floor(state_.t * params_.f_s);
    const SwitchState ss = pwm_modulate(u_ref_abc, params_.u_bat, carrier_phase);
    step(inverter_voltages(ss, params_.u_bat), dt);
  }
}

ThreePhase Plant::load_current() const {
  ThreePhase i_0{0.0, 0.0, 0.0};
  if (topo_.linear) {
    if (linear_.l_l > 0.0) {
      i_0 = state_.i_lin;
    } else {
      i_0 = {state_.u_c.a / linear_.r_l, state_.u_c.b / linear_.r_l,
             state_.u_c.c / linear_.r_l};
    }
  }
  if (topo_.nonlinear) {
    const RectifierOutput ro = rectifier_conduction(state_.u_c, state_.i_dc,
                                                    state_.u_dc, nonlinear_);
    i_0.a += ro.i_ac.a;
    i_0.b += ro.i_ac.b;
    i_0.c += ro.i_ac.c;
  }
  return i_0;
}

double Plant::stored_energy() const {
  const auto sq3 = [](const ThreePhase& x) {
    return x.a * x.a + x.b * x.b + x.c * x.c;
  };
  double e = 0.5 * params_.l_s * sq3(state_.i_l) + 0.5 * params_.c_s * sq3(state_.u_c);
  if (topo_.linear && linear_.l_l > 0.0) e += 0.5 * linear_.l_l * sq3(state_.i_lin);
  e += 0.5 * nonlinear_.l_n * state_.i_dc * state_.i_dc +
       0.5 * nonlinear_.c_n * state_.u_dc * state_.u_dc;
  return e;
}

bool Plant::finite() const {
  const double v[] = {state_.i_l.a,   state_.i_l.b,   state_.i_l.c,
                      state_.u_c.a,   state_.u_c.b,   state_.u_c.c,
                      state_.i_lin.a, state_.i_lin.b, state_.i_lin.c,
                      state_.i_dc,    state_.u_dc};
  for (double x : v) {
    if (!std::isfinite(x) || std::abs(x) > 1e9) return false;
  }
  return true;
}

void Plant::connect_linear(bool on) {
  if (topo_.linear && !on) state_.i_lin = {0.0, 0.0, 0.0};
  topo_.linear = on;
}

}  // namespace gfmi
