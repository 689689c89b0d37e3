#include "gfmi/simloop.hpp"

#include <algorithm>
#include <cmath>

namespace gfmi {

namespace {
constexpr double kTimeEps = 1e-9;  // absorbs micro-step accumulation drift
}

Scenario default_scenario() {
  Scenario sc;
  sc.horizon = 0.7;
  sc.linear_connected = true;
  sc.nonlinear_connected = false;
  sc.linear_load = {9.0, 3e-3};
  sc.events = {
      {0.1, EventKind::ScaleLinearLoad, 0.5},
      {0.2, EventKind::ConnectNonlinear, 1.0},
      {0.2, EventKind::DisconnectLinear, 1.0},
      {0.5, EventKind::ScalePlant, 1.4},
  };
  return sc;
}

SimRun::SimRun(const SmcGains& gains, const Scenario& scenario,
               const SimOptions& options)
    : opt_(options),
      scenario_(scenario),
      plant_(options.sys.plant, scenario.linear_load, options.sys.nonlinear,
             Topology{scenario.linear_connected, scenario.nonlinear_connected}),
      ctrl_(options.sys.control, gains),
      events_(scenario.events) {
  std::sort(events_.begin(), events_.end(), [](const Event& a, const Event& b) {
    if (a.time != b.time) return a.time < b.time;
    if (a.kind != b.kind) return static_cast<int>(a.kind) < static_cast<int>(b.kind);
    return a.factor < b.factor;
  });
  const double t_sam = opt_.sys.control.t_sam;
  total_ticks_ = static_cast<std::int64_t>(std::floor(scenario_.horizon / t_sam + kTimeEps));
  steps_per_tick_ = static_cast<int>(std::llround(t_sam / opt_.sys.dt_sim));
}

void SimRun::apply_due_events(double now) {
  while (next_event_ < events_.size() && events_[next_event_].time <= now + kTimeEps) {
    const Event& ev = events_[next_event_];
    switch (ev.kind) {
      case EventKind::ConnectLinear: plant_.connect_linear(true); break;
      case EventKind::DisconnectLinear: plant_.connect_linear(false); break;
      case EventKind::ScaleLinearLoad: plant_.scale_linear_load(ev.factor); break;
      case EventKind::ConnectNonlinear: plant_.connect_nonlinear(true); break;
      case EventKind::DisconnectNonlinear: plant_.connect_nonlinear(false); break;
      case EventKind::ScalePlant: plant_.scale_plant(ev.factor); break;
    }
    ++next_event_;
  }
}

bool SimRun::advance_to(double t_end) {
  const double t_sam = opt_.sys.control.t_sam;
  const double dt = opt_.sys.dt_sim;

  while (next_tick_ <= total_ticks_ && next_tick_ * t_sam <= t_end + kTimeEps) {
    if (diverged_) return false;

    // carry the plant from the previous tick to this one
    if (next_tick_ > 0) {
      for (int n = 0; n < steps_per_tick_; ++n) {
        apply_due_events(plant_.state().t);
        plant_.advance(held_u_ref_, 1, dt);
      }
      if (!plant_.finite()) {
        diverged_ = true;
        iae_ = kDivergedPenalty;
        return false;
      }
    } else {
      apply_due_events(plant_.state().t);
    }

    const double t_k = next_tick_ * t_sam;
    const TickResult tr =
        ctrl_.tick(plant_.state().i_l, plant_.state().u_c, plant_.load_current(), t_k);
    held_u_ref_ = tr.u_ref_abc;

    if (next_tick_ < total_ticks_) {
      iae_ += (std::abs(tr.i_ref.d - tr.i_l.d) + std::abs(tr.i_ref.q - tr.i_l.q)) * t_sam;
    }

    if (opt_.capture_trace) {
      TraceRow row;
      row.t = t_k;
      row.i_ld_ref = tr.i_ref.d;
      row.i_lq_ref = tr.i_ref.q;
      row.i_ld = tr.i_l.d;
      row.i_lq = tr.i_l.q;
      row.u_cd = tr.u_c.d;
      row.u_cq = tr.u_c.q;
      row.u_dref = tr.u_ref.d;
      row.u_qref = tr.u_ref.q;
      row.iae = iae_;
      const double u_bat = opt_.sys.plant.u_bat;
      row.duty_a = pwm_duty(tr.u_ref_abc.a, u_bat);
      row.duty_b = pwm_duty(tr.u_ref_abc.b, u_bat);
      row.duty_c = pwm_duty(tr.u_ref_abc.c, u_bat);
      trace_.rows.push_back(row);
    }

    ++next_tick_;
  }
  return !diverged_;
}

CostResult run_scenario(const SmcGains& gains, const Scenario& scenario,
                        const SimOptions& options) {
  SimRun run(gains, scenario, options);
  run.advance_to(scenario.horizon);

  CostResult res;
  res.iae = run.iae();
  res.diverged = run.diverged();
  if (options.capture_trace) res.trace = std::move(run.trace());
  return res;
}

TrackingMetrics tracking_metrics(const Trace& trace, double t0, double t1,
                                 std::optional<double> band_abs) {
  TrackingMetrics m;
  std::size_t first = trace.rows.size(), last = 0;
  for (std::size_t i = 0; i < trace.rows.size(); ++i) {
    const double t = trace.rows[i].t;
    if (t >= t0 - kTimeEps && t <= t1 + kTimeEps) {
      if (i < first) first = i;
      last = i;
    }
  }
  if (first >= trace.rows.size() || last < first) return m;

  const std::size_t n = last - first + 1;
  const std::size_t tail_start = last - (n - 1) / 5;  // final 20 %

  double ref_final = 0.0, sse = 0.0;
  for (std::size_t i = tail_start; i <= last; ++i) {
    ref_final += trace.rows[i].i_ld_ref;
    sse += std::abs(trace.rows[i].i_ld_ref - trace.rows[i].i_ld);
  }
  const double tail_n = static_cast<double>(last - tail_start + 1);
  ref_final /= tail_n;
  m.steady_state_error = sse / tail_n;

  const double ref_init = trace.rows[first].i_ld_ref;
  const double step = ref_final - ref_init;
  const double step_mag = std::abs(step);

  if (step_mag > 1e-9 * std::max(1.0, std::abs(ref_final))) {
    double peak = 0.0;
    for (std::size_t i = first; i <= last; ++i) {
      const double excursion = (trace.rows[i].i_ld - ref_final) * (step > 0 ? 1.0 : -1.0);
      peak = std::max(peak, excursion);
    }
    m.overshoot_pct = 100.0 * peak / step_mag;
  }

  const double band = band_abs ? *band_abs : 0.02 * step_mag;
  if (band > 0.0) {
    // earliest time after which the signal never leaves the band
    std::size_t settle = last + 1;
    for (std::size_t i = last + 1; i-- > first;) {
      if (std::abs(trace.rows[i].i_ld - ref_final) > band) break;
      settle = i;
    }
    if (settle <= last) m.settling_time = trace.rows[settle].t - trace.rows[first].t;
  }
  return m;
}

}  // namespace gfmi
