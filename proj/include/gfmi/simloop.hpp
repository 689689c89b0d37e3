#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "gfmi/control.hpp"
#include "gfmi/plant.hpp"

namespace gfmi {

enum class EventKind {
  ConnectLinear,
  DisconnectLinear,
  ScaleLinearLoad,     // R_l *= factor
  ConnectNonlinear,
  DisconnectNonlinear,
  ScalePlant,          // plant L_s and R_s *= factor, controller untouched
};

struct Event {
  double time = 0.0;
  EventKind kind = EventKind::ConnectLinear;
  double factor = 1.0;
};

// Timed event list plus the initial topology. Events may share a timestamp
// (the reference scenario swaps loads at 0.2 s); execution order is fixed by
// sorting on (time, kind, factor) so any input permutation runs identically.
struct Scenario {
  double horizon = 0.7;
  std::vector<Event> events;
  bool linear_connected = true;
  bool nonlinear_connected = false;
  LinearLoadParams linear_load{};
};

// Reference scenario: linear-load step at 0.1 s, load swap at 0.2 s (two
// event records), 1.4x plant L_s/R_s at 0.5 s, 0.7 s horizon.
Scenario default_scenario();

struct TraceRow {
  double t = 0.0;
  double i_ld_ref = 0.0, i_lq_ref = 0.0;
  double i_ld = 0.0, i_lq = 0.0;
  double u_cd = 0.0, u_cq = 0.0;
  double u_dref = 0.0, u_qref = 0.0;
  double iae = 0.0;
  double duty_a = 0.0, duty_b = 0.0, duty_c = 0.0;  // modulator snapshot
};

struct Trace {
  std::vector<TraceRow> rows;
};

struct SystemConfig {
  PlantParams plant{};
  NonlinearLoadParams nonlinear{};
  ControlConfig control{};
  double dt_sim = 1e-6;    // plant micro-step (s)
};

constexpr double kDivergedPenalty = 1e6;  // A*s, dominates any feasible IAE

struct SimOptions {
  SystemConfig sys{};
  bool capture_trace = false;
};

struct CostResult {
  double iae = 0.0;
  bool diverged = false;
  std::optional<Trace> trace;
};

// One simulation session: controller ticks at T_sam, plant micro-steps at
// dt_sim, events applied at the first micro-step at or past their timestamp.
// Exposed so callers can split a run into legs with state carried across.
class SimRun {
 public:
  SimRun(const SmcGains& gains, const Scenario& scenario, const SimOptions& options);

  // Executes every controller tick with tick time <= t_end. Returns false if
  // the plant state left the finite range.
  bool advance_to(double t_end);

  bool done() const { return next_tick_ > total_ticks_; }
  bool diverged() const { return diverged_; }
  double iae() const { return iae_; }
  std::int64_t total_ticks() const { return total_ticks_; }
  const Trace& trace() const { return trace_; }
  Trace& trace() { return trace_; }
  const Plant& plant() const { return plant_; }
  const Controller& controller() const { return ctrl_; }

 private:
  void apply_due_events(double now);

  SimOptions opt_;
  Scenario scenario_;
  Plant plant_;
  Controller ctrl_;
  Trace trace_;
  std::vector<Event> events_;      // sorted copy
  std::size_t next_event_ = 0;
  std::int64_t next_tick_ = 0;     // tick index about to execute
  std::int64_t total_ticks_ = 0;   // final tick index N = floor(horizon/T_sam)
  int steps_per_tick_ = 0;
  ThreePhase held_u_ref_{};        // ZoH command between ticks
  double iae_ = 0.0;
  bool diverged_ = false;
};

// Full-horizon scenario run; IAE accumulated at controller ticks with the
// left rectangle rule over the |e_d| + |e_q| current-tracking error.
CostResult run_scenario(const SmcGains& gains, const Scenario& scenario,
                        const SimOptions& options = {});

struct TrackingMetrics {
  std::optional<double> overshoot_pct;     // absent when the window has no step
  std::optional<double> settling_time;     // absent when never settled
  double steady_state_error = 0.0;         // mean |ref - actual|, final 20 %
};

// Step-quality metrics for the d-axis current over [t0, t1]. The settling
// band defaults to 2 % of the reference step magnitude; pass band_abs to
// override with an absolute band.
TrackingMetrics tracking_metrics(const Trace& trace, double t0, double t1,
                                 std::optional<double> band_abs = std::nullopt);

}  // namespace gfmi
