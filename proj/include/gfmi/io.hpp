#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "gfmi/optimize.hpp"
#include "gfmi/simloop.hpp"

namespace gfmi {

// Everything a run needs, assembled from built-in defaults plus a config file.
struct RunSetup {
  SystemConfig sys{};
  Scenario scenario{};         // defaults to default_scenario()
  SearchSpace space{};
  OptimizerSettings optimizers{};
  int threads = 0;             // 0 = hardware concurrency
};

RunSetup default_setup();

// key = value text config; '#' starts a comment, `event = <time> <kind> [factor]`
// lines append to the scenario. Unknown keys or malformed values throw
// std::runtime_error carrying "<name>:<line>".
RunSetup parse_config(std::istream& in, const std::string& name);

// Reads a config file; missing file throws "scenario not found: <path>".
RunSetup load_config(const std::string& path);

std::string event_kind_name(EventKind kind);

// Shortest round-trippable decimal at 9 significant digits.
std::string format_g9(double v);

// Columns fixed: t,i_ld_ref,i_lq_ref,i_ld,i_lq,u_cd,u_cq,u_dref,u_qref,iae
void write_trace_csv(std::ostream& os, const Trace& trace);

// iteration,best_cost; iterations are 1-based.
void write_report_csv(std::ostream& os, const OptimizationReport& rep);

// key = value block plus the per-iteration curve. Wall time never appears:
// exported files must be byte-stable across identical invocations.
void write_report_text(std::ostream& os, const std::string& optimizer,
                       const OptimizationReport& rep, double threshold);

struct ComparisonRow {
  std::string method;
  double mean_iae = 0.0;
  std::optional<double> improvement_pct;      // blank on the baseline row
  std::optional<int> convergence_iteration;   // blank when never crossed
};

void write_comparison_table(std::ostream& os, const std::vector<ComparisonRow>& rows,
                            double threshold);

// IAE plus per-window step metrics; windows split at event timestamps.
void write_simulation_summary(std::ostream& os, const CostResult& result,
                              const Scenario& scenario);

}  // namespace gfmi
