#include "gfmi/io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace gfmi {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

[[noreturn]] void fail(const std::string& where, int line, const std::string& what) {
  throw std::runtime_error(where + ":" + std::to_string(line) + ": " + what);
}

double parse_num(const std::string& tok, const std::string& where, int line) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(tok, &used);
  } catch (const std::exception&) {
    fail(where, line, "not a number: '" + tok + "'");
  }
  if (used != tok.size()) fail(where, line, "trailing junk in number: '" + tok + "'");
  return v;
}

int parse_int(const std::string& tok, const std::string& where, int line) {
  const double v = parse_num(tok, where, line);
  const int i = static_cast<int>(std::lround(v));
  if (std::abs(v - i) > 1e-9) fail(where, line, "expected an integer: '" + tok + "'");
  return i;
}

bool parse_bool(const std::string& tok, const std::string& where, int line) {
  if (tok == "1" || tok == "true" || tok == "on") return true;
  if (tok == "0" || tok == "false" || tok == "off") return false;
  fail(where, line, "expected a boolean (0/1/true/false): '" + tok + "'");
}

std::vector<std::string> split_ws(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream is(s);
  std::string tok;
  while (is >> tok) out.push_back(tok);
  return out;
}

std::optional<EventKind> event_kind_from_name(const std::string& name) {
  static const std::map<std::string, EventKind> table = {
      {"connect_linear", EventKind::ConnectLinear},
      {"disconnect_linear", EventKind::DisconnectLinear},
      {"scale_linear_load", EventKind::ScaleLinearLoad},
      {"connect_nonlinear", EventKind::ConnectNonlinear},
      {"disconnect_nonlinear", EventKind::DisconnectNonlinear},
      {"scale_plant", EventKind::ScalePlant},
  };
  const auto it = table.find(name);
  if (it == table.end()) return std::nullopt;
  return it->second;
}

bool kind_takes_factor(EventKind k) {
  return k == EventKind::ScaleLinearLoad || k == EventKind::ScalePlant;
}

Event parse_event(const std::string& value, const std::string& where, int line) {
  const auto toks = split_ws(value);
  if (toks.size() < 2)
    fail(where, line, "event needs '<time> <kind> [factor]': '" + value + "'");
  Event ev;
  ev.time = parse_num(toks[0], where, line);
  const auto kind = event_kind_from_name(toks[1]);
  if (!kind) fail(where, line, "unknown event kind: '" + toks[1] + "'");
  ev.kind = *kind;
  if (kind_takes_factor(ev.kind)) {
    if (toks.size() != 3)
      fail(where, line, "event kind '" + toks[1] + "' needs a factor");
    ev.factor = parse_num(toks[2], where, line);
  } else if (toks.size() != 2) {
    fail(where, line, "event kind '" + toks[1] + "' takes no factor");
  }
  return ev;
}

std::array<double, 3> parse_vec3(const std::string& value, const std::string& where,
                                 int line) {
  const auto toks = split_ws(value);
  if (toks.size() != 3) fail(where, line, "expected 3 numbers: '" + value + "'");
  return {parse_num(toks[0], where, line), parse_num(toks[1], where, line),
          parse_num(toks[2], where, line)};
}

void apply_key(RunSetup& s, const std::string& key, const std::string& value,
               const std::string& where, int line) {
  auto num = [&] { return parse_num(value, where, line); };
  auto integer = [&] { return parse_int(value, where, line); };
  auto boolean = [&] { return parse_bool(value, where, line); };

  // scenario
  if (key == "horizon") s.scenario.horizon = num();
  else if (key == "linear_connected") s.scenario.linear_connected = boolean();
  else if (key == "nonlinear_connected") s.scenario.nonlinear_connected = boolean();
  else if (key == "linear_r") s.scenario.linear_load.r_l = num();
  else if (key == "linear_l") s.scenario.linear_load.l_l = num();
  else if (key == "event") s.scenario.events.push_back(parse_event(value, where, line));
  // plant
  else if (key == "l_s") s.sys.plant.l_s = num();
  else if (key == "r_s") s.sys.plant.r_s = num();
  else if (key == "c_s") s.sys.plant.c_s = num();
  else if (key == "u_bat") s.sys.plant.u_bat = num();
  else if (key == "f_s") s.sys.plant.f_s = num();
  else if (key == "omega") s.sys.plant.omega = num();
  // nonlinear load
  else if (key == "l_n") s.sys.nonlinear.l_n = num();
  else if (key == "c_n") s.sys.nonlinear.c_n = num();
  else if (key == "r_n") s.sys.nonlinear.r_n = num();
  else if (key == "u_f") s.sys.nonlinear.u_f = num();
  // control
  else if (key == "t_sam") s.sys.control.t_sam = num();
  else if (key == "t_vres") s.sys.control.t_vres = num();
  else if (key == "t_cres") s.sys.control.t_cres = num();
  else if (key == "xi") s.sys.control.xi = num();
  else if (key == "u_amp") s.sys.control.u_amp = num();
  else if (key == "integral_clamp") s.sys.control.integral_clamp = num();
  // integration
  else if (key == "dt_sim") s.sys.dt_sim = num();
  // search box
  else if (key == "lower") s.space.lower = parse_vec3(value, where, line);
  else if (key == "upper") s.space.upper = parse_vec3(value, where, line);
  // optimizers
  else if (key == "pso_swarm") s.optimizers.pso.swarm_size = integer();
  else if (key == "pso_iterations") s.optimizers.pso.max_iterations = integer();
  else if (key == "pso_w_max") s.optimizers.pso.w_max = num();
  else if (key == "pso_w_min") s.optimizers.pso.w_min = num();
  else if (key == "pso_c1") s.optimizers.pso.c1 = num();
  else if (key == "pso_c2") s.optimizers.pso.c2 = num();
  else if (key == "ga_population") s.optimizers.ga.population = integer();
  else if (key == "ga_generations") s.optimizers.ga.generations = integer();
  else if (key == "ga_crossover") s.optimizers.ga.crossover_prob = num();
  else if (key == "ga_blend_alpha") s.optimizers.ga.blend_alpha = num();
  else if (key == "ga_mutation_prob") s.optimizers.ga.mutation_prob = num();
  else if (key == "ga_mutation_sigma") s.optimizers.ga.mutation_sigma_frac = num();
  else if (key == "ga_tournament") s.optimizers.ga.tournament = integer();
  else if (key == "sa_temp") s.optimizers.sa.initial_temp = num();
  else if (key == "sa_iterations") s.optimizers.sa.iterations = integer();
  else if (key == "sa_moves") s.optimizers.sa.moves_per_iteration = integer();
  else if (key == "sa_cooling") s.optimizers.sa.cooling = num();
  else if (key == "sa_sigma") s.optimizers.sa.proposal_sigma_frac = num();
  // execution
  else if (key == "threads") s.threads = integer();
  else fail(where, line, "unknown key: '" + key + "'");
}

void validate(RunSetup& s, const std::string& where) {
  auto bad = [&](const std::string& what) {
    throw std::runtime_error(where + ": " + what);
  };
  if (s.scenario.horizon < 0.0) bad("horizon must be >= 0");
  for (const auto& ev : s.scenario.events) {
    if (ev.time < 0.0 || ev.time > s.scenario.horizon)
      bad("event at " + format_g9(ev.time) + " s outside [0, horizon]");
    if (kind_takes_factor(ev.kind) && ev.factor <= 0.0)
      bad("scale factor must be > 0");
  }
  if (s.scenario.linear_load.r_l <= 0.0) bad("linear_r must be > 0");
  if (s.scenario.linear_load.l_l < 0.0) bad("linear_l must be >= 0");
  if (s.sys.plant.l_s <= 0.0 || s.sys.plant.c_s <= 0.0 || s.sys.plant.u_bat <= 0.0 ||
      s.sys.plant.f_s <= 0.0 || s.sys.plant.r_s < 0.0)
    bad("plant parameters out of range");
  if (s.sys.nonlinear.l_n <= 0.0 || s.sys.nonlinear.c_n <= 0.0 ||
      s.sys.nonlinear.r_n <= 0.0 || s.sys.nonlinear.u_f < 0.0)
    bad("nonlinear-load parameters out of range");
  if (s.sys.control.t_sam <= 0.0 || s.sys.control.t_vres <= 0.0 ||
      s.sys.control.t_cres <= 0.0 || s.sys.control.xi <= 0.0)
    bad("control timing parameters out of range");
  if (s.sys.dt_sim <= 0.0 || s.sys.dt_sim > 2e-6)
    bad("dt_sim must lie in (0, 2e-6] s");
  const double ratio = s.sys.control.t_sam / s.sys.dt_sim;
  if (std::abs(ratio - std::round(ratio)) > 1e-6 * ratio)
    bad("t_sam must be an integer multiple of dt_sim");
  for (int d = 0; d < 3; ++d)
    if (!(s.space.lower[d] < s.space.upper[d])) bad("search box lower must be < upper");
  if (s.optimizers.pso.swarm_size < 2 || s.optimizers.pso.max_iterations < 1 ||
      s.optimizers.ga.population < 2 || s.optimizers.ga.generations < 1 ||
      s.optimizers.sa.iterations < 1 || s.optimizers.sa.moves_per_iteration < 1 ||
      s.optimizers.sa.initial_temp <= 0.0)
    bad("optimizer budgets out of range");
  if (s.threads < 0) bad("threads must be >= 0");
  // the controller's model copies track the configured plant; only runtime
  // scale_plant events make them diverge
  s.sys.control.omega = s.sys.plant.omega;
  s.sys.control.l_s = s.sys.plant.l_s;
  s.sys.control.r_s = s.sys.plant.r_s;
  s.sys.control.c_s = s.sys.plant.c_s;
}

std::string fmt_opt(const std::optional<int>& v) {
  return v ? std::to_string(*v) : std::string("none");
}

}  // namespace

RunSetup default_setup() {
  RunSetup s;
  s.scenario = default_scenario();
  return s;
}

RunSetup parse_config(std::istream& in, const std::string& name) {
  RunSetup s = default_setup();
  bool events_overridden = false;
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find('#');
    if (hash != std::string::npos) raw.erase(hash);
    const std::string text = trim(raw);
    if (text.empty()) continue;
    const auto eq = text.find('=');
    if (eq == std::string::npos) fail(name, line, "expected 'key = value'");
    const std::string key = trim(text.substr(0, eq));
    const std::string value = trim(text.substr(eq + 1));
    if (key.empty()) fail(name, line, "empty key");
    if (value.empty()) fail(name, line, "empty value for '" + key + "'");
    if (key == "event" && !events_overridden) {
      // first explicit event list replaces the built-in reference scenario
      s.scenario.events.clear();
      events_overridden = true;
    }
    apply_key(s, key, value, name, line);
  }
  validate(s, name);
  return s;
}

RunSetup load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("scenario not found: " + path);
  return parse_config(in, path);
}

std::string event_kind_name(EventKind kind) {
  switch (kind) {
    case EventKind::ConnectLinear: return "connect_linear";
    case EventKind::DisconnectLinear: return "disconnect_linear";
    case EventKind::ScaleLinearLoad: return "scale_linear_load";
    case EventKind::ConnectNonlinear: return "connect_nonlinear";
    case EventKind::DisconnectNonlinear: return "disconnect_nonlinear";
    case EventKind::ScalePlant: return "scale_plant";
  }
  return "?";
}

std::string format_g9(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

void write_trace_csv(std::ostream& os, const Trace& trace) {
  os << "t,i_ld_ref,i_lq_ref,i_ld,i_lq,u_cd,u_cq,u_dref,u_qref,iae\n";
  for (const auto& r : trace.rows) {
    os << format_g9(r.t) << ',' << format_g9(r.i_ld_ref) << ',' << format_g9(r.i_lq_ref)
       << ',' << format_g9(r.i_ld) << ',' << format_g9(r.i_lq) << ','
       << format_g9(r.u_cd) << ',' << format_g9(r.u_cq) << ',' << format_g9(r.u_dref)
       << ',' << format_g9(r.u_qref) << ',' << format_g9(r.iae) << '\n';
  }
}

void write_report_csv(std::ostream& os, const OptimizationReport& rep) {
  os << "iteration,best_cost\n";
  for (std::size_t i = 0; i < rep.best_cost_curve.size(); ++i)
    os << (i + 1) << ',' << format_g9(rep.best_cost_curve[i]) << '\n';
}

void write_report_text(std::ostream& os, const std::string& optimizer,
                       const OptimizationReport& rep, double threshold) {
  os << "optimizer = " << optimizer << '\n';
  os << "seed = " << rep.seed << '\n';
  os << "best_cost = " << format_g9(rep.best_cost) << '\n';
  os << "best_k_cd = " << format_g9(rep.best_gains.k_cd) << '\n';
  os << "best_k_cq = " << format_g9(rep.best_gains.k_cq) << '\n';
  os << "best_k_sat = " << format_g9(rep.best_gains.k_sat) << '\n';
  os << "cost_evaluations = " << rep.cost_evaluations << '\n';
  os << "convergence_threshold = " << format_g9(threshold) << '\n';
  os << "convergence_iteration = " << fmt_opt(convergence_iteration(rep, threshold))
     << '\n';
  os << '\n' << "iteration best_cost\n";
  for (std::size_t i = 0; i < rep.best_cost_curve.size(); ++i)
    os << (i + 1) << ' ' << format_g9(rep.best_cost_curve[i]) << '\n';
}

void write_comparison_table(std::ostream& os, const std::vector<ComparisonRow>& rows,
                            double threshold) {
  os << "convergence_threshold = " << format_g9(threshold) << '\n' << '\n';
  os << "method      mean_iae        improvement_pct  convergence_iteration\n";
  for (const auto& r : rows) {
    char line[160];
    std::string imp, conv;
    if (r.improvement_pct) {
      char b[32];
      std::snprintf(b, sizeof b, "%.2f", *r.improvement_pct);
      imp = b;
    }
    if (r.convergence_iteration) conv = std::to_string(*r.convergence_iteration);
    std::snprintf(line, sizeof line, "%-10s  %-14s  %-15s  %s", r.method.c_str(),
                  format_g9(r.mean_iae).c_str(), imp.c_str(), conv.c_str());
    // strip trailing blanks so empty cells end the line cleanly
    std::string text = line;
    while (!text.empty() && text.back() == ' ') text.pop_back();
    os << text << '\n';
  }
}

void write_simulation_summary(std::ostream& os, const CostResult& result,
                              const Scenario& scenario) {
  os << "iae = " << format_g9(result.iae) << '\n';
  os << "diverged = " << (result.diverged ? "true" : "false") << '\n';
  const std::size_t rows = result.trace ? result.trace->rows.size() : 0;
  os << "trace_rows = " << rows << '\n';
  if (!result.trace || result.trace->rows.empty()) return;

  // window boundaries: start, each distinct event time, horizon
  std::vector<double> edges{0.0};
  for (const auto& ev : scenario.events) edges.push_back(ev.time);
  edges.push_back(scenario.horizon);
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end(),
                          [](double a, double b) { return std::abs(a - b) < 1e-12; }),
              edges.end());

  int w = 0;
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    if (edges[i + 1] - edges[i] < 1e-9) continue;
    ++w;
    const auto m = tracking_metrics(*result.trace, edges[i], edges[i + 1]);
    const std::string p = "window_" + std::to_string(w) + "_";
    os << p << "start = " << format_g9(edges[i]) << '\n';
    os << p << "end = " << format_g9(edges[i + 1]) << '\n';
    os << p << "overshoot_pct = "
       << (m.overshoot_pct ? format_g9(*m.overshoot_pct) : std::string("none")) << '\n';
    os << p << "settling_s = "
       << (m.settling_time ? format_g9(*m.settling_time) : std::string("none")) << '\n';
    os << p << "steady_state_error = " << format_g9(m.steady_state_error) << '\n';
  }
}

}  // namespace gfmi
