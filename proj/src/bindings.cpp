#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <stdexcept>

#include "gfmi/optimize.hpp"
#include "gfmi/simloop.hpp"

namespace py = pybind11;
using namespace gfmi;

namespace {

OptimizerKind kind_or_throw(const std::string& name) {
  if (name == "pso") return OptimizerKind::Pso;
  if (name == "ga") return OptimizerKind::Ga;
  if (name == "sa") return OptimizerKind::Sa;
  throw std::invalid_argument("unknown optimizer: '" + name + "' (want pso | ga | sa)");
}

OptimizationReport dispatch(OptimizerKind kind, const CostFn& cost,
                            const SearchSpace& space, const OptimizerSettings& settings,
                            std::uint64_t seed, const OptimizeOptions& options) {
  switch (kind) {
    case OptimizerKind::Pso: {
      PsoConfig c = settings.pso;
      c.seed = seed;
      return pso_minimize(cost, space, c, options);
    }
    case OptimizerKind::Ga: {
      GaConfig c = settings.ga;
      c.seed = seed;
      return ga_minimize(cost, space, c, options);
    }
    case OptimizerKind::Sa: {
      SaConfig c = settings.sa;
      c.seed = seed;
      return sa_minimize(cost, space, c, options);
    }
  }
  throw std::logic_error("unreachable");
}

CostFn scenario_cost(const Scenario& scenario) {
  const SystemConfig sys{};  // reference parameter set
  return [sys, scenario](const SmcGains& g) {
    return run_scenario(g, scenario, SimOptions{sys, false}).iae;
  };
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "grid-forming inverter simulation and sliding-mode current-gain tuning";

  m.def(
      "clarke",
      [](double a, double b, double c) {
        const TwoAxis x = clarke({a, b, c});
        return py::make_tuple(x.alpha, x.beta);
      },
      py::arg("a"), py::arg("b"), py::arg("c"),
      "amplitude-invariant abc -> (alpha, beta), zero sequence discarded");
  m.def(
      "inverse_clarke",
      [](double alpha, double beta) {
        const ThreePhase x = inverse_clarke({alpha, beta});
        return py::make_tuple(x.a, x.b, x.c);
      },
      py::arg("alpha"), py::arg("beta"));
  m.def(
      "park",
      [](double alpha, double beta, double theta) {
        const DqPair x = park({alpha, beta}, theta);
        return py::make_tuple(x.d, x.q);
      },
      py::arg("alpha"), py::arg("beta"), py::arg("theta"));
  m.def(
      "inverse_park",
      [](double d, double q, double theta) {
        const TwoAxis x = inverse_park({d, q}, theta);
        return py::make_tuple(x.alpha, x.beta);
      },
      py::arg("d"), py::arg("q"), py::arg("theta"));

  py::class_<SmcGains>(m, "SmcGains")
      .def(py::init<>())
      .def(py::init([](double k_cd, double k_cq, double k_sat) {
             return SmcGains{k_cd, k_cq, k_sat, 1.0, 1.0};
           }),
           py::arg("k_cd"), py::arg("k_cq"), py::arg("k_sat"))
      .def_readwrite("k_cd", &SmcGains::k_cd)
      .def_readwrite("k_cq", &SmcGains::k_cq)
      .def_readwrite("k_sat", &SmcGains::k_sat)
      .def("__repr__", [](const SmcGains& g) {
        return "SmcGains(k_cd=" + std::to_string(g.k_cd) +
               ", k_cq=" + std::to_string(g.k_cq) +
               ", k_sat=" + std::to_string(g.k_sat) + ")";
      });

  py::enum_<EventKind>(m, "EventKind")
      .value("CONNECT_LINEAR", EventKind::ConnectLinear)
      .value("DISCONNECT_LINEAR", EventKind::DisconnectLinear)
      .value("SCALE_LINEAR_LOAD", EventKind::ScaleLinearLoad)
      .value("CONNECT_NONLINEAR", EventKind::ConnectNonlinear)
      .value("DISCONNECT_NONLINEAR", EventKind::DisconnectNonlinear)
      .value("SCALE_PLANT", EventKind::ScalePlant);

  py::class_<Event>(m, "Event")
      .def(py::init<>())
      .def(py::init([](double time, EventKind kind, double factor) {
             return Event{time, kind, factor};
           }),
           py::arg("time"), py::arg("kind"), py::arg("factor") = 1.0)
      .def_readwrite("time", &Event::time)
      .def_readwrite("kind", &Event::kind)
      .def_readwrite("factor", &Event::factor);

  py::class_<LinearLoadParams>(m, "LinearLoadParams")
      .def(py::init<>())
      .def_readwrite("r_l", &LinearLoadParams::r_l)
      .def_readwrite("l_l", &LinearLoadParams::l_l);

  py::class_<Scenario>(m, "Scenario")
      .def(py::init<>())
      .def_readwrite("horizon", &Scenario::horizon)
      .def_readwrite("events", &Scenario::events)  // assign whole lists; copies out
      .def_readwrite("linear_connected", &Scenario::linear_connected)
      .def_readwrite("nonlinear_connected", &Scenario::nonlinear_connected)
      .def_readwrite("linear_load", &Scenario::linear_load);

  m.def("default_scenario", &default_scenario,
        "load step at 0.1 s, load swap at 0.2 s, 1.4x plant scale at 0.5 s");

  py::class_<TraceRow>(m, "TraceRow")
      .def_readonly("t", &TraceRow::t)
      .def_readonly("i_ld_ref", &TraceRow::i_ld_ref)
      .def_readonly("i_lq_ref", &TraceRow::i_lq_ref)
      .def_readonly("i_ld", &TraceRow::i_ld)
      .def_readonly("i_lq", &TraceRow::i_lq)
      .def_readonly("u_cd", &TraceRow::u_cd)
      .def_readonly("u_cq", &TraceRow::u_cq)
      .def_readonly("u_dref", &TraceRow::u_dref)
      .def_readonly("u_qref", &TraceRow::u_qref)
      .def_readonly("iae", &TraceRow::iae);

  py::class_<CostResult>(m, "CostResult")
      .def_readonly("iae", &CostResult::iae)
      .def_readonly("diverged", &CostResult::diverged)
      .def_property_readonly("rows", [](const CostResult& r) {
        return r.trace ? r.trace->rows : std::vector<TraceRow>{};
      });

  m.def(
      "simulate",
      [](const SmcGains& gains, const Scenario& scenario, bool trace) {
        return run_scenario(gains, scenario, SimOptions{SystemConfig{}, trace});
      },
      py::arg("gains"), py::arg("scenario"), py::arg("trace") = false,
      py::call_guard<py::gil_scoped_release>(),
      "one closed-loop run at the reference parameter set; returns the IAE cost");

  py::class_<PsoConfig>(m, "PsoConfig")
      .def(py::init<>())
      .def_readwrite("swarm_size", &PsoConfig::swarm_size)
      .def_readwrite("max_iterations", &PsoConfig::max_iterations)
      .def_readwrite("w_max", &PsoConfig::w_max)
      .def_readwrite("w_min", &PsoConfig::w_min)
      .def_readwrite("c1", &PsoConfig::c1)
      .def_readwrite("c2", &PsoConfig::c2);

  py::class_<GaConfig>(m, "GaConfig")
      .def(py::init<>())
      .def_readwrite("population", &GaConfig::population)
      .def_readwrite("generations", &GaConfig::generations)
      .def_readwrite("crossover_prob", &GaConfig::crossover_prob)
      .def_readwrite("blend_alpha", &GaConfig::blend_alpha)
      .def_readwrite("mutation_prob", &GaConfig::mutation_prob)
      .def_readwrite("mutation_sigma_frac", &GaConfig::mutation_sigma_frac)
      .def_readwrite("tournament", &GaConfig::tournament);

  py::class_<SaConfig>(m, "SaConfig")
      .def(py::init<>())
      .def_readwrite("initial_temp", &SaConfig::initial_temp)
      .def_readwrite("iterations", &SaConfig::iterations)
      .def_readwrite("moves_per_iteration", &SaConfig::moves_per_iteration)
      .def_readwrite("cooling", &SaConfig::cooling)
      .def_readwrite("proposal_sigma_frac", &SaConfig::proposal_sigma_frac);

  py::class_<OptimizerSettings>(m, "OptimizerSettings")
      .def(py::init<>())
      .def_readwrite("pso", &OptimizerSettings::pso)
      .def_readwrite("ga", &OptimizerSettings::ga)
      .def_readwrite("sa", &OptimizerSettings::sa);

  py::class_<SearchSpace>(m, "SearchSpace")
      .def(py::init<>())
      .def_readwrite("lower", &SearchSpace::lower)
      .def_readwrite("upper", &SearchSpace::upper);

  py::class_<OptimizationReport>(m, "OptimizationReport")
      .def_readonly("best_gains", &OptimizationReport::best_gains)
      .def_readonly("best_cost", &OptimizationReport::best_cost)
      .def_readonly("best_cost_curve", &OptimizationReport::best_cost_curve)
      .def_readonly("cost_evaluations", &OptimizationReport::cost_evaluations)
      .def_readonly("wall_seconds", &OptimizationReport::wall_seconds)
      .def_readonly("seed", &OptimizationReport::seed);

  py::class_<CampaignResult>(m, "CampaignResult")
      .def_readonly("reports", &CampaignResult::reports)
      .def_readonly("mean_best_cost", &CampaignResult::mean_best_cost)
      .def_readonly("min_best_cost", &CampaignResult::min_best_cost)
      .def_readonly("max_best_cost", &CampaignResult::max_best_cost)
      .def_readonly("stddev_best_cost", &CampaignResult::stddev_best_cost);

  m.def(
      "tune",
      [](const std::string& optimizer, const Scenario& scenario, std::uint64_t seed,
         const OptimizerSettings& settings, int threads) {
        OptimizeOptions oo;
        oo.threads = threads;
        return dispatch(kind_or_throw(optimizer), scenario_cost(scenario), SearchSpace{},
                        settings, seed, oo);
      },
      py::arg("optimizer"), py::arg("scenario"), py::arg("seed") = 1,
      py::arg("settings") = OptimizerSettings{}, py::arg("threads") = 0,
      py::call_guard<py::gil_scoped_release>(),
      "minimize the scenario IAE over (k_cd, k_cq, k_sat)");

  m.def(
      "campaign",
      [](const std::string& optimizer, const Scenario& scenario,
         const std::vector<std::uint64_t>& seeds, const OptimizerSettings& settings,
         int threads) {
        OptimizeOptions oo;
        oo.threads = threads;
        return run_campaign(kind_or_throw(optimizer), scenario_cost(scenario),
                            SearchSpace{}, settings, seeds, oo);
      },
      py::arg("optimizer"), py::arg("scenario"), py::arg("seeds"),
      py::arg("settings") = OptimizerSettings{}, py::arg("threads") = 0,
      py::call_guard<py::gil_scoped_release>(),
      "one tuning run per seed, aggregated");

  m.def(
      "minimize",
      [](const std::string& optimizer, const py::function& cost_fn,
         const SearchSpace& space, std::uint64_t seed, const OptimizerSettings& settings) {
        const CostFn cost = [cost_fn](const SmcGains& g) {
          return cost_fn(g.k_cd, g.k_cq, g.k_sat).cast<double>();
        };
        OptimizeOptions oo;
        oo.threads = 1;  // python cost: evaluations stay on the calling thread
        return dispatch(kind_or_throw(optimizer), cost, space, settings, seed, oo);
      },
      py::arg("optimizer"), py::arg("cost"), py::arg("space") = SearchSpace{},
      py::arg("seed") = 1, py::arg("settings") = OptimizerSettings{},
      "minimize an arbitrary python cost f(k_cd, k_cq, k_sat) over the box");

  m.def("convergence_iteration", &convergence_iteration, py::arg("report"),
        py::arg("threshold"), "first 1-based iteration at or under the threshold");
  m.def("median_convergence_iteration", &median_convergence_iteration,
        py::arg("campaign"), py::arg("threshold"),
        "lower median of per-run crossings; None when fewer than half cross");
}
