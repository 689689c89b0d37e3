// Command-line harness: single simulations, tuning campaigns, and the
// four-method comparison. Result files are deterministic; wall-clock timing
// goes to stderr only.
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "gfmi/io.hpp"
#include "gfmi/optimize.hpp"
#include "gfmi/simloop.hpp"

namespace fs = std::filesystem;
using namespace gfmi;

namespace {

struct CliArgs {
  std::string mode;
  std::string optimizer;             // empty = not selected
  std::vector<std::uint64_t> seeds;  // --seed, repeatable
  std::string seeds_csv;             // --seeds 1,2,3
  int repetitions = 0;               // 0 = derive from seeds (default 1)
  std::string scenario_path;
  std::string out_dir = ".";
  bool trace = false;
  double threshold = 0.037;
  std::string gains_csv;             // --gains kcd,kcq,ksat
};

int fail(const std::string& msg) {
  std::cerr << "error: " << msg << '\n';
  return 1;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string tok;
  std::istringstream is(s);
  while (std::getline(is, tok, sep)) out.push_back(tok);
  return out;
}

std::optional<SmcGains> parse_gains(const std::string& csv, std::string& err) {
  const auto toks = split(csv, ',');
  if (toks.size() != 3) {
    err = "--gains needs kcd,kcq,ksat";
    return std::nullopt;
  }
  std::array<double, 3> x{};
  for (int i = 0; i < 3; ++i) {
    try {
      std::size_t used = 0;
      x[i] = std::stod(toks[i], &used);
      if (used != toks[i].size()) throw std::invalid_argument(toks[i]);
    } catch (const std::exception&) {
      err = "bad gain value: '" + toks[i] + "'";
      return std::nullopt;
    }
    if (x[i] <= 0.0) {
      err = "gains must be positive";
      return std::nullopt;
    }
  }
  return gains_from_vector(x);
}

std::optional<OptimizerKind> kind_from_name(const std::string& s) {
  if (s == "pso") return OptimizerKind::Pso;
  if (s == "ga") return OptimizerKind::Ga;
  if (s == "sa") return OptimizerKind::Sa;
  return std::nullopt;
}

bool resolve_seeds(CliArgs& args, std::string& err) {
  if (!args.seeds_csv.empty()) {
    for (const auto& tok : split(args.seeds_csv, ',')) {
      try {
        args.seeds.push_back(static_cast<std::uint64_t>(std::stoull(tok)));
      } catch (const std::exception&) {
        err = "bad seed: '" + tok + "'";
        return false;
      }
    }
  }
  if (args.seeds.empty()) {
    const int reps = args.repetitions > 0 ? args.repetitions : 1;
    for (int i = 1; i <= reps; ++i) args.seeds.push_back(static_cast<std::uint64_t>(i));
  } else if (args.repetitions > 0 &&
             args.seeds.size() != static_cast<std::size_t>(args.repetitions)) {
    err = "--repetitions disagrees with the number of seeds";
    return false;
  }
  return true;
}

bool write_file(const fs::path& path, const std::string& content, std::string& err) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    err = "cannot write: " + path.string();
    return false;
  }
  out << content;
  out.flush();
  if (!out) {
    err = "write failed: " + path.string();
    return false;
  }
  std::cout << "wrote " << path.string() << '\n';
  return true;
}

CostFn make_cost(const RunSetup& setup) {
  const SystemConfig sys = setup.sys;
  const Scenario scenario = setup.scenario;
  return [sys, scenario](const SmcGains& g) {
    return run_scenario(g, scenario, SimOptions{sys, false}).iae;
  };
}

int cmd_simulate(const CliArgs& args, const RunSetup& setup, const SmcGains& gains) {
  const auto t0 = std::chrono::steady_clock::now();
  const CostResult res = run_scenario(gains, setup.scenario, SimOptions{setup.sys, true});
  std::cerr << "simulate wall time: "
            << std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count()
            << " s\n";

  const std::string opt_tag = args.optimizer.empty() ? "none" : args.optimizer;
  const std::string stem = "simulate_" + opt_tag + "_" + std::to_string(args.seeds[0]);

  std::ostringstream trace_csv;
  write_trace_csv(trace_csv, *res.trace);
  std::ostringstream summary;
  write_simulation_summary(summary, res, setup.scenario);

  std::string err;
  if (!write_file(fs::path(args.out_dir) / (stem + ".csv"), trace_csv.str(), err) ||
      !write_file(fs::path(args.out_dir) / (stem + ".txt"), summary.str(), err))
    return fail(err);
  std::cout << summary.str();
  if (res.diverged) return fail("simulation diverged; partial trace written");
  return 0;
}

int cmd_optimize(const CliArgs& args, const RunSetup& setup) {
  if (args.optimizer.empty()) return fail("--mode optimize needs --optimizer");
  const auto kind = kind_from_name(args.optimizer);
  if (!kind) return fail("unknown optimizer: '" + args.optimizer + "'");

  OptimizeOptions oo;
  oo.threads = setup.threads;
  const auto t0 = std::chrono::steady_clock::now();
  const CampaignResult camp =
      run_campaign(*kind, make_cost(setup), setup.space, setup.optimizers, args.seeds, oo);
  std::cerr << "campaign wall time: "
            << std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count()
            << " s\n";

  std::string err;
  std::size_t best_run = 0;
  std::int64_t total_evals = 0;
  for (std::size_t i = 0; i < camp.reports.size(); ++i) {
    const auto& rep = camp.reports[i];
    total_evals += rep.cost_evaluations;
    if (rep.best_cost < camp.reports[best_run].best_cost) best_run = i;
    const std::string stem =
        "optimize_" + args.optimizer + "_" + std::to_string(rep.seed);
    std::ostringstream csv, txt;
    write_report_csv(csv, rep);
    write_report_text(txt, args.optimizer, rep, args.threshold);
    if (!write_file(fs::path(args.out_dir) / (stem + ".csv"), csv.str(), err) ||
        !write_file(fs::path(args.out_dir) / (stem + ".txt"), txt.str(), err))
      return fail(err);
  }

  const auto& best = camp.reports[best_run];
  std::ostringstream sum;
  sum << "optimizer = " << args.optimizer << '\n';
  sum << "repetitions = " << camp.reports.size() << '\n';
  sum << "seeds =";
  for (const auto s : args.seeds) sum << ' ' << s;
  sum << '\n';
  sum << "convergence_threshold = " << format_g9(args.threshold) << '\n';
  sum << "mean_best_cost = " << format_g9(camp.mean_best_cost) << '\n';
  sum << "min_best_cost = " << format_g9(camp.min_best_cost) << '\n';
  sum << "max_best_cost = " << format_g9(camp.max_best_cost) << '\n';
  sum << "stddev_best_cost = " << format_g9(camp.stddev_best_cost) << '\n';
  const auto med = median_convergence_iteration(camp, args.threshold);
  sum << "median_convergence_iteration = " << (med ? std::to_string(*med) : "none")
      << '\n';
  sum << "total_cost_evaluations = " << total_evals << '\n';
  sum << "best_seed = " << best.seed << '\n';
  sum << "best_cost = " << format_g9(best.best_cost) << '\n';
  sum << "best_k_cd = " << format_g9(best.best_gains.k_cd) << '\n';
  sum << "best_k_cq = " << format_g9(best.best_gains.k_cq) << '\n';
  sum << "best_k_sat = " << format_g9(best.best_gains.k_sat) << '\n';
  if (!write_file(fs::path(args.out_dir) / ("optimize_" + args.optimizer + "_summary.txt"),
                  sum.str(), err))
    return fail(err);
  std::cout << sum.str();

  // the tuned result, replayed with trace capture
  const CostResult final_run =
      run_scenario(best.best_gains, setup.scenario, SimOptions{setup.sys, true});
  std::ostringstream trace_csv;
  write_trace_csv(trace_csv, *final_run.trace);
  if (!write_file(
          fs::path(args.out_dir) / ("optimize_" + args.optimizer + "_best_trace.csv"),
          trace_csv.str(), err))
    return fail(err);
  if (final_run.diverged) return fail("best-gains replay diverged");
  return 0;
}

int cmd_compare(const CliArgs& args, const RunSetup& setup) {
  const CostFn cost = make_cost(setup);
  OptimizeOptions oo;
  oo.threads = setup.threads;

  const double baseline_iae = cost(SmcGains{});
  std::vector<ComparisonRow> rows;
  rows.push_back({"baseline", baseline_iae, std::nullopt, std::nullopt});

  std::string err;
  const auto t0 = std::chrono::steady_clock::now();
  for (const OptimizerKind kind :
       {OptimizerKind::Pso, OptimizerKind::Ga, OptimizerKind::Sa}) {
    const std::string name = optimizer_name(kind);
    const CampaignResult camp =
        run_campaign(kind, cost, setup.space, setup.optimizers, args.seeds, oo);
    ComparisonRow row;
    row.method = name;
    row.mean_iae = camp.mean_best_cost;
    row.improvement_pct = (baseline_iae - camp.mean_best_cost) / baseline_iae * 100.0;
    row.convergence_iteration = median_convergence_iteration(camp, args.threshold);
    rows.push_back(row);

    if (args.trace) {
      std::size_t best_run = 0;
      for (std::size_t i = 1; i < camp.reports.size(); ++i)
        if (camp.reports[i].best_cost < camp.reports[best_run].best_cost) best_run = i;
      const CostResult rerun = run_scenario(camp.reports[best_run].best_gains,
                                            setup.scenario, SimOptions{setup.sys, true});
      std::ostringstream trace_csv;
      write_trace_csv(trace_csv, *rerun.trace);
      if (!write_file(
              fs::path(args.out_dir) / ("compare_" + name + "_best_trace.csv"),
              trace_csv.str(), err))
        return fail(err);
    }
  }
  std::cerr << "compare wall time: "
            << std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count()
            << " s\n";

  std::ostringstream table;
  write_comparison_table(table, rows, args.threshold);
  if (!write_file(fs::path(args.out_dir) / "compare_summary.txt", table.str(), err))
    return fail(err);
  std::cout << table.str();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CliArgs args;
  CLI::App app{"grid-forming inverter simulation and current-gain tuning"};
  app.add_option("--mode", args.mode, "simulate | optimize | compare")
      ->required()
      ->check(CLI::IsMember({"simulate", "optimize", "compare"}));
  app.add_option("--optimizer", args.optimizer, "pso | ga | sa")
      ->check(CLI::IsMember({"pso", "ga", "sa"}));
  app.add_option("--seed", args.seeds, "rng seed (repeatable)");
  app.add_option("--seeds", args.seeds_csv, "comma-separated seed list");
  app.add_option("--repetitions", args.repetitions, "campaign repetitions");
  app.add_option("--scenario", args.scenario_path, "scenario config file");
  app.add_option("--out", args.out_dir, "output directory");
  app.add_flag("--trace", args.trace, "also write best-gains traces in compare mode");
  app.add_option("--threshold", args.threshold, "convergence threshold on best cost");
  app.add_option("--gains", args.gains_csv, "kcd,kcq,ksat override");
  CLI11_PARSE(app, argc, argv);

  std::string err;
  if (!resolve_seeds(args, err)) return fail(err);

  try {
    RunSetup setup =
        args.scenario_path.empty() ? default_setup() : load_config(args.scenario_path);

    SmcGains gains{};
    if (!args.gains_csv.empty()) {
      const auto parsed = parse_gains(args.gains_csv, err);
      if (!parsed) return fail(err);
      gains = *parsed;
    }

    std::error_code ec;
    fs::create_directories(args.out_dir, ec);
    if (ec) return fail("cannot create output directory: " + args.out_dir);

    if (args.mode == "simulate") return cmd_simulate(args, setup, gains);
    if (args.mode == "optimize") return cmd_optimize(args, setup);
    return cmd_compare(args, setup);
  } catch (const std::exception& e) {
    return fail(e.what());
  }
}
