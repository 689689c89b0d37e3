#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "gfmi/control.hpp"

namespace gfmi {

// Box constraints over (k_cd, k_cq, k_sat).
struct SearchSpace {
  std::array<double, 3> lower{1.0, 1.0, 0.001};
  std::array<double, 3> upper{2000.0, 2000.0, 15.0};
};

inline SmcGains gains_from_vector(const std::array<double, 3>& x) {
  return SmcGains{x[0], x[1], x[2], 1.0, 1.0};
}

struct PsoConfig {
  int swarm_size = 50;
  int max_iterations = 45;
  double w_max = 1.1;      // inertia decays linearly w_max -> w_min
  double w_min = 0.1;
  double c1 = 1.49;        // self adjustment weight
  double c2 = 1.49;        // group adjustment weight
  std::uint64_t seed = 1;
};

struct GaConfig {
  int population = 50;
  int generations = 45;
  double crossover_prob = 0.9;
  double blend_alpha = 0.5;
  double mutation_prob = 0.1;          // per gene
  double mutation_sigma_frac = 0.05;   // of box width
  int tournament = 3;
  std::uint64_t seed = 1;
};

struct SaConfig {
  double initial_temp = 100.0;
  int iterations = 45;
  int moves_per_iteration = 50;        // budget parity with the populations
  double cooling = 0.9;                // geometric schedule
  double proposal_sigma_frac = 0.1;    // of box width
  std::uint64_t seed = 1;
};

struct OptimizationReport {
  SmcGains best_gains{};
  double best_cost = 0.0;
  std::vector<double> best_cost_curve;  // best-so-far per iteration, 1-based in exports
  std::int64_t cost_evaluations = 0;
  double wall_seconds = 0.0;            // never written to report files
  std::uint64_t seed = 0;
};

using CostFn = std::function<double(const SmcGains&)>;

struct EvalRecord {
  std::array<double, 3> x;
  double cost;
};

struct OptimizeOptions {
  int threads = 0;                      // 0 = hardware concurrency
  std::vector<EvalRecord>* eval_log = nullptr;  // audit of every evaluation
};

// Particle swarm over the box; evaluations within an iteration run in a
// parallel batch, all RNG consumption stays in the sequential section.
OptimizationReport pso_minimize(const CostFn& cost, const SearchSpace& space,
                                const PsoConfig& cfg,
                                const OptimizeOptions& options = {});

// Generational GA: tournament selection, blend crossover, Gaussian mutation,
// elitism of one. The elite is re-evaluated with its generation so every
// generation costs exactly `population` evaluations.
OptimizationReport ga_minimize(const CostFn& cost, const SearchSpace& space,
                               const GaConfig& cfg,
                               const OptimizeOptions& options = {});

// Single-chain simulated annealing with Metropolis acceptance and geometric
// cooling; the chain is inherently sequential.
OptimizationReport sa_minimize(const CostFn& cost, const SearchSpace& space,
                               const SaConfig& cfg,
                               const OptimizeOptions& options = {});

// First 1-based iteration whose best-so-far cost is <= threshold.
std::optional<int> convergence_iteration(const OptimizationReport& report,
                                         double threshold);

enum class OptimizerKind { Pso, Ga, Sa };

std::string optimizer_name(OptimizerKind kind);

struct OptimizerSettings {
  PsoConfig pso{};
  GaConfig ga{};
  SaConfig sa{};
};

struct CampaignResult {
  std::vector<OptimizationReport> reports;  // one per seed, input order
  double mean_best_cost = 0.0;
  double min_best_cost = 0.0;
  double max_best_cost = 0.0;
  double stddev_best_cost = 0.0;
};

// Repeated runs of one optimizer, one seed per repetition.
CampaignResult run_campaign(OptimizerKind kind, const CostFn& cost,
                            const SearchSpace& space,
                            const OptimizerSettings& settings,
                            const std::vector<std::uint64_t>& seeds,
                            const OptimizeOptions& options = {});

// Lower median of the per-run crossing iterations; absent when fewer than
// half the runs ever cross the threshold.
std::optional<int> median_convergence_iteration(const CampaignResult& campaign,
                                                double threshold);

}  // namespace gfmi
