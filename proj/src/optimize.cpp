#include "gfmi/optimize.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <limits>
#include <thread>

#include "gfmi/rng.hpp"
#include "gfmi/simloop.hpp"

namespace gfmi {

namespace {

using Vec3 = std::array<double, 3>;

double guard_cost(double c) {
  return std::isfinite(c) ? c : kDivergedPenalty;
}

// Evaluate a batch of candidates; results land by index so scheduling cannot
// reorder anything observable.
void evaluate_batch(const CostFn& cost, const std::vector<Vec3>& xs,
                    std::vector<double>& out, int threads) {
  const int n = static_cast<int>(xs.size());
  out.resize(n);
  int workers = threads > 0 ? threads : static_cast<int>(std::thread::hardware_concurrency());
  workers = std::min(std::max(workers, 1), n);
  if (workers <= 1) {
    for (int i = 0; i < n; ++i) out[i] = guard_cost(cost(gains_from_vector(xs[i])));
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1))
        out[i] = guard_cost(cost(gains_from_vector(xs[i])));
    });
  }
  for (auto& th : pool) th.join();
}

void log_batch(const OptimizeOptions& opt, const std::vector<Vec3>& xs,
               const std::vector<double>& costs) {
  if (!opt.eval_log) return;
  for (std::size_t i = 0; i < xs.size(); ++i)
    opt.eval_log->push_back({xs[i], costs[i]});
}

Vec3 random_point(Rng& rng, const SearchSpace& space) {
  Vec3 x;
  for (int d = 0; d < 3; ++d) x[d] = rng.uniform(space.lower[d], space.upper[d]);
  return x;
}

void clamp_zero_velocity(Vec3& x, Vec3& v, const SearchSpace& space) {
  for (int d = 0; d < 3; ++d) {
    if (x[d] < space.lower[d]) {
      x[d] = space.lower[d];
      v[d] = 0.0;
    } else if (x[d] > space.upper[d]) {
      x[d] = space.upper[d];
      v[d] = 0.0;
    }
  }
}

}  // namespace

OptimizationReport pso_minimize(const CostFn& cost, const SearchSpace& space,
                                const PsoConfig& cfg, const OptimizeOptions& options) {
  const auto t_start = std::chrono::steady_clock::now();
  Rng rng(cfg.seed);

  const int n = cfg.swarm_size;
  std::vector<Vec3> x(n), v(n, Vec3{0.0, 0.0, 0.0});
  for (int i = 0; i < n; ++i) x[i] = random_point(rng, space);

  std::vector<Vec3> p_best(n);
  std::vector<double> p_best_cost(n, std::numeric_limits<double>::infinity());
  Vec3 g_best{};
  double g_best_cost = std::numeric_limits<double>::infinity();

  OptimizationReport rep;
  rep.seed = cfg.seed;
  rep.best_cost_curve.reserve(cfg.max_iterations);

  std::vector<double> costs;
  for (int it = 1; it <= cfg.max_iterations; ++it) {
    evaluate_batch(cost, x, costs, options.threads);
    log_batch(options, x, costs);
    rep.cost_evaluations += n;

    for (int i = 0; i < n; ++i) {
      if (costs[i] < p_best_cost[i]) {
        p_best_cost[i] = costs[i];
        p_best[i] = x[i];
      }
      if (costs[i] < g_best_cost) {
        g_best_cost = costs[i];
        g_best = x[i];
      }
    }
    rep.best_cost_curve.push_back(g_best_cost);

    if (it == cfg.max_iterations) break;
    const double w = cfg.max_iterations > 1
                         ? cfg.w_max - (cfg.w_max - cfg.w_min) * (it - 1) /
                                           static_cast<double>(cfg.max_iterations - 1)
                         : cfg.w_max;
    for (int i = 0; i < n; ++i) {
      Vec3 r1, r2;
      for (int d = 0; d < 3; ++d) r1[d] = rng.uniform01();
      for (int d = 0; d < 3; ++d) r2[d] = rng.uniform01();
      for (int d = 0; d < 3; ++d) {
        v[i][d] = w * v[i][d] + cfg.c1 * r1[d] * (p_best[i][d] - x[i][d]) +
                  cfg.c2 * r2[d] * (g_best[d] - x[i][d]);
        x[i][d] += v[i][d];
      }
      clamp_zero_velocity(x[i], v[i], space);
    }
  }

  rep.best_gains = gains_from_vector(g_best);
  rep.best_cost = g_best_cost;
  rep.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  return rep;
}

OptimizationReport ga_minimize(const CostFn& cost, const SearchSpace& space,
                               const GaConfig& cfg, const OptimizeOptions& options) {
  const auto t_start = std::chrono::steady_clock::now();
  Rng rng(cfg.seed);

  const int n = cfg.population;
  std::vector<Vec3> pop(n);
  for (int i = 0; i < n; ++i) pop[i] = random_point(rng, space);

  Vec3 width;
  for (int d = 0; d < 3; ++d) width[d] = space.upper[d] - space.lower[d];

  Vec3 best{};
  double best_cost = std::numeric_limits<double>::infinity();

  OptimizationReport rep;
  rep.seed = cfg.seed;
  rep.best_cost_curve.reserve(cfg.generations);

  std::vector<double> costs;
  for (int gen = 1; gen <= cfg.generations; ++gen) {
    evaluate_batch(cost, pop, costs, options.threads);
    log_batch(options, pop, costs);
    rep.cost_evaluations += n;

    int gen_best = 0;
    for (int i = 1; i < n; ++i)
      if (costs[i] < costs[gen_best]) gen_best = i;
    if (costs[gen_best] < best_cost) {
      best_cost = costs[gen_best];
      best = pop[gen_best];
    }
    rep.best_cost_curve.push_back(best_cost);

    if (gen == cfg.generations) break;

    auto tournament = [&]() -> const Vec3& {
      int winner = rng.below(n);
      for (int k = 1; k < cfg.tournament; ++k) {
        const int challenger = rng.below(n);
        if (costs[challenger] < costs[winner]) winner = challenger;
      }
      return pop[winner];
    };

    std::vector<Vec3> next;
    next.reserve(n);
    next.push_back(best);  // elitism of one
    while (static_cast<int>(next.size()) < n) {
      const Vec3 a = tournament();
      const Vec3 b = tournament();
      Vec3 child = a;
      if (rng.uniform01() < cfg.crossover_prob) {
        for (int d = 0; d < 3; ++d) {
          const double u = rng.uniform(-cfg.blend_alpha, 1.0 + cfg.blend_alpha);
          child[d] = a[d] + u * (b[d] - a[d]);
        }
      }
      for (int d = 0; d < 3; ++d) {
        if (rng.uniform01() < cfg.mutation_prob)
          child[d] += rng.normal() * cfg.mutation_sigma_frac * width[d];
        child[d] = std::clamp(child[d], space.lower[d], space.upper[d]);
      }
      next.push_back(child);
    }
    pop = std::move(next);
  }

  rep.best_gains = gains_from_vector(best);
  rep.best_cost = best_cost;
  rep.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  return rep;
}

OptimizationReport sa_minimize(const CostFn& cost, const SearchSpace& space,
                               const SaConfig& cfg, const OptimizeOptions& options) {
  const auto t_start = std::chrono::steady_clock::now();
  Rng rng(cfg.seed);

  Vec3 width;
  for (int d = 0; d < 3; ++d) width[d] = space.upper[d] - space.lower[d];

  Vec3 x = random_point(rng, space);
  double fx = guard_cost(cost(gains_from_vector(x)));

  OptimizationReport rep;
  rep.seed = cfg.seed;
  rep.cost_evaluations = 1;
  if (options.eval_log) options.eval_log->push_back({x, fx});

  Vec3 best = x;
  double best_cost = fx;
  rep.best_cost_curve.reserve(cfg.iterations);

  for (int it = 1; it <= cfg.iterations; ++it) {
    const double temp = cfg.initial_temp * std::pow(cfg.cooling, it - 1);
    for (int mv = 0; mv < cfg.moves_per_iteration; ++mv) {
      Vec3 y;
      for (int d = 0; d < 3; ++d) {
        y[d] = std::clamp(x[d] + rng.normal() * cfg.proposal_sigma_frac * width[d],
                          space.lower[d], space.upper[d]);
      }
      const double fy = guard_cost(cost(gains_from_vector(y)));
      ++rep.cost_evaluations;
      if (options.eval_log) options.eval_log->push_back({y, fy});

      const double delta = fy - fx;
      if (delta <= 0.0 || rng.uniform01() < std::exp(-delta / temp)) {
        x = y;
        fx = fy;
      }
      if (fy < best_cost) {
        best_cost = fy;
        best = y;
      }
    }
    rep.best_cost_curve.push_back(best_cost);
  }

  rep.best_gains = gains_from_vector(best);
  rep.best_cost = best_cost;
  rep.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  return rep;
}

std::optional<int> convergence_iteration(const OptimizationReport& report,
                                         double threshold) {
  for (std::size_t i = 0; i < report.best_cost_curve.size(); ++i) {
    if (report.best_cost_curve[i] <= threshold) return static_cast<int>(i) + 1;
  }
  return std::nullopt;
}

std::string optimizer_name(OptimizerKind kind) {
  switch (kind) {
    case OptimizerKind::Pso: return "pso";
    case OptimizerKind::Ga: return "ga";
    case OptimizerKind::Sa: return "sa";
  }
  return "?";
}

CampaignResult run_campaign(OptimizerKind kind, const CostFn& cost,
                            const SearchSpace& space,
                            const OptimizerSettings& settings,
                            const std::vector<std::uint64_t>& seeds,
                            const OptimizeOptions& options) {
  CampaignResult out;
  out.reports.reserve(seeds.size());
  for (const std::uint64_t seed : seeds) {
    switch (kind) {
      case OptimizerKind::Pso: {
        PsoConfig c = settings.pso;
        c.seed = seed;
        out.reports.push_back(pso_minimize(cost, space, c, options));
        break;
      }
      case OptimizerKind::Ga: {
        GaConfig c = settings.ga;
        c.seed = seed;
        out.reports.push_back(ga_minimize(cost, space, c, options));
        break;
      }
      case OptimizerKind::Sa: {
        SaConfig c = settings.sa;
        c.seed = seed;
        out.reports.push_back(sa_minimize(cost, space, c, options));
        break;
      }
    }
  }

  double sum = 0.0;
  out.min_best_cost = std::numeric_limits<double>::infinity();
  out.max_best_cost = -std::numeric_limits<double>::infinity();
  for (const auto& r : out.reports) {
    sum += r.best_cost;
    out.min_best_cost = std::min(out.min_best_cost, r.best_cost);
    out.max_best_cost = std::max(out.max_best_cost, r.best_cost);
  }
  const double n = static_cast<double>(out.reports.size());
  out.mean_best_cost = n > 0 ? sum / n : 0.0;
  double ss = 0.0;
  for (const auto& r : out.reports) {
    const double d = r.best_cost - out.mean_best_cost;
    ss += d * d;
  }
  out.stddev_best_cost = n > 1 ? std::sqrt(ss / (n - 1)) : 0.0;
  return out;
}

std::optional<int> median_convergence_iteration(const CampaignResult& campaign,
                                                double threshold) {
  std::vector<int> crossings;
  int absent = 0;
  for (const auto& r : campaign.reports) {
    if (auto it = convergence_iteration(r, threshold))
      crossings.push_back(*it);
    else
      ++absent;
  }
  if (campaign.reports.empty()) return std::nullopt;
  std::sort(crossings.begin(), crossings.end());
  // lower median over all runs, never-crossed runs rank last
  const std::size_t mid = (campaign.reports.size() + 1) / 2;  // 1-based rank
  if (crossings.size() < mid) return std::nullopt;
  return crossings[mid - 1];
}

}  // namespace gfmi
