#pragma once

#include "quadtune/core/parallel.hpp"
#include "quadtune/core/random.hpp"
#include "quadtune/optimize/bo.hpp"
#include "quadtune/optimize/ga.hpp"
#include "quadtune/optimize/gwo.hpp"
#include "quadtune/optimize/pso.hpp"
#include "quadtune/optimize/random_search.hpp"
#include "quadtune/optimize/space.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace quadtune::optimize {

enum class Method { ga, pso, gwo, bo, random };

inline std::string to_string(Method m)
{
    switch (m) {
    case Method::ga: return "ga";
    case Method::pso: return "pso";
    case Method::gwo: return "gwo";
    case Method::bo: return "bo";
    case Method::random: return "random";
    }
    return "?";
}

inline Method method_from_string(std::string_view s)
{
    for (Method m : {Method::ga, Method::pso, Method::gwo, Method::bo, Method::random})
        if (to_string(m) == s) return m;
    throw std::invalid_argument("unknown optimizer method: " + std::string(s));
}

struct OptimizerConfig {
    GaConfig ga;
    PsoConfig pso;
    GwoConfig gwo;
    std::size_t gwo_max_iters = 0;  // 0: derived from the evaluation budget
    BoConfig bo;
    RandomSearchConfig random;
    std::uint64_t seed = 1;

    void validate() const
    {
        ga.validate();
        pso.validate();
        gwo.validate();
        bo.validate();
        random.validate();
    }
};

/// Cost of one candidate. Must be safe to call concurrently.
using Objective = std::function<Evaluation(const Point&, std::uint64_t seed)>;

/// Finite stand-in for a non-finite objective value.
inline constexpr double kNonFinitePenalty = 1e12;

struct OptimizationResult {
    Method method = Method::random;
    EvalRecord best;
    std::vector<EvalRecord> records;
    std::vector<HistoryRow> history;
    double wall_seconds = 0.0;
};

namespace detail {

class BudgetedEvaluator {
public:
    BudgetedEvaluator(const Objective& f, const Budget& budget, std::uint64_t seed, unsigned workers,
                      OptimizationResult& out)
        : f_(f), budget_(budget), seed_(seed), workers_(workers), out_(out), start_(clock::now())
    {
    }

    double elapsed() const { return std::chrono::duration<double>(clock::now() - start_).count(); }

    bool exhausted() const
    {
        if (budget_.max_evaluations > 0 && out_.records.size() >= budget_.max_evaluations) return true;
        return budget_.max_seconds > 0.0 && elapsed() >= budget_.max_seconds;
    }

    std::size_t remaining() const
    {
        if (budget_.max_evaluations == 0) return std::numeric_limits<std::size_t>::max();
        return budget_.max_evaluations - std::min(budget_.max_evaluations, out_.records.size());
    }

    /// Evaluates as many of `points` as the budget allows, in parallel, and
    /// appends records and history rows in index order.
    std::vector<double> run(const std::vector<Point>& points, std::uint64_t generation)
    {
        if (exhausted()) return {};
        const std::size_t n = std::min(points.size(), remaining());
        std::vector<EvalRecord> batch(n);
        parallel_for(n, workers_, [&](std::size_t i) {
            EvalRecord& r = batch[i];
            r.x = points[i];
            r.seed = derive_seed(seed_, "eval", {generation, i});
            const auto t0 = clock::now();
            Evaluation e = f_(r.x, r.seed);
            r.wall_seconds = std::chrono::duration<double>(clock::now() - t0).count();
            r.cost = std::isfinite(e.cost) ? e.cost : kNonFinitePenalty;
            r.aborted = e.aborted || !std::isfinite(e.cost);
            r.breakdown = std::move(e.breakdown);
        });
        const double now = elapsed();
        std::vector<double> costs;
        for (auto& r : batch) {
            costs.push_back(r.cost);
            if (out_.records.empty() || r.cost < out_.best.cost) out_.best = r;
            out_.history.push_back({out_.records.size(), now, r.cost, out_.best.cost});
            out_.records.push_back(std::move(r));
        }
        return costs;
    }

private:
    using clock = std::chrono::steady_clock;
    const Objective& f_;
    Budget budget_;
    std::uint64_t seed_;
    unsigned workers_;
    OptimizationResult& out_;
    clock::time_point start_;
};

inline std::vector<Point> initial_population(const SearchSpace& space, std::size_t n, Rng& rng)
{
    std::vector<Point> pop;
    if (space.warm_start) pop.push_back(*space.warm_start);
    while (pop.size() < n) pop.push_back(space.sample(rng));
    return pop;
}

} // namespace detail

/// Runs `method` until the budget is spent. The warm start, when present, is
/// the first evaluation. Results do not depend on `workers`.
inline OptimizationResult run_optimizer(Method method, const SearchSpace& space, const Budget& budget,
                                        const Objective& objective, const OptimizerConfig& cfg, unsigned workers = 1)
{
    space.validate();
    budget.validate();
    cfg.validate();

    OptimizationResult out;
    out.method = method;
    detail::BudgetedEvaluator eval(objective, budget, cfg.seed, workers, out);
    Rng rng = make_rng(cfg.seed, "optimizer", {static_cast<std::uint64_t>(method)});
    std::uint64_t generation = 0;

    switch (method) {
    case Method::ga: {
        auto pop = detail::initial_population(space, cfg.ga.population, rng);
        auto costs = eval.run(pop, generation);
        while (costs.size() == pop.size() && !eval.exhausted()) {
            ++generation;
            const double sigma = std::pow(cfg.ga.mutation_decay, static_cast<double>(generation));
            auto next = ga_step(pop, costs, cfg.ga, space, rng, sigma);
            const std::size_t ne = next.elite_source.size();
            std::vector<double> next_costs;
            for (std::size_t i : next.elite_source) next_costs.push_back(costs[i]);
            const std::vector<Point> children(next.population.begin() + static_cast<std::ptrdiff_t>(ne),
                                              next.population.end());
            const auto child_costs = eval.run(children, generation);
            if (child_costs.size() != children.size()) break;
            next_costs.insert(next_costs.end(), child_costs.begin(), child_costs.end());
            pop = std::move(next.population);
            costs = std::move(next_costs);
        }
        break;
    }
    case Method::pso: {
        Swarm swarm = make_swarm(detail::initial_population(space, cfg.pso.swarm, rng));
        auto costs = eval.run(swarm.x, generation);
        while (costs.size() == swarm.size() && !eval.exhausted()) {
            pso_observe(swarm, costs);
            swarm = pso_step(std::move(swarm), cfg.pso, space, rng);
            costs = eval.run(swarm.x, ++generation);
        }
        break;
    }
    case Method::gwo: {
        std::size_t horizon = cfg.gwo_max_iters;
        if (horizon == 0)
            horizon = budget.max_evaluations > 0 ? std::max<std::size_t>(1, budget.max_evaluations / cfg.gwo.pack) : 200;
        auto pack = detail::initial_population(space, cfg.gwo.pack, rng);
        Leaders leaders;
        auto costs = eval.run(pack, generation);
        while (costs.size() == pack.size() && !eval.exhausted()) {
            pack = gwo_step(pack, costs, leaders, generation, horizon, space, rng);
            costs = eval.run(pack, ++generation);
        }
        break;
    }
    case Method::bo: {
        BoConfig bc = cfg.bo;
        bc.design_seed = derive_seed(cfg.seed, "bo-design");
        std::vector<Point> xs;
        std::vector<double> ys;
        while (!eval.exhausted()) {
            const Point x = bo_step(xs, ys, space, bc, rng);
            const auto c = eval.run({x}, generation++);
            if (c.empty()) break;
            xs.push_back(x);
            ys.push_back(c.front());
        }
        break;
    }
    case Method::random: {
        RandomSearchState st{cfg.random.initial_step};
        while (!eval.exhausted()) {
            const bool have = !out.records.empty();
            const Point incumbent = have ? out.best.x : Point{};
            const double before = have ? out.best.cost : std::numeric_limits<double>::infinity();
            std::vector<Point> batch;
            std::vector<bool> local;
            if (!have && space.warm_start) {
                batch.push_back(*space.warm_start);
                local.push_back(false);
            }
            while (batch.size() < cfg.random.batch) {
                bool is_local = false;
                batch.push_back(random_search_propose(st, have ? &incumbent : nullptr, cfg.random, space, rng, &is_local));
                local.push_back(is_local);
            }
            const auto costs = eval.run(batch, generation++);
            if (costs.empty()) break;
            std::size_t tries = 0, wins = 0;
            for (std::size_t i = 0; i < costs.size(); ++i) {
                if (!local[i]) continue;
                ++tries;
                if (costs[i] < before) ++wins;
            }
            random_search_adapt(st, tries, wins, cfg.random);
        }
        break;
    }
    }

    if (out.records.empty()) throw std::runtime_error("run_optimizer: budget exhausted before any evaluation");
    out.wall_seconds = eval.elapsed();
    return out;
}

} // namespace quadtune::optimize
