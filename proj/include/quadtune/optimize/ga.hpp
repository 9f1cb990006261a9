#pragma once

#include "quadtune/optimize/space.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <vector>

namespace quadtune::optimize {

struct GaConfig {
    std::size_t population = 30;
    double crossover_rate = 0.9;
    double mutation_rate = 0.2;   // per-gene probability of a Gaussian kick
    double mutation_scale = 0.05; // sigma_k as a fraction of each box width
    double mutation_decay = 0.98; // sigma multiplier applied per generation
    double elitism = 0.1;         // fraction copied unchanged
    std::optional<double> lambda; // fixed mixing weight; unset draws U(0,1) per child

    void validate() const
    {
        if (population < 2) throw std::invalid_argument("ga: population must be >= 2");
        for (double r : {crossover_rate, mutation_rate, elitism})
            if (!(r >= 0.0 && r <= 1.0)) throw std::invalid_argument("ga: rates must lie in [0, 1]");
        if (!(mutation_scale >= 0.0)) throw std::invalid_argument("ga: mutation scale must be >= 0");
        if (!(mutation_decay > 0.0 && mutation_decay <= 1.0))
            throw std::invalid_argument("ga: mutation decay must lie in (0, 1]");
        if (lambda && !(*lambda >= 0.0 && *lambda <= 1.0)) throw std::invalid_argument("ga: lambda must lie in [0, 1]");
    }
};

/// Fitness-proportionate selection probabilities under minimization,
/// F_i = J_worst - J_i + delta. Equal costs give uniform probabilities.
inline std::vector<double> selection_probabilities(const std::vector<double>& costs, double delta = 1e-9)
{
    if (costs.empty()) throw std::invalid_argument("selection_probabilities: empty population");
    for (double c : costs)
        if (!std::isfinite(c)) throw std::invalid_argument("selection_probabilities: costs must be finite");
    const double worst = *std::max_element(costs.begin(), costs.end());
    std::vector<double> p(costs.size());
    for (std::size_t i = 0; i < costs.size(); ++i) p[i] = worst - costs[i] + delta;
    const double sum = std::accumulate(p.begin(), p.end(), 0.0);
    if (!(sum > 0.0) || !std::isfinite(sum)) {
        std::fill(p.begin(), p.end(), 1.0 / static_cast<double>(p.size()));
        return p;
    }
    for (double& v : p) v /= sum;
    return p;
}

inline std::size_t roulette(const std::vector<double>& p, Rng& rng)
{
    const double u = uniform01(rng);
    double acc = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        acc += p[i];
        if (u < acc) return i;
    }
    return p.size() - 1;
}

/// lambda * a + (1 - lambda) * b
inline Point blend(const Point& a, const Point& b, double lambda)
{
    Point c(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) c[i] = lambda * a[i] + (1.0 - lambda) * b[i];
    return c;
}

struct GaGeneration {
    std::vector<Point> population;
    /// population[i] for i < elite_source.size() is a verbatim copy of the
    /// previous population[elite_source[i]]; the rest are new children.
    std::vector<std::size_t> elite_source;
};

inline std::size_t elite_count(const GaConfig& cfg, std::size_t n)
{
    return std::min(n, static_cast<std::size_t>(std::ceil(cfg.elitism * static_cast<double>(n) - 1e-12)));
}

/// One generation: elitism, roulette selection, arithmetic crossover and
/// Gaussian mutation with scale sigma_k = mutation_scale * width_k * sigma_factor.
inline GaGeneration ga_step(const std::vector<Point>& population, const std::vector<double>& costs,
                            const GaConfig& cfg, const SearchSpace& space, Rng& rng, double sigma_factor = 1.0)
{
    cfg.validate();
    if (population.size() < 2 || population.size() != costs.size())
        throw std::invalid_argument("ga_step: need >= 2 individuals with one cost each");
    const std::size_t n = population.size();
    const auto p = selection_probabilities(costs);

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return costs[a] < costs[b]; });
    std::vector<std::size_t> elites(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(elite_count(cfg, n)));
    std::sort(elites.begin(), elites.end());

    GaGeneration next;
    next.elite_source = elites;
    for (std::size_t i : elites) next.population.push_back(population[i]);

    while (next.population.size() < n) {
        const Point& a = population[roulette(p, rng)];
        const Point& b = population[roulette(p, rng)];
        Point child = a;
        if (uniform01(rng) < cfg.crossover_rate) {
            const double lambda = cfg.lambda ? *cfg.lambda : uniform01(rng);
            child = blend(a, b, lambda);
        }
        for (std::size_t k = 0; k < child.size(); ++k) {
            if (uniform01(rng) >= cfg.mutation_rate) continue;
            child[k] += cfg.mutation_scale * sigma_factor * space.width(k) * standard_normal(rng);
        }
        space.clip(child);
        next.population.push_back(std::move(child));
    }
    return next;
}

} // namespace quadtune::optimize
