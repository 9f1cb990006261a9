#pragma once

#include "quadtune/optimize/space.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <vector>

namespace quadtune::optimize {

struct PsoConfig {
    std::size_t swarm = 30;
    double chi = 0.7;  // inertia weight
    double c1 = 1.5;   // cognitive
    double c2 = 1.5;   // social
    double velocity_clamp = 0.2;  // fraction of box width

    void validate() const
    {
        if (swarm < 2) throw std::invalid_argument("pso: swarm must be >= 2");
        if (!(chi >= 0.0 && c1 >= 0.0 && c2 >= 0.0)) throw std::invalid_argument("pso: coefficients must be >= 0");
        if (!(velocity_clamp > 0.0)) throw std::invalid_argument("pso: velocity clamp must be > 0");
    }
};

struct Swarm {
    std::vector<Point> x;
    std::vector<Point> v;
    std::vector<Point> best_x;
    std::vector<double> best_cost;
    Point global_x;
    double global_cost = std::numeric_limits<double>::infinity();

    std::size_t size() const noexcept { return x.size(); }
};

/// Swarm at the given positions with zero velocity and no bests yet.
inline Swarm make_swarm(std::vector<Point> positions)
{
    Swarm s;
    s.v.assign(positions.size(), Point(positions.empty() ? 0 : positions.front().size(), 0.0));
    s.best_x = positions;
    s.best_cost.assign(positions.size(), std::numeric_limits<double>::infinity());
    s.x = std::move(positions);
    return s;
}

/// Records the costs of the current positions; bests move on strict improvement only.
inline void pso_observe(Swarm& s, const std::vector<double>& costs)
{
    if (costs.size() != s.size()) throw std::invalid_argument("pso_observe: one cost per particle");
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (costs[i] < s.best_cost[i]) {
            s.best_cost[i] = costs[i];
            s.best_x[i] = s.x[i];
        }
        if (s.best_cost[i] < s.global_cost) {
            s.global_cost = s.best_cost[i];
            s.global_x = s.best_x[i];
        }
    }
}

/// v <- chi v + c1 r1 (p - x) + c2 r2 (g - x); x <- x + v, clipped to the box.
inline Swarm pso_step(Swarm s, const PsoConfig& cfg, const SearchSpace& space, Rng& rng)
{
    cfg.validate();
    if (s.global_x.empty()) throw std::invalid_argument("pso_step: bests are not initialized");
    for (std::size_t i = 0; i < s.size(); ++i) {
        auto& x = s.x[i];
        auto& v = s.v[i];
        for (std::size_t k = 0; k < x.size(); ++k) {
            const double r1 = uniform01(rng);
            const double r2 = uniform01(rng);
            double vk = cfg.chi * v[k] + cfg.c1 * r1 * (s.best_x[i][k] - x[k]) + cfg.c2 * r2 * (s.global_x[k] - x[k]);
            const double vmax = cfg.velocity_clamp * space.width(k);
            v[k] = std::clamp(vk, -vmax, vmax);
            x[k] += v[k];
        }
        space.clip(x);
    }
    return s;
}

} // namespace quadtune::optimize
