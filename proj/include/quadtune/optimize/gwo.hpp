#pragma once

#include "quadtune/optimize/space.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace quadtune::optimize {

struct GwoConfig {
    std::size_t pack = 30;

    void validate() const
    {
        if (pack < 3) throw std::invalid_argument("gwo: pack must be >= 3 (alpha, beta, delta)");
    }
};

/// a(t) = 2 (1 - t / T), clamped at 0 past the horizon.
inline double gwo_a(std::size_t t, std::size_t max_iters)
{
    if (max_iters == 0) throw std::invalid_argument("gwo_a: horizon must be > 0");
    return std::max(0.0, 2.0 * (1.0 - static_cast<double>(t) / static_cast<double>(max_iters)));
}

/// Best three positions seen so far, ordered alpha, beta, delta.
struct Leaders {
    std::array<Point, 3> x;
    std::array<double, 3> cost{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(),
                               std::numeric_limits<double>::infinity()};

    bool ready() const noexcept { return std::isfinite(cost[2]); }

    /// Merges candidates into the leader set, keeping the three lowest costs.
    void update(const std::vector<Point>& pack, const std::vector<double>& costs)
    {
        if (pack.size() != costs.size()) throw std::invalid_argument("gwo: one cost per wolf");
        std::vector<std::size_t> order(pack.size());
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return costs[a] < costs[b]; });
        for (std::size_t i : order) {
            const double c = costs[i];
            if (!(c < cost[2])) break;
            std::size_t slot = 2;
            while (slot > 0 && c < cost[slot - 1]) {
                x[slot] = x[slot - 1];
                cost[slot] = cost[slot - 1];
                --slot;
            }
            x[slot] = pack[i];
            cost[slot] = c;
        }
    }
};

/// Moves every wolf to the mean of its three leader-guided estimates,
/// X_j = L_j - A_j |C_j L_j - X|, A_j = 2 a r1 - a, C_j = 2 r2.
/// `uniform` supplies r values in [0, 1).
template <class Uniform>
std::vector<Point> gwo_move(const std::vector<Point>& pack, const Leaders& leaders, double a, const SearchSpace& space,
                            Uniform&& uniform)
{
    if (!leaders.ready()) throw std::invalid_argument("gwo: leaders are not initialized");
    std::vector<Point> next(pack.size());
    for (std::size_t i = 0; i < pack.size(); ++i) {
        const Point& x = pack[i];
        Point y(x.size(), 0.0);
        for (const Point& l : leaders.x) {
            for (std::size_t k = 0; k < x.size(); ++k) {
                const double big_a = 2.0 * a * uniform() - a;
                const double big_c = 2.0 * uniform();
                const double d = std::abs(big_c * l[k] - x[k]);
                y[k] += (l[k] - big_a * d) / 3.0;
            }
        }
        space.clip(y);
        next[i] = std::move(y);
    }
    return next;
}

/// One iteration: fold the pack's costs into the leaders, then move.
inline std::vector<Point> gwo_step(const std::vector<Point>& pack, const std::vector<double>& costs, Leaders& leaders,
                                   std::size_t t, std::size_t max_iters, const SearchSpace& space, Rng& rng)
{
    if (pack.size() < 3) throw std::invalid_argument("gwo_step: pack must be >= 3 (alpha, beta, delta)");
    leaders.update(pack, costs);
    return gwo_move(pack, leaders, gwo_a(t, max_iters), space, [&] { return uniform01(rng); });
}

} // namespace quadtune::optimize
