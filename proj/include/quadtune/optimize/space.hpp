#pragma once

#include "quadtune/core/random.hpp"
#include "quadtune/cost/cost.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

namespace quadtune::optimize {

using Point = std::vector<double>;

/// Axis-aligned box with an optional warm start inside it. A dimension with
/// lower == upper is frozen.
struct SearchSpace {
    Point lower;
    Point upper;
    std::optional<Point> warm_start;

    std::size_t dim() const noexcept { return lower.size(); }
    double width(std::size_t i) const noexcept { return upper[i] - lower[i]; }

    void validate() const
    {
        if (lower.empty() || lower.size() != upper.size()) throw std::invalid_argument("search space: bad bound sizes");
        for (std::size_t i = 0; i < dim(); ++i)
            if (!(lower[i] <= upper[i]) || !std::isfinite(lower[i]) || !std::isfinite(upper[i]))
                throw std::invalid_argument("search space: need finite lower <= upper");
        if (warm_start) {
            if (warm_start->size() != dim()) throw std::invalid_argument("search space: warm start dimension mismatch");
            if (!contains(*warm_start)) throw std::invalid_argument("search space: warm start outside the box");
        }
    }

    bool contains(const Point& x) const noexcept
    {
        if (x.size() != dim()) return false;
        for (std::size_t i = 0; i < dim(); ++i)
            if (!(x[i] >= lower[i] && x[i] <= upper[i])) return false;
        return true;
    }

    /// Clips in place; returns true when any component moved.
    bool clip(Point& x) const noexcept
    {
        bool moved = false;
        for (std::size_t i = 0; i < dim(); ++i) {
            const double c = std::isnan(x[i]) ? lower[i] : std::clamp(x[i], lower[i], upper[i]);
            moved = moved || c != x[i];
            x[i] = c;
        }
        return moved;
    }

    Point sample(Rng& rng) const
    {
        Point x(dim());
        for (std::size_t i = 0; i < dim(); ++i) x[i] = lower[i] + uniform01(rng) * width(i);
        return x;
    }

    Point to_unit(const Point& x) const
    {
        Point u(dim());
        for (std::size_t i = 0; i < dim(); ++i) u[i] = width(i) > 0.0 ? (x[i] - lower[i]) / width(i) : 0.5;
        return u;
    }

    Point from_unit(const Point& u) const
    {
        Point x(dim());
        for (std::size_t i = 0; i < dim(); ++i) x[i] = lower[i] + std::clamp(u[i], 0.0, 1.0) * width(i);
        return x;
    }
};

inline SearchSpace uniform_box(std::size_t d, double lo, double hi)
{
    return {Point(d, lo), Point(d, hi), std::nullopt};
}

/// Evaluation budget; a zero limit is unset.
struct Budget {
    std::size_t max_evaluations = 0;
    double max_seconds = 0.0;

    void validate() const
    {
        if (max_evaluations == 0 && !(max_seconds > 0.0))
            throw std::invalid_argument("budget: set max evaluations and/or max wall time");
    }
};

/// Outcome of one objective call.
struct Evaluation {
    double cost = 0.0;
    std::optional<cost::CostBreakdown> breakdown;
    bool aborted = false;
};

struct EvalRecord {
    Point x;
    double cost = 0.0;
    std::optional<cost::CostBreakdown> breakdown;
    double wall_seconds = 0.0;
    std::uint64_t seed = 0;
    bool aborted = false;
};

/// One row of the convergence history.
struct HistoryRow {
    std::size_t eval_index = 0;
    double wall_seconds = 0.0;
    double candidate_cost = 0.0;
    double incumbent_cost = 0.0;
};

} // namespace quadtune::optimize
