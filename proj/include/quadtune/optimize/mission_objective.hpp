#pragma once

#include "quadtune/control/pid.hpp"
#include "quadtune/optimize/runner.hpp"
#include "quadtune/sim/simulator.hpp"

#include <cstddef>
#include <cstdint>
#include <exception>
#include <optional>
#include <stdexcept>
#include <vector>

namespace quadtune::optimize {

inline Point to_point(const control::GainVector& g)
{
    const auto f = g.flatten();
    return Point(f.begin(), f.end());
}

inline control::GainVector to_gains(const Point& x) { return control::GainVector::from_flat(x); }

/// Gain box from per-gain bounds. Loops listed in `frozen` are pinned to the
/// warm start (lower == upper), so every method searches the same space.
inline SearchSpace gain_space(const control::GainVector& lower, const control::GainVector& upper,
                              const std::optional<control::GainVector>& warm_start = std::nullopt,
                              const std::vector<control::Loop>& frozen = {})
{
    SearchSpace s{to_point(lower), to_point(upper), std::nullopt};
    if (warm_start) s.warm_start = to_point(*warm_start);
    for (control::Loop l : frozen) {
        if (!warm_start) throw std::invalid_argument("gain_space: freezing a loop needs a warm start");
        const auto i = 3 * static_cast<std::size_t>(l);
        for (std::size_t k = i; k < i + 3; ++k) s.lower[k] = s.upper[k] = (*s.warm_start)[k];
    }
    s.validate();
    return s;
}

/// One closed-loop rollout of `gains` with abort rules and the SWL series.
/// Never throws for bad gains: failures become penalty costs.
inline EvalRecord evaluate(const sim::SimContext& ctx, const control::GainVector& gains, std::uint64_t seed,
                           std::optional<bool> turbulence = std::nullopt)
{
    EvalRecord r;
    r.x = to_point(gains);
    r.seed = seed;
    try {
        gains.validate();
        sim::RunOptions opt;
        opt.seed = seed;
        opt.turbulence = turbulence;
        const auto res = sim::run_mission(ctx, gains, opt);
        r.cost = res.cost.total;
        r.breakdown = res.cost;
        r.aborted = res.log.abort_reason != sim::AbortReason::none;
    } catch (const std::exception&) {
        r.cost = kNonFinitePenalty;
        r.aborted = true;
    }
    if (!std::isfinite(r.cost)) {
        r.cost = kNonFinitePenalty;
        r.aborted = true;
    }
    return r;
}

inline Objective mission_objective(const sim::SimContext& ctx, std::optional<bool> turbulence = std::nullopt)
{
    return [&ctx, turbulence](const Point& x, std::uint64_t seed) {
        auto r = evaluate(ctx, to_gains(x), seed, turbulence);
        return Evaluation{r.cost, r.breakdown, r.aborted};
    };
}

struct StepOutcome {
    double reward = 0.0;
    bool clipped = false;  // the action was outside the box
    bool done = true;      // horizon one: every episode ends after one pull
    EvalRecord record;
};

/// One-step bandit: the action is clipped to the box and the reward is -J.
inline StepOutcome one_step_env(Point action, const SearchSpace& space, const sim::SimContext& ctx, std::uint64_t seed,
                                std::optional<bool> turbulence = std::nullopt)
{
    if (action.size() != space.dim()) throw std::invalid_argument("one_step_env: action dimension mismatch");
    StepOutcome out;
    out.clipped = space.clip(action);
    out.record = evaluate(ctx, to_gains(action), seed, turbulence);
    out.reward = -out.record.cost;
    return out;
}

} // namespace quadtune::optimize
