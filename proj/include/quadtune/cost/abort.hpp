#pragma once

#include "quadtune/sim/mission.hpp"

#include <algorithm>
#include <cstddef>

namespace quadtune::cost {

using sim::AbortReason;

struct AbortPolicy {
    bool enabled = true;
    double divergence_radius = 50.0;       // m from the start point
    double grace_period = 3.0;             // s before the no-movement rule applies
    double movement_threshold = 0.05;      // m
    double first_waypoint_budget = 40.0;   // s

    friend bool operator==(const AbortPolicy&, const AbortPolicy&) = default;
};

/// Incremental form of the abort rules, fed once per simulation step.
class AbortMonitor {
public:
    AbortMonitor(const AbortPolicy& policy, const sim::Vec3& start) : policy_(policy), start_(start) {}

    AbortReason update(double t, const sim::Vec3& position, std::size_t waypoints_visited)
    {
        if (!policy_.enabled) return AbortReason::none;
        const double d = sim::distance(position, start_);
        max_displacement_ = std::max(max_displacement_, d);
        if (d > policy_.divergence_radius) return AbortReason::diverged_radius;
        if (t >= policy_.grace_period && max_displacement_ < policy_.movement_threshold) return AbortReason::no_movement;
        if (waypoints_visited == 0 && t > policy_.first_waypoint_budget) return AbortReason::first_waypoint_timeout;
        return AbortReason::none;
    }

private:
    AbortPolicy policy_;
    sim::Vec3 start_;
    double max_displacement_ = 0.0;
};

/// Abort decision for the most recent entry of a partial log.
inline AbortReason early_abort(const sim::TrajectoryLog& partial, const sim::Mission& mission, const AbortPolicy& policy)
{
    (void)mission;
    AbortMonitor monitor(policy, partial.start);
    AbortReason r = AbortReason::none;
    std::size_t visited = 0;
    for (std::size_t k = 0; k < partial.size(); ++k) {
        visited = std::max(visited, partial.target[k]);
        r = monitor.update(partial.time[k], partial.position[k], visited);
        if (r != AbortReason::none) return r;
    }
    return r;
}

} // namespace quadtune::cost
