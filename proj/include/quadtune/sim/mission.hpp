#pragma once

#include "quadtune/dynamics/rigid_body.hpp"

#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace quadtune::sim {

using dynamics::Vec3;

/// Ordered waypoints flown from `start`. speed_hints holds one horizontal
/// speed cap per leg (leg j ends at waypoint j) or is empty.
struct Mission {
    Vec3 start{0.0, 0.0, 10.0};
    std::vector<Vec3> waypoints;
    double yaw = 0.0;
    std::vector<double> speed_hints;
    double max_time = 150.0;  // s

    void validate() const
    {
        if (waypoints.empty()) throw std::invalid_argument("mission: at least one waypoint is required");
        for (const auto& w : waypoints)
            for (double c : w)
                if (!std::isfinite(c)) throw std::invalid_argument("mission: waypoints must be finite");
        for (double c : start)
            if (!std::isfinite(c)) throw std::invalid_argument("mission: start must be finite");
        if (!speed_hints.empty() && speed_hints.size() != waypoints.size())
            throw std::invalid_argument("mission: speed_hints needs one entry per leg");
        if (!(max_time > 0.0)) throw std::invalid_argument("mission: max time must be > 0");
    }

    double speed_hint(std::size_t leg) const noexcept { return leg < speed_hints.size() ? speed_hints[leg] : 0.0; }
};

inline double distance(const Vec3& a, const Vec3& b) noexcept
{
    return std::sqrt((a[0] - b[0]) * (a[0] - b[0]) + (a[1] - b[1]) * (a[1] - b[1]) + (a[2] - b[2]) * (a[2] - b[2]));
}

enum class AbortReason { none, diverged_radius, no_movement, first_waypoint_timeout, numerical_divergence };

inline const char* to_string(AbortReason r) noexcept
{
    switch (r) {
    case AbortReason::none: return "none";
    case AbortReason::diverged_radius: return "diverged_radius";
    case AbortReason::no_movement: return "no_movement";
    case AbortReason::first_waypoint_timeout: return "first_waypoint_timeout";
    case AbortReason::numerical_divergence: return "numerical_divergence";
    }
    return "unknown";
}

/// Per-step trajectory and acoustic record of one rollout. Entry k holds the
/// state after step k (time (k+1) dt) and the inputs applied during that step.
struct TrajectoryLog {
    double dt = 0.008;
    Vec3 start{};
    std::vector<double> time;
    std::vector<Vec3> position;
    std::vector<Vec3> velocity;
    std::vector<Vec3> attitude;
    std::vector<Vec3> rates;
    std::vector<std::array<double, 4>> rpm;
    std::vector<double> thrust_command;  // u1, N
    std::vector<double> thrust_total;    // rotor sum plus turbulence increment, N
    std::vector<double> power;           // electrical (shaft) power, W
    std::vector<double> swl;             // broadband source sound power level, dB; empty if not computed
    std::vector<std::size_t> target;     // active waypoint index during the step

    bool completed = false;
    double completion_time = 0.0;
    std::size_t waypoints_visited = 0;
    AbortReason abort_reason = AbortReason::none;
    std::size_t abort_step = 0;

    bool aborted() const noexcept { return abort_reason != AbortReason::none; }
    std::size_t size() const noexcept { return time.size(); }
    bool empty() const noexcept { return time.empty(); }

    void reserve(std::size_t n)
    {
        time.reserve(n);
        position.reserve(n);
        velocity.reserve(n);
        attitude.reserve(n);
        rates.reserve(n);
        rpm.reserve(n);
        thrust_command.reserve(n);
        thrust_total.reserve(n);
        power.reserve(n);
        swl.reserve(n);
        target.reserve(n);
    }
};

} // namespace quadtune::sim
