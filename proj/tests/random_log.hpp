#pragma once

#include "quadtune/sim/mission.hpp"

#include <random>

namespace testing_support {

/// Random trajectory with acoustic history, ending near the mission's last waypoint
/// when `completed` is set.
inline quadtune::sim::TrajectoryLog random_log(std::mt19937_64& rng, const quadtune::sim::Mission& m,
                                               std::size_t n, bool completed)
{
    std::uniform_real_distribution<double> u(-1.0, 1.0), pw(200.0, 600.0), swl(70.0, 90.0), th(40.0, 60.0);
    quadtune::sim::TrajectoryLog log;
    log.dt = 0.008;
    log.start = m.start;
    for (std::size_t k = 0; k < n; ++k) {
        const double s = static_cast<double>(k + 1) / static_cast<double>(n);
        const auto& w = m.waypoints.back();
        log.time.push_back(static_cast<double>(k + 1) * log.dt);
        log.position.push_back({m.start[0] + s * (w[0] - m.start[0]) + 0.3 * u(rng),
                                m.start[1] + s * (w[1] - m.start[1]) + 0.3 * u(rng),
                                m.start[2] + s * (w[2] - m.start[2]) + 0.3 * u(rng)});
        log.velocity.push_back({u(rng), u(rng), u(rng)});
        log.attitude.push_back({0.2 * u(rng), 0.2 * u(rng), 0.05 * u(rng)});
        log.rates.push_back({u(rng), u(rng), u(rng)});
        log.rpm.push_back({1900, 1900, 1900, 1900});
        log.thrust_command.push_back(th(rng));
        log.thrust_total.push_back(log.thrust_command.back());
        log.power.push_back(pw(rng));
        log.swl.push_back(swl(rng));
        log.target.push_back(std::min<std::size_t>(k * m.waypoints.size() / n, m.waypoints.size() - 1));
    }
    log.completed = completed;
    if (completed) {
        log.completion_time = log.time.back();
        log.position.back() = m.waypoints.back();
        log.waypoints_visited = m.waypoints.size();
    }
    return log;
}

inline quadtune::sim::Mission two_leg_mission()
{
    quadtune::sim::Mission m;
    m.start = {0, 0, 10};
    m.waypoints = {{10, 0, 10}, {10, 8, 12}};
    return m;
}

} // namespace testing_support
