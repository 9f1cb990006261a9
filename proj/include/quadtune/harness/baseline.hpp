#pragma once

#include "quadtune/control/ziegler_nichols.hpp"
#include "quadtune/core/parallel.hpp"
#include "quadtune/sim/simulator.hpp"

#include <array>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

namespace quadtune::harness {

using control::GainVector;
using control::Loop;

/// Step experiment used to excite one loop.
struct LoopProbe {
    double step = 0.1;      // setpoint step, loop units (rad, m/s or m)
    double duration = 6.0;  // s
    control::UltimateGainSearch search;
};

struct ZieglerNicholsConfig {
    std::array<LoopProbe, control::kLoopCount> probes{};
    GainVector provisional;  // used for loops not yet tuned and as fallback
    /// Tuning order, innermost loops first.
    std::array<Loop, control::kLoopCount> order{Loop::attitude, Loop::vertical_speed, Loop::altitude,
                                                Loop::horizontal_speed, Loop::position_xy};
};

inline ZieglerNicholsConfig default_zn_config()
{
    ZieglerNicholsConfig c;
    auto& p = c.probes;
    p[static_cast<std::size_t>(Loop::attitude)] = {0.1, 4.0, {1.0, 2000.0, 129}};
    p[static_cast<std::size_t>(Loop::vertical_speed)] = {1.0, 6.0, {0.1, 200.0, 129}};
    p[static_cast<std::size_t>(Loop::altitude)] = {2.0, 12.0, {0.05, 50.0, 129}};
    p[static_cast<std::size_t>(Loop::horizontal_speed)] = {2.0, 12.0, {0.05, 50.0, 129}};
    p[static_cast<std::size_t>(Loop::position_xy)] = {5.0, 20.0, {0.02, 20.0, 129}};
    c.provisional[Loop::position_xy] = {0.5, 0.0, 0.0};
    c.provisional[Loop::altitude] = {1.0, 0.0, 0.0};
    c.provisional[Loop::attitude] = {100.0, 0.0, 20.0};
    c.provisional[Loop::horizontal_speed] = {1.0, 0.0, 0.0};
    c.provisional[Loop::vertical_speed] = {3.0, 0.0, 0.0};
    return c;
}

/// Closed-loop step response of `loop` with proportional gain kp (Ki = Kd = 0),
/// other loops at `gains`. Loops outside the probed path are bypassed through
/// setpoint overrides so the response is that of the probed loop.
inline std::vector<double> probe_step_response(const sim::SimContext& ctx, Loop loop, GainVector gains, double kp,
                                               const LoopProbe& probe)
{
    gains[loop] = {kp, 0.0, 0.0};
    sim::SimContext local = ctx;
    auto& mission = local.scenario.mission;
    const auto start = mission.start;
    mission.waypoints = {start};
    mission.speed_hints.clear();

    control::SetpointOverride ov;
    switch (loop) {
    case Loop::attitude:
        ov.vz = 0.0;
        ov.roll = probe.step;
        ov.pitch = 0.0;
        break;
    case Loop::vertical_speed:
        ov.vz = probe.step;
        ov.roll = 0.0;
        ov.pitch = 0.0;
        break;
    case Loop::altitude:
        mission.waypoints = {{start[0], start[1], start[2] + probe.step}};
        ov.roll = 0.0;
        ov.pitch = 0.0;
        break;
    case Loop::horizontal_speed:
        ov.vx = probe.step;
        ov.vy = 0.0;
        ov.vz = 0.0;
        break;
    case Loop::position_xy:
        mission.waypoints = {{start[0] + probe.step, start[1], start[2]}};
        break;
    }

    sim::RunOptions opt;
    opt.turbulence = false;
    opt.record_acoustics = false;
    opt.setpoint_override = &ov;
    opt.max_time = probe.duration;
    opt.abort_rules = false;
    opt.stop_on_completion = false;
    const auto result = sim::run_mission(local, gains, opt);

    const auto& log = result.log;
    std::vector<double> y;
    y.reserve(log.size());
    for (std::size_t k = 0; k < log.size(); ++k) {
        switch (loop) {
        case Loop::attitude: y.push_back(log.attitude[k][0]); break;
        case Loop::vertical_speed: y.push_back(log.velocity[k][2]); break;
        case Loop::altitude: y.push_back(log.position[k][2]); break;
        case Loop::horizontal_speed: y.push_back(log.velocity[k][0]); break;
        case Loop::position_xy: y.push_back(log.position[k][0]); break;
        }
    }
    // A rollout that diverged numerically ends early; mark it as unbounded growth.
    if (log.abort_reason == sim::AbortReason::numerical_divergence) y.push_back(std::numeric_limits<double>::infinity());
    return y;
}

struct LoopTuning {
    Loop loop = Loop::attitude;
    control::UltimateGainResult search;
    control::PidGains gains;
    bool fallback = false;  // no sustained oscillation found; provisional gains kept
};

struct ZieglerNicholsResult {
    GainVector gains;
    std::vector<LoopTuning> loops;
};

/// Ultimate-gain search and Ziegler-Nichols rule for each loop in order.
/// Probes of one loop are evaluated in parallel; the result does not depend on `workers`.
inline ZieglerNicholsResult tune_ziegler_nichols(const sim::SimContext& ctx, const ZieglerNicholsConfig& cfg,
                                                 unsigned workers = 1)
{
    ZieglerNicholsResult out;
    out.gains = cfg.provisional;
    for (Loop loop : cfg.order) {
        const auto& probe = cfg.probes[static_cast<std::size_t>(loop)];
        const auto grid = control::log_grid(probe.search.kp_min, probe.search.kp_max, probe.search.resolution);
        std::vector<std::vector<double>> responses(grid.size());
        const GainVector current = out.gains;
        parallel_for(grid.size(), workers, [&](std::size_t i) {
            responses[i] = probe_step_response(ctx, loop, current, grid[i], probe);
        });
        std::size_t next = 0;
        const control::StepResponseProbe replay = [&](double) { return responses[next++]; };

        LoopTuning lt;
        lt.loop = loop;
        lt.search = control::find_ultimate_gain(replay, ctx.scenario.dt, probe.search);
        if (lt.search.found) {
            lt.gains = control::ziegler_nichols(lt.search.ku, lt.search.tu);
        } else {
            lt.gains = cfg.provisional[loop];
            lt.fallback = true;
        }
        out.gains[loop] = lt.gains;
        out.loops.push_back(lt);
    }
    return out;
}

} // namespace quadtune::harness
