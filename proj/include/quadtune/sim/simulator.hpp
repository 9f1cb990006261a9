#pragma once

#include "quadtune/acoustics/grid.hpp"
#include "quadtune/aero/surrogate.hpp"
#include "quadtune/control/cascade.hpp"
#include "quadtune/cost/abort.hpp"
#include "quadtune/cost/cost.hpp"
#include "quadtune/dynamics/integrator.hpp"
#include "quadtune/sim/mission.hpp"
#include "quadtune/turbulence/dryden.hpp"

#include <array>
#include <cmath>
#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <vector>

namespace quadtune::sim {

struct TurbulenceConfig {
    bool enabled = false;
    turbulence::DrydenParams dryden;
    double scale = 0.01;       // multiplier on the closed-form thrust increment
    bool per_rotor = false;    // independent gust stream per rotor
};

/// Surrogate table axes used for in-loop aerodynamics.
struct AeroTableConfig {
    double omega_max_rpm = 4000.0;
    std::size_t omega_points = 100;
    double v_max = 20.0;
    std::size_t v_points = 80;
};

struct Scenario {
    Mission mission;
    TurbulenceConfig turbulence;
    bool grid_enabled = false;
    acoustics::GridConfig grid;
    acoustics::AtmosphereConditions atmosphere;
    acoustics::EmissionModel emission = acoustics::default_emission_model();
    cost::CostWeights weights;
    cost::AbortPolicy abort;
    dynamics::VehicleParams vehicle;
    aero::RotorGeometry rotor = aero::default_rotor_geometry();
    AeroTableConfig aero_table;
    control::ControllerLimits limits;
    double max_rpm = 3000.0;
    bool fit_mixer_constants = true;  // derive k_T and d from the surrogate around hover
    double rho = 1.225;
    double dt = 0.008;
    std::uint64_t seed = 0;

    void validate() const
    {
        mission.validate();
        vehicle.validate();
        rotor.validate();
        weights.validate();
        atmosphere.validate();
        emission.validate();
        grid.validate();
        if (turbulence.enabled) turbulence.dryden.validate();
        if (!(dt > 0.0)) throw std::invalid_argument("scenario: dt must be > 0");
        if (!(rho > 0.0)) throw std::invalid_argument("scenario: rho must be > 0");
        if (!(max_rpm > 0.0)) throw std::invalid_argument("scenario: max rpm must be > 0");
    }
};

/// Immutable resources shared by every rollout of one scenario: the aero
/// table, mixer constants and emission model. Safe to share across threads.
struct SimContext {
    Scenario scenario;
    std::shared_ptr<const aero::SurrogateTable> table;
    control::MixerParams mixer;
    double hover_rpm = 0.0;
    std::shared_ptr<const acoustics::Emitter> emitter;
};

/// Rotor speed (RPM) at which four rotors carry the weight in still air.
inline double hover_speed_rpm(const aero::SurrogateTable& table, double weight)
{
    double lo = table.omega_rpm.front(), hi = table.omega_rpm.back();
    if (4.0 * aero::surrogate_eval(table, hi, 0.0).thrust < weight)
        throw std::domain_error("hover_speed_rpm: table cannot lift the vehicle");
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        (4.0 * aero::surrogate_eval(table, mid, 0.0).thrust < weight ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

inline SimContext make_context(const Scenario& scenario, unsigned workers = 1,
                               std::shared_ptr<const aero::SurrogateTable> table = nullptr)
{
    scenario.validate();
    SimContext ctx;
    ctx.scenario = scenario;
    if (!table) {
        const auto& a = scenario.aero_table;
        const auto w = aero::linspace(0.0, a.omega_max_rpm, a.omega_points);
        const auto v = aero::linspace(0.0, a.v_max, a.v_points);
        table = std::make_shared<const aero::SurrogateTable>(
            aero::build_surrogate(scenario.rotor, w, v, scenario.rho, workers));
    }
    ctx.table = std::move(table);
    ctx.hover_rpm = hover_speed_rpm(*ctx.table, scenario.vehicle.mass * scenario.vehicle.gravity);

    ctx.mixer.arm_length = scenario.vehicle.arm_length;
    ctx.mixer.omega_max = rpm_to_rad_s(scenario.max_rpm);
    ctx.mixer.drag_factor = scenario.vehicle.rotor_drag;
    if (scenario.fit_mixer_constants) {
        const double lo = 0.9 * ctx.hover_rpm, hi = 1.1 * ctx.hover_rpm;
        ctx.mixer.k_thrust = aero::fit_quadratic_coefficient(*ctx.table, aero::Quantity::thrust, lo, hi, 0.0);
        ctx.mixer.drag_factor = aero::fit_quadratic_coefficient(*ctx.table, aero::Quantity::torque, lo, hi, 0.0);
    } else {
        const double w = rpm_to_rad_s(ctx.hover_rpm);
        ctx.mixer.k_thrust = scenario.vehicle.mass * scenario.vehicle.gravity / (4.0 * w * w);
    }
    ctx.mixer.validate();
    ctx.emitter = std::make_shared<const acoustics::Emitter>(scenario.emission);
    return ctx;
}

/// Options for one rollout beyond the scenario itself.
struct RunOptions {
    std::optional<bool> turbulence;        // overrides scenario.turbulence.enabled
    std::optional<std::uint64_t> seed;     // overrides scenario.seed
    bool grid = false;                     // compute the ground receiver grid
    bool record_acoustics = true;          // fill log.swl
    const control::SetpointOverride* setpoint_override = nullptr;
    double max_time = 0.0;                 // > 0 replaces mission.max_time
    bool abort_rules = true;
    bool stop_on_completion = true;        // false keeps flying (holding the last waypoint) until max_time
};

struct Diagnostics {
    std::size_t surrogate_queries = 0;
    std::size_t surrogate_clamped = 0;
    std::size_t gimbal_clamps = 0;
    std::size_t steps = 0;
};

struct MissionResult {
    TrajectoryLog log;
    cost::CostBreakdown cost;
    Diagnostics diagnostics;
    std::unique_ptr<acoustics::GroundGrid> grid;
    std::vector<double> turbulence_thrust;  // per-step increment added to T_sum, N
};

/// Closed-loop rollout: controller at every step, inputs held over the RK4
/// step, until the final waypoint is reached, time runs out, or an abort rule fires.
inline MissionResult run_mission(const SimContext& ctx, const control::GainVector& gains, const RunOptions& opt = {})
{
    const Scenario& sc = ctx.scenario;
    const Mission& mission = sc.mission;
    const auto& vp = sc.vehicle;
    const double dt = sc.dt;
    const double max_time = opt.max_time > 0.0 ? opt.max_time : mission.max_time;
    const std::uint64_t seed = opt.seed.value_or(sc.seed);
    const bool turb = opt.turbulence.value_or(sc.turbulence.enabled);
    const auto steps = static_cast<std::size_t>(std::ceil(max_time / dt - 1e-9));

    MissionResult res;
    TrajectoryLog& log = res.log;
    log.dt = dt;
    log.start = mission.start;
    log.reserve(std::min<std::size_t>(steps, 200000));

    control::CascadeController controller(gains, vp, ctx.mixer, sc.limits);
    dynamics::VehicleState state;
    state.position = mission.start;
    state.attitude[2] = mission.yaw;
    const double w_hover = rpm_to_rad_s(ctx.hover_rpm);
    state.rotor_speed = {w_hover, w_hover, w_hover, w_hover};

    std::vector<turbulence::DrydenGenerator> gusts;
    if (turb) {
        const std::size_t streams = sc.turbulence.per_rotor ? 4 : 1;
        for (std::size_t i = 0; i < streams; ++i)
            gusts.emplace_back(sc.turbulence.dryden, dt, derive_seed(seed, "turbulence", {i}));
    }
    if (opt.grid) res.grid = std::make_unique<acoustics::GroundGrid>(sc.grid, *ctx.emitter, sc.atmosphere);

    cost::AbortMonitor monitor(sc.abort, mission.start);
    aero::SurrogateStats stats;
    dynamics::KinematicsDiagnostics kin;
    std::size_t target = 0;
    const double r1 = sc.rotor.hub_radius, r2 = sc.rotor.radius;

    for (std::size_t k = 0; k < steps; ++k) {
        const Vec3& wp = mission.waypoints[target];
        const control::Target tgt{wp, mission.yaw, mission.speed_hint(target)};
        const auto cmd = controller.step(state, tgt, dt, opt.setpoint_override);
        const auto rpm = control::mix(cmd, ctx.mixer);

        // Axial inflow through the disks: velocity along the thrust axis, climbing positive.
        const double cphi = std::cos(state.attitude[0]), sphi = std::sin(state.attitude[0]);
        const double cth = std::cos(state.attitude[1]), sth = std::sin(state.attitude[1]);
        const double cpsi = std::cos(state.attitude[2]), spsi = std::sin(state.attitude[2]);
        const Vec3 b3{cpsi * sth * cphi + spsi * sphi, spsi * sth * cphi - cpsi * sphi, cth * cphi};
        const double v_axial = std::max(0.0, state.velocity[0] * b3[0] + state.velocity[1] * b3[1] + state.velocity[2] * b3[2]);

        std::array<double, 4> thrust{}, torque{};
        double power = 0.0;
        for (std::size_t i = 0; i < 4; ++i) {
            const auto perf = aero::surrogate_eval(*ctx.table, rpm[i], v_axial, &stats);
            thrust[i] = perf.thrust;
            torque[i] = perf.torque;
            power += std::max(0.0, perf.power);
            state.rotor_speed[i] = rpm_to_rad_s(rpm[i]);
        }

        double t_turb = 0.0;
        if (turb) {
            const turbulence::GustSample shared = gusts[0].next();
            for (std::size_t i = 0; i < 4; ++i) {
                const turbulence::GustSample g = sc.turbulence.per_rotor && i > 0 ? gusts[i].next() : shared;
                if (state.rotor_speed[i] > 0.0)
                    t_turb += turbulence::thrust_increment(g, state.rotor_speed[i], r1, r2, sc.rho);
            }
            t_turb *= sc.turbulence.scale;
        }

        const auto u = control::thrusts_to_controls(thrust, ctx.mixer);
        dynamics::BodyInputs in;
        in.thrust_total = u.u1 + t_turb;
        in.roll_moment = u.u2;
        in.pitch_moment = u.u3;
        in.yaw_moment = torque[0] - torque[1] + torque[2] - torque[3];
        const auto& w = state.rotor_speed;
        in.omega_diff = w[0] - w[1] + w[2] - w[3];

        try {
            state = dynamics::rk4_step(state, in, vp, dt, k, &kin);
        } catch (const dynamics::SimulationDiverged&) {
            log.abort_reason = AbortReason::numerical_divergence;
            log.abort_step = k;
            break;
        }

        const double t = static_cast<double>(k + 1) * dt;
        log.time.push_back(t);
        log.position.push_back(state.position);
        log.velocity.push_back(state.velocity);
        log.attitude.push_back(state.attitude);
        log.rates.push_back(state.rates);
        log.rpm.push_back(rpm);
        log.thrust_command.push_back(cmd.u1);
        log.thrust_total.push_back(in.thrust_total);
        log.power.push_back(power);
        log.target.push_back(target);
        if (opt.record_acoustics) log.swl.push_back(ctx.emitter->source_broadband(rpm));
        if (turb) res.turbulence_thrust.push_back(t_turb);
        if (res.grid) res.grid->step({state.position, state.attitude, rpm}, k);

        if (!log.completed && distance(state.position, mission.waypoints[target]) < sc.weights.waypoint_threshold) {
            log.waypoints_visited = target + 1;
            if (target + 1 == mission.waypoints.size()) {
                log.completed = true;
                log.completion_time = t;
                if (opt.stop_on_completion) break;
            } else {
                ++target;
            }
        }

        if (opt.abort_rules) {
            const auto reason = monitor.update(t, state.position, log.waypoints_visited);
            if (reason != AbortReason::none) {
                log.abort_reason = reason;
                log.abort_step = k;
                break;
            }
        }
    }

    res.diagnostics = {stats.queries.load(), stats.clamped.load(), kin.gimbal_clamps, log.size()};
    if (log.empty()) {
        // Diverged on the first step: cost from the start state.
        log.time.push_back(dt);
        log.position.push_back(mission.start);
        log.velocity.push_back({});
        log.attitude.push_back({});
        log.rates.push_back({});
        log.rpm.push_back({});
        log.thrust_command.push_back(0.0);
        log.thrust_total.push_back(0.0);
        log.power.push_back(0.0);
        log.target.push_back(0);
        if (opt.record_acoustics) log.swl.push_back(0.0);
    }
    cost::CostWeights weights = sc.weights;
    if (!opt.record_acoustics) weights[cost::Term::noise] = 0.0;
    res.cost = cost::compute_terms(log, mission, weights);
    return res;
}

} // namespace quadtune::sim
