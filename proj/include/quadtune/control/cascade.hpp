#pragma once

#include "quadtune/control/mixer.hpp"
#include "quadtune/control/pid.hpp"
#include "quadtune/core/units.hpp"
#include "quadtune/dynamics/rigid_body.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

namespace quadtune::control {

using dynamics::Vec3;

struct ControllerLimits {
    double max_tilt = deg_to_rad(30.0);             // rad, roll/pitch setpoint bound
    double max_horizontal_speed = kmh_to_ms(50.0);  // m/s
    double max_vertical_speed = kmh_to_ms(20.0);    // m/s
    double max_vertical_accel = 9.81;               // m/s^2
    double tilt_cosine_floor = 0.5;                 // feed-forward denominator floor
};

/// Saturation bounds for u1..u4, derived from the mixer's physical authority.
struct CommandLimits {
    double u1 = 0.0;
    double u2 = 0.0;
    double u3 = 0.0;
    double u4 = 0.0;
};

inline CommandLimits command_limits(const MixerParams& m)
{
    const double w2 = m.omega_max * m.omega_max;
    return {4.0 * m.k_thrust * w2, m.arm_length * m.k_thrust * w2, m.arm_length * m.k_thrust * w2,
            2.0 * m.drag_factor * w2};
}

struct Target {
    Vec3 position{};
    double yaw = 0.0;
    double speed_hint = 0.0;  // m/s horizontal cap for this leg; 0 uses the global bound
};

/// Replaces intermediate setpoints; used to probe one loop in isolation.
struct SetpointOverride {
    std::optional<double> vx, vy, vz;  // m/s
    std::optional<double> roll, pitch; // rad
};

/// Intermediate setpoints of the most recent step.
struct Setpoints {
    Vec3 velocity{};
    Vec3 accel{};
    double roll = 0.0;
    double pitch = 0.0;
    double yaw = 0.0;
};

inline double wrap_angle(double a) noexcept { return std::remainder(a, 2.0 * kPi); }

/// Position/altitude -> speed -> attitude + thrust -> moments.
class CascadeController {
public:
    CascadeController(const GainVector& gains, const dynamics::VehicleParams& vehicle, const MixerParams& mixer,
                      const ControllerLimits& limits = {})
        : gains_(gains), vehicle_(vehicle), limits_(limits), cmd_limits_(command_limits(mixer))
    {
        const double a_h = vehicle.gravity * std::tan(limits.max_tilt);
        const auto& g = gains_;
        pos_x_.integral_limit = integral_limit_for(limits.max_horizontal_speed, g[Loop::position_xy].ki);
        pos_y_.integral_limit = pos_x_.integral_limit;
        alt_.integral_limit = integral_limit_for(limits.max_vertical_speed, g[Loop::altitude].ki);
        vel_x_.integral_limit = integral_limit_for(a_h, g[Loop::horizontal_speed].ki);
        vel_y_.integral_limit = vel_x_.integral_limit;
        vel_z_.integral_limit = integral_limit_for(limits.max_vertical_accel, g[Loop::vertical_speed].ki);
        const double ka = g[Loop::attitude].ki;
        roll_.integral_limit = integral_limit_for(cmd_limits_.u2 / vehicle.inertia[0], ka);
        pitch_.integral_limit = integral_limit_for(cmd_limits_.u3 / vehicle.inertia[1], ka);
        yaw_.integral_limit = integral_limit_for(cmd_limits_.u4 / vehicle.inertia[2], ka);
    }

    ControlCommand step(const dynamics::VehicleState& s, const Target& target, double dt,
                        const SetpointOverride* ov = nullptr)
    {
        const auto& g = gains_;
        const double grav = vehicle_.gravity;

        // Outer loop: position and altitude errors -> bounded velocity setpoints.
        const double v_cap = target.speed_hint > 0.0 ? std::min(target.speed_hint, limits_.max_horizontal_speed)
                                                     : limits_.max_horizontal_speed;
        double vx = pid_update(pos_x_, g[Loop::position_xy], target.position[0] - s.position[0], dt);
        double vy = pid_update(pos_y_, g[Loop::position_xy], target.position[1] - s.position[1], dt);
        const double vh = std::hypot(vx, vy);
        if (vh > v_cap) {
            vx *= v_cap / vh;
            vy *= v_cap / vh;
        }
        double vz = std::clamp(pid_update(alt_, g[Loop::altitude], target.position[2] - s.position[2], dt),
                               -limits_.max_vertical_speed, limits_.max_vertical_speed);
        if (ov) {
            vx = ov->vx.value_or(vx);
            vy = ov->vy.value_or(vy);
            vz = ov->vz.value_or(vz);
        }

        // Middle loop: speed errors -> accelerations -> tilt setpoints and collective thrust.
        const double a_h = grav * std::tan(limits_.max_tilt);
        const double ax = std::clamp(pid_update(vel_x_, g[Loop::horizontal_speed], vx - s.velocity[0], dt), -a_h, a_h);
        const double ay = std::clamp(pid_update(vel_y_, g[Loop::horizontal_speed], vy - s.velocity[1], dt), -a_h, a_h);
        const double az = std::clamp(pid_update(vel_z_, g[Loop::vertical_speed], vz - s.velocity[2], dt),
                                     -limits_.max_vertical_accel, limits_.max_vertical_accel);

        const double psi = s.attitude[2];
        const double cpsi = std::cos(psi), spsi = std::sin(psi);
        double pitch_d = std::atan((ax * cpsi + ay * spsi) / grav);
        double roll_d = std::atan((ax * spsi - ay * cpsi) / grav);
        if (ov) {
            roll_d = ov->roll.value_or(roll_d);
            pitch_d = ov->pitch.value_or(pitch_d);
        }
        roll_d = std::clamp(roll_d, -limits_.max_tilt, limits_.max_tilt);
        pitch_d = std::clamp(pitch_d, -limits_.max_tilt, limits_.max_tilt);

        const double tilt = std::max(std::cos(s.attitude[0]) * std::cos(s.attitude[1]), limits_.tilt_cosine_floor);
        ControlCommand cmd;
        cmd.u1 = std::clamp(vehicle_.mass * (grav + az) / tilt, 0.0, cmd_limits_.u1);

        // Inner loop: attitude errors -> angular acceleration demand -> body moments.
        const auto& ga = g[Loop::attitude];
        const auto& inertia = vehicle_.inertia;
        cmd.u2 = std::clamp(inertia[0] * pid_update(roll_, ga, roll_d - s.attitude[0], dt), -cmd_limits_.u2,
                            cmd_limits_.u2);
        cmd.u3 = std::clamp(inertia[1] * pid_update(pitch_, ga, pitch_d - s.attitude[1], dt), -cmd_limits_.u3,
                            cmd_limits_.u3);
        cmd.u4 = std::clamp(inertia[2] * pid_update(yaw_, ga, wrap_angle(target.yaw - psi), dt), -cmd_limits_.u4,
                            cmd_limits_.u4);

        last_ = {{vx, vy, vz}, {ax, ay, az}, roll_d, pitch_d, target.yaw};
        return cmd;
    }

    const Setpoints& setpoints() const noexcept { return last_; }
    const GainVector& gains() const noexcept { return gains_; }
    const CommandLimits& limits() const noexcept { return cmd_limits_; }

    const PidState& pid(Loop l, std::size_t axis = 0) const
    {
        switch (l) {
        case Loop::position_xy: return axis == 0 ? pos_x_ : pos_y_;
        case Loop::altitude: return alt_;
        case Loop::horizontal_speed: return axis == 0 ? vel_x_ : vel_y_;
        case Loop::vertical_speed: return vel_z_;
        case Loop::attitude: return axis == 0 ? roll_ : (axis == 1 ? pitch_ : yaw_);
        }
        return alt_;
    }

private:
    GainVector gains_;
    dynamics::VehicleParams vehicle_;
    ControllerLimits limits_;
    CommandLimits cmd_limits_;
    PidState pos_x_, pos_y_, alt_, vel_x_, vel_y_, vel_z_, roll_, pitch_, yaw_;
    Setpoints last_;
};

inline ControlCommand cascade_step(CascadeController& controller, const dynamics::VehicleState& state,
                                   const Target& target, double dt)
{
    return controller.step(state, target, dt);
}

} // namespace quadtune::control
