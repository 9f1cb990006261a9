#pragma once

#include "quadtune/core/units.hpp"

#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>

namespace quadtune::dynamics {

using Vec3 = std::array<double, 3>;

struct VehicleParams {
    double mass = 5.2;                        // kg
    Vec3 inertia{3.8e-3, 3.8e-3, 7.1e-3};     // kg m^2
    double arm_length = 0.32;                 // m
    double rotor_inertia = 6e-5;              // kg m^2
    Vec3 drag{0.1, 0.1, 0.15};                // linear translational drag, N s/m
    Vec3 rotational_damping{0.1, 0.1, 0.15};  // quadratic, N m s^2
    double rotor_drag = 7.5e-7;               // d
    double gravity = 9.81;                    // m/s^2

    void validate() const
    {
        if (!(mass > 0.0)) throw std::invalid_argument("vehicle: mass must be > 0");
        for (double i : inertia)
            if (!(i > 0.0)) throw std::invalid_argument("vehicle: inertias must be > 0");
        if (!(arm_length > 0.0)) throw std::invalid_argument("vehicle: arm length must be > 0");
    }
};

/// Rigid-body state. Attitude is the z-y-x Euler triple (roll, pitch, yaw);
/// rates are body-frame (p, q, r). Rotor speeds are set by the mixer and held
/// through an integration step.
struct VehicleState {
    Vec3 position{};
    Vec3 velocity{};
    Vec3 attitude{};
    Vec3 rates{};
    std::array<double, 4> rotor_speed{};  // rad/s

    bool finite() const noexcept
    {
        for (const Vec3* v : {&position, &velocity, &attitude, &rates})
            for (double x : *v)
                if (!std::isfinite(x)) return false;
        return true;
    }
};

/// Actuation held constant over one step: total thrust (rotor sum plus the
/// turbulence increment), body moments and the signed rotor-speed sum.
struct BodyInputs {
    double thrust_total = 0.0;  // N
    double roll_moment = 0.0;   // u2, N m
    double pitch_moment = 0.0;  // u3
    double yaw_moment = 0.0;    // u4
    double omega_diff = 0.0;    // omega1 - omega2 + omega3 - omega4, rad/s
};

/// World-frame acceleration from thrust rotated by R(phi, theta, psi), linear
/// drag and gravity.
inline Vec3 translational_accel(const VehicleState& s, double thrust_total, const VehicleParams& p)
{
    const double cphi = std::cos(s.attitude[0]), sphi = std::sin(s.attitude[0]);
    const double cth = std::cos(s.attitude[1]), sth = std::sin(s.attitude[1]);
    const double cpsi = std::cos(s.attitude[2]), spsi = std::sin(s.attitude[2]);
    const double a = thrust_total / p.mass;
    return {
        a * (cpsi * sth * cphi + spsi * sphi) - p.drag[0] / p.mass * s.velocity[0],
        a * (spsi * sth * cphi - cpsi * sphi) - p.drag[1] / p.mass * s.velocity[1],
        a * (cth * cphi) - p.drag[2] / p.mass * s.velocity[2] - p.gravity,
    };
}

inline double signed_square(double x) noexcept { return x * std::abs(x); }

/// Euler rigid-body equations with quadratic damping and rotor gyroscopic coupling.
inline Vec3 rotational_accel(const VehicleState& s, double u2, double u3, double u4, double omega_diff,
                             const VehicleParams& prm)
{
    const auto [ix, iy, iz] = prm.inertia;
    const auto [ca_x, ca_y, ca_z] = prm.rotational_damping;
    const double p = s.rates[0], q = s.rates[1], r = s.rates[2];
    const double jr = prm.rotor_inertia;
    return {
        (u2 - ca_x * signed_square(p) - jr * omega_diff * q - (iz - iy) * q * r) / ix,
        (u3 - ca_y * signed_square(q) + jr * omega_diff * p - (ix - iz) * p * r) / iy,
        (u4 - ca_z * signed_square(r) - (iy - ix) * p * q) / iz,
    };
}

/// Counts evaluations where |theta| was clamped inside the kinematic transform.
struct KinematicsDiagnostics {
    std::size_t gimbal_clamps = 0;
};

inline constexpr double kGimbalLimit = deg_to_rad(89.0);

/// z-y-x Euler angle rates from body rates.
inline Vec3 euler_rates(const Vec3& attitude, const Vec3& rates, KinematicsDiagnostics* diag = nullptr)
{
    double theta = attitude[1];
    if (std::abs(theta) > kGimbalLimit) {
        theta = std::copysign(kGimbalLimit, theta);
        if (diag) ++diag->gimbal_clamps;
    }
    const double cphi = std::cos(attitude[0]), sphi = std::sin(attitude[0]);
    const double cth = std::cos(theta), tth = std::tan(theta);
    const double p = rates[0], q = rates[1], r = rates[2];
    const double qr = q * sphi + r * cphi;
    return {p + qr * tth, q * cphi - r * sphi, qr / cth};
}

/// 12-component rigid-body state used by the integrator.
using StateVector = std::array<double, 12>;

inline StateVector pack(const VehicleState& s) noexcept
{
    StateVector x{};
    for (std::size_t k = 0; k < 3; ++k) {
        x[k] = s.position[k];
        x[3 + k] = s.velocity[k];
        x[6 + k] = s.attitude[k];
        x[9 + k] = s.rates[k];
    }
    return x;
}

inline void unpack(const StateVector& x, VehicleState& s) noexcept
{
    for (std::size_t k = 0; k < 3; ++k) {
        s.position[k] = x[k];
        s.velocity[k] = x[3 + k];
        s.attitude[k] = x[6 + k];
        s.rates[k] = x[9 + k];
    }
}

inline StateVector derivative(const VehicleState& s, const BodyInputs& in, const VehicleParams& p,
                              KinematicsDiagnostics* diag = nullptr)
{
    const Vec3 acc = translational_accel(s, in.thrust_total, p);
    const Vec3 ang = rotational_accel(s, in.roll_moment, in.pitch_moment, in.yaw_moment, in.omega_diff, p);
    const Vec3 eul = euler_rates(s.attitude, s.rates, diag);
    StateVector dx{};
    for (std::size_t k = 0; k < 3; ++k) {
        dx[k] = s.velocity[k];
        dx[3 + k] = acc[k];
        dx[6 + k] = eul[k];
        dx[9 + k] = ang[k];
    }
    return dx;
}

} // namespace quadtune::dynamics
