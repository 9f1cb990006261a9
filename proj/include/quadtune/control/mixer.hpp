#pragma once

#include "quadtune/core/units.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <utility>

namespace quadtune::control {

/// Collective thrust and body moments.
struct ControlCommand {
    double u1 = 0.0;  // N
    double u2 = 0.0;  // roll, N m
    double u3 = 0.0;  // pitch, N m
    double u4 = 0.0;  // yaw, N m
};

struct MixerParams {
    double arm_length = 0.32;    // m
    double k_thrust = 3.2e-4;    // N / (rad/s)^2
    double drag_factor = 7.5e-7; // N m / (rad/s)^2
    double omega_max = rpm_to_rad_s(3000.0);

    void validate() const
    {
        if (!(k_thrust > 0.0)) throw std::invalid_argument("mixer: k_thrust must be > 0");
        if (!(omega_max > 0.0)) throw std::invalid_argument("mixer: omega_max must be > 0");
        if (!(arm_length > 0.0)) throw std::invalid_argument("mixer: arm length must be > 0");
        if (!(drag_factor > 0.0)) throw std::invalid_argument("mixer: drag factor must be > 0");
    }
};

using Mat4 = std::array<std::array<double, 4>, 4>;

/// Thrusts (T1..T4) -> (u1..u4) for the "+" layout.
inline Mat4 forward_matrix(const MixerParams& m)
{
    const double l = m.arm_length;
    const double c = m.drag_factor / m.k_thrust;
    return {{
        {1.0, 1.0, 1.0, 1.0},
        {0.0, -l, 0.0, l},
        {-l, 0.0, l, 0.0},
        {c, -c, c, -c},
    }};
}

/// Gauss-Jordan inverse with partial pivoting.
inline Mat4 invert(Mat4 a)
{
    Mat4 inv{};
    for (std::size_t i = 0; i < 4; ++i) inv[i][i] = 1.0;
    for (std::size_t col = 0; col < 4; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < 4; ++r)
            if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
        if (a[pivot][col] == 0.0) throw std::domain_error("mixer: singular allocation matrix");
        std::swap(a[col], a[pivot]);
        std::swap(inv[col], inv[pivot]);
        const double s = 1.0 / a[col][col];
        for (std::size_t k = 0; k < 4; ++k) {
            a[col][k] *= s;
            inv[col][k] *= s;
        }
        for (std::size_t r = 0; r < 4; ++r) {
            if (r == col) continue;
            const double f = a[r][col];
            if (f == 0.0) continue;
            for (std::size_t k = 0; k < 4; ++k) {
                a[r][k] -= f * a[col][k];
                inv[r][k] -= f * inv[col][k];
            }
        }
    }
    return inv;
}

inline ControlCommand thrusts_to_controls(const std::array<double, 4>& thrust, const MixerParams& m)
{
    const Mat4 a = forward_matrix(m);
    std::array<double, 4> u{};
    for (std::size_t r = 0; r < 4; ++r)
        for (std::size_t k = 0; k < 4; ++k) u[r] += a[r][k] * thrust[k];
    return {u[0], u[1], u[2], u[3]};
}

/// Squared rotor speeds (rad/s)^2 before clipping.
inline std::array<double, 4> mix_squared(const ControlCommand& cmd, const MixerParams& m)
{
    const Mat4 inv = invert(forward_matrix(m));
    const std::array<double, 4> u{cmd.u1, cmd.u2, cmd.u3, cmd.u4};
    std::array<double, 4> w2{};
    for (std::size_t r = 0; r < 4; ++r) {
        double t = 0.0;
        for (std::size_t k = 0; k < 4; ++k) t += inv[r][k] * u[k];
        w2[r] = t / m.k_thrust;
    }
    return w2;
}

/// Rotor speeds in RPM with omega^2 clipped to [0, omega_max^2].
inline std::array<double, 4> mix(const ControlCommand& cmd, const MixerParams& m)
{
    auto w2 = mix_squared(cmd, m);
    std::array<double, 4> rpm{};
    const double cap = m.omega_max * m.omega_max;
    for (std::size_t i = 0; i < 4; ++i) rpm[i] = rad_s_to_rpm(std::sqrt(std::clamp(w2[i], 0.0, cap)));
    return rpm;
}

} // namespace quadtune::control
