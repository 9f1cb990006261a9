#pragma once

#include "quadtune/dynamics/rigid_body.hpp"

#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>

namespace quadtune::dynamics {

/// Classical fourth-order Runge-Kutta step for x' = f(t, x) on a fixed-size state.
template <std::size_t N, class F>
std::array<double, N> rk4(F&& f, double t, const std::array<double, N>& x, double h)
{
    auto axpy = [](const std::array<double, N>& a, double s, const std::array<double, N>& b) {
        std::array<double, N> out;
        for (std::size_t i = 0; i < N; ++i) out[i] = a[i] + s * b[i];
        return out;
    };
    const std::array<double, N> k1 = f(t, x);
    const std::array<double, N> k2 = f(t + 0.5 * h, axpy(x, 0.5 * h, k1));
    const std::array<double, N> k3 = f(t + 0.5 * h, axpy(x, 0.5 * h, k2));
    const std::array<double, N> k4 = f(t + h, axpy(x, h, k3));
    std::array<double, N> out;
    for (std::size_t i = 0; i < N; ++i) out[i] = x[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    return out;
}

class SimulationDiverged : public std::runtime_error {
public:
    explicit SimulationDiverged(std::size_t step)
        : std::runtime_error("simulation diverged: non-finite state at step " + std::to_string(step)),
          step_index(step)
    {
    }
    std::size_t step_index;
};

/// Advances the rigid body by h with inputs held over all four stages.
/// Rotor speeds are carried through unchanged.
inline VehicleState rk4_step(const VehicleState& s, const BodyInputs& in, const VehicleParams& p, double h,
                             std::size_t step_index = 0, KinematicsDiagnostics* diag = nullptr)
{
    if (!(h > 0.0)) throw std::domain_error("rk4_step: h must be > 0");
    VehicleState scratch = s;
    auto f = [&](double, const StateVector& x) {
        unpack(x, scratch);
        return derivative(scratch, in, p, diag);
    };
    VehicleState next = s;
    unpack(rk4(f, 0.0, pack(s), h), next);
    if (!next.finite()) throw SimulationDiverged(step_index);
    return next;
}

} // namespace quadtune::dynamics
