#pragma once

#include "quadtune/core/units.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace quadtune::aero {

/// Section lift/drag curves. With an empty table the analytic flat-plate-like
/// polar is used: C_L = slope * alpha clipped to +-cl_max, C_D = cd0 + cd2 * alpha^2.
struct AirfoilPolar {
    double lift_slope = 2.0 * kPi;
    double cl_max = 1.2;
    double cd0 = 0.011;
    double cd2 = 0.8;

    // Optional sampled curves (alpha strictly increasing, rad). Queries outside
    // the sampled range hold the end values.
    std::vector<double> alpha;
    std::vector<double> cl;
    std::vector<double> cd;

    bool tabulated() const noexcept { return !alpha.empty(); }

    void validate() const
    {
        if (!tabulated()) {
            if (!(cl_max > 0.0) || !(cd0 >= 0.0) || !(cd2 >= 0.0))
                throw std::invalid_argument("airfoil polar: invalid analytic coefficients");
            return;
        }
        if (alpha.size() < 2 || cl.size() != alpha.size() || cd.size() != alpha.size())
            throw std::invalid_argument("airfoil polar: table arrays must have equal length >= 2");
        for (std::size_t i = 1; i < alpha.size(); ++i)
            if (!(alpha[i] > alpha[i - 1]))
                throw std::invalid_argument("airfoil polar: alpha must be strictly increasing");
    }

    double lift(double a) const
    {
        if (tabulated()) return interpolate(cl, a);
        return std::clamp(lift_slope * a, -cl_max, cl_max);
    }

    double drag(double a) const
    {
        if (tabulated()) return interpolate(cd, a);
        return cd0 + cd2 * a * a;
    }

private:
    double interpolate(const std::vector<double>& values, double a) const
    {
        if (a <= alpha.front()) return values.front();
        if (a >= alpha.back()) return values.back();
        const auto it = std::upper_bound(alpha.begin(), alpha.end(), a);
        const auto i = static_cast<std::size_t>(it - alpha.begin()) - 1;
        const double t = (a - alpha[i]) / (alpha[i + 1] - alpha[i]);
        return values[i] + t * (values[i + 1] - values[i]);
    }
};

/// Blade geometry sampled at `section_count()` equal-width radial stations
/// between the hub and the tip; chord and twist hold one value per station.
struct RotorGeometry {
    double radius = 0.3;
    double hub_radius = 0.02;
    int blade_count = 2;
    std::vector<double> chord;  // m
    std::vector<double> twist;  // rad, geometric pitch angle of the section
    AirfoilPolar polar;

    std::size_t section_count() const noexcept { return chord.size(); }
    double section_width() const noexcept
    {
        return (radius - hub_radius) / static_cast<double>(section_count());
    }
    double section_radius(std::size_t i) const noexcept
    {
        return hub_radius + (static_cast<double>(i) + 0.5) * section_width();
    }
    double disk_area() const noexcept { return kPi * radius * radius; }

    void validate() const
    {
        if (!(radius > hub_radius) || !(hub_radius >= 0.0))
            throw std::invalid_argument("rotor geometry: require radius > hub_radius >= 0");
        if (blade_count < 1) throw std::invalid_argument("rotor geometry: blade_count must be >= 1");
        if (chord.size() < 2) throw std::invalid_argument("rotor geometry: section_count must be >= 2");
        if (twist.size() != chord.size())
            throw std::invalid_argument("rotor geometry: twist and chord schedules differ in length");
        for (double c : chord)
            if (!(c > 0.0)) throw std::invalid_argument("rotor geometry: chord must be positive at every section");
        for (double t : twist)
            if (!std::isfinite(t)) throw std::invalid_argument("rotor geometry: twist must be finite");
        polar.validate();
    }
};

/// Two-blade, 0.6 m fixed-pitch rotor with 8 stations. Chord tapers linearly
/// from root to tip; twist follows a constant geometric pitch of 0.35 m.
inline RotorGeometry default_rotor_geometry()
{
    RotorGeometry g;
    constexpr std::size_t sections = 8;
    constexpr double pitch = 0.35;
    constexpr double chord_root = 0.045;
    constexpr double chord_tip = 0.025;
    g.chord.resize(sections);
    g.twist.resize(sections);
    for (std::size_t i = 0; i < sections; ++i) {
        const double r = g.section_radius(i);
        const double s = (r - g.hub_radius) / (g.radius - g.hub_radius);
        g.chord[i] = chord_root + s * (chord_tip - chord_root);
        g.twist[i] = std::atan(pitch / (2.0 * kPi * r));
    }
    return g;
}

/// Loads of one rotor at one operating point. Coefficients use
/// C_T = T/(rho A (Omega R)^2), C_Q = tau/(rho A (Omega R)^2 R), C_P = P/(rho A (Omega R)^3)
/// with Omega in rad/s; all three are zero at Omega = 0.
struct RotorPerformance {
    double thrust = 0.0;  // N
    double torque = 0.0;  // N m
    double power = 0.0;   // W
    double ct = 0.0;
    double cq = 0.0;
    double cp = 0.0;
};

struct SolverOptions {
    double relaxation = 0.3;
    int max_iterations = 500;
    double tolerance = 1e-10;
};

/// Outcome of bemt_solve. When `converged` is false the performance holds the
/// last iterate and `residual` the last relative momentum/blade mismatch.
struct BemtSolution {
    RotorPerformance performance;
    double induced_velocity = 0.0;  // m/s
    double residual = 0.0;
    int iterations = 0;
    bool converged = true;
};

namespace detail {

struct BladeLoads {
    double thrust = 0.0;
    double torque = 0.0;
};

// Stations whose net axial force would be negative (windmill/brake state)
// contribute no thrust; the rotor is modeled as a non-reversing thrust source.
inline BladeLoads blade_element_loads(const RotorGeometry& g, double omega, double axial_velocity,
                                      double rho)
{
    BladeLoads loads;
    const double dr = g.section_width();
    const double blades = static_cast<double>(g.blade_count);
    for (std::size_t i = 0; i < g.section_count(); ++i) {
        const double r = g.section_radius(i);
        const double ut = omega * r;
        const double up = axial_velocity;
        const double phi = std::atan2(up, ut);
        const double alpha = g.twist[i] - phi;
        const double u2 = ut * ut + up * up;
        const double q = 0.5 * rho * u2 * g.chord[i] * dr * blades;
        const double cl = g.polar.lift(alpha);
        const double cd = g.polar.drag(alpha);
        const double cphi = std::cos(phi);
        const double sphi = std::sin(phi);
        loads.thrust += std::max(0.0, q * (cl * cphi - cd * sphi));
        loads.torque += q * (cl * sphi + cd * cphi) * r;
    }
    return loads;
}

inline double momentum_thrust(double induced, double v_inf, double rho, double area)
{
    return 2.0 * rho * area * induced * (v_inf + induced);
}

// Inverse of momentum_thrust for T >= 0.
inline double momentum_induced_velocity(double thrust, double v_inf, double rho, double area)
{
    const double disc = v_inf * v_inf + 2.0 * std::max(thrust, 0.0) / (rho * area);
    return 0.5 * (-v_inf + std::sqrt(disc));
}

inline double relative_mismatch(double blade, double momentum)
{
    const double scale = std::max({std::abs(blade), std::abs(momentum), 1e-12});
    return std::abs(blade - momentum) / scale;
}

inline RotorPerformance with_coefficients(const RotorGeometry& g, double omega, double rho,
                                          double thrust, double torque)
{
    RotorPerformance p;
    p.thrust = thrust;
    p.torque = torque;
    p.power = torque * omega;
    if (omega > 0.0) {
        const double tip = omega * g.radius;
        const double base = rho * g.disk_area() * tip * tip;
        p.ct = thrust / base;
        p.cq = torque / (base * g.radius);
        p.cp = p.power / (base * tip);
    }
    return p;
}

} // namespace detail

/// Blade element momentum solution with a uniform induced velocity, iterated
/// by relaxed fixed point until the integrated blade thrust equals the
/// momentum thrust 2 rho A v (V + v).
inline BemtSolution bemt_solve(const RotorGeometry& geom, double omega_rpm, double v_inf, double rho,
                               const SolverOptions& options = {})
{
    geom.validate();
    if (!(omega_rpm >= 0.0)) throw std::domain_error("bemt_solve: omega must be >= 0");
    if (!(v_inf >= 0.0)) throw std::domain_error("bemt_solve: v_inf must be >= 0");
    if (!(rho > 0.0)) throw std::domain_error("bemt_solve: rho must be > 0");

    BemtSolution sol;
    if (omega_rpm == 0.0) return sol;

    const double omega = rpm_to_rad_s(omega_rpm);
    const double area = geom.disk_area();
    double induced = 0.0;
    detail::BladeLoads loads;

    for (int it = 1; it <= options.max_iterations; ++it) {
        loads = detail::blade_element_loads(geom, omega, v_inf + induced, rho);
        const double t_mom = detail::momentum_thrust(induced, v_inf, rho, area);
        sol.residual = detail::relative_mismatch(loads.thrust, t_mom);
        sol.iterations = it;
        if (sol.residual <= options.tolerance) break;
        const double target = detail::momentum_induced_velocity(loads.thrust, v_inf, rho, area);
        induced += options.relaxation * (target - induced);
    }

    sol.converged = sol.residual <= options.tolerance;
    sol.induced_velocity = induced;
    sol.performance = detail::with_coefficients(geom, omega, rho, loads.thrust, loads.torque);
    return sol;
}

} // namespace quadtune::aero
