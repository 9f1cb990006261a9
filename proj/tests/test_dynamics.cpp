#include "quadtune/dynamics/integrator.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

using namespace quadtune::dynamics;

namespace {

using Scalar = std::array<double, 1>;

double rk4_decay_error(double h, double t_end)
{
    Scalar x{1.0};
    const auto f = [](double, const Scalar& y) { return Scalar{-y[0]}; };
    const int n = static_cast<int>(std::lround(t_end / h));
    for (int k = 0; k < n; ++k) x = rk4(f, k * h, x, h);
    return std::abs(x[0] - std::exp(-t_end));
}

VehicleState level_hover()
{
    VehicleState s;
    s.position = {1.0, -2.0, 10.0};
    return s;
}

} // namespace

TEST(Translational, HoverEquilibrium)
{
    VehicleParams p;
    const auto a = translational_accel(level_hover(), p.mass * p.gravity, p);
    EXPECT_NEAR(a[0], 0.0, 1e-15);
    EXPECT_NEAR(a[1], 0.0, 1e-15);
    EXPECT_NEAR(a[2], 0.0, 1e-14);
}

TEST(Translational, LinearDrag)
{
    VehicleParams p;
    auto s = level_hover();
    s.velocity = {1.0, 0.0, 0.0};
    EXPECT_NEAR(translational_accel(s, p.mass * p.gravity, p)[0], -0.019231, 1e-6);
}

TEST(Translational, PitchedThrust)
{
    VehicleParams p;
    auto s = level_hover();
    s.attitude = {0.0, 0.1, 0.0};
    const auto a = translational_accel(s, p.mass * p.gravity, p);
    EXPECT_NEAR(a[0], p.gravity * std::sin(0.1), 1e-14);
    EXPECT_NEAR(a[1], 0.0, 1e-15);
    EXPECT_NEAR(a[2], p.gravity * (std::cos(0.1) - 1.0), 1e-14);
    EXPECT_NEAR(a[0], 0.97934, 5e-5);
    EXPECT_NEAR(a[2], -0.048997, 5e-5);
}

TEST(Translational, ZyxRotationOfThrustAxis)
{
    VehicleParams p;
    p.drag = {0, 0, 0};
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> ang(-0.5, 0.5);
    for (int k = 0; k < 100; ++k) {
        VehicleState s;
        const double phi = ang(rng), th = ang(rng), psi = 4 * ang(rng);
        s.attitude = {phi, th, psi};
        // Third column of Rz(psi) Ry(theta) Rx(phi).
        const double bx = std::cos(psi) * std::sin(th) * std::cos(phi) + std::sin(psi) * std::sin(phi);
        const double by = std::sin(psi) * std::sin(th) * std::cos(phi) - std::cos(psi) * std::sin(phi);
        const double bz = std::cos(th) * std::cos(phi);
        const auto a = translational_accel(s, 26.0, p);
        EXPECT_NEAR(a[0], 5.0 * bx, 1e-12);
        EXPECT_NEAR(a[1], 5.0 * by, 1e-12);
        EXPECT_NEAR(a[2], 5.0 * bz - p.gravity, 1e-12);
    }
}

TEST(Rotational, ZeroAtEquilibrium)
{
    const auto a = rotational_accel(VehicleState{}, 0, 0, 0, 0, VehicleParams{});
    EXPECT_EQ(a[0], 0.0);
    EXPECT_EQ(a[1], 0.0);
    EXPECT_EQ(a[2], 0.0);
}

TEST(Rotational, GyroscopicCoupling)
{
    VehicleState s;
    s.rates = {0.0, 1.0, 0.0};
    EXPECT_NEAR(rotational_accel(s, 0, 0, 0, 100.0, VehicleParams{})[0], -1.5789, 1e-4);
}

TEST(Rotational, OddSymmetryWithEqualInertias)
{
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    VehicleParams p;
    p.inertia = {4e-3, 4e-3, 4e-3};
    for (int k = 0; k < 100; ++k) {
        VehicleState s, m;
        s.rates = {u(rng), u(rng), u(rng)};
        m.rates = {-s.rates[0], -s.rates[1], -s.rates[2]};
        const double u2 = u(rng), u3 = u(rng), u4 = u(rng), od = 50.0 * u(rng);
        const auto a = rotational_accel(s, u2, u3, u4, od, p);
        const auto b = rotational_accel(m, -u2, -u3, -u4, od, p);
        for (std::size_t i = 0; i < 3; ++i) EXPECT_DOUBLE_EQ(b[i], -a[i]);
    }
}

TEST(Rotational, InertiaCouplingIsTheOnlyEvenPart)
{
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    VehicleParams p;
    const auto [ix, iy, iz] = p.inertia;
    for (int k = 0; k < 100; ++k) {
        VehicleState s, m;
        s.rates = {u(rng), u(rng), u(rng)};
        m.rates = {-s.rates[0], -s.rates[1], -s.rates[2]};
        const double u2 = u(rng), u3 = u(rng), u4 = u(rng), od = 50.0 * u(rng);
        const auto a = rotational_accel(s, u2, u3, u4, od, p);
        const auto b = rotational_accel(m, -u2, -u3, -u4, od, p);
        const double pp = s.rates[0], q = s.rates[1], r = s.rates[2];
        const Vec3 even{-(iz - iy) * q * r / ix, -(ix - iz) * pp * r / iy, -(iy - ix) * pp * q / iz};
        for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(0.5 * (a[i] + b[i]), even[i], 1e-9);
    }
}

TEST(Kinematics, LevelAttitudeMapsRatesDirectly)
{
    const auto e = euler_rates({0.0, 0.0, 0.7}, {0.3, -0.2, 0.1});
    EXPECT_DOUBLE_EQ(e[0], 0.3);
    EXPECT_DOUBLE_EQ(e[1], -0.2);
    EXPECT_DOUBLE_EQ(e[2], 0.1);
}

TEST(Kinematics, GimbalGuardCountsClamps)
{
    KinematicsDiagnostics d;
    const auto e = euler_rates({0.0, 1.6, 0.0}, {0.0, 0.0, 1.0}, &d);
    EXPECT_EQ(d.gimbal_clamps, 1u);
    EXPECT_TRUE(std::isfinite(e[0]) && std::isfinite(e[2]));
}

TEST(Rk4, ZeroDerivativeLeavesStateUnchanged)
{
    VehicleParams p;
    p.gravity = 0.0;
    auto s = level_hover();
    const auto n = rk4_step(s, BodyInputs{}, p, 0.008);
    EXPECT_EQ(n.position, s.position);
    EXPECT_EQ(n.velocity, s.velocity);
    EXPECT_EQ(n.attitude, s.attitude);
    EXPECT_EQ(n.rates, s.rates);
}

TEST(Rk4, SingleStepOnDecayOde)
{
    const auto f = [](double, const Scalar& y) { return Scalar{-y[0]}; };
    const double x = rk4(f, 0.0, Scalar{1.0}, 0.1)[0];
    const double poly = 1 - 0.1 + 0.01 / 2 - 0.001 / 6 + 0.0001 / 24;
    EXPECT_NEAR(x, poly, 1e-15);
    EXPECT_NEAR(x, 0.9048375, 1e-7);
    EXPECT_LT(std::abs(x - std::exp(-0.1)), 1e-6);
}

TEST(Rk4, FourthOrderConvergence)
{
    const double e1 = rk4_decay_error(0.1, 2.0);
    const double e2 = rk4_decay_error(0.05, 2.0);
    const double order = std::log2(e1 / e2);
    EXPECT_GE(order, 3.7);
    EXPECT_LE(order, 4.3);
}

TEST(Rk4, HoverHoldTenSeconds)
{
    VehicleParams p;
    const auto s0 = level_hover();
    auto s = s0;
    BodyInputs in;
    in.thrust_total = p.mass * p.gravity;
    for (std::size_t k = 0; k < 1250; ++k) s = rk4_step(s, in, p, 0.008, k);
    for (std::size_t i = 0; i < 3; ++i) EXPECT_LT(std::abs(s.position[i] - s0.position[i]), 1e-6);
}

TEST(Rk4, FreeFallMatchesClosedForm)
{
    VehicleParams p;
    p.drag = {0, 0, 0};
    auto s = level_hover();
    for (std::size_t k = 0; k < 250; ++k) s = rk4_step(s, BodyInputs{}, p, 0.008, k);
    const double t = 250 * 0.008;
    EXPECT_NEAR(s.position[2], 10.0 - 0.5 * p.gravity * t * t, 1e-6);
}

TEST(Rk4, NonFiniteStateReportsStep)
{
    auto s = level_hover();
    s.velocity[0] = std::numeric_limits<double>::infinity();
    try {
        rk4_step(s, BodyInputs{}, VehicleParams{}, 0.008, 17);
        FAIL() << "expected divergence";
    } catch (const SimulationDiverged& e) {
        EXPECT_EQ(e.step_index, 17u);
    }
    EXPECT_THROW(rk4_step(level_hover(), BodyInputs{}, VehicleParams{}, 0.0), std::domain_error);
}
