#include "quadtune/aero/bemt.hpp"
#include "quadtune/aero/surrogate.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

using namespace quadtune;
using namespace quadtune::aero;

namespace {

constexpr double kRho = 1.225;

/// Clean-room blade-element thrust at a given total axial velocity.
double oracle_blade_thrust(const RotorGeometry& g, double omega_rad, double axial)
{
    const double dr = (g.radius - g.hub_radius) / static_cast<double>(g.chord.size());
    double t = 0.0;
    for (std::size_t i = 0; i < g.chord.size(); ++i) {
        const double r = g.hub_radius + (static_cast<double>(i) + 0.5) * dr;
        const double ut = omega_rad * r;
        const double phi = std::atan2(axial, ut);
        const double a = g.twist[i] - phi;
        const double cl = std::clamp(2.0 * std::numbers::pi * a, -1.2, 1.2);
        const double cd = 0.011 + 0.8 * a * a;
        const double q = 0.5 * kRho * (ut * ut + axial * axial) * g.chord[i] * dr * g.blade_count;
        t += std::max(0.0, q * (cl * std::cos(phi) - cd * std::sin(phi)));
    }
    return t;
}

double oracle_momentum_thrust(const RotorGeometry& g, double v_inf, double vi)
{
    return 2.0 * kRho * std::numbers::pi * g.radius * g.radius * vi * (v_inf + vi);
}

double thrust(double rpm, double v = 0.0)
{
    return bemt_solve(default_rotor_geometry(), rpm, v, kRho).performance.thrust;
}

} // namespace

TEST(Bemt, ZeroRotationGivesZeroLoads)
{
    const auto s = bemt_solve(default_rotor_geometry(), 0.0, 0.0, kRho);
    EXPECT_EQ(s.performance.thrust, 0.0);
    EXPECT_EQ(s.performance.torque, 0.0);
    EXPECT_EQ(s.performance.power, 0.0);
}

TEST(Bemt, HoverSpeedByBisection)
{
    const double target = 5.2 * 9.81 / 4.0;
    double lo = 100.0, hi = 4000.0;
    for (int i = 0; i < 80; ++i) {
        const double mid = 0.5 * (lo + hi);
        (thrust(mid) < target ? lo : hi) = mid;
    }
    const double hover = 0.5 * (lo + hi);
    EXPECT_NEAR(thrust(hover), 12.753, 1e-3);
    EXPECT_GT(hover, 1000.0);
    EXPECT_LT(hover, 3000.0);
}

TEST(Bemt, ThrustDecreasesWithAxialClimbSpeed)
{
    double prev = thrust(4000.0, 1.0);
    for (double v = 2.0; v <= 20.0; v += 1.0) {
        const double t = thrust(4000.0, v);
        EXPECT_LT(t, prev) << "v = " << v;
        prev = t;
    }
}

TEST(Bemt, ThrustNonDecreasingInOmega)
{
    for (double v : {0.0, 5.0, 10.0, 20.0}) {
        double prev = 0.0;
        for (double rpm = 0.0; rpm <= 4000.0; rpm += 100.0) {
            const double t = thrust(rpm, v);
            EXPECT_GE(t, prev) << rpm << " rpm, " << v << " m/s";
            prev = t;
        }
    }
}

TEST(Bemt, ConvergedSolutionSatisfiesIndependentMomentumBalance)
{
    const auto g = default_rotor_geometry();
    for (double rpm : {500.0, 1500.0, 2500.0, 3500.0})
        for (double v : {0.0, 2.0, 8.0, 15.0}) {
            const auto s = bemt_solve(g, rpm, v, kRho);
            ASSERT_TRUE(s.converged);
            const double blade = oracle_blade_thrust(g, rpm_to_rad_s(rpm), v + s.induced_velocity);
            const double mom = oracle_momentum_thrust(g, v, s.induced_velocity);
            EXPECT_NEAR(s.performance.thrust, blade, 1e-9 * std::max(1.0, blade));
            if (blade > 1e-9) {
                EXPECT_LE(std::abs(blade - mom) / blade, 1e-6);
            }
        }
}

TEST(Bemt, PowerEqualsTorqueTimesOmega)
{
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> w(1.0, 4000.0), v(0.0, 20.0);
    for (int k = 0; k < 200; ++k) {
        const double rpm = w(rng);
        const auto p = bemt_solve(default_rotor_geometry(), rpm, v(rng), kRho).performance;
        EXPECT_NEAR(p.power, p.torque * rpm_to_rad_s(rpm), 1e-9 * std::abs(p.power) + 1e-15);
    }
}

TEST(Bemt, CoefficientsFollowDocumentedNormalization)
{
    const auto g = default_rotor_geometry();
    const auto p = bemt_solve(g, 2000.0, 3.0, kRho).performance;
    const double w = rpm_to_rad_s(2000.0);
    const double base = kRho * std::numbers::pi * 0.09 * std::pow(w * 0.3, 2);
    EXPECT_NEAR(p.ct, p.thrust / base, 1e-15);
    EXPECT_NEAR(p.cq, p.torque / (base * 0.3), 1e-15);
    EXPECT_NEAR(p.cp, p.power / (base * w * 0.3), 1e-15);
}

TEST(Bemt, NonConvergenceIsReportedWithResidual)
{
    SolverOptions o;
    o.max_iterations = 2;
    const auto s = bemt_solve(default_rotor_geometry(), 2000.0, 0.0, kRho, o);
    EXPECT_FALSE(s.converged);
    EXPECT_GT(s.residual, o.tolerance);
    EXPECT_EQ(s.iterations, 2);
}

TEST(Bemt, RejectsInvalidInputs)
{
    auto g = default_rotor_geometry();
    EXPECT_THROW(bemt_solve(g, -1.0, 0.0, kRho), std::domain_error);
    EXPECT_THROW(bemt_solve(g, 100.0, -1.0, kRho), std::domain_error);
    EXPECT_THROW(bemt_solve(g, 100.0, 0.0, 0.0), std::domain_error);
    g.chord[3] = 0.0;
    EXPECT_THROW(bemt_solve(g, 100.0, 0.0, kRho), std::invalid_argument);
    g = default_rotor_geometry();
    g.hub_radius = 0.4;
    EXPECT_THROW(g.validate(), std::invalid_argument);
}

TEST(Surrogate, SingleCellAtZeroSpeed)
{
    const std::vector<double> w{0.0}, v{1.0};
    const auto t = build_surrogate(default_rotor_geometry(), w, v, kRho);
    ASSERT_EQ(t.values[0].size(), 1u);
    EXPECT_EQ(surrogate_eval(t, 0.0, 1.0).thrust, 0.0);
}

TEST(Surrogate, FullGridHas8000CellsAndMatchesSolverAtNodes)
{
    const auto g = default_rotor_geometry();
    const auto w = linspace(0.0, 4000.0, 100), v = linspace(1.0, 20.0, 80);
    const auto t = build_surrogate(g, w, v, kRho, default_workers());
    EXPECT_EQ(t.rows() * t.cols(), 8000u);
    for (std::size_t i = 0; i < 100; i += 7)
        for (std::size_t j = 0; j < 80; j += 9) {
            const auto s = bemt_solve(g, w[i], v[j], kRho).performance;
            const auto e = surrogate_eval(t, w[i], v[j]);
            EXPECT_EQ(e.thrust, s.thrust);
            EXPECT_EQ(e.torque, s.torque);
            EXPECT_EQ(e.power, s.power);
            EXPECT_EQ(e.ct, s.ct);
        }
}

TEST(Surrogate, MidpointIsMeanOfFourNodes)
{
    const std::vector<double> w{1000.0, 2000.0}, v{2.0, 6.0};
    const auto t = build_surrogate(default_rotor_geometry(), w, v, kRho);
    const double mean = 0.25 * (t.values[0][0] + t.values[0][1] + t.values[0][2] + t.values[0][3]);
    EXPECT_NEAR(surrogate_eval(t, 1500.0, 4.0).thrust, mean, 1e-12 * mean);
}

TEST(Surrogate, OutOfBoxQueriesClampAndCount)
{
    const std::vector<double> w{1000.0, 2000.0}, v{2.0, 6.0};
    const auto t = build_surrogate(default_rotor_geometry(), w, v, kRho);
    SurrogateStats stats;
    const auto inside = surrogate_eval(t, 2000.0, 6.0, &stats);
    const auto outside = surrogate_eval(t, 5000.0, 30.0, &stats);
    EXPECT_EQ(outside.thrust, inside.thrust);
    EXPECT_EQ(stats.queries.load(), 2u);
    EXPECT_EQ(stats.clamped.load(), 1u);
}

TEST(Surrogate, ContinuousAcrossCellBoundary)
{
    const auto t = build_surrogate(default_rotor_geometry(), linspace(0.0, 4000.0, 21), linspace(0.0, 20.0, 11), kRho);
    const double node = 2000.0;
    const double left = surrogate_eval(t, node - 1e-7, 5.0).thrust;
    const double right = surrogate_eval(t, node + 1e-7, 5.0).thrust;
    EXPECT_NEAR(left, right, 1e-6);
}

TEST(Surrogate, RejectsNonIncreasingGrid)
{
    const std::vector<double> w{1000.0, 1000.0}, v{1.0};
    EXPECT_THROW(build_surrogate(default_rotor_geometry(), w, v, kRho), std::invalid_argument);
}
