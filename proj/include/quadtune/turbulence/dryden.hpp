#pragma once

#include "quadtune/core/random.hpp"
#include "quadtune/core/units.hpp"

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace quadtune::turbulence {

enum class Axis { u, v, w };

struct DrydenParams {
    double sigma_u = 1.06;  // m/s
    double sigma_v = 1.06;
    double sigma_w = 0.7;
    double length_u = 200.0;  // m
    double length_v = 200.0;
    double length_w = 50.0;
    double airspeed = 10.0;  // m/s, frozen-turbulence convection speed
    std::uint64_t seed = 0;

    void validate() const
    {
        if (!(sigma_u >= 0.0) || !(sigma_v >= 0.0) || !(sigma_w >= 0.0))
            throw std::invalid_argument("dryden: turbulence intensities must be >= 0");
        if (!(length_u > 0.0) || !(length_v > 0.0) || !(length_w > 0.0))
            throw std::invalid_argument("dryden: scale lengths must be > 0");
        if (!(airspeed > 0.0)) throw std::invalid_argument("dryden: airspeed must be > 0");
    }

    double sigma(Axis a) const noexcept
    {
        return a == Axis::u ? sigma_u : (a == Axis::v ? sigma_v : sigma_w);
    }
    double length(Axis a) const noexcept
    {
        return a == Axis::u ? length_u : (a == Axis::v ? length_v : length_w);
    }
};

/// Inertial-frame turbulent velocity (m/s).
struct GustSample {
    double u = 0.0;
    double v = 0.0;
    double w = 0.0;
};

namespace detail {

// The lateral and vertical spectra share the form
//   sigma^2 (L/pi) (1 + k (L Omega)^2) / (1 + (L Omega)^2)^2
// with k = 5 (v) and k = 4 (w).
constexpr double shaped_zero_weight(Axis a) noexcept { return a == Axis::v ? 5.0 : 4.0; }

} // namespace detail

/// One-sided spatial power spectral density, (m/s)^2 per rad/m.
inline double dryden_psd(Axis axis, double omega_sp, const DrydenParams& params)
{
    if (!(omega_sp >= 0.0)) throw std::domain_error("dryden_psd: spatial frequency must be >= 0");
    const double s2 = params.sigma(axis) * params.sigma(axis);
    const double L = params.length(axis);
    const double x2 = (L * omega_sp) * (L * omega_sp);
    switch (axis) {
    case Axis::u:
        return s2 * (2.0 * L / kPi) / (1.0 + x2);
    case Axis::v:
        return s2 * (L / kPi) / (1.0 + x2) * (1.0 + 4.0 * x2 / (1.0 + x2));
    case Axis::w:
        return s2 * (L / kPi) / (1.0 + x2) * (1.0 + 3.0 * x2 / (1.0 + x2));
    }
    return 0.0;
}

/// Integral of dryden_psd over [0, inf): the stationary variance of the component.
inline double dryden_variance(Axis axis, const DrydenParams& params)
{
    const double s2 = params.sigma(axis) * params.sigma(axis);
    if (axis == Axis::u) return s2;
    return s2 * (1.0 + detail::shaped_zero_weight(axis)) / 4.0;
}

/// Second-order IIR section y_k = b0 x_k + b1 x_{k-1} + b2 x_{k-2} - a1 y_{k-1} - a2 y_{k-2}.
class ShapingFilter {
public:
    ShapingFilter() = default;

    /// Bilinear-transform realization of the shaping filter for one axis with
    /// time constant tau = L / V, scaled so the output variance under unit
    /// white-noise input equals `target_variance`.
    ShapingFilter(Axis axis, double tau, double dt, double target_variance)
    {
        const double c = 2.0 * tau / dt;
        if (axis == Axis::u) {
            // K / (1 + tau s)
            const double d0 = 1.0 + c;
            b_ = {1.0 / d0, 1.0 / d0, 0.0};
            a_ = {(1.0 - c) / d0, 0.0};
        } else {
            // K (1 + sqrt(k) tau s) / (1 + tau s)^2
            const double bc = std::sqrt(detail::shaped_zero_weight(axis)) * c;
            const double n1 = 1.0 + bc, n0 = 1.0 - bc;  // (n1 z + n0)
            const double m1 = 1.0 + c, m0 = 1.0 - c;    // (m1 z + m0)^2
            const double d0 = m1 * m1;
            // numerator (z + 1)(n1 z + n0) = n1 z^2 + (n1 + n0) z + n0
            b_ = {n1 / d0, (n1 + n0) / d0, n0 / d0};
            a_ = {2.0 * m1 * m0 / d0, m0 * m0 / d0};
        }
        const double unit = unit_variance();
        const double gain = unit > 0.0 ? std::sqrt(target_variance / unit) : 0.0;
        for (double& b : b_) b *= gain;
    }

    double step(double x) noexcept
    {
        const double y = b_[0] * x + b_[1] * x1_ + b_[2] * x2_ - a_[0] * y1_ - a_[1] * y2_;
        x2_ = x1_;
        x1_ = x;
        y2_ = y1_;
        y1_ = y;
        return y;
    }

    void reset() noexcept { x1_ = x2_ = y1_ = y2_ = 0.0; }

private:
    // Sum of the squared impulse response of the current coefficients.
    double unit_variance() const
    {
        ShapingFilter probe = *this;
        probe.reset();
        double sum = 0.0;
        double h = probe.step(1.0);
        sum += h * h;
        std::size_t quiet = 0;
        for (std::size_t k = 1; k < 50'000'000 && quiet < 64; ++k) {
            h = probe.step(0.0);
            const double e = h * h;
            sum += e;
            quiet = (e <= 1e-18 * sum) ? quiet + 1 : 0;
        }
        return sum;
    }

    std::array<double, 3> b_{};
    std::array<double, 2> a_{};
    double x1_ = 0.0, x2_ = 0.0, y1_ = 0.0, y2_ = 0.0;
};

/// Seeded Dryden gust stream. Filters are driven by unit white noise; the
/// spatial spectra are mapped to time with omega_t = Omega_sp * V.
class DrydenGenerator {
public:
    DrydenGenerator(const DrydenParams& params, double dt) : DrydenGenerator(params, dt, params.seed) {}

    DrydenGenerator(const DrydenParams& params, double dt, std::uint64_t seed)
        : rng_(derive_seed(seed, "dryden"))
    {
        params.validate();
        if (!(dt > 0.0)) throw std::domain_error("dryden: dt must be > 0");
        const Axis axes[3] = {Axis::u, Axis::v, Axis::w};
        for (std::size_t k = 0; k < 3; ++k) {
            const double tau = params.length(axes[k]) / params.airspeed;
            filters_[k] = ShapingFilter(axes[k], tau, dt, dryden_variance(axes[k], params));
        }
    }

    GustSample next()
    {
        GustSample g;
        g.u = filters_[0].step(standard_normal(rng_));
        g.v = filters_[1].step(standard_normal(rng_));
        g.w = filters_[2].step(standard_normal(rng_));
        return g;
    }

private:
    Rng rng_;
    std::array<ShapingFilter, 3> filters_;
};

inline std::vector<GustSample> generate_gusts(const DrydenParams& params, double dt, std::size_t n)
{
    if (n < 1) throw std::domain_error("generate_gusts: n must be >= 1");
    DrydenGenerator gen(params, dt);
    std::vector<GustSample> out;
    out.reserve(n);
    for (std::size_t k = 0; k < n; ++k) out.push_back(gen.next());
    return out;
}

/// Thrust increment of one rotor from the gust, integrated over the annulus
/// [inner_radius, outer_radius]:
///   rho/2 [2 pi^2 w omega (R2^2 - R1^2) + (2 pi^2 w / omega)(u^2 + v^2) ln(R2/R1)]
inline double thrust_increment(const GustSample& gust, double omega, double inner_radius,
                               double outer_radius, double rho)
{
    if (!(omega > 0.0)) throw std::domain_error("thrust_increment: omega must be > 0");
    if (!(inner_radius > 0.0) || !(outer_radius > inner_radius))
        throw std::domain_error("thrust_increment: require outer_radius > inner_radius > 0");
    const double k = 2.0 * kPi * kPi * gust.w;
    const double annulus = outer_radius * outer_radius - inner_radius * inner_radius;
    const double in_plane = gust.u * gust.u + gust.v * gust.v;
    return 0.5 * rho * (k * omega * annulus + (k / omega) * in_plane * std::log(outer_radius / inner_radius));
}

} // namespace quadtune::turbulence
