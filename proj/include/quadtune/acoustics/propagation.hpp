#pragma once

#include "quadtune/acoustics/spectrum.hpp"
#include "quadtune/core/units.hpp"

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace quadtune::acoustics {

struct AtmosphereConditions {
    double temperature = 293.15;      // K
    double reference_temperature = 293.15;
    double relative_pressure = 1.0;   // p / 101.325 kPa
    double relative_humidity = 0.7;   // 0..1
    double ambient_pressure = 101.325;  // kPa

    void validate() const
    {
        if (!(temperature > 0.0)) throw std::invalid_argument("atmosphere: temperature must be > 0 K");
        if (!(relative_humidity >= 0.0 && relative_humidity <= 1.0))
            throw std::invalid_argument("atmosphere: relative humidity must lie in [0, 1]");
        if (!(relative_pressure > 0.0)) throw std::invalid_argument("atmosphere: relative pressure must be > 0");
        if (!(ambient_pressure > 0.0)) throw std::invalid_argument("atmosphere: ambient pressure must be > 0");
    }
};

/// 10 log10(4 pi d^2), dB.
inline double spherical_spreading(double d)
{
    if (!(d > 0.0)) throw std::domain_error("spherical_spreading: distance must be > 0");
    return 10.0 * std::log10(4.0 * kPi * d * d);
}

/// Saturation vapour pressure over water (Magnus form), kPa.
inline double saturation_pressure(double temperature_k)
{
    const double tc = temperature_k - 273.15;
    return 0.61094 * std::exp(17.625 * tc / (tc + 243.04));
}

/// Molar concentration of water vapour in percent.
inline double molar_humidity(const AtmosphereConditions& c)
{
    return 100.0 * c.relative_humidity * saturation_pressure(c.temperature) / c.ambient_pressure;
}

/// Pure-tone atmospheric absorption coefficient (dB/m), ISO 9613-1.
inline double absorption_coeff(double f, const AtmosphereConditions& c)
{
    if (!(f > 0.0)) throw std::domain_error("absorption_coeff: frequency must be > 0");
    const double tr = c.temperature / c.reference_temperature;
    const double pr = c.relative_pressure;
    const double h = molar_humidity(c);
    const double fr_o = pr * (24.0 + 4.04e4 * h * (0.02 + h) / (0.391 + h));
    const double fr_n = pr * std::pow(tr, -0.5) * (9.0 + 280.0 * h * std::exp(-4.170 * (std::pow(tr, -1.0 / 3.0) - 1.0)));
    const double f2 = f * f;
    const double classical = 1.84e-11 / pr * std::sqrt(tr);
    const double oxygen = 0.01275 * std::exp(-2239.1 / c.temperature) / (fr_o + f2 / fr_o);
    const double nitrogen = 0.1068 * std::exp(-3352.0 / c.temperature) / (fr_n + f2 / fr_n);
    return 8.686 * f2 * (classical + std::pow(tr, -2.5) * (oxygen + nitrogen));
}

inline std::vector<double> absorption_table(std::span<const double> centers, const AtmosphereConditions& c)
{
    std::vector<double> a(centers.size());
    for (std::size_t i = 0; i < centers.size(); ++i) a[i] = absorption_coeff(centers[i], c);
    return a;
}

/// L_p = L_w - A_sp(d) - alpha(f) d + DI per band.
inline ThirdOctaveSpectrum received_spl(const ThirdOctaveSpectrum& lw, double d, std::span<const double> alpha,
                                        std::span<const double> di)
{
    if (alpha.size() != lw.size() || di.size() != lw.size())
        throw std::invalid_argument("received_spl: band counts differ");
    const double spread = spherical_spreading(d);
    ThirdOctaveSpectrum out{lw.centers, std::vector<double>(lw.size())};
    for (std::size_t i = 0; i < lw.size(); ++i) out.levels[i] = lw.levels[i] - spread - alpha[i] * d + di[i];
    return out;
}

/// Convenience overload computing alpha from the atmosphere.
inline ThirdOctaveSpectrum received_spl(const ThirdOctaveSpectrum& lw, double d, const AtmosphereConditions& c,
                                        std::span<const double> di)
{
    const auto alpha = absorption_table(lw.centers, c);
    return received_spl(lw, d, alpha, di);
}

} // namespace quadtune::acoustics
