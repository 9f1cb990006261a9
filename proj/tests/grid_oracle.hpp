#pragma once

#include "quadtune/acoustics/emission.hpp"
#include "quadtune/acoustics/grid.hpp"
#include "quadtune/acoustics/propagation.hpp"

#include <cmath>
#include <vector>

namespace oracle {

using namespace quadtune::acoustics;

/// Brute-force received broadband level at a receiver: per-rotor emission with
/// directivity, power sum, spreading and absorption.
inline double exhaustive_cell(const EmissionModel& m, const SourceSample& s, const Point3& c, const AtmosphereConditions& a)
{
    const double zeta = radiation_angle(s, c);
    std::vector<double> energy(m.centers.size(), 0.0);
    for (double w : s.rpm) {
        const auto spec = emit_spectrum(m, w, zeta);
        for (std::size_t b = 0; b < energy.size(); ++b) energy[b] += std::pow(10.0, spec.levels[b] / 10.0);
    }
    ThirdOctaveSpectrum src{m.centers, {}};
    for (double e : energy) src.levels.push_back(10.0 * std::log10(e));
    const double d = std::hypot(c[0] - s.position[0], c[1] - s.position[1], c[2] - s.position[2]);
    const std::vector<double> zero(src.size(), 0.0);
    return broadband(received_spl(src, d, a, zero));
}

inline SourceSample hovering_source()
{
    SourceSample s;
    s.position = {1.3, -0.7, 10.0};
    s.attitude = {0.05, -0.08, 0.3};
    s.rpm = {1900.0, 1950.0, 1880.0, 2010.0};
    return s;
}

} // namespace oracle
