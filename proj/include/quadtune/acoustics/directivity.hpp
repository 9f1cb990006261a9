#pragma once

#include "quadtune/core/units.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace quadtune::acoustics {

/// Axisymmetric intensity pattern I(f, theta) sampled on a polar-angle grid
/// covering [0, pi]. Between samples the pattern is linear in theta; a repeated
/// angle encodes a step. One row applies to all bands; otherwise one row per band.
struct DirectivityPattern {
    std::vector<double> theta;                   // rad, non-decreasing, 0 .. pi
    std::vector<std::vector<double>> intensity;  // rows x theta.size()

    bool empty() const noexcept { return theta.empty(); }

    void validate(std::size_t band_count) const
    {
        if (empty()) return;
        if (theta.size() < 2 || theta.front() != 0.0 || std::abs(theta.back() - kPi) > 1e-12)
            throw std::invalid_argument("directivity: angle grid must span [0, pi]");
        for (std::size_t i = 1; i < theta.size(); ++i)
            if (theta[i] < theta[i - 1]) throw std::invalid_argument("directivity: angles must be non-decreasing");
        if (intensity.size() != 1 && intensity.size() != band_count)
            throw std::invalid_argument("directivity: need one intensity row or one per band");
        for (const auto& row : intensity) {
            if (row.size() != theta.size()) throw std::invalid_argument("directivity: row length mismatch");
            for (double v : row)
                if (!(v > 0.0)) throw std::domain_error("directivity: intensity must be positive");
        }
    }

    const std::vector<double>& row(std::size_t band) const
    {
        return intensity.size() == 1 ? intensity.front() : intensity.at(band);
    }

    double value(std::size_t band, double angle) const
    {
        const auto& r = row(band);
        const double a = std::clamp(angle, 0.0, kPi);
        const auto it = std::upper_bound(theta.begin(), theta.end(), a);
        if (it == theta.end()) return r.back();
        const auto hi = static_cast<std::size_t>(it - theta.begin());
        const std::size_t lo = hi - 1;
        const double span = theta[hi] - theta[lo];
        if (span <= 0.0) return r[hi];
        const double t = (a - theta[lo]) / span;
        return r[lo] + t * (r[hi] - r[lo]);
    }

    /// (1/4pi) integral over the sphere of I sin(theta), exact for the
    /// piecewise-linear interpolant.
    double spherical_mean(std::size_t band) const
    {
        const auto& r = row(band);
        double integral = 0.0;
        for (std::size_t k = 0; k + 1 < theta.size(); ++k) {
            const double a = theta[k], b = theta[k + 1];
            if (b <= a) continue;
            const double s = (r[k + 1] - r[k]) / (b - a);
            // integral of (r_k + s (x - a)) sin x over [a, b]
            integral += r[k] * (std::cos(a) - std::cos(b)) + s * (std::sin(b) - std::sin(a) - (b - a) * std::cos(b));
        }
        return 0.5 * integral;
    }
};

/// Downward-biased default: I = 1 + 0.5 cos^2(theta) + 0.3 cos(theta), theta from the rotor axis (downwards).
inline DirectivityPattern default_directivity(std::size_t samples = 37)
{
    DirectivityPattern p;
    p.intensity.emplace_back();
    for (std::size_t k = 0; k < samples; ++k) {
        const double t = kPi * static_cast<double>(k) / static_cast<double>(samples - 1);
        p.theta.push_back(t);
        p.intensity[0].push_back(1.0 + 0.5 * std::cos(t) * std::cos(t) + 0.3 * std::cos(t));
    }
    p.theta.back() = kPi;
    return p;
}

/// 10 log10(I(f, theta) / mean I(f)); 0 for an empty pattern.
inline double directivity_index(std::size_t band, double theta, const DirectivityPattern& pattern)
{
    if (pattern.empty()) return 0.0;
    const double i = pattern.value(band, theta);
    if (!(i > 0.0)) throw std::domain_error("directivity_index: non-positive intensity");
    return 10.0 * std::log10(i / pattern.spherical_mean(band));
}

} // namespace quadtune::acoustics
