#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

namespace quadtune::acoustics {

/// Exact base-10 third-octave centers 1000 * 10^(k/10) for k in [k_lo, k_hi].
inline std::vector<double> third_octave_centers(int k_lo = -17, int k_hi = 13)
{
    if (k_hi < k_lo) throw std::invalid_argument("third_octave_centers: empty band range");
    std::vector<double> f;
    for (int k = k_lo; k <= k_hi; ++k) f.push_back(1000.0 * std::pow(10.0, k / 10.0));
    return f;
}

/// Per-band levels in dB over a fixed set of band centers (Hz).
struct ThirdOctaveSpectrum {
    std::vector<double> centers;
    std::vector<double> levels;

    std::size_t size() const noexcept { return levels.size(); }

    void validate() const
    {
        if (centers.size() != levels.size())
            throw std::invalid_argument("spectrum: centers and levels differ in length");
        for (std::size_t i = 1; i < centers.size(); ++i)
            if (!(centers[i] > centers[i - 1]))
                throw std::invalid_argument("spectrum: band centers must be strictly increasing");
    }
};

/// 10 log10(sum 10^(L_i/10)); -inf for an empty set.
inline double broadband(std::span<const double> levels)
{
    if (levels.empty()) return -std::numeric_limits<double>::infinity();
    const double peak = *std::max_element(levels.begin(), levels.end());
    if (!std::isfinite(peak)) return peak;
    double sum = 0.0;
    for (double l : levels) sum += std::pow(10.0, (l - peak) / 10.0);
    return peak + 10.0 * std::log10(sum);
}

inline double broadband(const ThirdOctaveSpectrum& s) { return broadband(std::span<const double>(s.levels)); }

/// Band-wise power sum of two level arrays of equal length.
inline std::vector<double> power_sum(std::span<const double> a, std::span<const double> b)
{
    if (a.size() != b.size()) throw std::invalid_argument("power_sum: band counts differ");
    std::vector<double> out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double arr[2] = {a[i], b[i]};
        out[i] = broadband(std::span<const double>(arr, 2));
    }
    return out;
}

} // namespace quadtune::acoustics
