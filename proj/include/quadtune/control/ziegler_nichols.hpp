#pragma once

#include "quadtune/control/pid.hpp"

#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

namespace quadtune::control {

/// Classic PID rule: Kp = 0.6 Ku, Ti = Tu/2, Td = Tu/8.
inline PidGains ziegler_nichols(double ku, double tu)
{
    if (!(ku > 0.0) || !(tu > 0.0)) throw std::domain_error("ziegler_nichols: Ku and Tu must be > 0");
    const double kp = 0.6 * ku;
    return {kp, kp / (tu / 2.0), kp * tu / 8.0};
}

/// Growth of a sampled oscillation: geometric-mean ratio between successive
/// peak-to-trough swings, and the mean peak spacing.
struct OscillationMeasure {
    double amplitude_ratio = 0.0;  // 0 when fewer than three swings are present
    double period = 0.0;           // s
    std::size_t swings = 0;
};

/// Swings smaller than `noise_floor` (absolute) are ignored. The first swing is
/// skipped as start-up transient. Non-finite samples count as unbounded growth.
inline OscillationMeasure measure_oscillation(std::span<const double> y, double dt, double noise_floor = 1e-9)
{
    OscillationMeasure m;
    for (double v : y)
        if (!std::isfinite(v)) {
            m.amplitude_ratio = std::numeric_limits<double>::infinity();
            return m;
        }

    std::vector<std::size_t> peaks;
    std::vector<double> swing;
    for (std::size_t k = 1; k + 1 < y.size(); ++k) {
        if (!(y[k] > y[k - 1] && y[k] >= y[k + 1])) continue;
        // Lowest point between this peak and the next local maximum.
        double trough = y[k];
        std::size_t j = k + 1;
        for (; j + 1 < y.size(); ++j) {
            trough = std::min(trough, y[j]);
            if (y[j] > y[j - 1] && y[j] >= y[j + 1]) break;
        }
        if (j + 1 >= y.size()) break;  // no closing peak, swing incomplete
        const double a = y[k] - trough;
        if (a > noise_floor) {
            peaks.push_back(k);
            swing.push_back(a);
        }
    }
    if (swing.size() < 3) return m;

    const std::size_t first = 1, last = swing.size() - 1;
    m.swings = last - first + 1;
    m.amplitude_ratio = std::pow(swing[last] / swing[first], 1.0 / static_cast<double>(last - first));
    m.period = dt * static_cast<double>(peaks[last] - peaks[first]) / static_cast<double>(last - first);
    return m;
}

struct UltimateGainSearch {
    double kp_min = 0.01;
    double kp_max = 100.0;
    std::size_t resolution = 129;  // log-spaced grid points; 2n-1 nests the n-point grid
    double ratio_low = 0.95;
    double ratio_high = 1.05;
};

struct UltimateGainResult {
    bool found = false;
    double ku = 0.0;
    double tu = 0.0;
    std::vector<double> kp_trace;     // probed gains in ascending order
    std::vector<double> ratio_trace;  // matching amplitude ratios
};

/// Step response of the closed loop under proportional gain kp, sampled at `dt`.
using StepResponseProbe = std::function<std::vector<double>(double kp)>;

inline std::vector<double> log_grid(double lo, double hi, std::size_t n)
{
    if (!(lo > 0.0) || !(hi > lo) || n < 2) throw std::domain_error("log_grid: need 0 < lo < hi and n >= 2");
    std::vector<double> out(n);
    const double a = std::log(lo), b = std::log(hi);
    for (std::size_t i = 0; i < n; ++i)
        out[i] = std::exp(a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1));
    out.front() = lo;
    out.back() = hi;
    return out;
}

/// Smallest grid gain whose step response holds a sustained oscillation
/// (successive swing ratio within [ratio_low, ratio_high]). When none is found
/// the result has found = false and carries the full ratio trace.
inline UltimateGainResult find_ultimate_gain(const StepResponseProbe& probe, double dt,
                                             const UltimateGainSearch& search = {})
{
    UltimateGainResult r;
    for (double kp : log_grid(search.kp_min, search.kp_max, search.resolution)) {
        const auto response = probe(kp);
        const auto m = measure_oscillation(response, dt);
        r.kp_trace.push_back(kp);
        r.ratio_trace.push_back(m.amplitude_ratio);
        if (m.amplitude_ratio >= search.ratio_low && m.amplitude_ratio <= search.ratio_high && m.period > 0.0) {
            r.found = true;
            r.ku = kp;
            r.tu = m.period;
            return r;
        }
    }
    return r;
}

} // namespace quadtune::control
