#pragma once

#include "quadtune/sim/mission.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace quadtune::cost {

using sim::Mission;
using sim::TrajectoryLog;
using sim::Vec3;

/// Index of each weighted term, in the order used by weights and breakdowns.
enum class Term : std::size_t { time, distance, attitude, thrust, completion, overshoot, power, noise };
inline constexpr std::size_t kTermCount = 8;
inline constexpr std::array<std::string_view, kTermCount> kTermNames{
    "C_t", "C_d", "C_o", "C_to", "C_c", "C_os", "C_p", "C_n"};

struct CostWeights {
    std::array<double, kTermCount> w{1, 1, 1, 1, 1, 1, 1, 1};  // w_t, w_d, w_o, w_to, w_c, w_os, w_p, w_n
    double gamma_d = 0.5;
    double completion_penalty = 1000.0;   // P_c
    double no_movement_penalty = 1000.0;  // P_nm
    double epsilon = 0.05;                // m, no-movement displacement threshold
    double noise_order = 4.0;             // p
    double noise_reference_db = 85.0;     // s is divided by this before the p-norm
    double waypoint_threshold = 2.0;      // m
    bool thrust_term = true;              // false drops w_to C_to entirely
    bool power_as_energy = true;          // sum P dt; false uses the bare sum of P

    double& operator[](Term t) noexcept { return w[static_cast<std::size_t>(t)]; }
    double operator[](Term t) const noexcept { return w[static_cast<std::size_t>(t)]; }

    void validate() const
    {
        for (double x : w)
            if (!(x >= 0.0)) throw std::invalid_argument("cost weights must be >= 0");
        if (!(gamma_d > 0.0 && gamma_d <= 1.0)) throw std::invalid_argument("gamma_d must lie in (0, 1]");
        if (!(noise_order >= 1.0)) throw std::invalid_argument("noise norm order must be >= 1");
        if (!(epsilon >= 0.0)) throw std::invalid_argument("epsilon must be >= 0");
        if (!(noise_reference_db > 0.0)) throw std::invalid_argument("noise reference level must be > 0");
    }
};

struct CostBreakdown {
    std::array<double, kTermCount> c{};  // C_t, C_d, C_o, C_to, C_c, C_os, C_p, C_n
    double no_movement = 0.0;            // C_nm, enters J unweighted
    double total = 0.0;

    double& operator[](Term t) noexcept { return c[static_cast<std::size_t>(t)]; }
    double operator[](Term t) const noexcept { return c[static_cast<std::size_t>(t)]; }
};

inline std::array<double, kTermCount> weighted_terms(const CostBreakdown& b, const CostWeights& w)
{
    std::array<double, kTermCount> out{};
    for (std::size_t i = 0; i < kTermCount; ++i) out[i] = w.w[i] * b.c[i];
    if (!w.thrust_term) out[static_cast<std::size_t>(Term::thrust)] = 0.0;
    return out;
}

/// J = sum_i w_i C_i + C_nm.
inline double total_cost(const CostBreakdown& b, const CostWeights& w)
{
    double j = 0.0;
    for (double t : weighted_terms(b, w)) j += t;
    return j + b.no_movement;
}

namespace detail {

inline double dot(const Vec3& a, const Vec3& b) noexcept { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
inline Vec3 sub(const Vec3& a, const Vec3& b) noexcept { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }

/// Sum over waypoints of the largest along-track excursion past each waypoint,
/// observed from its activation until the following leg ends. Travel that the
/// next leg itself requires in the same direction is not counted.
inline double overshoot(const TrajectoryLog& log, const Mission& m)
{
    const auto& wp = m.waypoints;
    double total = 0.0;
    for (std::size_t j = 0; j < wp.size(); ++j) {
        const Vec3 prev = j == 0 ? m.start : wp[j - 1];
        Vec3 e = sub(wp[j], prev);
        const double len = std::sqrt(dot(e, e));
        if (!(len > 0.0)) continue;
        for (double& c : e) c /= len;
        const double allowance = j + 1 < wp.size() ? std::max(0.0, dot(sub(wp[j + 1], wp[j]), e)) : 0.0;
        double worst = 0.0;
        bool seen = false;
        for (std::size_t k = 0; k < log.size(); ++k) {
            if (log.target[k] != j && log.target[k] != j + 1) continue;
            const double proj = dot(sub(log.position[k], wp[j]), e);
            worst = seen ? std::max(worst, proj) : proj;
            seen = true;
        }
        if (seen) total += std::max(0.0, worst - allowance);
    }
    return total;
}

inline double max_displacement(const TrajectoryLog& log)
{
    double d = 0.0;
    for (const auto& p : log.position) d = std::max(d, sim::distance(p, log.start));
    return d;
}

} // namespace detail

/// All terms of the composite cost plus the total under `w`.
inline CostBreakdown compute_terms(const TrajectoryLog& log, const Mission& mission, const CostWeights& w)
{
    if (log.empty()) throw std::invalid_argument("compute_terms: empty trajectory log");
    mission.validate();
    w.validate();
    if (w[Term::noise] > 0.0 && log.swl.size() != log.size())
        throw std::invalid_argument("compute_terms: noise weight is set but the log has no acoustic history");

    CostBreakdown b;
    b[Term::time] = log.completed ? log.completion_time : log.time.back();
    b[Term::distance] = std::pow(sim::distance(log.position.back(), mission.waypoints.back()), w.gamma_d);

    double co = 0.0, cto = 0.0;
    for (std::size_t k = 1; k < log.size(); ++k) {
        co += std::abs(log.attitude[k][0] - log.attitude[k - 1][0]) + std::abs(log.attitude[k][1] - log.attitude[k - 1][1]);
        cto += std::abs(log.thrust_command[k] - log.thrust_command[k - 1]);
    }
    b[Term::attitude] = co;
    b[Term::thrust] = w.thrust_term ? cto : 0.0;
    b[Term::completion] = log.completed ? 0.0 : w.completion_penalty;
    b[Term::overshoot] = detail::overshoot(log, mission);

    double cp = 0.0;
    for (double p : log.power) cp += w.power_as_energy ? p * log.dt : p;
    b[Term::power] = cp;

    if (log.swl.size() == log.size()) {
        double norm = 0.0, peak = 0.0;
        for (double s : log.swl) {
            const double x = s / w.noise_reference_db;
            norm += std::pow(std::abs(x), w.noise_order);
            peak = std::max(peak, x);
        }
        b[Term::noise] = norm + peak;
    }

    b.no_movement = detail::max_displacement(log) < w.epsilon ? w.no_movement_penalty : 0.0;
    b.total = total_cost(b, w);
    return b;
}

struct Calibration {
    CostWeights weights;
    std::vector<std::string> warnings;
};

/// Sets each weight (except the completion penalty weight) so its weighted term
/// equals `target` on the baseline breakdown. Zero-valued terms get weight 0.
inline Calibration calibrate_weights(const CostBreakdown& baseline, const CostWeights& base, double target = 30.0)
{
    if (!(target > 0.0)) throw std::invalid_argument("calibrate_weights: target must be > 0");
    Calibration cal{base, {}};
    for (std::size_t i = 0; i < kTermCount; ++i) {
        if (i == static_cast<std::size_t>(Term::completion)) continue;
        if (i == static_cast<std::size_t>(Term::thrust) && !base.thrust_term) {
            cal.weights.w[i] = 0.0;
            continue;
        }
        const double v = baseline.c[i];
        if (v > 0.0 && std::isfinite(v)) {
            cal.weights.w[i] = target / v;
        } else {
            cal.weights.w[i] = 0.0;
            cal.warnings.push_back(std::string(kTermNames[i]) + " is zero on the baseline; weight set to 0");
        }
    }
    return cal;
}

/// Calibration from a completed baseline rollout.
inline Calibration calibrate_weights(const TrajectoryLog& baseline_log, const Mission& mission, const CostWeights& base,
                                     double target = 30.0)
{
    if (!baseline_log.completed) throw std::invalid_argument("calibrate_weights: baseline did not complete the mission");
    return calibrate_weights(compute_terms(baseline_log, mission, base), base, target);
}

} // namespace quadtune::cost
