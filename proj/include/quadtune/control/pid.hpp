#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <iterator>
#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>

namespace quadtune::control {

struct PidGains {
    double kp = 0.0;
    double ki = 0.0;
    double kd = 0.0;

    friend bool operator==(const PidGains&, const PidGains&) = default;
};

/// The five gain groups. Position x/y share one triplet, roll/pitch/yaw share another.
enum class Loop : std::size_t { position_xy, altitude, attitude, horizontal_speed, vertical_speed };
inline constexpr std::size_t kLoopCount = 5;
inline constexpr std::size_t kGainCount = 3 * kLoopCount;

inline constexpr std::array<std::string_view, kLoopCount> kLoopNames{
    "position_xy", "altitude", "attitude", "horizontal_speed", "vertical_speed"};

inline Loop loop_from_name(std::string_view name)
{
    for (std::size_t i = 0; i < kLoopCount; ++i)
        if (kLoopNames[i] == name) return static_cast<Loop>(i);
    throw std::invalid_argument("unknown loop name: " + std::string(name));
}

/// 15-parameter gain stack, flattened as (Kp, Ki, Kd) per loop in enum order.
struct GainVector {
    std::array<PidGains, kLoopCount> loops{};

    PidGains& operator[](Loop l) noexcept { return loops[static_cast<std::size_t>(l)]; }
    const PidGains& operator[](Loop l) const noexcept { return loops[static_cast<std::size_t>(l)]; }

    std::array<double, kGainCount> flatten() const noexcept
    {
        std::array<double, kGainCount> out{};
        for (std::size_t i = 0; i < kLoopCount; ++i) {
            out[3 * i] = loops[i].kp;
            out[3 * i + 1] = loops[i].ki;
            out[3 * i + 2] = loops[i].kd;
        }
        return out;
    }

    template <class Range>
    static GainVector from_flat(const Range& values)
    {
        if (std::size(values) != kGainCount) throw std::invalid_argument("gain vector needs 15 values");
        GainVector g;
        auto it = std::begin(values);
        for (std::size_t i = 0; i < kLoopCount; ++i) {
            g.loops[i].kp = *it++;
            g.loops[i].ki = *it++;
            g.loops[i].kd = *it++;
        }
        return g;
    }

    void validate() const
    {
        for (const auto& t : loops)
            if (!(t.kp >= 0.0) || !(t.ki >= 0.0) || !(t.kd >= 0.0))
                throw std::invalid_argument("gain vector: gains must be finite and >= 0");
    }

    friend bool operator==(const GainVector&, const GainVector&) = default;
};

/// Accumulator state of one PID block.
struct PidState {
    double integral = 0.0;
    double previous_error = 0.0;
    double integral_limit = std::numeric_limits<double>::infinity();
    bool primed = false;  // false until the first update; derivative is 0 on that update

    void reset() noexcept
    {
        integral = 0.0;
        previous_error = 0.0;
        primed = false;
    }
};

inline constexpr double kIntegralEpsilon = 1e-6;

/// Integral clamp giving the integral term at most `authority` of output.
inline double integral_limit_for(double authority, double ki) noexcept
{
    return authority / std::max(ki, kIntegralEpsilon);
}

/// Kp e + Ki clamp(sum e dt) + Kd (e - e_prev)/dt.
inline double pid_update(PidState& pid, const PidGains& gains, double error, double dt)
{
    if (!(dt > 0.0)) throw std::domain_error("pid_update: dt must be > 0");
    pid.integral = std::clamp(pid.integral + error * dt, -pid.integral_limit, pid.integral_limit);
    const double derivative = pid.primed ? (error - pid.previous_error) / dt : 0.0;
    pid.previous_error = error;
    pid.primed = true;
    return gains.kp * error + gains.ki * pid.integral + gains.kd * derivative;
}

} // namespace quadtune::control
