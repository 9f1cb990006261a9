#pragma once

#include "quadtune/core/random.hpp"
#include "quadtune/sim/mission.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace quadtune::harness {

using sim::Mission;
using sim::Vec3;

enum class Segment { short_hop, long_transit, s_turn, climb_descent, hover_translate_hover };

inline constexpr Segment kAllSegments[] = {Segment::short_hop, Segment::long_transit, Segment::s_turn,
                                           Segment::climb_descent, Segment::hover_translate_hover};

inline std::string to_string(Segment s)
{
    switch (s) {
    case Segment::short_hop: return "short_hop";
    case Segment::long_transit: return "long_transit";
    case Segment::s_turn: return "s_turn";
    case Segment::climb_descent: return "climb_descent";
    case Segment::hover_translate_hover: return "hover_translate_hover";
    }
    return "?";
}

inline Segment segment_from_string(std::string_view s)
{
    for (Segment v : kAllSegments)
        if (to_string(v) == s) return v;
    throw std::invalid_argument("unknown mission segment: " + std::string(s));
}

struct CompositeSpec {
    std::vector<Segment> menu{std::begin(kAllSegments), std::end(kAllSegments)};
    std::size_t count = 0;  // 0 flies each menu entry once in order; otherwise draws `count` from the menu
    Vec3 start{0.0, 0.0, 10.0};
    double max_time = 150.0;
    double altitude_min = 6.0;
    double altitude_max = 18.0;
    double return_radius = 12.0;  // beyond this distance from start, headings turn back toward it
    std::uint64_t seed = 1;
};

namespace detail {

struct MissionBuilder {
    Mission m;
    Vec3 p;
    Rng rng;
    const CompositeSpec& spec;

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(rng); }

    void add(const Vec3& w, double speed)
    {
        m.waypoints.push_back(w);
        m.speed_hints.push_back(speed);
        p = w;
    }

    double heading()
    {
        const double dx = spec.start[0] - p[0], dy = spec.start[1] - p[1];
        if (std::hypot(dx, dy) > spec.return_radius) return std::atan2(dy, dx) + uniform(-0.7, 0.7);
        return uniform(-3.14159265358979323846, 3.14159265358979323846);
    }

    /// Point at (forward, left, up) from the current position in the heading frame.
    Vec3 offset(double psi, double fwd, double left, double up) const
    {
        return {p[0] + fwd * std::cos(psi) - left * std::sin(psi), p[1] + fwd * std::sin(psi) + left * std::cos(psi),
                std::clamp(p[2] + up, spec.altitude_min, spec.altitude_max)};
    }

    double vertical_step(double lo, double hi)
    {
        const double dz = uniform(lo, hi);
        const double mid = 0.5 * (spec.altitude_min + spec.altitude_max);
        return p[2] > mid ? -dz : dz;
    }

    void append(Segment s)
    {
        const double psi = heading();
        switch (s) {
        case Segment::short_hop:
            add(offset(psi, uniform(4.0, 7.0), 0.0, uniform(-0.5, 0.5)), uniform(2.0, 4.0));
            break;
        case Segment::long_transit:
            add(offset(psi, uniform(18.0, 24.0), 0.0, uniform(-1.0, 1.0)), uniform(6.0, 10.0));
            break;
        case Segment::s_turn: {
            // Lateral swing wider than the forward step so consecutive legs reverse across-track.
            const double fwd = uniform(4.0, 6.0), lat = uniform(3.5, 5.0), v = uniform(3.0, 5.0);
            const Vec3 o = p;
            add(offset(psi, fwd, lat, 0.0), v);
            p = o;
            add(offset(psi, 2.0 * fwd, -lat, 0.0), v);
            p = o;
            add(offset(psi, 3.0 * fwd, lat, 0.0), v);
            break;
        }
        case Segment::climb_descent: {
            const double dz = vertical_step(3.0, 5.0), fwd = uniform(3.0, 5.0), v = uniform(2.0, 3.0);
            add(offset(psi, fwd, 0.0, dz), v);
            add(offset(psi, fwd, 0.0, -dz), v);
            break;
        }
        case Segment::hover_translate_hover: {
            const double dz = vertical_step(1.0, 2.0);
            add(offset(psi, 0.0, 0.0, dz), 1.5);
            add(offset(psi, uniform(8.0, 12.0), 0.0, 0.0), uniform(3.0, 6.0));
            add(offset(psi, 0.0, 0.0, -dz), 1.5);
            break;
        }
        }
    }
};

} // namespace detail

/// Concatenates segment archetypes into one waypoint mission.
inline Mission build_composite_mission(const CompositeSpec& spec)
{
    if (spec.menu.empty()) throw std::invalid_argument("composite mission: enable at least one segment type");
    if (!(spec.altitude_max > spec.altitude_min)) throw std::invalid_argument("composite mission: bad altitude band");
    detail::MissionBuilder b{{}, spec.start, make_rng(spec.seed, "mission"), spec};
    b.m.start = spec.start;
    b.m.max_time = spec.max_time;
    if (spec.count == 0) {
        for (Segment s : spec.menu) b.append(s);
    } else {
        for (std::size_t i = 0; i < spec.count; ++i) {
            const auto k = static_cast<std::size_t>(uniform01(b.rng) * static_cast<double>(spec.menu.size()));
            b.append(spec.menu[std::min(k, spec.menu.size() - 1)]);
        }
    }
    b.m.validate();
    return b.m;
}

/// Horizontal leg vectors, start to first waypoint included.
inline std::vector<std::array<double, 2>> horizontal_legs(const Mission& m)
{
    std::vector<std::array<double, 2>> legs;
    Vec3 prev = m.start;
    for (const auto& w : m.waypoints) {
        legs.push_back({w[0] - prev[0], w[1] - prev[1]});
        prev = w;
    }
    return legs;
}

} // namespace quadtune::harness
