#pragma once

#include <numbers>

namespace quadtune {

inline constexpr double kPi = std::numbers::pi;

constexpr double rpm_to_rad_s(double rpm) noexcept { return rpm * 2.0 * kPi / 60.0; }
constexpr double rad_s_to_rpm(double w) noexcept { return w * 60.0 / (2.0 * kPi); }
constexpr double deg_to_rad(double d) noexcept { return d * kPi / 180.0; }
constexpr double kmh_to_ms(double v) noexcept { return v / 3.6; }

} // namespace quadtune
