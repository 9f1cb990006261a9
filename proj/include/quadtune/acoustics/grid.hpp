#pragma once

#include "quadtune/acoustics/emission.hpp"
#include "quadtune/acoustics/propagation.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <vector>

namespace quadtune::acoustics {

using Point3 = std::array<double, 3>;

struct GridConfig {
    std::size_t n = 24;        // cells per side
    double cell_size = 2.0;    // m
    double center_x = 0.0;     // m, grid centre
    double center_y = 0.0;
    double radius = 14.0;      // m, horizontal culling radius; infinity disables culling
    double floor_db = 30.0;    // level recorded for culled cells
    double min_distance = 0.5; // m, receivers closer than this are evaluated at this distance
    bool record_history = true;

    void validate() const
    {
        if (n < 1) throw std::invalid_argument("grid: n must be >= 1");
        if (!(cell_size > 0.0)) throw std::invalid_argument("grid: cell size must be > 0");
        if (!(radius >= 0.0)) throw std::invalid_argument("grid: radius must be >= 0");
        if (!(min_distance > 0.0)) throw std::invalid_argument("grid: minimum distance must be > 0");
    }
};

/// Vehicle acoustic source at one timestep.
struct SourceSample {
    Point3 position{};
    Point3 attitude{};  // roll, pitch, yaw
    std::array<double, 4> rpm{};
};

/// Angle between the vehicle's downward body axis and the direction to `receiver`.
inline double radiation_angle(const SourceSample& s, const Point3& receiver)
{
    const double cphi = std::cos(s.attitude[0]), sphi = std::sin(s.attitude[0]);
    const double cth = std::cos(s.attitude[1]), sth = std::sin(s.attitude[1]);
    const double cpsi = std::cos(s.attitude[2]), spsi = std::sin(s.attitude[2]);
    const Point3 down{-(cpsi * sth * cphi + spsi * sphi), -(spsi * sth * cphi - cpsi * sphi), -(cth * cphi)};
    const Point3 r{receiver[0] - s.position[0], receiver[1] - s.position[1], receiver[2] - s.position[2]};
    const double norm = std::sqrt(r[0] * r[0] + r[1] * r[1] + r[2] * r[2]);
    if (!(norm > 0.0)) return 0.0;
    const double c = (down[0] * r[0] + down[1] * r[1] + down[2] * r[2]) / norm;
    return std::acos(std::clamp(c, -1.0, 1.0));
}

/// N x N ground receivers at z = 0 with per-cell broadband SPL histories.
class GroundGrid {
public:
    GroundGrid(const GridConfig& config, const Emitter& emitter, const AtmosphereConditions& atmosphere)
        : config_(config), emitter_(&emitter),
          alpha_(absorption_table(emitter.model().centers, atmosphere)),
          sum_(config.n * config.n, 0.0),
          max_(config.n * config.n, -std::numeric_limits<double>::infinity())
    {
        config.validate();
        atmosphere.validate();
        if (config.record_history) history_.resize(config.n * config.n);
    }

    const GridConfig& config() const noexcept { return config_; }
    std::size_t steps() const noexcept { return steps_; }

    Point3 centroid(std::size_t i, std::size_t j) const noexcept
    {
        const double half = 0.5 * static_cast<double>(config_.n);
        return {config_.center_x + (static_cast<double>(i) + 0.5 - half) * config_.cell_size,
                config_.center_y + (static_cast<double>(j) + 0.5 - half) * config_.cell_size, 0.0};
    }

    /// Broadband received level at one cell, ignoring culling.
    double cell_level(const SourceSample& s, const std::vector<double>& neutral, std::size_t i, std::size_t j,
                      std::vector<double>& scratch) const
    {
        const Point3 c = centroid(i, j);
        const double dx = c[0] - s.position[0], dy = c[1] - s.position[1], dz = c[2] - s.position[2];
        const double d = std::max(std::sqrt(dx * dx + dy * dy + dz * dz), config_.min_distance);
        const double zeta = radiation_angle(s, c);
        const std::size_t nb = alpha_.size();
        const std::vector<double>* source = &neutral;
        if (emitter_->model().mode == EmissionMode::polynomial) {
            emitter_->source_levels(s.rpm, zeta, scratch);
            source = &scratch;
        }
        const double spread = spherical_spreading(d);
        double energy = 0.0;
        for (std::size_t b = 0; b < nb; ++b) {
            const double lp = (*source)[b] - spread - alpha_[b] * d + emitter_->directivity_db(b, zeta);
            energy += std::pow(10.0, lp / 10.0);
        }
        return 10.0 * std::log10(energy);
    }

    /// Updates every cell for timestep t_index (must equal the number of prior steps).
    void step(const SourceSample& s, std::size_t t_index)
    {
        if (t_index != steps_) throw std::invalid_argument("grid_step: timestep index out of sequence");
        emitter_->source_levels(s.rpm, 0.0, neutral_);
        const double r2 = config_.radius * config_.radius;
        double active_sum = 0.0;
        std::size_t active = 0;
        for (std::size_t i = 0; i < config_.n; ++i) {
            for (std::size_t j = 0; j < config_.n; ++j) {
                const Point3 c = centroid(i, j);
                const double hx = c[0] - s.position[0], hy = c[1] - s.position[1];
                double level = config_.floor_db;
                if (std::isinf(config_.radius) || hx * hx + hy * hy <= r2) {
                    level = cell_level(s, neutral_, i, j, scratch_);
                    active_sum += level;
                    ++active;
                }
                record(i * config_.n + j, level);
            }
        }
        active_mean_.push_back(active > 0 ? active_sum / static_cast<double>(active) : config_.floor_db);
        ++steps_;
    }

    /// Broadband level history of one cell (empty when history recording is off).
    const std::vector<float>& history(std::size_t i, std::size_t j) const { return history_.at(i * config_.n + j); }
    double cell_mean(std::size_t i, std::size_t j) const
    {
        return steps_ ? sum_[i * config_.n + j] / static_cast<double>(steps_) : config_.floor_db;
    }
    double cell_max(std::size_t i, std::size_t j) const { return max_[i * config_.n + j]; }

    /// Mean level over the cells inside the culling radius, one entry per step.
    const std::vector<double>& active_mean_series() const noexcept { return active_mean_; }

private:
    void record(std::size_t cell, double level)
    {
        sum_[cell] += level;
        max_[cell] = std::max(max_[cell], level);
        if (config_.record_history) history_[cell].push_back(static_cast<float>(level));
    }

    GridConfig config_;
    const Emitter* emitter_;
    std::vector<double> alpha_;
    std::vector<double> sum_;
    std::vector<double> max_;
    std::vector<std::vector<float>> history_;
    std::vector<double> active_mean_;
    std::vector<double> neutral_, scratch_;
    std::size_t steps_ = 0;
};

inline void grid_step(GroundGrid& grid, const SourceSample& source, std::size_t t_index)
{
    grid.step(source, t_index);
}

} // namespace quadtune::acoustics
