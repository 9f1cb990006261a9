#pragma once

#include "quadtune/aero/bemt.hpp"
#include "quadtune/core/parallel.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cstddef>
#include <span>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace quadtune::aero {

enum class Quantity : std::size_t { thrust, torque, power, ct, cq, cp };
inline constexpr std::size_t kQuantityCount = 6;

inline double get(const RotorPerformance& p, Quantity q) noexcept
{
    switch (q) {
    case Quantity::thrust: return p.thrust;
    case Quantity::torque: return p.torque;
    case Quantity::power: return p.power;
    case Quantity::ct: return p.ct;
    case Quantity::cq: return p.cq;
    case Quantity::cp: return p.cp;
    }
    return 0.0;
}

inline void set(RotorPerformance& p, Quantity q, double v) noexcept
{
    switch (q) {
    case Quantity::thrust: p.thrust = v; break;
    case Quantity::torque: p.torque = v; break;
    case Quantity::power: p.power = v; break;
    case Quantity::ct: p.ct = v; break;
    case Quantity::cq: p.cq = v; break;
    case Quantity::cp: p.cp = v; break;
    }
}

/// Thrown when a table cell fails to converge; carries the grid coordinates.
class SurrogateBuildError : public std::runtime_error {
public:
    SurrogateBuildError(std::size_t i, std::size_t j, double omega_rpm, double v_inf, double residual)
        : std::runtime_error(describe(i, j, omega_rpm, v_inf, residual)),
          omega_index(i), v_index(j), omega_rpm(omega_rpm), v_inf(v_inf), residual(residual)
    {
    }

    std::size_t omega_index;
    std::size_t v_index;
    double omega_rpm;
    double v_inf;
    double residual;

private:
    static std::string describe(std::size_t i, std::size_t j, double w, double v, double res)
    {
        std::ostringstream os;
        os << "BEMT did not converge at cell (" << i << ", " << j << "): omega = " << w
           << " rpm, v_inf = " << v << " m/s, residual = " << res;
        return os.str();
    }
};

/// Rotor performance tabulated over (Omega [rpm], V_inf [m/s]). Each value
/// grid is row-major with the Omega index varying slowest.
struct SurrogateTable {
    std::vector<double> omega_rpm;
    std::vector<double> v_inf;
    std::array<std::vector<double>, kQuantityCount> values;

    std::size_t rows() const noexcept { return omega_rpm.size(); }
    std::size_t cols() const noexcept { return v_inf.size(); }
    std::size_t index(std::size_t i, std::size_t j) const noexcept { return i * cols() + j; }

    RotorPerformance cell(std::size_t i, std::size_t j) const noexcept
    {
        RotorPerformance p;
        for (std::size_t q = 0; q < kQuantityCount; ++q)
            set(p, static_cast<Quantity>(q), values[q][index(i, j)]);
        return p;
    }

    void validate() const
    {
        auto increasing = [](const std::vector<double>& a) {
            if (a.empty()) return false;
            for (std::size_t k = 1; k < a.size(); ++k)
                if (!(a[k] > a[k - 1])) return false;
            return true;
        };
        if (!increasing(omega_rpm) || !increasing(v_inf))
            throw std::invalid_argument("surrogate table: axis grids must be non-empty and strictly increasing");
        for (const auto& v : values)
            if (v.size() != rows() * cols())
                throw std::invalid_argument("surrogate table: value grid size does not match axes");
    }
};

/// Counts queries that fell outside the table box and were clamped.
struct SurrogateStats {
    std::atomic<std::size_t> queries{0};
    std::atomic<std::size_t> clamped{0};
};

inline std::vector<double> linspace(double lo, double hi, std::size_t n)
{
    std::vector<double> out(n);
    if (n == 1) {
        out[0] = lo;
        return out;
    }
    for (std::size_t k = 0; k < n; ++k)
        out[k] = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(n - 1);
    return out;
}

inline SurrogateTable build_surrogate(const RotorGeometry& geom, std::span<const double> omega_grid,
                                      std::span<const double> v_grid, double rho,
                                      unsigned workers = 1, const SolverOptions& options = {})
{
    geom.validate();
    SurrogateTable table;
    table.omega_rpm.assign(omega_grid.begin(), omega_grid.end());
    table.v_inf.assign(v_grid.begin(), v_grid.end());
    for (auto& v : table.values) v.assign(table.rows() * table.cols(), 0.0);
    table.validate();

    // Rows are independent; each writes only its own cells.
    parallel_for(table.rows(), workers, [&](std::size_t i) {
        for (std::size_t j = 0; j < table.cols(); ++j) {
            const auto sol = bemt_solve(geom, table.omega_rpm[i], table.v_inf[j], rho, options);
            if (!sol.converged)
                throw SurrogateBuildError(i, j, table.omega_rpm[i], table.v_inf[j], sol.residual);
            for (std::size_t q = 0; q < kQuantityCount; ++q)
                table.values[q][table.index(i, j)] = get(sol.performance, static_cast<Quantity>(q));
        }
    });
    return table;
}

namespace detail {

struct AxisHit {
    std::size_t lo = 0;
    double t = 0.0;
    bool clamped = false;
};

inline AxisHit locate(const std::vector<double>& axis, double x)
{
    AxisHit h;
    if (axis.size() == 1) {
        h.clamped = x != axis.front();
        return h;
    }
    if (x <= axis.front()) {
        h.clamped = x < axis.front();
        return h;
    }
    if (x >= axis.back()) {
        h.clamped = x > axis.back();
        h.lo = axis.size() - 2;
        h.t = 1.0;
        return h;
    }
    const auto it = std::upper_bound(axis.begin(), axis.end(), x);
    h.lo = static_cast<std::size_t>(it - axis.begin()) - 1;
    h.t = (x - axis[h.lo]) / (axis[h.lo + 1] - axis[h.lo]);
    return h;
}

} // namespace detail

/// Bilinear interpolation over (Omega, V_inf). Queries outside the box are
/// clamped to the boundary and counted in `stats` when provided.
inline RotorPerformance surrogate_eval(const SurrogateTable& table, double omega_rpm, double v_inf,
                                       SurrogateStats* stats = nullptr)
{
    const auto a = detail::locate(table.omega_rpm, omega_rpm);
    const auto b = detail::locate(table.v_inf, v_inf);
    if (stats) {
        stats->queries.fetch_add(1, std::memory_order_relaxed);
        if (a.clamped || b.clamped) stats->clamped.fetch_add(1, std::memory_order_relaxed);
    }

    const std::size_t i1 = table.rows() > 1 ? a.lo + 1 : a.lo;
    const std::size_t j1 = table.cols() > 1 ? b.lo + 1 : b.lo;
    const std::size_t c00 = table.index(a.lo, b.lo);
    const std::size_t c01 = table.index(a.lo, j1);
    const std::size_t c10 = table.index(i1, b.lo);
    const std::size_t c11 = table.index(i1, j1);
    const double w00 = (1.0 - a.t) * (1.0 - b.t);
    const double w01 = (1.0 - a.t) * b.t;
    const double w10 = a.t * (1.0 - b.t);
    const double w11 = a.t * b.t;

    RotorPerformance p;
    for (std::size_t q = 0; q < kQuantityCount; ++q) {
        const auto& v = table.values[q];
        double value;
        // Exact node reproduction: skip the blend when the query sits on a node.
        if (a.t == 0.0 && b.t == 0.0)
            value = v[c00];
        else
            value = w00 * v[c00] + w01 * v[c01] + w10 * v[c10] + w11 * v[c11];
        set(p, static_cast<Quantity>(q), value);
    }
    return p;
}

/// Least-squares k in T ~ k * omega^2 (omega in rad/s) over samples of the table
/// in [lo_rpm, hi_rpm] at fixed inflow.
inline double fit_quadratic_coefficient(const SurrogateTable& table, Quantity q, double lo_rpm,
                                        double hi_rpm, double v_inf, std::size_t samples = 41)
{
    double num = 0.0;
    double den = 0.0;
    for (double rpm : linspace(lo_rpm, hi_rpm, samples)) {
        const double w2 = rpm_to_rad_s(rpm) * rpm_to_rad_s(rpm);
        const double y = get(surrogate_eval(table, rpm, v_inf), q);
        num += y * w2;
        den += w2 * w2;
    }
    if (!(den > 0.0)) throw std::domain_error("fit_quadratic_coefficient: empty speed range");
    return num / den;
}

} // namespace quadtune::aero
