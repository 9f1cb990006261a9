#pragma once

#include "quadtune/optimize/space.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace quadtune::optimize {

struct BoConfig {
    std::size_t initial_points = 16;  // space-filling design size, warm start included
    std::size_t candidate_pool = 4096;
    std::size_t max_model_points = 48;  // GP fitted on the points nearest the incumbent
    double noise = 1e-6;                // nugget on standardized costs
    double length_scale_factor = 1.0;   // multiplies the median pairwise distance
    double local_fraction = 0.5;        // share of the pool drawn around the incumbent
    double xi = 0.0;                    // expected-improvement margin
    std::uint64_t design_seed = 0;

    void validate() const
    {
        if (initial_points < 2) throw std::invalid_argument("bo: need >= 2 initial points");
        if (candidate_pool < 1 || max_model_points < 2) throw std::invalid_argument("bo: pool and model size must be >= 1, 2");
        if (!(noise > 0.0) || !(length_scale_factor > 0.0)) throw std::invalid_argument("bo: noise and length scale must be > 0");
        if (!(local_fraction >= 0.0 && local_fraction <= 1.0)) throw std::invalid_argument("bo: local fraction must lie in [0, 1]");
    }
};

/// Latin hypercube design in the unit cube, n points.
inline std::vector<Point> latin_hypercube(std::size_t n, std::size_t d, Rng& rng)
{
    std::vector<Point> pts(n, Point(d));
    std::vector<std::size_t> perm(n);
    for (std::size_t k = 0; k < d; ++k) {
        std::iota(perm.begin(), perm.end(), std::size_t{0});
        for (std::size_t i = n; i > 1; --i) {
            const auto j = static_cast<std::size_t>(uniform01(rng) * static_cast<double>(i));
            std::swap(perm[i - 1], perm[std::min(j, i - 1)]);
        }
        for (std::size_t i = 0; i < n; ++i)
            pts[i][k] = (static_cast<double>(perm[i]) + uniform01(rng)) / static_cast<double>(n);
    }
    return pts;
}

inline double squared_distance(const Point& a, const Point& b)
{
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
    return s;
}

/// Expected improvement for minimization at predictive mean mu and std s.
inline double expected_improvement(double mu, double s, double best, double xi = 0.0)
{
    const double imp = best - mu - xi;
    if (!(s > 1e-12)) return std::max(imp, 0.0);
    const double z = imp / s;
    const double pdf = std::exp(-0.5 * z * z) / std::sqrt(2.0 * 3.14159265358979323846);
    const double cdf = 0.5 * std::erfc(-z / std::sqrt(2.0));
    return imp * cdf + s * pdf;
}

/// Gaussian-process regression with a squared-exponential kernel on unit-cube inputs.
class GaussianProcess {
public:
    GaussianProcess(std::vector<Point> x, const std::vector<double>& y, double length_scale, double noise)
        : x_(std::move(x)), inv_two_l2_(0.5 / (length_scale * length_scale))
    {
        const auto n = static_cast<Eigen::Index>(x_.size());
        Eigen::MatrixXd k(n, n);
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = 0; j <= i; ++j)
                k(i, j) = k(j, i) = kernel(x_[static_cast<std::size_t>(i)], x_[static_cast<std::size_t>(j)]);
        double jitter = noise;
        for (int attempt = 0; attempt < 8; ++attempt) {
            llt_.compute(k + jitter * Eigen::MatrixXd::Identity(n, n));
            if (llt_.info() == Eigen::Success) break;
            jitter *= 10.0;
        }
        if (llt_.info() != Eigen::Success) throw std::runtime_error("bo: kernel matrix is not positive definite");
        alpha_ = llt_.solve(Eigen::Map<const Eigen::VectorXd>(y.data(), n));
    }

    double kernel(const Point& a, const Point& b) const { return std::exp(-squared_distance(a, b) * inv_two_l2_); }

    /// Predictive mean and standard deviation.
    std::pair<double, double> predict(const Point& q) const
    {
        Eigen::VectorXd mu, sd;
        predict({q}, mu, sd);
        return {mu(0), sd(0)};
    }

    /// Batched prediction over many query points.
    void predict(const std::vector<Point>& qs, Eigen::VectorXd& mu, Eigen::VectorXd& sd) const
    {
        const auto n = static_cast<Eigen::Index>(x_.size());
        const auto m = static_cast<Eigen::Index>(qs.size());
        Eigen::MatrixXd ks(n, m);
        for (Eigen::Index j = 0; j < m; ++j)
            for (Eigen::Index i = 0; i < n; ++i)
                ks(i, j) = kernel(qs[static_cast<std::size_t>(j)], x_[static_cast<std::size_t>(i)]);
        mu = ks.transpose() * alpha_;
        llt_.matrixL().solveInPlace(ks);
        sd = (1.0 - ks.colwise().squaredNorm().array()).max(0.0).sqrt().matrix().transpose();
    }

private:
    std::vector<Point> x_;
    double inv_two_l2_;
    Eigen::LLT<Eigen::MatrixXd> llt_;
    Eigen::VectorXd alpha_;
};

/// Next candidate. Below the design size it returns the warm start (first)
/// or the next Latin-hypercube point; afterwards the expected-improvement
/// argmax over a random pool, half uniform and half around the incumbent.
inline Point bo_step(const std::vector<Point>& xs, const std::vector<double>& costs, const SearchSpace& space,
                     const BoConfig& cfg, Rng& rng)
{
    cfg.validate();
    if (xs.size() != costs.size()) throw std::invalid_argument("bo_step: one cost per point");
    const std::size_t d = space.dim();
    const bool warm = space.warm_start.has_value();

    if (xs.size() < cfg.initial_points) {
        if (warm && xs.empty()) return *space.warm_start;
        auto design_rng = make_rng(cfg.design_seed, "bo-design");
        const auto design = latin_hypercube(cfg.initial_points, d, design_rng);
        const std::size_t index = xs.size() - (warm ? 1 : 0);
        return space.from_unit(design[std::min(index, design.size() - 1)]);
    }

    const auto [lo, hi] = std::minmax_element(costs.begin(), costs.end());
    if (!(*hi - *lo > 1e-12 * std::max(1.0, std::abs(*lo)))) return space.sample(rng);

    const std::size_t best = static_cast<std::size_t>(lo - costs.begin());
    std::vector<Point> unit(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) unit[i] = space.to_unit(xs[i]);

    // Local model: the points nearest the incumbent.
    std::vector<std::size_t> idx(xs.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::vector<double> dist(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) dist[i] = squared_distance(unit[i], unit[best]);
    const std::size_t m = std::min(cfg.max_model_points, xs.size());
    std::partial_sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(m), idx.end(),
                      [&](std::size_t a, std::size_t b) { return dist[a] < dist[b] || (dist[a] == dist[b] && a < b); });
    idx.resize(m);

    std::vector<Point> mx;
    std::vector<double> my;
    for (std::size_t i : idx) {
        mx.push_back(unit[i]);
        my.push_back(costs[i]);
    }
    const double mean = std::accumulate(my.begin(), my.end(), 0.0) / static_cast<double>(m);
    double var = 0.0;
    for (double v : my) var += (v - mean) * (v - mean);
    const double sd = std::sqrt(var / static_cast<double>(m));
    if (!(sd > 1e-12 * std::max(1.0, std::abs(mean)))) return space.sample(rng);
    // Prior mean at the worst modelled cost: unexplored regions look unpromising,
    // which keeps the search near the incumbent in high dimension.
    const double worst = *std::max_element(my.begin(), my.end());
    for (double& v : my) v = (v - worst) / sd;
    const double best_y = *std::min_element(my.begin(), my.end());

    std::vector<double> pair;
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = i + 1; j < m; ++j) pair.push_back(std::sqrt(squared_distance(mx[i], mx[j])));
    std::nth_element(pair.begin(), pair.begin() + static_cast<std::ptrdiff_t>(pair.size() / 2), pair.end());
    const double ell = std::max(1e-9, cfg.length_scale_factor * pair[pair.size() / 2]);

    const GaussianProcess gp(mx, my, ell, cfg.noise);
    const Point& centre = unit[best];
    const auto local = static_cast<std::size_t>(cfg.local_fraction * static_cast<double>(cfg.candidate_pool));
    std::vector<Point> pool(cfg.candidate_pool, Point(d));
    for (std::size_t c = 0; c < pool.size(); ++c) {
        Point& q = pool[c];
        if (c < local) {
            // Spread the local proposals over several scales below the length scale.
            const double scale = ell * std::pow(0.25, static_cast<double>(c % 4)) / std::sqrt(static_cast<double>(d));
            for (std::size_t k = 0; k < d; ++k) q[k] = std::clamp(centre[k] + scale * standard_normal(rng), 0.0, 1.0);
        } else {
            for (std::size_t k = 0; k < d; ++k) q[k] = uniform01(rng);
        }
    }
    Eigen::VectorXd mu, sd_pred;
    gp.predict(pool, mu, sd_pred);
    std::size_t arg = 0;
    double best_ei = -1.0;
    for (std::size_t c = 0; c < pool.size(); ++c) {
        const double ei = expected_improvement(mu(static_cast<Eigen::Index>(c)), sd_pred(static_cast<Eigen::Index>(c)),
                                               best_y, cfg.xi);
        if (ei > best_ei) {
            best_ei = ei;
            arg = c;
        }
    }
    const Point& best_candidate = pool[arg];
    Point x = space.from_unit(best_candidate);
    // Frozen dimensions stay exactly at their bound.
    for (std::size_t k = 0; k < d; ++k)
        if (space.width(k) == 0.0) x[k] = space.lower[k];
    return x;
}

} // namespace quadtune::optimize
