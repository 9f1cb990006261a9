#pragma once

#include "quadtune/optimize/space.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>

namespace quadtune::optimize {

/// Random search with a share of incumbent-centred proposals whose step
/// adapts by the one-fifth success rule.
struct RandomSearchConfig {
    std::size_t batch = 30;
    double local_fraction = 0.5;  // 0 gives pure uniform sampling
    double initial_step = 0.1;    // fraction of box width
    double min_step = 1e-6;
    double max_step = 0.5;
    double adapt = 1.5;

    void validate() const
    {
        if (batch < 1) throw std::invalid_argument("random search: batch must be >= 1");
        if (!(local_fraction >= 0.0 && local_fraction <= 1.0))
            throw std::invalid_argument("random search: local fraction must lie in [0, 1]");
        if (!(initial_step > 0.0 && min_step > 0.0 && max_step >= min_step && adapt > 1.0))
            throw std::invalid_argument("random search: bad step settings");
    }
};

struct RandomSearchState {
    double step = 0.1;
};

inline Point random_search_propose(const RandomSearchState& st, const Point* incumbent, const RandomSearchConfig& cfg,
                                   const SearchSpace& space, Rng& rng, bool* is_local = nullptr)
{
    const bool local = incumbent != nullptr && uniform01(rng) < cfg.local_fraction;
    if (is_local) *is_local = local;
    if (!local) return space.sample(rng);
    Point x = *incumbent;
    for (std::size_t k = 0; k < x.size(); ++k) x[k] += st.step * space.width(k) * standard_normal(rng);
    space.clip(x);
    return x;
}

/// One-fifth rule on the local proposals of a batch.
inline void random_search_adapt(RandomSearchState& st, std::size_t local_tries, std::size_t local_successes,
                                const RandomSearchConfig& cfg)
{
    if (local_tries == 0) return;
    const double rate = static_cast<double>(local_successes) / static_cast<double>(local_tries);
    st.step = rate > 0.2 ? st.step * cfg.adapt : st.step / std::pow(cfg.adapt, 0.25);
    st.step = std::clamp(st.step, cfg.min_step, cfg.max_step);
}

} // namespace quadtune::optimize
