#pragma once

#include "quadtune/harness/campaign.hpp"

#include <memory>

#ifndef QUADTUNE_CONFIG_DIR
#error "QUADTUNE_CONFIG_DIR must point at the configs directory"
#endif

namespace testing_support {

inline quadtune::harness::fs::path config_path(const char* name)
{
    return quadtune::harness::fs::path(QUADTUNE_CONFIG_DIR) / name;
}

inline const quadtune::harness::RunConfig& bounded_config()
{
    static const auto cfg = quadtune::harness::load_run_config(config_path("test_case_2.json"));
    return cfg;
}

/// Baseline tuning, calibration and search space for the bounded training case, built once.
inline const quadtune::harness::TrainingSetup& training_setup()
{
    static const auto setup = quadtune::harness::prepare_training(bounded_config(), 1);
    return setup;
}

} // namespace testing_support
