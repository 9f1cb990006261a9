#include "quadtune/harness/campaign.hpp"
#include "quadtune/harness/missions.hpp"

#include "fixture.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <sstream>

using namespace quadtune;
using namespace quadtune::harness;
using testing_support::training_setup;

namespace {

std::string slurp(const fs::path& p)
{
    std::ifstream in(p);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

fs::path scratch(const std::string& name)
{
    const auto p = fs::temp_directory_path() / ("quadtune_test_" + name);
    fs::remove_all(p);
    return p;
}

std::vector<std::vector<std::string>> read_csv(const fs::path& p)
{
    std::vector<std::vector<std::string>> rows;
    std::ifstream in(p);
    std::string line;
    while (std::getline(in, line)) {
        std::vector<std::string> cells;
        std::stringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        rows.push_back(cells);
    }
    return rows;
}

} // namespace

TEST(CompositeMission, SegmentWaypointCounts)
{
    CompositeSpec s;
    s.menu = {Segment::hover_translate_hover};
    EXPECT_EQ(build_composite_mission(s).waypoints.size(), 3u);
    s.menu = {Segment::short_hop};
    EXPECT_EQ(build_composite_mission(s).waypoints.size(), 1u);
    s.menu = {Segment::s_turn};
    EXPECT_EQ(build_composite_mission(s).waypoints.size(), 3u);
    s.menu = {Segment::climb_descent};
    EXPECT_EQ(build_composite_mission(s).waypoints.size(), 2u);
    s.menu.clear();
    EXPECT_THROW(build_composite_mission(s), std::invalid_argument);
}

TEST(CompositeMission, SeedDeterminesMission)
{
    CompositeSpec s;
    s.count = 6;
    const auto a = build_composite_mission(s);
    const auto b = build_composite_mission(s);
    EXPECT_EQ(a.waypoints, b.waypoints);
    EXPECT_EQ(a.speed_hints, b.speed_hints);
    s.seed = 2;
    EXPECT_NE(build_composite_mission(s).waypoints, a.waypoints);
}

TEST(CompositeMission, FullMenuHasAltitudeChangeAndReversal)
{
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        CompositeSpec s;
        s.seed = seed;
        const auto m = build_composite_mission(s);
        double dz = 0;
        for (const auto& w : m.waypoints) dz = std::max(dz, std::abs(w[2] - m.start[2]));
        EXPECT_GE(dz, 1.0) << seed;
        const auto legs = horizontal_legs(m);
        bool reversal = false;
        for (std::size_t i = 1; i < legs.size(); ++i)
            reversal |= legs[i][0] * legs[i - 1][0] + legs[i][1] * legs[i - 1][1] < 0.0;
        EXPECT_TRUE(reversal) << seed;
        for (const auto& w : m.waypoints) {
            EXPECT_GE(w[2], s.altitude_min);
            EXPECT_LE(w[2], s.altitude_max);
        }
    }
}

TEST(RunMission, BaselineCompletesTrainingMission)
{
    const auto& setup = training_setup();
    const auto r = sim::run_mission(setup.ctx, *setup.warm);
    EXPECT_TRUE(r.log.completed);
    EXPECT_EQ(r.log.abort_reason, sim::AbortReason::none);
    EXPECT_EQ(r.log.waypoints_visited, setup.ctx.scenario.mission.waypoints.size());
    EXPECT_EQ(r.cost[cost::Term::completion], 0.0);
    EXPECT_EQ(r.diagnostics.surrogate_clamped, 0u);
}

TEST(RunMission, CalibratedBaselineTermsAreAtTarget)
{
    const auto& setup = training_setup();
    sim::RunOptions opt;
    opt.turbulence = false;
    const auto r = sim::run_mission(setup.ctx, *setup.warm, opt);
    const auto wt = cost::weighted_terms(r.cost, setup.ctx.scenario.weights);
    for (cost::Term t : {cost::Term::time, cost::Term::attitude, cost::Term::thrust, cost::Term::power, cost::Term::noise})
        EXPECT_NEAR(wt[static_cast<std::size_t>(t)], 30.0, 1e-9);
}

TEST(RunMission, HalvingStepKeepsFinalPosition)
{
    const auto& setup = training_setup();
    auto sc = setup.ctx.scenario;
    sc.dt /= 2.0;
    const auto fine_ctx = sim::make_context(sc, 1, setup.ctx.table);
    sim::RunOptions opt;
    opt.stop_on_completion = false;
    const auto coarse = sim::run_mission(setup.ctx, *setup.warm, opt);
    const auto fine = sim::run_mission(fine_ctx, *setup.warm, opt);
    ASSERT_TRUE(coarse.log.completed);
    ASSERT_TRUE(fine.log.completed);
    EXPECT_NEAR(coarse.log.time.back(), fine.log.time.back(), 1e-9);
    EXPECT_LT(sim::distance(coarse.log.position.back(), fine.log.position.back()), 0.05);
    EXPECT_NEAR(coarse.log.completion_time, fine.log.completion_time, 0.1);
}

TEST(RunMission, TurbulenceReproducibleAndSeedSensitive)
{
    const auto& setup = training_setup();
    sim::RunOptions opt;
    opt.turbulence = true;
    opt.seed = 4;
    const auto a = sim::run_mission(setup.ctx, *setup.warm, opt);
    const auto b = sim::run_mission(setup.ctx, *setup.warm, opt);
    EXPECT_EQ(a.log.position, b.log.position);
    EXPECT_EQ(a.turbulence_thrust, b.turbulence_thrust);
    opt.seed = 5;
    const auto c = sim::run_mission(setup.ctx, *setup.warm, opt);
    EXPECT_NE(a.log.position.back(), c.log.position.back());
    double peak = 0;
    for (double x : a.turbulence_thrust) peak = std::max(peak, std::abs(x));
    EXPECT_GT(peak, 0.0);
}

TEST(RunMission, DivergingGainsAbortEarly)
{
    const auto& setup = training_setup();
    auto g = *setup.warm;
    g[control::Loop::attitude] = {1.0, 0.0, 0.0};
    const auto with = sim::run_mission(setup.ctx, g);
    sim::RunOptions off;
    off.abort_rules = false;
    const auto without = sim::run_mission(setup.ctx, g, off);
    EXPECT_EQ(with.log.abort_reason, sim::AbortReason::diverged_radius);
    EXPECT_EQ(without.log.abort_reason, sim::AbortReason::none);
    EXPECT_LT(with.diagnostics.steps * 5, without.diagnostics.steps);
    EXPECT_GT(with.cost.total, setup.ctx.scenario.weights.completion_penalty);
    double far = 0;
    for (const auto& p : without.log.position) far = std::max(far, sim::distance(p, without.log.start));
    EXPECT_GT(far, setup.ctx.scenario.abort.divergence_radius);
}

TEST(Campaign, SingleRunBookkeeping)
{
    const auto& setup = training_setup();
    const auto dir = scratch("single");
    CampaignSpec spec;
    spec.methods = {optimize::Method::random};
    spec.seeds = {3};
    spec.budget = {10, 0.0};
    const auto res = run_campaign(spec, setup, optimize::OptimizerConfig{}, dir, 1, true);
    ASSERT_EQ(res.runs.size(), 1u);
    ASSERT_TRUE(res.runs[0].ok);
    EXPECT_EQ(res.runs[0].evaluations, 10u);
    ASSERT_TRUE(res.warm_cost.has_value());
    EXPECT_LE(res.runs[0].best_cost, *res.warm_cost);

    const auto conv = read_csv(dir / "random" / "seed_3" / "convergence.csv");
    ASSERT_EQ(conv.size(), 11u);
    double low = INFINITY;
    for (std::size_t i = 1; i < conv.size(); ++i) {
        low = std::min(low, std::stod(conv[i][2]));
        EXPECT_EQ(std::stod(conv[i][3]), low);
        EXPECT_EQ(conv[i][1], "0");
    }
    EXPECT_EQ(std::stod(fmt(res.runs[0].best_cost)), low);
    const auto summary = read_csv(dir / "summary.csv");
    ASSERT_EQ(summary.size(), 2u);
    EXPECT_EQ(summary[1][0], "random");
    EXPECT_EQ(std::stod(summary[1][3]), low);
    const auto best = read_json(dir / "random" / "seed_3" / "best_gains.json");
    EXPECT_EQ(best.at("J").get<double>(), res.runs[0].best_cost);
    EXPECT_EQ(read_csv(dir / "random" / "seed_3" / "evaluations.csv").size(), 11u);
}

TEST(Campaign, SeedsAggregate)
{
    const auto& setup = training_setup();
    const auto dir = scratch("seeds");
    CampaignSpec spec;
    spec.methods = {optimize::Method::pso, optimize::Method::gwo};
    spec.seeds = {1, 2};
    spec.budget = {6, 0.0};
    optimize::OptimizerConfig cfg;
    cfg.pso.swarm = 3;
    cfg.gwo.pack = 3;
    const auto res = run_campaign(spec, setup, cfg, dir, 1, true);
    ASSERT_EQ(res.runs.size(), 4u);
    for (const char* m : {"pso", "gwo"})
        for (const char* s : {"seed_1", "seed_2"}) EXPECT_TRUE(fs::exists(dir / m / s / "convergence.csv"));
    ASSERT_EQ(res.methods.size(), 2u);
    for (std::size_t k = 0; k < 2; ++k) {
        const double a = res.runs[2 * k].best_cost, b = res.runs[2 * k + 1].best_cost;
        EXPECT_EQ(res.methods[k].best_cost, std::min(a, b));
        EXPECT_DOUBLE_EQ(res.methods[k].mean_cost, 0.5 * (a + b));
        EXPECT_DOUBLE_EQ(res.methods[k].median_cost, 0.5 * (a + b));
        EXPECT_EQ(res.methods[k].evaluations, 12u);
    }
    EXPECT_EQ(read_csv(dir / "runs.csv").size(), 5u);
    EXPECT_EQ(slurp(dir / "summary.csv"), summary_csv(res, true));
}

TEST(Campaign, WarmStartCanBeExcludedFromSearch)
{
    auto cfg = testing_support::bounded_config();
    cfg.warm_start_in_search = false;
    const auto setup = prepare_training(cfg, 1, training_setup().ctx.table);
    EXPECT_FALSE(setup.space.warm_start.has_value());
    EXPECT_TRUE(setup.warm.has_value());
    EXPECT_TRUE(setup.calibration.has_value());
}

TEST(Report, IdenticalGainsGiveZeroChange)
{
    const auto& setup = training_setup();
    auto cfg = testing_support::bounded_config();
    auto sc = *cfg.unseen;
    sc.weights = setup.ctx.scenario.weights;
    const auto ctx = sim::make_context(sc, 1, setup.ctx.table);
    const auto rep = report_unseen(*setup.warm, *setup.warm, ctx);
    const std::vector<std::string> cost_labels{"Total cost",
                                               "Mission time cost",
                                               "Attitude oscillation cost",
                                               "Overshoot cost",
                                               "Power cost",
                                               "Noise proxy cost (SWL-based)",
                                               "Trajectory deviation cost",
                                               "Thrust variation cost",
                                               "Completion penalty",
                                               "No-movement penalty"};
    ASSERT_EQ(rep.cost_rows.size(), cost_labels.size());
    for (std::size_t i = 0; i < cost_labels.size(); ++i) {
        EXPECT_EQ(rep.cost_rows[i].label, cost_labels[i]);
        EXPECT_EQ(rep.cost_rows[i].change, 0.0);
    }
    ASSERT_EQ(rep.indicators.size(), 3u);
    EXPECT_EQ(rep.indicators[0].label, "Avg SPL at receivers [dB]");
    EXPECT_EQ(rep.indicators[1].label, "Avg source SWL [dB]");
    EXPECT_EQ(rep.indicators[2].label, "Avg electrical power [W]");
    for (const auto& r : rep.indicators) EXPECT_EQ(r.change, 0.0);
    EXPECT_GT(rep.indicators[0].baseline, 0.0);
    double sum = rep.baseline.no_movement;
    for (double t : cost::weighted_terms(rep.baseline, sc.weights)) sum += t;
    EXPECT_NEAR(sum, rep.baseline.total, 1e-9 * sum);
}

TEST(Report, PercentChangeConvention)
{
    EXPECT_DOUBLE_EQ(percent_change(200.0, 150.0), 25.0);
    EXPECT_DOUBLE_EQ(percent_change(100.0, 120.0), -20.0);
    EXPECT_EQ(percent_change(0.0, 0.0), 0.0);
}

TEST(Io, JsonRoundTrips)
{
    const auto& cfg = testing_support::bounded_config();
    const auto sj = scenario_to_json(cfg.scenario);
    EXPECT_EQ(scenario_to_json(scenario_from_json(sj)), sj);
    const auto& g = *training_setup().warm;
    EXPECT_EQ(gains_from_json(gains_to_json(g)).flatten(), g.flatten());
    const auto oj = optimizer_to_json(cfg.optimizer);
    optimize::OptimizerConfig back;
    optimizer_from_json(oj, back);
    EXPECT_EQ(optimizer_to_json(back), oj);
    const auto wj = weights_to_json(training_setup().ctx.scenario.weights);
    cost::CostWeights w;
    weights_from_json(wj, w);
    EXPECT_EQ(weights_to_json(w), wj);
    const auto bj = bounds_to_json(cfg.bounds);
    EXPECT_EQ(bounds_to_json(bounds_from_json(bj)), bj);
}

TEST(Io, UnknownKeysAreRejected)
{
    json j = scenario_to_json(testing_support::bounded_config().scenario);
    j["dtt"] = 0.01;
    EXPECT_THROW(scenario_from_json(j), ConfigError);
    EXPECT_THROW(read_json("/nonexistent/quadtune.json"), ConfigError);
}

TEST(Io, AllShippedConfigsLoad)
{
    for (const char* name : {"test_case_1.json", "test_case_2.json", "test_case_3.json"}) {
        const auto c = load_run_config(testing_support::config_path(name));
        EXPECT_EQ(c.campaign.methods.size(), 5u) << name;
        EXPECT_EQ(c.campaign.seeds.size(), 5u) << name;
        EXPECT_EQ(c.campaign.budget.max_evaluations, 500u) << name;
        EXPECT_TRUE(c.unseen.has_value()) << name;
    }
    EXPECT_FALSE(load_run_config(testing_support::config_path("test_case_1.json")).warm_start_in_search);
    EXPECT_TRUE(*load_run_config(testing_support::config_path("test_case_3.json")).campaign.turbulence);
}
