// Batch command-line front end: aero tables, baseline tuning, optimizer runs,
// single rollouts, campaigns and the unseen-mission report.

#include "quadtune/harness/campaign.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <exception>
#include <iostream>
#include <optional>
#include <string>

namespace qt = quadtune;
namespace h = quadtune::harness;

namespace {

struct Globals {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string out = "runs";
    unsigned workers = qt::default_workers();
    bool reproducible = false;
};

h::RunConfig load(const Globals& g)
{
    h::RunConfig c = g.config.empty() ? h::RunConfig{} : h::load_run_config(g.config);
    if (g.seed) {
        c.scenario.seed = *g.seed;
        if (c.unseen) c.unseen->seed = *g.seed;
        c.optimizer.seed = *g.seed;
    }
    return c;
}

h::json campaign_json(const h::CampaignSpec& c)
{
    h::json methods = h::json::array();
    for (auto m : c.methods) methods.push_back(qt::optimize::to_string(m));
    return {{"methods", methods},
            {"seeds", c.seeds},
            {"budget", {{"evaluations", c.budget.max_evaluations}, {"seconds", c.budget.max_seconds}}},
            {"turbulence", c.turbulence ? h::json(*c.turbulence) : h::json("scenario")}};
}

h::json manifest(const std::string& command, const Globals& g, const h::RunConfig& c)
{
    h::json m = {{"tool", "quadtune"},
                 {"command", command},
                 {"config_file", g.config},
                 {"seed", c.scenario.seed},
                 {"workers", g.workers},
                 {"reproducible", g.reproducible},
                 {"scenario", h::scenario_to_json(c.scenario)}};
    if (c.unseen) m["unseen"] = h::scenario_to_json(*c.unseen);
    m["bounds"] = h::bounds_to_json(c.bounds);
    m["warm_start"] = c.warm_start;
    m["warm_start_in_search"] = c.warm_start_in_search;
    m["calibration"] = {{"enabled", c.calibrate}, {"target", c.calibration_target}};
    m["campaign"] = campaign_json(c.campaign);
    m["optimizer"] = h::optimizer_to_json(c.optimizer);
    return m;
}

void add_setup(h::json& m, const h::TrainingSetup& t)
{
    if (t.warm) m["warm_start_gains"] = h::gains_to_json(*t.warm);
    if (t.zn) m["ziegler_nichols"] = h::zn_to_json(*t.zn)["ziegler_nichols"];
    if (t.calibration) {
        m["calibrated_weights"] = h::weights_to_json(t.calibration->weights);
        m["calibration_warnings"] = t.calibration->warnings;
    }
    if (t.warm_breakdown) m["warm_start_cost"] = h::breakdown_to_json(*t.warm_breakdown, t.ctx.scenario.weights);
}

qt::control::GainVector read_gains(const std::string& path) { return h::gains_from_json(h::read_json(path)); }

std::optional<bool> on_off(const std::string& s)
{
    if (s.empty()) return std::nullopt;
    if (s == "on") return true;
    if (s == "off") return false;
    throw CLI::ValidationError("--turbulence", "expected on or off");
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"quadtune: noise-aware cascade PID tuning for a quadrotor simulator"};
    app.require_subcommand(1);
    Globals g;
    app.add_option("--config", g.config, "Run configuration JSON")->check(CLI::ExistingFile);
    app.add_option("--seed", g.seed, "Base seed (scenario and optimizer)");
    app.add_option("--out", g.out, "Output directory");
    app.add_option("--workers", g.workers, "Worker threads")->check(CLI::PositiveNumber);
    app.add_flag("--reproducible", g.reproducible, "Write 0 for wall-clock columns so outputs are bit-identical");

    // aero table
    auto* aero = app.add_subcommand("aero", "Rotor aerodynamics");
    aero->require_subcommand(1);
    auto* table = aero->add_subcommand("table", "Tabulate the BEMT solver on the scenario's (RPM, V) grid");

    // tune zn / tune run
    auto* tune = app.add_subcommand("tune", "Gain tuning");
    tune->require_subcommand(1);
    auto* zn = tune->add_subcommand("zn", "Ziegler-Nichols baseline gains");
    auto* run = tune->add_subcommand("run", "Run one optimizer");
    std::string method = "gwo", warm_file, turbulence;
    std::optional<std::size_t> budget_evals;
    std::optional<double> budget_hours;
    run->add_option("--method", method, "ga | pso | gwo | bo | random")
        ->check(CLI::IsMember({"ga", "pso", "gwo", "bo", "random"}));
    run->add_option("--budget-evals", budget_evals, "Evaluation budget");
    run->add_option("--budget-hours", budget_hours, "Wall-time budget in hours");
    run->add_option("--warm-start", warm_file, "Gain file used as warm start (overrides the config)")
        ->check(CLI::ExistingFile);
    run->add_option("--turbulence", turbulence, "on | off (overrides the config)");

    // simulate
    auto* simulate = app.add_subcommand("simulate", "Fly one gain set and export logs");
    std::string gains_file, sim_turbulence;
    bool use_unseen = false, force_grid = false;
    simulate->add_option("--gains", gains_file, "Gain file")->required()->check(CLI::ExistingFile);
    simulate->add_flag("--unseen", use_unseen, "Fly the unseen scenario");
    simulate->add_flag("--grid", force_grid, "Compute the ground receiver grid");
    simulate->add_option("--turbulence", sim_turbulence, "on | off");

    // campaign
    auto* campaign = app.add_subcommand("campaign", "Every method x seed from the config");

    // report unseen
    auto* report = app.add_subcommand("report", "Reports");
    report->require_subcommand(1);
    auto* unseen = report->add_subcommand("unseen", "Baseline vs optimized on the unseen mission");
    std::string baseline_file, optimized_file;
    unseen->add_option("--baseline", baseline_file, "Baseline gain file")->required()->check(CLI::ExistingFile);
    unseen->add_option("--optimized", optimized_file, "Optimized gain file")->required()->check(CLI::ExistingFile);

    CLI11_PARSE(app, argc, argv);

    try {
        const h::fs::path out(g.out);
        h::RunConfig cfg = load(g);

        if (*table) {
            const auto ctx = qt::sim::make_context(cfg.scenario, g.workers);
            h::write_text(out / "aero_table.csv", h::aero_table_csv(*ctx.table));
            auto m = manifest("aero table", g, cfg);
            m["hover_rpm"] = ctx.hover_rpm;
            m["k_thrust"] = ctx.mixer.k_thrust;
            m["drag_factor"] = ctx.mixer.drag_factor;
            h::write_json(out / "manifest.json", m);
            std::cout << "hover " << ctx.hover_rpm << " RPM, table written to " << (out / "aero_table.csv") << "\n";
        } else if (*zn) {
            const auto ctx = qt::sim::make_context(cfg.scenario, g.workers);
            const auto r = h::tune_ziegler_nichols(ctx, h::default_zn_config(), g.workers);
            h::write_json(out / "gains_zn.json", h::zn_to_json(r));
            auto m = manifest("tune zn", g, cfg);
            h::write_json(out / "manifest.json", m);
            for (const auto& l : r.loops)
                std::cout << qt::control::kLoopNames[static_cast<std::size_t>(l.loop)] << ": "
                          << (l.fallback ? "no sustained oscillation, provisional gains kept"
                                         : "Ku " + h::fmt(l.search.ku) + ", Tu " + h::fmt(l.search.tu))
                          << "\n";
        } else if (*run) {
            if (!warm_file.empty()) cfg.warm_start = warm_file;
            if (const auto t = on_off(turbulence)) cfg.campaign.turbulence = t;
            if (budget_evals || budget_hours) {
                cfg.campaign.budget = {budget_evals.value_or(0), budget_hours.value_or(0.0) * 3600.0};
                cfg.campaign.budget.validate();
            }
            cfg.campaign.methods = {qt::optimize::method_from_string(method)};
            cfg.campaign.seeds = {cfg.optimizer.seed};
            const auto setup = h::prepare_training(cfg, g.workers);
            const auto res = h::run_campaign(cfg.campaign, setup, cfg.optimizer, out, g.workers, g.reproducible);
            auto m = manifest("tune run", g, cfg);
            add_setup(m, setup);
            h::write_json(out / "manifest.json", m);
            const auto& r = res.runs.front();
            if (!r.ok) throw std::runtime_error(r.error);
            std::cout << method << ": best J " << h::fmt(r.best_cost) << " after " << r.evaluations << " evaluations";
            if (res.warm_cost) std::cout << " (warm start J " << h::fmt(*res.warm_cost) << ")";
            std::cout << "\n";
        } else if (*simulate) {
            if (use_unseen && !cfg.unseen) throw h::ConfigError("--unseen needs an 'unseen' scenario in the config");
            // Weights calibrated on the training scenario carry over to the unseen one.
            const auto setup = cfg.calibrate && cfg.warm_start != "none" ? std::optional(h::prepare_training(cfg, g.workers))
                                                                         : std::nullopt;
            auto sc = use_unseen ? *cfg.unseen : cfg.scenario;
            if (setup) sc.weights = setup->ctx.scenario.weights;
            const auto ctx = qt::sim::make_context(sc, g.workers, setup ? setup->ctx.table : nullptr);
            qt::sim::RunOptions opt;
            opt.turbulence = on_off(sim_turbulence);
            opt.grid = force_grid || sc.grid_enabled;
            const auto res = qt::sim::run_mission(ctx, read_gains(gains_file), opt);
            h::write_text(out / "trajectory.csv", h::trajectory_csv(res.log));
            if (res.grid) {
                h::write_text(out / "grid.csv", h::grid_csv(*res.grid));
                h::write_text(out / "grid_series.csv", h::grid_series_csv(*res.grid, sc.dt));
            }
            h::json c = h::breakdown_to_json(res.cost, sc.weights);
            c["completed"] = res.log.completed;
            c["completion_time"] = res.log.completion_time;
            c["abort_reason"] = qt::sim::to_string(res.log.abort_reason);
            c["surrogate_clamped"] = res.diagnostics.surrogate_clamped;
            c["gimbal_clamps"] = res.diagnostics.gimbal_clamps;
            h::write_json(out / "cost.json", c);
            auto m = manifest("simulate", g, cfg);
            m["gains"] = h::gains_to_json(read_gains(gains_file));
            m["weights_used"] = h::weights_to_json(sc.weights);
            h::write_json(out / "manifest.json", m);
            std::cout << "J " << h::fmt(res.cost.total) << (res.log.completed ? ", completed at t = " + h::fmt(res.log.completion_time) + " s" : ", not completed")
                      << "\n";
        } else if (*campaign) {
            const auto setup = h::prepare_training(cfg, g.workers);
            const auto res = h::run_campaign(cfg.campaign, setup, cfg.optimizer, out, g.workers, g.reproducible);
            auto m = manifest("campaign", g, cfg);
            add_setup(m, setup);
            h::write_json(out / "manifest.json", m);
            if (res.warm_cost) std::cout << "warm start J " << h::fmt(*res.warm_cost) << "\n";
            for (const auto& s : res.methods)
                std::cout << qt::optimize::to_string(s.method) << ": best " << h::fmt(s.best_cost) << ", median "
                          << h::fmt(s.median_cost) << " over " << s.runs - s.failures << " run(s)\n";
        } else if (*unseen) {
            if (!cfg.unseen) throw h::ConfigError("report unseen needs an 'unseen' scenario in the config");
            const auto base = read_gains(baseline_file);
            const auto opt = read_gains(optimized_file);
            auto sc = *cfg.unseen;
            std::shared_ptr<const qt::aero::SurrogateTable> table;
            if (cfg.calibrate) {
                // Calibrate on the training mission with the baseline gains.
                h::RunConfig c2 = cfg;
                c2.warm_start = baseline_file;
                const auto setup = h::prepare_training(c2, g.workers);
                sc.weights = setup.ctx.scenario.weights;
                table = setup.ctx.table;
            }
            const auto ctx = qt::sim::make_context(sc, g.workers, table);
            const auto rep = h::report_unseen(base, opt, ctx);
            h::write_text(out / "cost_decomposition.csv", h::report_rows_csv(rep.cost_rows, "term"));
            h::write_text(out / "indicators.csv", h::report_rows_csv(rep.indicators, "indicator"));
            auto m = manifest("report unseen", g, cfg);
            m["baseline_gains"] = h::gains_to_json(base);
            m["optimized_gains"] = h::gains_to_json(opt);
            m["weights_used"] = h::weights_to_json(sc.weights);
            m["baseline_completed"] = rep.baseline_completed;
            m["optimized_completed"] = rep.optimized_completed;
            h::write_json(out / "manifest.json", m);
            for (const auto& r : rep.cost_rows)
                std::cout << r.label << ": " << h::fmt(r.baseline) << " -> " << h::fmt(r.optimized) << " ("
                          << h::fmt(r.change) << " %)\n";
            for (const auto& r : rep.indicators)
                std::cout << r.label << ": " << h::fmt(r.baseline) << " -> " << h::fmt(r.optimized) << " ("
                          << h::fmt(r.change) << ' ' << r.unit << ")\n";
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
