#pragma once

#include "quadtune/harness/baseline.hpp"
#include "quadtune/harness/io.hpp"
#include "quadtune/optimize/mission_objective.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace quadtune::harness {

// ---- search bounds ----

/// Either absolute per-gain bounds or bounds relative to the warm start.
struct BoundsSpec {
    bool relative = true;
    control::GainVector lower, upper;  // absolute mode
    double low_factor = 0.5;           // relative mode: nonzero g -> [low g, high g]
    double high_factor = 2.0;
    double zero_fraction = 0.5;        // zero g -> [0, zero_fraction * Kp of the same loop]
    std::vector<control::Loop> frozen;
};

inline BoundsSpec bounds_from_json(const json& j)
{
    detail::check_keys(j, "bounds", {"mode", "lower", "upper", "low_factor", "high_factor", "zero_fraction", "frozen"});
    BoundsSpec b;
    const std::string mode = j.value("mode", std::string("relative"));
    if (mode != "relative" && mode != "absolute") throw ConfigError("bounds.mode: expected relative or absolute");
    b.relative = mode == "relative";
    if (!b.relative) {
        if (!j.contains("lower") || !j.contains("upper")) throw ConfigError("bounds: absolute mode needs lower and upper");
        b.lower = gains_from_json(j.at("lower"));
        b.upper = gains_from_json(j.at("upper"));
    }
    detail::get(j, "low_factor", b.low_factor);
    detail::get(j, "high_factor", b.high_factor);
    detail::get(j, "zero_fraction", b.zero_fraction);
    if (j.contains("frozen"))
        for (const auto& n : j.at("frozen")) b.frozen.push_back(control::loop_from_name(n.get<std::string>()));
    if (b.relative && !(b.low_factor >= 0.0 && b.high_factor >= b.low_factor && b.zero_fraction >= 0.0))
        throw ConfigError("bounds: need 0 <= low_factor <= high_factor and zero_fraction >= 0");
    return b;
}

inline json bounds_to_json(const BoundsSpec& b)
{
    json frozen = json::array();
    for (auto l : b.frozen) frozen.push_back(std::string(control::kLoopNames[static_cast<std::size_t>(l)]));
    if (b.relative)
        return {{"mode", "relative"}, {"low_factor", b.low_factor}, {"high_factor", b.high_factor},
                {"zero_fraction", b.zero_fraction}, {"frozen", frozen}};
    return {{"mode", "absolute"}, {"lower", gains_to_json(b.lower)}, {"upper", gains_to_json(b.upper)},
            {"frozen", frozen}};
}

/// Box around `warm`: each nonzero gain g in [low g, high g]; a zero gain in
/// [0, zero_fraction * Kp] of its loop.
inline std::pair<control::GainVector, control::GainVector> relative_bounds(const control::GainVector& warm, double low,
                                                                           double high, double zero_fraction)
{
    control::GainVector lo, hi;
    for (std::size_t i = 0; i < control::kLoopCount; ++i) {
        const auto& g = warm.loops[i];
        auto set = [&](double v, double& l, double& h) {
            l = v > 0.0 ? low * v : 0.0;
            h = v > 0.0 ? high * v : zero_fraction * g.kp;
        };
        set(g.kp, lo.loops[i].kp, hi.loops[i].kp);
        set(g.ki, lo.loops[i].ki, hi.loops[i].ki);
        set(g.kd, lo.loops[i].kd, hi.loops[i].kd);
    }
    return {lo, hi};
}

inline optimize::SearchSpace make_space(const BoundsSpec& b, const std::optional<control::GainVector>& warm)
{
    if (b.relative) {
        if (!warm) throw ConfigError("bounds: relative bounds need a warm start");
        const auto [lo, hi] = relative_bounds(*warm, b.low_factor, b.high_factor, b.zero_fraction);
        return optimize::gain_space(lo, hi, warm, b.frozen);
    }
    auto warm_in_box = warm;
    if (warm_in_box) {
        // A warm start outside an absolute box is clipped onto it.
        auto x = optimize::to_point(*warm_in_box);
        optimize::SearchSpace s{optimize::to_point(b.lower), optimize::to_point(b.upper), std::nullopt};
        s.clip(x);
        warm_in_box = optimize::to_gains(x);
    }
    return optimize::gain_space(b.lower, b.upper, warm_in_box, b.frozen);
}

// ---- run configuration ----

struct CampaignSpec {
    std::vector<optimize::Method> methods{optimize::Method::ga, optimize::Method::pso, optimize::Method::gwo,
                                          optimize::Method::bo, optimize::Method::random};
    std::vector<std::uint64_t> seeds{1};
    optimize::Budget budget{500, 1800.0};
    std::optional<bool> turbulence;  // overrides the scenario flag

    void validate() const
    {
        if (methods.empty()) throw ConfigError("campaign: method list is empty");
        if (seeds.empty()) throw ConfigError("campaign: need at least one seed");
        budget.validate();
    }
};

/// Everything a CLI run needs, resolved from one JSON file.
struct RunConfig {
    sim::Scenario scenario;
    std::optional<sim::Scenario> unseen;
    BoundsSpec bounds;
    std::string warm_start = "zn";  // "zn", "none", or a gains file path
    bool warm_start_in_search = true;  // false: baseline used for calibration only
    bool calibrate = true;
    double calibration_target = 30.0;
    CampaignSpec campaign;
    optimize::OptimizerConfig optimizer;
};

inline fs::path resolve(const fs::path& base, const std::string& p)
{
    const fs::path q(p);
    return q.is_absolute() ? q : base / q;
}

/// Inline object or a path (relative to the config file) to a JSON file.
inline json inline_or_file(const json& j, const fs::path& base)
{
    return j.is_string() ? read_json(resolve(base, j.get<std::string>())) : j;
}

inline RunConfig run_config_from_json(const json& j, const fs::path& base_dir)
{
    detail::check_keys(j, "config", {"scenario", "unseen", "bounds", "warm_start", "warm_start_in_search",
                                     "calibration", "campaign", "optimizer"});
    RunConfig c;
    if (j.contains("scenario")) c.scenario = scenario_from_json(inline_or_file(j.at("scenario"), base_dir));
    if (j.contains("unseen")) c.unseen = scenario_from_json(inline_or_file(j.at("unseen"), base_dir));
    if (j.contains("bounds")) c.bounds = bounds_from_json(inline_or_file(j.at("bounds"), base_dir));
    if (j.contains("warm_start")) {
        c.warm_start = j.at("warm_start").get<std::string>();
        if (c.warm_start != "zn" && c.warm_start != "none") c.warm_start = resolve(base_dir, c.warm_start).string();
    }
    detail::get(j, "warm_start_in_search", c.warm_start_in_search);
    if (j.contains("calibration")) {
        const json& k = j.at("calibration");
        detail::check_keys(k, "calibration", {"enabled", "target"});
        detail::get(k, "enabled", c.calibrate);
        detail::get(k, "target", c.calibration_target);
    }
    if (j.contains("campaign")) {
        const json& k = j.at("campaign");
        detail::check_keys(k, "campaign", {"methods", "seeds", "budget", "turbulence"});
        if (k.contains("methods")) {
            c.campaign.methods.clear();
            for (const auto& m : k.at("methods")) c.campaign.methods.push_back(optimize::method_from_string(m.get<std::string>()));
        }
        detail::get(k, "seeds", c.campaign.seeds);
        if (k.contains("budget")) {
            const json& b = k.at("budget");
            detail::check_keys(b, "campaign.budget", {"evaluations", "hours"});
            c.campaign.budget = {0, 0.0};
            detail::get(b, "evaluations", c.campaign.budget.max_evaluations);
            double hours = 0.0;
            detail::get(b, "hours", hours);
            c.campaign.budget.max_seconds = hours * 3600.0;
        }
        if (k.contains("turbulence")) c.campaign.turbulence = k.at("turbulence").get<bool>();
    }
    if (j.contains("optimizer")) optimizer_from_json(j.at("optimizer"), c.optimizer);
    c.campaign.validate();
    return c;
}

inline RunConfig load_run_config(const fs::path& path)
{
    return run_config_from_json(read_json(path), path.parent_path());
}

// ---- training setup: baseline, calibration, search space ----

struct TrainingSetup {
    sim::SimContext ctx;  // carries the calibrated weights
    std::optional<control::GainVector> warm;
    std::optional<ZieglerNicholsResult> zn;
    std::optional<cost::Calibration> calibration;
    std::optional<cost::CostBreakdown> warm_breakdown;  // under the final weights
    optimize::SearchSpace space;
};

inline json zn_to_json(const ZieglerNicholsResult& r)
{
    json loops = json::array();
    for (const auto& l : r.loops)
        loops.push_back({{"loop", std::string(control::kLoopNames[static_cast<std::size_t>(l.loop)])},
                         {"found", l.search.found},
                         {"ku", l.search.found ? json(l.search.ku) : json(nullptr)},
                         {"tu", l.search.found ? json(l.search.tu) : json(nullptr)},
                         {"fallback", l.fallback}});
    return {{"gains", gains_to_json(r.gains)}, {"ziegler_nichols", loops}};
}

/// Resolves the warm start, calibrates weights on the warm-start rollout
/// (no turbulence) and builds the search space.
inline TrainingSetup prepare_training(const RunConfig& cfg, unsigned workers,
                                      std::shared_ptr<const aero::SurrogateTable> table = nullptr)
{
    TrainingSetup t;
    t.ctx = sim::make_context(cfg.scenario, workers, std::move(table));
    if (cfg.warm_start == "zn") {
        t.zn = tune_ziegler_nichols(t.ctx, default_zn_config(), workers);
        t.warm = t.zn->gains;
    } else if (cfg.warm_start != "none") {
        t.warm = gains_from_json(read_json(cfg.warm_start));
    }
    if (cfg.calibrate) {
        if (!t.warm) throw ConfigError("calibration needs a warm start (baseline) gain set");
        sim::RunOptions opt;
        opt.turbulence = false;
        const auto base = sim::run_mission(t.ctx, *t.warm, opt);
        if (!base.log.completed)
            throw ConfigError("calibration: the baseline gains do not complete the training mission");
        t.calibration = cost::calibrate_weights(base.log, cfg.scenario.mission, cfg.scenario.weights,
                                                cfg.calibration_target);
        t.ctx.scenario.weights = t.calibration->weights;
    }
    if (t.warm) {
        sim::RunOptions opt;
        opt.turbulence = cfg.campaign.turbulence;
        opt.seed = cfg.scenario.seed;
        t.warm_breakdown = sim::run_mission(t.ctx, *t.warm, opt).cost;
    }
    t.space = make_space(cfg.bounds, t.warm);
    if (!cfg.warm_start_in_search) t.space.warm_start.reset();
    return t;
}

// ---- campaign ----

struct RunSummary {
    optimize::Method method;
    std::uint64_t seed = 0;
    bool ok = true;
    std::string error;
    double best_cost = 0.0;
    std::size_t evaluations = 0;
    double wall_seconds = 0.0;
    control::GainVector best_gains;
};

struct MethodSummary {
    optimize::Method method;
    std::size_t runs = 0;
    std::size_t failures = 0;
    double best_cost = 0.0;
    double mean_cost = 0.0;
    double median_cost = 0.0;
    std::size_t evaluations = 0;
    double wall_seconds = 0.0;
};

struct CampaignResult {
    std::vector<RunSummary> runs;
    std::vector<MethodSummary> methods;
    std::optional<double> warm_cost;
};

inline double median(std::vector<double> v)
{
    if (v.empty()) return std::nan("");
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

inline std::string summary_csv(const CampaignResult& r, bool reproducible)
{
    std::ostringstream o;
    o << "method,runs,failures,best_J,mean_J,median_J,warm_start_J,evals,wall_seconds,seconds_per_eval\n";
    for (const auto& m : r.methods) {
        const double wall = reproducible ? 0.0 : m.wall_seconds;
        o << optimize::to_string(m.method) << ',' << m.runs << ',' << m.failures << ',' << fmt(m.best_cost) << ','
          << fmt(m.mean_cost) << ',' << fmt(m.median_cost) << ',' << (r.warm_cost ? fmt(*r.warm_cost) : "") << ','
          << m.evaluations << ',' << fmt(wall) << ','
          << fmt(m.evaluations ? wall / static_cast<double>(m.evaluations) : 0.0) << '\n';
    }
    return o.str();
}

inline std::string runs_csv(const CampaignResult& r, bool reproducible)
{
    std::ostringstream o;
    o << "method,seed,status,best_J,evals,wall_seconds\n";
    for (const auto& s : r.runs)
        o << optimize::to_string(s.method) << ',' << s.seed << ',' << (s.ok ? "ok" : "failed") << ','
          << (s.ok ? fmt(s.best_cost) : "") << ',' << s.evaluations << ',' << fmt(reproducible ? 0.0 : s.wall_seconds)
          << '\n';
    return o.str();
}

/// Writes convergence.csv, evaluations.csv and best_gains.json for one run.
inline void write_run(const fs::path& dir, const optimize::OptimizationResult& r, bool reproducible)
{
    write_text(dir / "convergence.csv", convergence_csv(r.history, reproducible));
    write_text(dir / "evaluations.csv", evaluations_csv(r.records));
    json best = {{"J", r.best.cost}, {"seed", r.best.seed}, {"aborted", r.best.aborted},
                 {"gains", gains_to_json(optimize::to_gains(r.best.x))}};
    write_json(dir / "best_gains.json", best);
}

/// Runs every (method, seed) pair; a failing run is recorded and skipped.
/// With an empty `out_dir` nothing is written.
inline CampaignResult run_campaign(const CampaignSpec& spec, const TrainingSetup& setup,
                                   const optimize::OptimizerConfig& base_cfg, const fs::path& out_dir,
                                   unsigned workers, bool reproducible)
{
    spec.validate();
    CampaignResult res;
    if (setup.warm_breakdown && setup.space.warm_start) res.warm_cost = setup.warm_breakdown->total;
    const auto objective = optimize::mission_objective(setup.ctx, spec.turbulence);
    for (auto method : spec.methods) {
        MethodSummary ms;
        ms.method = method;
        std::vector<double> bests;
        for (auto seed : spec.seeds) {
            RunSummary rs;
            rs.method = method;
            rs.seed = seed;
            try {
                auto cfg = base_cfg;
                cfg.seed = seed;
                const auto r = optimize::run_optimizer(method, setup.space, spec.budget, objective, cfg, workers);
                rs.best_cost = r.best.cost;
                rs.evaluations = r.records.size();
                rs.wall_seconds = r.wall_seconds;
                rs.best_gains = optimize::to_gains(r.best.x);
                if (!out_dir.empty())
                    write_run(out_dir / optimize::to_string(method) / ("seed_" + std::to_string(seed)), r, reproducible);
                bests.push_back(rs.best_cost);
                ms.evaluations += rs.evaluations;
                ms.wall_seconds += rs.wall_seconds;
            } catch (const std::exception& e) {
                rs.ok = false;
                rs.error = e.what();
                ++ms.failures;
            }
            ++ms.runs;
            res.runs.push_back(rs);
        }
        ms.best_cost = bests.empty() ? std::nan("") : *std::min_element(bests.begin(), bests.end());
        ms.mean_cost = bests.empty() ? std::nan("")
                                     : std::accumulate(bests.begin(), bests.end(), 0.0) / static_cast<double>(bests.size());
        ms.median_cost = median(bests);
        res.methods.push_back(ms);
    }
    if (!out_dir.empty()) {
        write_text(out_dir / "summary.csv", summary_csv(res, reproducible));
        write_text(out_dir / "runs.csv", runs_csv(res, reproducible));
    }
    return res;
}

// ---- unseen-mission report ----

/// (baseline - optimized) / baseline in percent; 0 when both are 0.
inline double percent_change(double baseline, double optimized)
{
    if (baseline == optimized) return 0.0;
    return 100.0 * (baseline - optimized) / baseline;
}

struct ReportRow {
    std::string label;
    double baseline = 0.0;
    double optimized = 0.0;
    double change = 0.0;
    std::string unit;  // "%" for relative change, "dB" for a level difference (optimized - baseline)
};

struct UnseenReport {
    std::vector<ReportRow> cost_rows;
    std::vector<ReportRow> indicators;
    cost::CostBreakdown baseline, optimized;
    bool baseline_completed = false, optimized_completed = false;
};

struct IndicatorValues {
    double receiver_spl = 0.0;
    double source_swl = 0.0;
    double power = 0.0;
};

inline double time_mean(const std::vector<double>& v)
{
    return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

/// Flies both gain sets on the unseen scenario with the receiver grid on.
/// Cost rows are weighted terms (their sum plus C_nm is the total).
inline UnseenReport report_unseen(const control::GainVector& baseline, const control::GainVector& optimized,
                                  const sim::SimContext& unseen)
{
    auto fly = [&](const control::GainVector& g, IndicatorValues& ind) {
        sim::RunOptions opt;
        opt.grid = true;
        auto r = sim::run_mission(unseen, g, opt);
        ind.receiver_spl = time_mean(r.grid->active_mean_series());
        ind.source_swl = time_mean(r.log.swl);
        ind.power = time_mean(r.log.power);
        return r;
    };
    IndicatorValues ib, io;
    const auto rb = fly(baseline, ib);
    const auto ro = fly(optimized, io);

    UnseenReport rep;
    rep.baseline = rb.cost;
    rep.optimized = ro.cost;
    rep.baseline_completed = rb.log.completed;
    rep.optimized_completed = ro.log.completed;
    const auto& w = unseen.scenario.weights;
    const auto wb = cost::weighted_terms(rb.cost, w);
    const auto wo = cost::weighted_terms(ro.cost, w);
    auto row = [&](std::string label, double b, double o) {
        rep.cost_rows.push_back({std::move(label), b, o, percent_change(b, o), "%"});
    };
    auto term = [&](cost::Term t) { return static_cast<std::size_t>(t); };
    row("Total cost", rb.cost.total, ro.cost.total);
    row("Mission time cost", wb[term(cost::Term::time)], wo[term(cost::Term::time)]);
    row("Attitude oscillation cost", wb[term(cost::Term::attitude)], wo[term(cost::Term::attitude)]);
    row("Overshoot cost", wb[term(cost::Term::overshoot)], wo[term(cost::Term::overshoot)]);
    row("Power cost", wb[term(cost::Term::power)], wo[term(cost::Term::power)]);
    row("Noise proxy cost (SWL-based)", wb[term(cost::Term::noise)], wo[term(cost::Term::noise)]);
    row("Trajectory deviation cost", wb[term(cost::Term::distance)], wo[term(cost::Term::distance)]);
    row("Thrust variation cost", wb[term(cost::Term::thrust)], wo[term(cost::Term::thrust)]);
    row("Completion penalty", wb[term(cost::Term::completion)], wo[term(cost::Term::completion)]);
    row("No-movement penalty", rb.cost.no_movement, ro.cost.no_movement);

    rep.indicators.push_back({"Avg SPL at receivers [dB]", ib.receiver_spl, io.receiver_spl,
                              io.receiver_spl - ib.receiver_spl, "dB"});
    rep.indicators.push_back({"Avg source SWL [dB]", ib.source_swl, io.source_swl, io.source_swl - ib.source_swl, "dB"});
    rep.indicators.push_back({"Avg electrical power [W]", ib.power, io.power, percent_change(ib.power, io.power), "%"});
    return rep;
}

inline std::string report_rows_csv(const std::vector<ReportRow>& rows, const char* first_column)
{
    std::ostringstream o;
    o << first_column << ",baseline,optimized,change,change_unit\n";
    for (const auto& r : rows)
        o << '"' << r.label << "\"," << fmt(r.baseline) << ',' << fmt(r.optimized) << ',' << fmt(r.change) << ','
          << r.unit << '\n';
    return o.str();
}

} // namespace quadtune::harness
