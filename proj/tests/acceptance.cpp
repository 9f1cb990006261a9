// Acceptance runner: one PASS/FAIL line per criterion, exit status 0 only if all pass.
// Usage: acceptance [criterion numbers...]

#include "quadtune/dynamics/integrator.hpp"
#include "quadtune/harness/campaign.hpp"

#include "fixture.hpp"
#include "grid_oracle.hpp"
#include "iso_oracle.hpp"
#include "random_log.hpp"

#include <fftw3.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#ifndef QUADTUNE_CLI
#error "QUADTUNE_CLI must name the command-line binary"
#endif

using namespace quadtune;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string num(double v, int digits = 4)
{
    std::ostringstream o;
    o.precision(digits);
    o << v;
    return o.str();
}

double seconds_since(std::chrono::steady_clock::time_point t0)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// 1
Outcome rk4_order()
{
    const auto t0 = std::chrono::steady_clock::now();
    using S = std::array<double, 1>;
    const auto f = [](double, const S& y) { return S{-y[0]}; };
    auto error = [&](double h) {
        S x{1.0};
        const auto n = static_cast<int>(std::lround(2.0 / h));
        for (int k = 0; k < n; ++k) x = dynamics::rk4(f, k * h, x, h);
        return std::abs(x[0] - std::exp(-2.0));
    };
    const double order = std::log2(error(0.1) / error(0.05));
    const double secs = seconds_since(t0);
    return {order >= 3.7 && order <= 4.3 && secs < 1.0, "order " + num(order) + ", " + num(secs, 2) + " s"};
}

// 2
Outcome hover_equilibrium()
{
    dynamics::VehicleParams p;
    dynamics::VehicleState s0;
    s0.position = {1.0, -2.0, 10.0};
    dynamics::BodyInputs in;
    in.thrust_total = p.mass * p.gravity;
    auto s = s0;
    for (std::size_t k = 0; k < 1250; ++k) s = dynamics::rk4_step(s, in, p, 0.008, k);
    const double drift = std::hypot(s.position[0] - s0.position[0], s.position[1] - s0.position[1],
                                    s.position[2] - s0.position[2]);
    return {drift < 1e-6, "drift " + num(drift) + " m after 10 s"};
}

// 3
Outcome mixer_round_trip()
{
    control::MixerParams m;
    m.k_thrust = 3.1e-4;
    m.drag_factor = 4.0e-6;
    const double t_max = m.k_thrust * m.omega_max * m.omega_max;
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> t(1e-3 * t_max, t_max);
    double worst = 0;
    for (int k = 0; k < 10000; ++k) {
        const std::array<double, 4> thrust{t(rng), t(rng), t(rng), t(rng)};
        const auto rpm = control::mix(control::thrusts_to_controls(thrust, m), m);
        for (std::size_t i = 0; i < 4; ++i) {
            const double w = rpm_to_rad_s(rpm[i]);
            worst = std::max(worst, std::abs(m.k_thrust * w * w - thrust[i]) / thrust[i]);
        }
    }
    return {worst <= 1e-9, "worst relative error " + num(worst) + " over 10000 cases"};
}

// 4
Outcome bemt_consistency()
{
    const auto g = aero::default_rotor_geometry();
    const double rho = 1.225;
    double worst_residual = 0;
    bool all_converged = true;
    for (double rpm : aero::linspace(800.0, 4000.0, 5))
        for (double v : aero::linspace(0.0, 15.0, 4)) {
            const auto s = aero::bemt_solve(g, rpm, v, rho);
            all_converged &= s.converged;
            worst_residual = std::max(worst_residual, s.residual);
        }
    // 100 x 80 table over the 0-4000 RPM, 1-20 m/s sweep; queries drawn from the same box.
    const auto table = aero::build_surrogate(g, aero::linspace(0.0, 4000.0, 100), aero::linspace(1.0, 20.0, 80), rho,
                                             default_workers());
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> uw(0.0, 4000.0), uv(1.0, 20.0);
    double smape_t = 0, smape_p = 0;
    std::size_t n = 0;
    auto term = [](double a, double b) { return a == b ? 0.0 : 2.0 * std::abs(a - b) / (std::abs(a) + std::abs(b)); };
    while (n < 1000) {
        const double w = uw(rng), v = uv(rng);
        const auto s = aero::bemt_solve(g, w, v, rho).performance;
        const auto e = aero::surrogate_eval(table, w, v);
        smape_t += term(s.thrust, e.thrust);
        smape_p += term(s.power, e.power);
        ++n;
    }
    smape_t *= 100.0 / n;
    smape_p *= 100.0 / n;
    return {all_converged && worst_residual <= 1e-6 && smape_t < 6.0 && smape_p < 6.0,
            "max residual " + num(worst_residual) + " on 20 points, SMAPE thrust " + num(smape_t) + " %, power " +
                num(smape_p) + " %"};
}

// 5
Outcome dryden_psd_match()
{
    turbulence::DrydenParams p;
    p.airspeed = 10.0;
    p.length_u = 20.0;
    p.sigma_u = 1.5;
    p.seed = 5;
    const double dt = 0.16;
    const std::size_t n = std::size_t{1} << 17, seg = 4096, hop = seg / 2;
    const auto gusts = turbulence::generate_gusts(p, dt, n);

    std::vector<double> window(seg);
    double wss = 0;
    for (std::size_t i = 0; i < seg; ++i) {
        window[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * i / seg);
        wss += window[i] * window[i];
    }
    std::vector<double> buf(seg), psd(seg / 2 + 1, 0.0);
    auto* spec = fftw_alloc_complex(seg / 2 + 1);
    const fftw_plan plan = fftw_plan_dft_r2c_1d(static_cast<int>(seg), buf.data(), spec, FFTW_ESTIMATE);
    std::size_t segments = 0;
    for (std::size_t start = 0; start + seg <= n; start += hop, ++segments) {
        double mean = 0;
        for (std::size_t i = 0; i < seg; ++i) mean += gusts[start + i].u;
        mean /= seg;
        for (std::size_t i = 0; i < seg; ++i) buf[i] = (gusts[start + i].u - mean) * window[i];
        fftw_execute(plan);
        for (std::size_t k = 0; k < psd.size(); ++k) psd[k] += spec[k][0] * spec[k][0] + spec[k][1] * spec[k][1];
    }
    fftw_destroy_plan(plan);
    fftw_free(spec);
    // One-sided density in Hz, then in rad/s.
    const double fs = 1.0 / dt;
    for (std::size_t k = 0; k < psd.size(); ++k) {
        psd[k] *= (k == 0 || k == seg / 2 ? 1.0 : 2.0) / (fs * wss * static_cast<double>(segments));
        psd[k] /= 2.0 * std::numbers::pi;
    }

    const double w_lo = 0.1 * p.airspeed / p.length_u, w_hi = 10.0 * p.airspeed / p.length_u;
    const int bands = 10;
    double worst = 0;
    for (int b = 0; b < bands; ++b) {
        const double lo = w_lo * std::pow(w_hi / w_lo, static_cast<double>(b) / bands);
        const double hi = w_lo * std::pow(w_hi / w_lo, static_cast<double>(b + 1) / bands);
        double est = 0, model = 0;
        int count = 0;
        for (std::size_t k = 1; k < psd.size(); ++k) {
            const double w = 2.0 * std::numbers::pi * static_cast<double>(k) * fs / seg;
            if (w < lo || w >= hi) continue;
            est += psd[k];
            model += turbulence::dryden_psd(turbulence::Axis::u, w / p.airspeed, p) / p.airspeed;
            ++count;
        }
        if (count == 0) return {false, "empty band " + std::to_string(b)};
        worst = std::max(worst, std::abs(est / model - 1.0));
    }
    return {worst <= 0.25, "worst band deviation " + num(100 * worst, 3) + " % over [" + num(w_lo) + ", " + num(w_hi) +
                               "] rad/s, " + std::to_string(segments) + " segments"};
}

// 6
Outcome iso_absorption()
{
    double worst = 0;
    int points = 0;
    for (double f : {125.0, 1000.0, 4000.0, 8000.0})
        for (double t : {273.15, 293.15, 308.15})
            for (double h : {0.3, 0.7}) {
                acoustics::AtmosphereConditions c;
                c.temperature = t;
                c.relative_humidity = h;
                const double a = acoustics::absorption_coeff(f, c);
                const double o = oracle::iso9613_alpha(f, t, h);
                worst = std::max(worst, std::abs(a - o) / o);
                ++points;
            }
    return {worst <= 1e-9 && points == 24, "worst relative error " + num(worst) + " at " + std::to_string(points) + " points"};
}

// 7
Outcome acoustic_identities()
{
    using namespace acoustics;
    const auto centers = third_octave_centers();
    ThirdOctaveSpectrum two{{centers[10], centers[11]}, {60.0, 60.0}};
    const double sum = broadband(two);
    const double zero = spherical_spreading(1.0 / std::sqrt(4.0 * std::numbers::pi));

    const auto m = default_emission_model();
    Emitter e(m);
    GridConfig cfg;
    cfg.n = 8;
    cfg.cell_size = 3.0;
    cfg.radius = std::numeric_limits<double>::infinity();
    AtmosphereConditions a;
    GroundGrid g(cfg, e, a);
    const auto s = oracle::hovering_source();
    grid_step(g, s, 0);
    double worst = 0;
    for (std::size_t i = 0; i < 8; ++i)
        for (std::size_t j = 0; j < 8; ++j)
            worst = std::max(worst, std::abs(g.cell_mean(i, j) - oracle::exhaustive_cell(m, s, g.centroid(i, j), a)));
    return {std::abs(sum - 63.0103) <= 1e-6 && std::abs(zero) < 1e-12 && worst < 1e-9,
            "2 x 60 dB -> " + num(sum, 9) + " dB, spreading at zero point " + num(zero) + " dB, grid max |diff| " +
                num(worst) + " dB"};
}

// 8
Outcome cost_identity()
{
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> uw(0.0, 5.0);
    const auto m = testing_support::two_leg_mission();
    double worst = 0;
    bool completed_ok = true;
    for (int k = 0; k < 1000; ++k) {
        cost::CostWeights w;
        for (double& x : w.w) x = uw(rng);
        const auto log = testing_support::random_log(rng, m, 50 + k % 200, k % 2 == 0);
        const auto b = cost::compute_terms(log, m, w);
        double s = b.no_movement;
        for (double t : cost::weighted_terms(b, w)) s += t;
        worst = std::max(worst, std::abs(b.total - s) / std::abs(s));
        if (log.completed) completed_ok &= b[cost::Term::completion] == 0.0;
    }
    auto still = testing_support::random_log(rng, m, 100, false);
    for (auto& p : still.position) p = m.start;
    const cost::CostWeights w;
    const bool nm = cost::compute_terms(still, m, w).no_movement == w.no_movement_penalty;
    return {worst <= 1e-12 && completed_ok && nm,
            "worst relative gap " + num(worst) + ", C_c = 0 on completed logs: " + (completed_ok ? "yes" : "no") +
                ", C_nm = P_nm when stationary: " + (nm ? "yes" : "no")};
}

// 9
Outcome optimizer_sanity()
{
    using namespace optimize;
    const auto t0 = std::chrono::steady_clock::now();
    const auto space = uniform_box(15, -5.0, 5.0);
    const Objective sphere = [](const Point& x, std::uint64_t) {
        double s = 0;
        for (double v : x) s += v * v;
        return Evaluation{s, std::nullopt, false};
    };
    bool ok = true;
    std::string detail;
    for (Method m : {Method::ga, Method::pso, Method::gwo, Method::bo, Method::random}) {
        OptimizerConfig cfg;
        cfg.seed = 1;
        const auto r = run_optimizer(m, space, Budget{6000, 0.0}, sphere, cfg, default_workers());
        bool monotone = true;
        for (std::size_t i = 1; i < r.history.size(); ++i)
            monotone &= r.history[i].incumbent_cost <= r.history[i - 1].incumbent_cost;
        const double limit = m == Method::random ? 1.0 : 1e-2;
        ok &= monotone && r.best.cost <= limit;
        detail += to_string(m) + " " + num(r.best.cost, 3) + (monotone ? "" : " (non-monotone)") + ", ";
    }
    const double secs = seconds_since(t0);
    ok &= secs < 120.0;
    return {ok, detail + num(secs, 3) + " s"};
}

// 10
Outcome tuning_analog()
{
    using namespace optimize;
    const auto& cfg = testing_support::bounded_config();
    const unsigned workers = default_workers();
    const auto setup = harness::prepare_training(cfg, workers);
    const fs::path out = fs::current_path() / "acceptance_tc2";
    fs::remove_all(out);
    const auto res = harness::run_campaign(cfg.campaign, setup, cfg.optimizer, out, workers, false);
    if (!res.warm_cost) return {false, "no warm-start cost"};
    double median_gwo = 0, median_random = 0;
    bool ok = true;
    std::string detail = "warm J " + num(*res.warm_cost) + "; median";
    for (const auto& m : res.methods) {
        detail += " " + to_string(m.method) + " " + num(m.median_cost);
        if (m.failures > 0) ok = false;
        if (m.method == Method::ga || m.method == Method::pso || m.method == Method::gwo)
            ok &= m.median_cost <= *res.warm_cost;
        if (m.method == Method::gwo) median_gwo = m.median_cost;
        if (m.method == Method::random) median_random = m.median_cost;
    }
    ok &= median_gwo <= median_random;
    return {ok, detail + "; outputs in " + out.string()};
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

/// Relative path -> contents for every regular file under `dir`.
std::map<std::string, std::string> tree(const fs::path& dir)
{
    std::map<std::string, std::string> files;
    for (const auto& e : fs::recursive_directory_iterator(dir))
        if (e.is_regular_file()) files[fs::relative(e.path(), dir).string()] = slurp(e.path());
    return files;
}

int cli(const std::string& args)
{
    const std::string cmd = std::string(QUADTUNE_CLI) + " " + args + " > /dev/null";
    return std::system(cmd.c_str());
}

// 11
Outcome determinism()
{
    const fs::path root = fs::temp_directory_path() / "quadtune_acceptance_determinism";
    fs::remove_all(root);
    const std::string config = testing_support::config_path("test_case_3.json").string();
    for (const char* run : {"a", "b"}) {
        const fs::path d = root / run;
        const std::string common = "--config " + config + " --seed 7 --workers 2 --reproducible --out ";
        int rc = cli(common + (d / "zn").string() + " tune zn");
        rc |= cli(common + (d / "gwo").string() + " tune run --method gwo --budget-evals 60");
        rc |= cli(common + (d / "bo").string() + " tune run --method bo --budget-evals 20");
        const std::string zn = (d / "zn" / "gains_zn.json").string();
        const std::string best = (d / "gwo" / "gwo" / "seed_7" / "best_gains.json").string();
        rc |= cli(common + (d / "sim").string() + " simulate --unseen --gains " + zn);
        rc |= cli(common + (d / "report").string() + " report unseen --baseline " + zn + " --optimized " + best);
        if (rc != 0) return {false, "CLI run failed"};
    }
    const auto a = tree(root / "a"), b = tree(root / "b");
    std::size_t differing = 0;
    for (const auto& [name, content] : a) {
        const auto it = b.find(name);
        if (it == b.end() || it->second != content) ++differing;
    }
    const bool ok = a.size() == b.size() && differing == 0 && a.size() >= 10;
    return {ok, std::to_string(a.size()) + " files compared, " + std::to_string(differing) + " differ"};
}

// 12
Outcome one_step_contract()
{
    using namespace optimize;
    const auto& setup = testing_support::training_setup();
    const auto& space = setup.space;
    Rng rng(12);
    std::size_t mismatches = 0, clip_errors = 0;
    for (int k = 0; k < 100; ++k) {
        Point a = space.sample(rng);
        const bool out_of_box = k % 4 == 0;
        if (out_of_box) a[k % a.size()] = space.upper[k % a.size()] * 3.0 + 1.0;
        const auto step = one_step_env(a, space, setup.ctx, 100 + k);
        Point clipped = a;
        space.clip(clipped);
        const double j = evaluate(setup.ctx, to_gains(clipped), 100 + k).cost;
        if (step.reward != -j) ++mismatches;
        if (step.clipped != out_of_box || step.record.x != clipped || !step.done) ++clip_errors;
    }
    return {mismatches == 0 && clip_errors == 0,
            "100 actions, " + std::to_string(mismatches) + " reward mismatches, " + std::to_string(clip_errors) +
                " clipping errors"};
}

} // namespace

int main(int argc, char** argv)
{
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"RK4 convergence order", rk4_order},
        {"hover equilibrium", hover_equilibrium},
        {"mixer round trip", mixer_round_trip},
        {"BEMT consistency and surrogate accuracy", bemt_consistency},
        {"Dryden PSD match", dryden_psd_match},
        {"ISO absorption oracle", iso_absorption},
        {"acoustic identities", acoustic_identities},
        {"cost identity", cost_identity},
        {"optimizer sanity on sphere", optimizer_sanity},
        {"desk-scale tuning analog", tuning_analog},
        {"determinism", determinism},
        {"one-step environment contract", one_step_contract},
    };
    std::set<std::size_t> only;
    for (int i = 1; i < argc; ++i) only.insert(static_cast<std::size_t>(std::atoi(argv[i])));

    bool all = true;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        if (!only.empty() && !only.count(i + 1)) continue;
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        all &= o.pass;
        std::cout << (o.pass ? "PASS" : "FAIL") << " [" << i + 1 << "] " << criteria[i].first << ": " << o.detail
                  << " (" << num(seconds_since(t0), 3) << " s)" << std::endl;
    }
    return all ? EXIT_SUCCESS : EXIT_FAILURE;
}
