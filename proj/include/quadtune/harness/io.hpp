#pragma once

#include "quadtune/control/pid.hpp"
#include "quadtune/harness/missions.hpp"
#include "quadtune/optimize/runner.hpp"
#include "quadtune/sim/simulator.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <initializer_list>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace quadtune::harness {

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

/// Raised for malformed or inconsistent configuration files.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline json read_json(const fs::path& path)
{
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open " + path.string());
    try {
        return json::parse(in, nullptr, true, true);
    } catch (const json::exception& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
}

inline void write_text(const fs::path& path, const std::string& text)
{
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
}

inline void write_json(const fs::path& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

/// Shortest round-trip decimal form, so CSV output is exact and reproducible.
inline std::string fmt(double v)
{
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace detail {

/// Rejects keys outside `allowed` so typos in config files fail loudly.
inline void check_keys(const json& j, std::string_view where, std::initializer_list<std::string_view> allowed)
{
    if (!j.is_object()) throw ConfigError(std::string(where) + ": expected an object");
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool ok = false;
        for (auto a : allowed) ok = ok || it.key() == a;
        if (!ok) throw ConfigError(std::string(where) + ": unknown key '" + it.key() + "'");
    }
}

template <class T>
void get(const json& j, const char* key, T& out)
{
    if (!j.contains(key)) return;
    try {
        out = j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("key '") + key + "': " + e.what());
    }
}

inline void get_vec3(const json& j, const char* key, sim::Vec3& out)
{
    if (!j.contains(key)) return;
    const auto v = j.at(key).get<std::vector<double>>();
    if (v.size() != 3) throw ConfigError(std::string("key '") + key + "': expected 3 numbers");
    out = {v[0], v[1], v[2]};
}

inline json vec3(const sim::Vec3& v) { return json::array({v[0], v[1], v[2]}); }

} // namespace detail

// ---- gains ----

inline json gains_to_json(const control::GainVector& g)
{
    json j = json::object();
    for (std::size_t i = 0; i < control::kLoopCount; ++i)
        j[std::string(control::kLoopNames[i])] = {{"kp", g.loops[i].kp}, {"ki", g.loops[i].ki}, {"kd", g.loops[i].kd}};
    return j;
}

/// Reads a gain file. Accepts either the five loop objects at the top level or
/// under "gains"; other top-level keys (notes, provenance) are ignored.
inline control::GainVector gains_from_json(const json& root)
{
    const json& j = root.contains("gains") ? root.at("gains") : root;
    control::GainVector g;
    for (std::size_t i = 0; i < control::kLoopCount; ++i) {
        const std::string name(control::kLoopNames[i]);
        if (!j.contains(name)) throw ConfigError("gains: missing loop '" + name + "'");
        const json& t = j.at(name);
        detail::check_keys(t, name, {"kp", "ki", "kd"});
        detail::get(t, "kp", g.loops[i].kp);
        detail::get(t, "ki", g.loops[i].ki);
        detail::get(t, "kd", g.loops[i].kd);
    }
    try {
        g.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    return g;
}

// ---- mission ----

inline json mission_to_json(const sim::Mission& m)
{
    json wps = json::array();
    for (const auto& w : m.waypoints) wps.push_back(detail::vec3(w));
    return {{"start", detail::vec3(m.start)}, {"waypoints", wps}, {"yaw", m.yaw}, {"speed_hints", m.speed_hints},
            {"max_time", m.max_time}};
}

inline CompositeSpec composite_from_json(const json& j)
{
    detail::check_keys(j, "composite", {"menu", "count", "start", "max_time", "altitude_min", "altitude_max",
                                        "return_radius", "seed"});
    CompositeSpec s;
    if (j.contains("menu")) {
        s.menu.clear();
        for (const auto& m : j.at("menu")) s.menu.push_back(segment_from_string(m.get<std::string>()));
    }
    detail::get(j, "count", s.count);
    detail::get_vec3(j, "start", s.start);
    detail::get(j, "max_time", s.max_time);
    detail::get(j, "altitude_min", s.altitude_min);
    detail::get(j, "altitude_max", s.altitude_max);
    detail::get(j, "return_radius", s.return_radius);
    detail::get(j, "seed", s.seed);
    return s;
}

/// Explicit waypoints, or {"composite": {...}} to generate them.
inline sim::Mission mission_from_json(const json& j)
{
    if (j.contains("composite")) {
        detail::check_keys(j, "mission", {"composite"});
        return build_composite_mission(composite_from_json(j.at("composite")));
    }
    detail::check_keys(j, "mission", {"start", "waypoints", "yaw", "speed_hints", "max_time"});
    sim::Mission m;
    detail::get_vec3(j, "start", m.start);
    if (j.contains("waypoints"))
        for (const auto& w : j.at("waypoints")) {
            const auto v = w.get<std::vector<double>>();
            if (v.size() != 3) throw ConfigError("mission: waypoint needs 3 coordinates");
            m.waypoints.push_back({v[0], v[1], v[2]});
        }
    detail::get(j, "yaw", m.yaw);
    detail::get(j, "speed_hints", m.speed_hints);
    detail::get(j, "max_time", m.max_time);
    return m;
}

// ---- scenario ----

inline json weights_to_json(const cost::CostWeights& w)
{
    json terms = json::object();
    for (std::size_t i = 0; i < cost::kTermCount; ++i) terms[std::string(cost::kTermNames[i])] = w.w[i];
    return {{"w", terms},
            {"gamma_d", w.gamma_d},
            {"completion_penalty", w.completion_penalty},
            {"no_movement_penalty", w.no_movement_penalty},
            {"epsilon", w.epsilon},
            {"noise_order", w.noise_order},
            {"noise_reference_db", w.noise_reference_db},
            {"waypoint_threshold", w.waypoint_threshold},
            {"thrust_term", w.thrust_term},
            {"power_as_energy", w.power_as_energy}};
}

inline void weights_from_json(const json& j, cost::CostWeights& w)
{
    detail::check_keys(j, "weights", {"w", "gamma_d", "completion_penalty", "no_movement_penalty", "epsilon",
                                      "noise_order", "noise_reference_db", "waypoint_threshold", "thrust_term",
                                      "power_as_energy"});
    if (j.contains("w")) {
        const json& t = j.at("w");
        if (!t.is_object()) throw ConfigError("weights.w: expected an object keyed by term name");
        for (auto it = t.begin(); it != t.end(); ++it) {
            std::size_t i = 0;
            while (i < cost::kTermCount && cost::kTermNames[i] != it.key()) ++i;
            if (i == cost::kTermCount) throw ConfigError("weights.w: unknown term '" + it.key() + "'");
            w.w[i] = it.value().get<double>();
        }
    }
    detail::get(j, "gamma_d", w.gamma_d);
    detail::get(j, "completion_penalty", w.completion_penalty);
    detail::get(j, "no_movement_penalty", w.no_movement_penalty);
    detail::get(j, "epsilon", w.epsilon);
    detail::get(j, "noise_order", w.noise_order);
    detail::get(j, "noise_reference_db", w.noise_reference_db);
    detail::get(j, "waypoint_threshold", w.waypoint_threshold);
    detail::get(j, "thrust_term", w.thrust_term);
    detail::get(j, "power_as_energy", w.power_as_energy);
}

inline json directivity_to_json(const acoustics::DirectivityPattern& d)
{
    return {{"theta", d.theta}, {"intensity", d.intensity}};
}

inline json emission_to_json(const acoustics::EmissionModel& e)
{
    json j = {{"mode", e.mode == acoustics::EmissionMode::parametric ? "parametric" : "polynomial"},
              {"centers", e.centers},
              {"reference_spectrum", e.reference_spectrum},
              {"omega_ref_rpm", e.omega_ref_rpm},
              {"rpm_exponent", e.rpm_exponent},
              {"single_rotor_offset_db", e.single_rotor_offset_db},
              {"silence_floor_db", e.silence_floor_db},
              {"directivity", directivity_to_json(e.directivity)}};
    if (e.mode == acoustics::EmissionMode::polynomial)
        j["polynomial"] = {{"zeta_ref", e.polynomial.zeta_ref}, {"coefficients", e.polynomial.coefficients}};
    return j;
}

/// Overrides fields of `e`; omitted fields keep the default model.
inline void emission_from_json(const json& j, acoustics::EmissionModel& e)
{
    detail::check_keys(j, "emission", {"mode", "centers", "reference_spectrum", "omega_ref_rpm", "rpm_exponent",
                                       "single_rotor_offset_db", "silence_floor_db", "directivity", "polynomial"});
    if (j.contains("mode")) {
        const auto m = j.at("mode").get<std::string>();
        if (m == "parametric") e.mode = acoustics::EmissionMode::parametric;
        else if (m == "polynomial") e.mode = acoustics::EmissionMode::polynomial;
        else throw ConfigError("emission.mode: expected parametric or polynomial");
    }
    detail::get(j, "centers", e.centers);
    detail::get(j, "reference_spectrum", e.reference_spectrum);
    detail::get(j, "omega_ref_rpm", e.omega_ref_rpm);
    detail::get(j, "rpm_exponent", e.rpm_exponent);
    detail::get(j, "single_rotor_offset_db", e.single_rotor_offset_db);
    detail::get(j, "silence_floor_db", e.silence_floor_db);
    if (j.contains("directivity")) {
        const json& d = j.at("directivity");
        detail::check_keys(d, "emission.directivity", {"theta", "intensity"});
        e.directivity = {};
        detail::get(d, "theta", e.directivity.theta);
        detail::get(d, "intensity", e.directivity.intensity);
    }
    if (j.contains("polynomial")) {
        const json& p = j.at("polynomial");
        detail::check_keys(p, "emission.polynomial", {"zeta_ref", "coefficients"});
        detail::get(p, "zeta_ref", e.polynomial.zeta_ref);
        detail::get(p, "coefficients", e.polynomial.coefficients);
    }
}

inline json scenario_to_json(const sim::Scenario& s)
{
    const auto& d = s.turbulence.dryden;
    const auto& g = s.grid;
    const auto& a = s.atmosphere;
    const auto& v = s.vehicle;
    const auto& r = s.rotor;
    return {
        {"mission", mission_to_json(s.mission)},
        {"turbulence",
         {{"enabled", s.turbulence.enabled},
          {"scale", s.turbulence.scale},
          {"per_rotor", s.turbulence.per_rotor},
          {"dryden",
           {{"sigma_u", d.sigma_u}, {"sigma_v", d.sigma_v}, {"sigma_w", d.sigma_w}, {"length_u", d.length_u},
            {"length_v", d.length_v}, {"length_w", d.length_w}, {"airspeed", d.airspeed}}}}},
        {"grid",
         {{"enabled", s.grid_enabled}, {"n", g.n}, {"cell_size", g.cell_size}, {"center_x", g.center_x},
          {"center_y", g.center_y}, {"radius", std::isinf(g.radius) ? json("inf") : json(g.radius)},
          {"floor_db", g.floor_db}, {"min_distance", g.min_distance}, {"record_history", g.record_history}}},
        {"atmosphere",
         {{"temperature", a.temperature}, {"reference_temperature", a.reference_temperature},
          {"relative_pressure", a.relative_pressure}, {"relative_humidity", a.relative_humidity},
          {"ambient_pressure", a.ambient_pressure}}},
        {"emission", emission_to_json(s.emission)},
        {"weights", weights_to_json(s.weights)},
        {"abort",
         {{"enabled", s.abort.enabled}, {"divergence_radius", s.abort.divergence_radius},
          {"grace_period", s.abort.grace_period}, {"movement_threshold", s.abort.movement_threshold},
          {"first_waypoint_budget", s.abort.first_waypoint_budget}}},
        {"vehicle",
         {{"mass", v.mass}, {"inertia", detail::vec3(v.inertia)}, {"arm_length", v.arm_length},
          {"rotor_inertia", v.rotor_inertia}, {"drag", detail::vec3(v.drag)},
          {"rotational_damping", detail::vec3(v.rotational_damping)}, {"rotor_drag", v.rotor_drag},
          {"gravity", v.gravity}}},
        {"rotor",
         {{"radius", r.radius}, {"hub_radius", r.hub_radius}, {"blade_count", r.blade_count}, {"chord", r.chord},
          {"twist", r.twist},
          {"polar",
           {{"lift_slope", r.polar.lift_slope}, {"cl_max", r.polar.cl_max}, {"cd0", r.polar.cd0},
            {"cd2", r.polar.cd2}, {"alpha", r.polar.alpha}, {"cl", r.polar.cl}, {"cd", r.polar.cd}}}}},
        {"aero_table",
         {{"omega_max_rpm", s.aero_table.omega_max_rpm}, {"omega_points", s.aero_table.omega_points},
          {"v_max", s.aero_table.v_max}, {"v_points", s.aero_table.v_points}}},
        {"limits",
         {{"max_tilt", s.limits.max_tilt}, {"max_horizontal_speed", s.limits.max_horizontal_speed},
          {"max_vertical_speed", s.limits.max_vertical_speed}, {"max_vertical_accel", s.limits.max_vertical_accel},
          {"tilt_cosine_floor", s.limits.tilt_cosine_floor}}},
        {"max_rpm", s.max_rpm},
        {"fit_mixer_constants", s.fit_mixer_constants},
        {"rho", s.rho},
        {"dt", s.dt},
        {"seed", s.seed}};
}

/// Scenario from JSON; every section is optional and overrides the defaults.
inline sim::Scenario scenario_from_json(const json& j)
{
    using detail::get;
    detail::check_keys(j, "scenario", {"mission", "turbulence", "grid", "atmosphere", "emission", "weights", "abort",
                                       "vehicle", "rotor", "aero_table", "limits", "max_rpm", "fit_mixer_constants",
                                       "rho", "dt", "seed"});
    sim::Scenario s;
    if (j.contains("mission")) s.mission = mission_from_json(j.at("mission"));
    if (j.contains("turbulence")) {
        const json& t = j.at("turbulence");
        detail::check_keys(t, "turbulence", {"enabled", "scale", "per_rotor", "dryden"});
        get(t, "enabled", s.turbulence.enabled);
        get(t, "scale", s.turbulence.scale);
        get(t, "per_rotor", s.turbulence.per_rotor);
        if (t.contains("dryden")) {
            const json& d = t.at("dryden");
            auto& p = s.turbulence.dryden;
            detail::check_keys(d, "dryden",
                               {"sigma_u", "sigma_v", "sigma_w", "length_u", "length_v", "length_w", "airspeed"});
            get(d, "sigma_u", p.sigma_u);
            get(d, "sigma_v", p.sigma_v);
            get(d, "sigma_w", p.sigma_w);
            get(d, "length_u", p.length_u);
            get(d, "length_v", p.length_v);
            get(d, "length_w", p.length_w);
            get(d, "airspeed", p.airspeed);
        }
    }
    if (j.contains("grid")) {
        const json& g = j.at("grid");
        detail::check_keys(g, "grid", {"enabled", "n", "cell_size", "center_x", "center_y", "radius", "floor_db",
                                       "min_distance", "record_history"});
        get(g, "enabled", s.grid_enabled);
        get(g, "n", s.grid.n);
        get(g, "cell_size", s.grid.cell_size);
        get(g, "center_x", s.grid.center_x);
        get(g, "center_y", s.grid.center_y);
        if (g.contains("radius")) {
            const json& r = g.at("radius");
            s.grid.radius = r.is_string() && r.get<std::string>() == "inf" ? std::numeric_limits<double>::infinity()
                                                                           : r.get<double>();
        }
        get(g, "floor_db", s.grid.floor_db);
        get(g, "min_distance", s.grid.min_distance);
        get(g, "record_history", s.grid.record_history);
    }
    if (j.contains("atmosphere")) {
        const json& a = j.at("atmosphere");
        detail::check_keys(a, "atmosphere", {"temperature", "reference_temperature", "relative_pressure",
                                             "relative_humidity", "ambient_pressure"});
        get(a, "temperature", s.atmosphere.temperature);
        get(a, "reference_temperature", s.atmosphere.reference_temperature);
        get(a, "relative_pressure", s.atmosphere.relative_pressure);
        get(a, "relative_humidity", s.atmosphere.relative_humidity);
        get(a, "ambient_pressure", s.atmosphere.ambient_pressure);
    }
    if (j.contains("emission")) emission_from_json(j.at("emission"), s.emission);
    if (j.contains("weights")) weights_from_json(j.at("weights"), s.weights);
    if (j.contains("abort")) {
        const json& a = j.at("abort");
        detail::check_keys(a, "abort", {"enabled", "divergence_radius", "grace_period", "movement_threshold",
                                        "first_waypoint_budget"});
        get(a, "enabled", s.abort.enabled);
        get(a, "divergence_radius", s.abort.divergence_radius);
        get(a, "grace_period", s.abort.grace_period);
        get(a, "movement_threshold", s.abort.movement_threshold);
        get(a, "first_waypoint_budget", s.abort.first_waypoint_budget);
    }
    if (j.contains("vehicle")) {
        const json& v = j.at("vehicle");
        detail::check_keys(v, "vehicle", {"mass", "inertia", "arm_length", "rotor_inertia", "drag",
                                          "rotational_damping", "rotor_drag", "gravity"});
        get(v, "mass", s.vehicle.mass);
        detail::get_vec3(v, "inertia", s.vehicle.inertia);
        get(v, "arm_length", s.vehicle.arm_length);
        get(v, "rotor_inertia", s.vehicle.rotor_inertia);
        detail::get_vec3(v, "drag", s.vehicle.drag);
        detail::get_vec3(v, "rotational_damping", s.vehicle.rotational_damping);
        get(v, "rotor_drag", s.vehicle.rotor_drag);
        get(v, "gravity", s.vehicle.gravity);
    }
    if (j.contains("rotor")) {
        const json& r = j.at("rotor");
        detail::check_keys(r, "rotor", {"radius", "hub_radius", "blade_count", "chord", "twist", "polar"});
        get(r, "radius", s.rotor.radius);
        get(r, "hub_radius", s.rotor.hub_radius);
        get(r, "blade_count", s.rotor.blade_count);
        get(r, "chord", s.rotor.chord);
        get(r, "twist", s.rotor.twist);
        if (r.contains("polar")) {
            const json& p = r.at("polar");
            detail::check_keys(p, "rotor.polar", {"lift_slope", "cl_max", "cd0", "cd2", "alpha", "cl", "cd"});
            get(p, "lift_slope", s.rotor.polar.lift_slope);
            get(p, "cl_max", s.rotor.polar.cl_max);
            get(p, "cd0", s.rotor.polar.cd0);
            get(p, "cd2", s.rotor.polar.cd2);
            get(p, "alpha", s.rotor.polar.alpha);
            get(p, "cl", s.rotor.polar.cl);
            get(p, "cd", s.rotor.polar.cd);
        }
    }
    if (j.contains("aero_table")) {
        const json& a = j.at("aero_table");
        detail::check_keys(a, "aero_table", {"omega_max_rpm", "omega_points", "v_max", "v_points"});
        get(a, "omega_max_rpm", s.aero_table.omega_max_rpm);
        get(a, "omega_points", s.aero_table.omega_points);
        get(a, "v_max", s.aero_table.v_max);
        get(a, "v_points", s.aero_table.v_points);
    }
    if (j.contains("limits")) {
        const json& l = j.at("limits");
        detail::check_keys(l, "limits", {"max_tilt", "max_horizontal_speed", "max_vertical_speed",
                                         "max_vertical_accel", "tilt_cosine_floor"});
        get(l, "max_tilt", s.limits.max_tilt);
        get(l, "max_horizontal_speed", s.limits.max_horizontal_speed);
        get(l, "max_vertical_speed", s.limits.max_vertical_speed);
        get(l, "max_vertical_accel", s.limits.max_vertical_accel);
        get(l, "tilt_cosine_floor", s.limits.tilt_cosine_floor);
    }
    get(j, "max_rpm", s.max_rpm);
    get(j, "fit_mixer_constants", s.fit_mixer_constants);
    get(j, "rho", s.rho);
    get(j, "dt", s.dt);
    get(j, "seed", s.seed);
    try {
        s.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("scenario: ") + e.what());
    }
    return s;
}

// ---- optimizer settings ----

inline json optimizer_to_json(const optimize::OptimizerConfig& c)
{
    json ga = {{"population", c.ga.population},     {"crossover_rate", c.ga.crossover_rate},
               {"mutation_rate", c.ga.mutation_rate}, {"mutation_scale", c.ga.mutation_scale},
               {"mutation_decay", c.ga.mutation_decay}, {"elitism", c.ga.elitism}};
    ga["lambda"] = c.ga.lambda ? json(*c.ga.lambda) : json("uniform");
    return {{"ga", ga},
            {"pso",
             {{"swarm", c.pso.swarm}, {"chi", c.pso.chi}, {"c1", c.pso.c1}, {"c2", c.pso.c2},
              {"velocity_clamp", c.pso.velocity_clamp}}},
            {"gwo", {{"pack", c.gwo.pack}, {"max_iters", c.gwo_max_iters}}},
            {"bo",
             {{"initial_points", c.bo.initial_points}, {"candidate_pool", c.bo.candidate_pool},
              {"max_model_points", c.bo.max_model_points}, {"noise", c.bo.noise},
              {"length_scale_factor", c.bo.length_scale_factor}, {"local_fraction", c.bo.local_fraction},
              {"xi", c.bo.xi}}},
            {"random",
             {{"batch", c.random.batch}, {"local_fraction", c.random.local_fraction},
              {"initial_step", c.random.initial_step}, {"min_step", c.random.min_step},
              {"max_step", c.random.max_step}, {"adapt", c.random.adapt}}}};
}

inline void optimizer_from_json(const json& j, optimize::OptimizerConfig& c)
{
    using detail::get;
    detail::check_keys(j, "optimizer", {"ga", "pso", "gwo", "bo", "random"});
    if (j.contains("ga")) {
        const json& g = j.at("ga");
        detail::check_keys(g, "optimizer.ga", {"population", "crossover_rate", "mutation_rate", "mutation_scale",
                                               "mutation_decay", "elitism", "lambda"});
        get(g, "population", c.ga.population);
        get(g, "crossover_rate", c.ga.crossover_rate);
        get(g, "mutation_rate", c.ga.mutation_rate);
        get(g, "mutation_scale", c.ga.mutation_scale);
        get(g, "mutation_decay", c.ga.mutation_decay);
        get(g, "elitism", c.ga.elitism);
        if (g.contains("lambda") && g.at("lambda").is_number()) c.ga.lambda = g.at("lambda").get<double>();
    }
    if (j.contains("pso")) {
        const json& p = j.at("pso");
        detail::check_keys(p, "optimizer.pso", {"swarm", "chi", "c1", "c2", "velocity_clamp"});
        get(p, "swarm", c.pso.swarm);
        get(p, "chi", c.pso.chi);
        get(p, "c1", c.pso.c1);
        get(p, "c2", c.pso.c2);
        get(p, "velocity_clamp", c.pso.velocity_clamp);
    }
    if (j.contains("gwo")) {
        const json& g = j.at("gwo");
        detail::check_keys(g, "optimizer.gwo", {"pack", "max_iters"});
        get(g, "pack", c.gwo.pack);
        get(g, "max_iters", c.gwo_max_iters);
    }
    if (j.contains("bo")) {
        const json& b = j.at("bo");
        detail::check_keys(b, "optimizer.bo", {"initial_points", "candidate_pool", "max_model_points", "noise",
                                               "length_scale_factor", "local_fraction", "xi"});
        get(b, "initial_points", c.bo.initial_points);
        get(b, "candidate_pool", c.bo.candidate_pool);
        get(b, "max_model_points", c.bo.max_model_points);
        get(b, "noise", c.bo.noise);
        get(b, "length_scale_factor", c.bo.length_scale_factor);
        get(b, "local_fraction", c.bo.local_fraction);
        get(b, "xi", c.bo.xi);
    }
    if (j.contains("random")) {
        const json& r = j.at("random");
        detail::check_keys(r, "optimizer.random",
                           {"batch", "local_fraction", "initial_step", "min_step", "max_step", "adapt"});
        get(r, "batch", c.random.batch);
        get(r, "local_fraction", c.random.local_fraction);
        get(r, "initial_step", c.random.initial_step);
        get(r, "min_step", c.random.min_step);
        get(r, "max_step", c.random.max_step);
        get(r, "adapt", c.random.adapt);
    }
    try {
        c.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
}

// ---- CSV writers ----

inline std::string aero_table_csv(const aero::SurrogateTable& t)
{
    std::ostringstream o;
    o << "omega_rpm,v_inf,thrust,torque,power,ct,cq,cp\n";
    for (std::size_t i = 0; i < t.rows(); ++i)
        for (std::size_t j = 0; j < t.cols(); ++j) {
            o << fmt(t.omega_rpm[i]) << ',' << fmt(t.v_inf[j]);
            for (std::size_t q = 0; q < aero::kQuantityCount; ++q) o << ',' << fmt(t.values[q][t.index(i, j)]);
            o << '\n';
        }
    return o.str();
}

inline std::string trajectory_csv(const sim::TrajectoryLog& log)
{
    std::ostringstream o;
    o << "t,x,y,z,vx,vy,vz,roll,pitch,yaw,p,q,r,rpm1,rpm2,rpm3,rpm4,u1,thrust_total,power,swl,target\n";
    for (std::size_t k = 0; k < log.size(); ++k) {
        o << fmt(log.time[k]);
        for (const auto* v : {&log.position[k], &log.velocity[k], &log.attitude[k], &log.rates[k]})
            for (double c : *v) o << ',' << fmt(c);
        for (double w : log.rpm[k]) o << ',' << fmt(w);
        o << ',' << fmt(log.thrust_command[k]) << ',' << fmt(log.thrust_total[k]) << ',' << fmt(log.power[k]) << ','
          << (k < log.swl.size() ? fmt(log.swl[k]) : "") << ',' << log.target[k] << '\n';
    }
    return o.str();
}

inline std::string grid_csv(const acoustics::GroundGrid& g)
{
    std::ostringstream o;
    o << "i,j,x,y,mean_db,max_db\n";
    const std::size_t n = g.config().n;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            const auto c = g.centroid(i, j);
            o << i << ',' << j << ',' << fmt(c[0]) << ',' << fmt(c[1]) << ',' << fmt(g.cell_mean(i, j)) << ','
              << fmt(g.cell_max(i, j)) << '\n';
        }
    return o.str();
}

inline std::string grid_series_csv(const acoustics::GroundGrid& g, double dt)
{
    std::ostringstream o;
    o << "t,active_mean_db\n";
    const auto& s = g.active_mean_series();
    for (std::size_t k = 0; k < s.size(); ++k) o << fmt(static_cast<double>(k + 1) * dt) << ',' << fmt(s[k]) << '\n';
    return o.str();
}

/// Convergence history; `reproducible` writes 0 for the wall-clock column.
inline std::string convergence_csv(const std::vector<optimize::HistoryRow>& h, bool reproducible)
{
    std::ostringstream o;
    o << "eval_index,wall_seconds,candidate_J,incumbent_J\n";
    for (const auto& r : h)
        o << r.eval_index << ',' << fmt(reproducible ? 0.0 : r.wall_seconds) << ',' << fmt(r.candidate_cost) << ','
          << fmt(r.incumbent_cost) << '\n';
    return o.str();
}

/// Every evaluated candidate: seed, abort flag, J, weighted-term inputs and gains.
inline std::string evaluations_csv(const std::vector<optimize::EvalRecord>& recs)
{
    std::ostringstream o;
    o << "eval_index,seed,aborted,J";
    for (auto n : cost::kTermNames) o << ',' << n;
    o << ",C_nm";
    for (auto l : control::kLoopNames) o << ',' << l << "_kp," << l << "_ki," << l << "_kd";
    o << '\n';
    for (std::size_t i = 0; i < recs.size(); ++i) {
        const auto& r = recs[i];
        o << i << ',' << r.seed << ',' << (r.aborted ? 1 : 0) << ',' << fmt(r.cost);
        for (std::size_t t = 0; t < cost::kTermCount; ++t) o << ',' << (r.breakdown ? fmt(r.breakdown->c[t]) : "");
        o << ',' << (r.breakdown ? fmt(r.breakdown->no_movement) : "");
        for (double x : r.x) o << ',' << fmt(x);
        o << '\n';
    }
    return o.str();
}

inline json breakdown_to_json(const cost::CostBreakdown& b, const cost::CostWeights& w)
{
    json terms = json::object(), weighted = json::object();
    const auto wt = cost::weighted_terms(b, w);
    for (std::size_t i = 0; i < cost::kTermCount; ++i) {
        terms[std::string(cost::kTermNames[i])] = b.c[i];
        weighted[std::string(cost::kTermNames[i])] = wt[i];
    }
    return {{"terms", terms}, {"weighted", weighted}, {"C_nm", b.no_movement}, {"J", b.total}};
}

} // namespace quadtune::harness
