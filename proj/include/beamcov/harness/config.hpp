// Experiment configuration: JSON parsing and serialization, unit
// conversion at the boundary, and the figure presets.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "beamcov/coverage_analytic.hpp"
#include "beamcov/scene_sim.hpp"

namespace beamcov::harness {

using json = nlohmann::json;

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct RadioBlock {
    double pt_dbm = 30.0;
    double pn_dbm = -85.0;
    double f_ghz = 30.0;
    double gu_dbi = 1.0;
    double gamma_db = 0.0;
    double sigma_db = 3.0;
    bool sigma_exact_half = false; ///< use sigma = 2 instead of 10^0.3
    std::map<double, double> gain_table_dbi{{10.0, 36.0}, {30.0, 12.0}}; ///< beam width (deg) -> gain (dBi)

    RadioParams to_params() const {
        RadioParams r = RadioParams::from_db(pt_dbm, gu_dbi, f_ghz * 1e9, pn_dbm, gamma_db, sigma_db);
        if (sigma_exact_half) r.sigma = 2.0;
        return r;
    }

    friend bool operator==(const RadioBlock&, const RadioBlock&) = default;
};

struct EnvBlock {
    std::vector<double> lambdas{2e-4};
    double length_min = 40.0;
    double length_max = 60.0;
    double width_min = 30.0;
    double width_max = 50.0;

    EnvParams to_params(double lambda) const {
        EnvParams env;
        env.lambda = lambda;
        env.length = LengthDist::uniform(length_min, length_max);
        env.width = LengthDist::uniform(width_min, width_max);
        return env;
    }

    friend bool operator==(const EnvBlock&, const EnvBlock&) = default;
};

struct BeamEntry {
    double theta_deg = 0.0;
    double width_deg = 10.0;
    std::optional<double> gain_dbi; ///< falls back to the radio gain table

    friend bool operator==(const BeamEntry&, const BeamEntry&) = default;
};

struct UserEntry {
    double theta_deg = 90.0;
    double d_m = 50.0;

    PolarPoint to_polar() const { return {deg_to_rad(theta_deg), d_m}; }

    friend bool operator==(const UserEntry&, const UserEntry&) = default;
};

/// Model-vs-simulation tolerances used by `compare`.
struct CompareBlock {
    double tol_direct = 0.02;
    double tol_reflected_narrow = 0.05; ///< reflected beams no wider than narrow_width_deg, users within narrow_distance_m
    double tol_reflected_wide = 0.08;   ///< every other reflected row
    double narrow_width_deg = 10.0;
    double narrow_distance_m = 100.0;

    friend bool operator==(const CompareBlock&, const CompareBlock&) = default;
};

struct OutputBlock {
    std::string path; ///< empty means stdout
    std::string format = "csv";

    friend bool operator==(const OutputBlock&, const OutputBlock&) = default;
};

struct ExperimentConfig {
    std::string experiment = "custom";
    RadioBlock radio;
    EnvBlock env;
    std::vector<BeamEntry> beams{{90.0, 10.0, std::nullopt}};
    std::vector<UserEntry> users{{90.0, 50.0}};
    SimConfig sim;
    QuadratureConfig quad;
    CompareBlock compare;
    OutputBlock outputs;

    friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

/// Resolves a beam entry to a BeamSpec; the gain comes from the entry or
/// from an exact width match in the gain table.
inline BeamSpec to_beam(const RadioBlock& radio, const BeamEntry& b) {
    double gain_dbi;
    if (b.gain_dbi) {
        gain_dbi = *b.gain_dbi;
    } else {
        auto it = std::find_if(radio.gain_table_dbi.begin(), radio.gain_table_dbi.end(),
                               [&](const auto& kv) { return std::fabs(kv.first - b.width_deg) < 1e-9; });
        if (it == radio.gain_table_dbi.end())
            throw ConfigError("no gain configured for beam width " + std::to_string(b.width_deg) + " deg");
        gain_dbi = it->second;
    }
    try {
        return BeamSpec(deg_to_rad(b.theta_deg), deg_to_rad(b.width_deg), db_to_linear(gain_dbi));
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
}

namespace detail {

inline const char* range_mode_name(RangeMode m) { return m == RangeMode::Paper ? "paper" : "friis"; }

inline const char* placement_name(PlacementPolicy p) {
    return p == PlacementPolicy::CountBlocked ? "count_blocked" : "reject_overlap";
}

/// Evenly spaced values from..to (inclusive) without accumulating rounding.
inline std::vector<double> expand_range(const json& j, std::string_view what) {
    double from = j.at("from").get<double>();
    double to = j.at("to").get<double>();
    double step = j.at("step").get<double>();
    if (!(step > 0.0) || to < from) throw ConfigError(std::string(what) + ": need step > 0 and to >= from");
    auto n = static_cast<std::size_t>(std::floor((to - from) / step + 1e-9)) + 1;
    std::vector<double> out;
    for (std::size_t i = 0; i < n; ++i) out.push_back(from + static_cast<double>(i) * step);
    return out;
}

inline std::vector<double> number_or_list_or_range(const json& j, std::string_view what) {
    if (j.is_number()) return {j.get<double>()};
    if (j.is_array()) return j.get<std::vector<double>>();
    if (j.is_object()) return expand_range(j, what);
    throw ConfigError(std::string(what) + ": expected a number, a list, or {from, to, step}");
}

template <typename T>
void read(const json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

} // namespace detail

inline ExperimentConfig parse_config(const json& j) {
    ExperimentConfig cfg;
    try {
        detail::read(j, "experiment", cfg.experiment);
        if (j.contains("radio")) {
            const json& r = j.at("radio");
            detail::read(r, "pt_dbm", cfg.radio.pt_dbm);
            detail::read(r, "pn_dbm", cfg.radio.pn_dbm);
            detail::read(r, "f_ghz", cfg.radio.f_ghz);
            detail::read(r, "gu_dbi", cfg.radio.gu_dbi);
            detail::read(r, "gamma_db", cfg.radio.gamma_db);
            detail::read(r, "sigma_db", cfg.radio.sigma_db);
            detail::read(r, "sigma_exact_half", cfg.radio.sigma_exact_half);
            if (r.contains("gain_table_dbi")) {
                cfg.radio.gain_table_dbi.clear();
                for (const auto& entry : r.at("gain_table_dbi"))
                    cfg.radio.gain_table_dbi[entry.at("width_deg").get<double>()] = entry.at("gain_dbi").get<double>();
            }
        }
        if (j.contains("env")) {
            const json& e = j.at("env");
            if (e.contains("lambda")) cfg.env.lambdas = detail::number_or_list_or_range(e.at("lambda"), "env.lambda");
            if (e.contains("length_m")) {
                auto b = e.at("length_m").get<std::vector<double>>();
                if (b.size() != 2) throw ConfigError("env.length_m must be [min, max]");
                cfg.env.length_min = b[0];
                cfg.env.length_max = b[1];
            }
            if (e.contains("width_m")) {
                auto b = e.at("width_m").get<std::vector<double>>();
                if (b.size() != 2) throw ConfigError("env.width_m must be [min, max]");
                cfg.env.width_min = b[0];
                cfg.env.width_max = b[1];
            }
        }
        if (j.contains("beams")) {
            const json& b = j.at("beams");
            cfg.beams.clear();
            if (b.is_object() && b.contains("tiling")) {
                const json& t = b.at("tiling");
                int count = t.at("count").get<int>();
                double width = t.at("width_deg").get<double>();
                double start = t.value("start_deg", 0.0);
                if (count < 1) throw ConfigError("beams.tiling.count must be >= 1");
                for (int i = 0; i < count; ++i) cfg.beams.push_back({start + width * i, width, std::nullopt});
            } else {
                for (const auto& e : b) {
                    BeamEntry be{e.at("theta_deg").get<double>(), e.at("width_deg").get<double>(), std::nullopt};
                    if (e.contains("gain_dbi")) be.gain_dbi = e.at("gain_dbi").get<double>();
                    cfg.beams.push_back(be);
                }
            }
        }
        if (j.contains("users")) {
            const json& u = j.at("users");
            cfg.users.clear();
            if (u.is_object()) {
                double theta = u.at("theta_deg").get<double>();
                for (double d : detail::number_or_list_or_range(u.at("d_m"), "users.d_m"))
                    cfg.users.push_back({theta, d});
            } else {
                for (const auto& e : u) cfg.users.push_back({e.at("theta_deg").get<double>(), e.at("d_m").get<double>()});
            }
        }
        if (j.contains("sim")) {
            const json& s = j.at("sim");
            detail::read(s, "area_side", cfg.sim.area_side);
            detail::read(s, "n_drops", cfg.sim.n_drops);
            detail::read(s, "base_seed", cfg.sim.base_seed);
            detail::read(s, "threads", cfg.sim.threads);
            if (s.contains("range_mode")) {
                auto m = s.at("range_mode").get<std::string>();
                if (m == "paper")
                    cfg.sim.range_mode = RangeMode::Paper;
                else if (m == "friis")
                    cfg.sim.range_mode = RangeMode::Friis;
                else
                    throw ConfigError("sim.range_mode must be paper or friis");
            }
            if (s.contains("placement")) {
                auto p = s.at("placement").get<std::string>();
                if (p == "count_blocked")
                    cfg.sim.placement = PlacementPolicy::CountBlocked;
                else if (p == "reject_overlap")
                    cfg.sim.placement = PlacementPolicy::RejectOverlap;
                else
                    throw ConfigError("sim.placement must be count_blocked or reject_overlap");
            }
        }
        if (j.contains("quad")) {
            const json& q = j.at("quad");
            detail::read(q, "initial_alpha", cfg.quad.initial_alpha);
            detail::read(q, "initial_r", cfg.quad.initial_r);
            detail::read(q, "max_refinements", cfg.quad.max_refinements);
            detail::read(q, "rel_tol", cfg.quad.rel_tol);
        }
        if (j.contains("compare")) {
            const json& c = j.at("compare");
            detail::read(c, "tol_direct", cfg.compare.tol_direct);
            detail::read(c, "tol_reflected_narrow", cfg.compare.tol_reflected_narrow);
            detail::read(c, "tol_reflected_wide", cfg.compare.tol_reflected_wide);
            detail::read(c, "narrow_width_deg", cfg.compare.narrow_width_deg);
            detail::read(c, "narrow_distance_m", cfg.compare.narrow_distance_m);
        }
        if (j.contains("outputs")) {
            const json& o = j.at("outputs");
            detail::read(o, "path", cfg.outputs.path);
            detail::read(o, "format", cfg.outputs.format);
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }

    if (cfg.outputs.format != "csv" && cfg.outputs.format != "json")
        throw ConfigError("outputs.format must be csv or json");
    if (cfg.beams.empty()) throw ConfigError("beams: at least one beam is required");
    if (cfg.users.empty()) throw ConfigError("users: at least one user is required");
    if (cfg.env.lambdas.empty()) throw ConfigError("env.lambda: at least one density is required");
    if (cfg.quad.initial_alpha < 1 || cfg.quad.initial_r < 1 || !(cfg.quad.rel_tol > 0.0))
        throw ConfigError("quad: grid sizes must be >= 1 and rel_tol > 0");
    try {
        cfg.radio.to_params().validate();
        cfg.sim.validate();
        for (double lambda : cfg.env.lambdas) cfg.env.to_params(lambda).validate();
        for (const auto& u : cfg.users)
            if (!(u.d_m > 0.0)) throw ConfigError("users: distance must be > 0");
        for (const auto& b : cfg.beams) to_beam(cfg.radio, b);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    return cfg;
}

inline json to_json(const ExperimentConfig& cfg) {
    json gains = json::array();
    for (const auto& [w, g] : cfg.radio.gain_table_dbi) gains.push_back({{"width_deg", w}, {"gain_dbi", g}});
    json beams = json::array();
    for (const auto& b : cfg.beams) {
        json e{{"theta_deg", b.theta_deg}, {"width_deg", b.width_deg}};
        if (b.gain_dbi) e["gain_dbi"] = *b.gain_dbi;
        beams.push_back(e);
    }
    json users = json::array();
    for (const auto& u : cfg.users) users.push_back({{"theta_deg", u.theta_deg}, {"d_m", u.d_m}});
    return {
        {"experiment", cfg.experiment},
        {"radio",
         {{"pt_dbm", cfg.radio.pt_dbm},
          {"pn_dbm", cfg.radio.pn_dbm},
          {"f_ghz", cfg.radio.f_ghz},
          {"gu_dbi", cfg.radio.gu_dbi},
          {"gamma_db", cfg.radio.gamma_db},
          {"sigma_db", cfg.radio.sigma_db},
          {"sigma_exact_half", cfg.radio.sigma_exact_half},
          {"gain_table_dbi", gains}}},
        {"env",
         {{"lambda", cfg.env.lambdas},
          {"length_m", {cfg.env.length_min, cfg.env.length_max}},
          {"width_m", {cfg.env.width_min, cfg.env.width_max}}}},
        {"beams", beams},
        {"users", users},
        {"sim",
         {{"area_side", cfg.sim.area_side},
          {"n_drops", cfg.sim.n_drops},
          {"base_seed", cfg.sim.base_seed},
          {"threads", cfg.sim.threads},
          {"range_mode", detail::range_mode_name(cfg.sim.range_mode)},
          {"placement", detail::placement_name(cfg.sim.placement)}}},
        {"quad",
         {{"initial_alpha", cfg.quad.initial_alpha},
          {"initial_r", cfg.quad.initial_r},
          {"max_refinements", cfg.quad.max_refinements},
          {"rel_tol", cfg.quad.rel_tol}}},
        {"compare",
         {{"tol_direct", cfg.compare.tol_direct},
          {"tol_reflected_narrow", cfg.compare.tol_reflected_narrow},
          {"tol_reflected_wide", cfg.compare.tol_reflected_wide},
          {"narrow_width_deg", cfg.compare.narrow_width_deg},
          {"narrow_distance_m", cfg.compare.narrow_distance_m}}},
        {"outputs", {{"path", cfg.outputs.path}, {"format", cfg.outputs.format}}},
    };
}

inline const std::vector<std::string>& preset_names() {
    static const std::vector<std::string> names{"fig3", "fig4", "fig5", "fig6"};
    return names;
}

/// Figure presets. Every field can be overridden by merging a JSON patch.
inline json preset_json(std::string_view name) {
    json beams_fig56 = json::array({{{"theta_deg", 90.0}, {"width_deg", 10.0}},
                                    {{"theta_deg", 95.0}, {"width_deg", 10.0}},
                                    {{"theta_deg", 105.0}, {"width_deg", 30.0}}});
    json tiling = {{"tiling", {{"count", 36}, {"width_deg", 10.0}, {"start_deg", 0.0}}}};
    json distance_sweep = {{"theta_deg", 90.0}, {"d_m", {{"from", 25.0}, {"to", 200.0}, {"step", 25.0}}}};
    json user_50 = json::array({{{"theta_deg", 90.0}, {"d_m", 50.0}}});
    json sim = {{"n_drops", 10000}, {"base_seed", 42}};
    if (name == "fig3")
        return {{"experiment", "fig3"}, {"beams", tiling}, {"users", user_50}, {"env", {{"lambda", 2e-4}}}, {"sim", sim}};
    if (name == "fig4")
        return {{"experiment", "fig4"}, {"beams", tiling}, {"users", distance_sweep}, {"env", {{"lambda", 2e-4}}},
                {"sim", sim}};
    if (name == "fig5")
        return {{"experiment", "fig5"}, {"beams", beams_fig56}, {"users", distance_sweep},
                {"env", {{"lambda", 2e-4}}}, {"sim", sim}};
    if (name == "fig6")
        return {{"experiment", "fig6"},
                {"beams", beams_fig56},
                {"users", user_50},
                {"env", {{"lambda", {{"from", 0.0}, {"to", 1e-3}, {"step", 5e-5}}}}},
                {"sim", sim}};
    throw ConfigError("unknown preset '" + std::string(name) + "'");
}

inline ExperimentConfig make_preset(std::string_view name, const json& overrides = json::object()) {
    json j = preset_json(name);
    if (!overrides.is_null() && !overrides.empty()) j.merge_patch(overrides);
    return parse_config(j);
}

} // namespace beamcov::harness
