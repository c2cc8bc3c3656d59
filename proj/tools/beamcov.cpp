// beamcov: command-line driver for the analytic model and the simulator.
//
// Exit codes: 0 success, 1 comparison failure, 2 config error,
// 3 numerical non-convergence.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "beamcov/beamcov.hpp"

namespace {

using namespace beamcov;
using namespace beamcov::harness;

constexpr const char* kConfigEnv = "BEAMCOV_CONFIG";

struct Options {
    std::string config_path;
    std::string preset;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> drops;
    std::optional<unsigned> threads;
    std::string out;
    std::string format;
    std::string range_mode;

    // single-point overrides
    std::optional<double> beam_theta, beam_width, beam_gain, user_theta, user_d, lambda;
    std::uint64_t scene_index = 0;
};

json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("config file '" + path + "': " + e.what());
    }
}

/// Preset (if any), then the config file, then command-line flags.
ExperimentConfig load(const Options& o) {
    std::string path = o.config_path;
    if (path.empty())
        if (const char* env = std::getenv(kConfigEnv)) path = env;
    json file = path.empty() ? json::object() : read_json_file(path);

    json merged = o.preset.empty() ? json::object() : preset_json(o.preset);
    merged.merge_patch(file);
    json flags = json::object();
    if (o.seed) flags["sim"]["base_seed"] = *o.seed;
    if (o.drops) flags["sim"]["n_drops"] = *o.drops;
    if (o.threads) flags["sim"]["threads"] = *o.threads;
    if (!o.range_mode.empty()) flags["sim"]["range_mode"] = o.range_mode;
    if (!o.format.empty()) flags["outputs"]["format"] = o.format;
    if (!o.out.empty()) flags["outputs"]["path"] = o.out;
    if (o.lambda) flags["env"]["lambda"] = *o.lambda;
    merged.merge_patch(flags);
    ExperimentConfig cfg = parse_config(merged);

    if (o.beam_theta || o.beam_width || o.beam_gain) {
        BeamEntry b = cfg.beams.front();
        if (o.beam_theta) b.theta_deg = *o.beam_theta;
        if (o.beam_width) b.width_deg = *o.beam_width;
        if (o.beam_gain) b.gain_dbi = *o.beam_gain;
        cfg.beams = {b};
        to_beam(cfg.radio, b);
    }
    if (o.user_theta || o.user_d) {
        UserEntry u = cfg.users.front();
        if (o.user_theta) u.theta_deg = *o.user_theta;
        if (o.user_d) u.d_m = *o.user_d;
        if (!(u.d_m > 0.0)) throw ConfigError("user distance must be > 0");
        cfg.users = {u};
    }
    return cfg;
}

/// Keeps only the first beam, user and density.
ExperimentConfig single_point(ExperimentConfig cfg) {
    cfg.beams.resize(1);
    cfg.users.resize(1);
    cfg.env.lambdas.resize(1);
    return cfg;
}

template <typename Writer>
void emit(const ExperimentConfig& cfg, Writer&& write) {
    if (cfg.outputs.path.empty()) {
        write(std::cout);
        return;
    }
    std::ofstream out(cfg.outputs.path, std::ios::binary);
    if (!out) throw ConfigError("cannot write '" + cfg.outputs.path + "'");
    write(out);
}

template <typename Row>
void emit_rows(const ExperimentConfig& cfg, const std::vector<Row>& rows) {
    emit(cfg, [&](std::ostream& os) {
        if (cfg.outputs.format == "json")
            os << rows_to_json(std::span<const Row>(rows)).dump(2) << '\n';
        else
            write_csv(os, std::span<const Row>(rows));
    });
}

int run(const std::string& command, const Options& o) {
    ExperimentConfig cfg = load(o);
    if (command == "analytic") {
        emit_rows(cfg, run_points(single_point(cfg), {.analytic = true, .simulate = false}));
    } else if (command == "simulate") {
        emit_rows(cfg, run_points(single_point(cfg), {.analytic = false, .simulate = true}));
    } else if (command == "sweep") {
        if (cfg.experiment == "fig4")
            emit_rows(cfg, run_fig4(cfg));
        else
            emit_rows(cfg, run_points(cfg));
    } else if (command == "compare") {
        CompareReport report = compare(cfg);
        emit(cfg, [&](std::ostream& os) {
            if (cfg.outputs.format == "json")
                os << report_to_json(report).dump(2) << '\n';
            else
                write_report_csv(os, report);
        });
        std::size_t failed = 0;
        for (const auto& v : report.verdicts) failed += !v.pass;
        std::cerr << (failed == 0 ? "compare: all " : "compare: ") << (failed == 0 ? report.verdicts.size() : failed)
                  << (failed == 0 ? " rows pass\n" : " rows FAIL\n");
        return failed == 0 ? 0 : 1;
    } else if (command == "scene") {
        ExperimentConfig one = single_point(cfg);
        Scene scene = generate_scene(one.env.to_params(one.env.lambdas.front()), one.sim, o.scene_index);
        emit(cfg, [&](std::ostream& os) { dump_scene(os, scene.rects); });
    } else if (command == "config") {
        emit(cfg, [&](std::ostream& os) { os << to_json(cfg).dump(2) << '\n'; });
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Beam coverage probability under random rectangular blockage: analytic model and Monte Carlo"};
    app.require_subcommand(1);
    Options o;

    auto common = [&](CLI::App* sub) {
        sub->add_option("--config", o.config_path, "JSON experiment config (default: $BEAMCOV_CONFIG)");
        sub->add_option("--seed", o.seed, "base seed for scene generation");
        sub->add_option("--drops", o.drops, "Monte Carlo drops per point");
        sub->add_option("--threads", o.threads, "worker threads (0 = all cores)");
        sub->add_option("--out", o.out, "output path (default: stdout)");
        sub->add_option("--format", o.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
        sub->add_option("--range-mode", o.range_mode, "reflected range: paper (d0/sigma) or friis (d0/sqrt(sigma))")
            ->check(CLI::IsMember({"paper", "friis"}));
        sub->add_option("--lambda", o.lambda, "building density override, 1/m^2");
        sub->add_option("--preset", o.preset, "start from a figure preset: fig3 | fig4 | fig5 | fig6")
            ->check(CLI::IsMember(preset_names()));
    };
    auto point = [&](CLI::App* sub) {
        sub->add_option("--beam-theta", o.beam_theta, "beam orientation, deg");
        sub->add_option("--beam-width", o.beam_width, "beam width, deg");
        sub->add_option("--beam-gain", o.beam_gain, "beam gain, dBi (default: gain table)");
        sub->add_option("--user-theta", o.user_theta, "user angle, deg");
        sub->add_option("--user-d", o.user_d, "user distance, m");
    };

    auto* analytic = app.add_subcommand("analytic", "analytic coverage for one (beam, user, lambda) point");
    auto* simulate = app.add_subcommand("simulate", "Monte Carlo coverage for one point");
    auto* sweep = app.add_subcommand("sweep", "run a figure preset or a config sweep");
    auto* cmp = app.add_subcommand("compare", "check analytic vs Monte Carlo for every point of a config");
    auto* scene = app.add_subcommand("scene", "dump one generated scene (cx cy length width phi per line)");
    auto* config = app.add_subcommand("config", "print the resolved configuration");
    for (auto* sub : {analytic, simulate, sweep, cmp, scene, config}) common(sub);
    for (auto* sub : {analytic, simulate}) point(sub);
    scene->add_option("--index", o.scene_index, "drop index");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        return run(app.get_subcommands().front()->get_name(), o);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const QuadratureError& e) {
        std::cerr << "numerical error: " << e.what() << '\n';
        return 3;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    }
}
