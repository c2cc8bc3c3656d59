// Sweep runners, result tables, and the model-vs-simulation comparison.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "beamcov/harness/config.hpp"

namespace beamcov::harness {

struct ResultRow {
    std::string experiment;
    double beam_theta_deg = 0.0;
    double beam_width_deg = 0.0;
    double user_theta_deg = 0.0;
    double user_d_m = 0.0;
    double lambda = 0.0;
    std::optional<CoverageBreakdown> analytic;
    std::optional<MCEstimate> mc;

    std::optional<double> abs_gap() const {
        if (!analytic || !mc) return std::nullopt;
        return std::fabs(analytic->p_total - mc->p_hat);
    }
};

/// One distance point of the cell-coverage experiment.
struct CellRow {
    std::string experiment;
    double user_theta_deg = 0.0;
    double user_d_m = 0.0;
    double lambda = 0.0;
    std::size_t n_beams = 0;
    CellEstimate mc;
    double los_analytic = 0.0; ///< exp(-(beta d + p)), the direct-only limit for a full tiling

    double gap() const { return mc.with_reflections.p_hat - mc.direct_only.p_hat; }
};

struct RunOptions {
    bool analytic = true;
    bool simulate = true;
};

/// Every (lambda, user, beam) point of the config, in that nesting order.
/// MC drops are shared by all beams of one (lambda, user) point.
inline std::vector<ResultRow> run_points(const ExperimentConfig& cfg, RunOptions opts = {}) {
    const RadioParams radio = cfg.radio.to_params();
    std::vector<BeamSpec> beams;
    for (const auto& b : cfg.beams) beams.push_back(to_beam(cfg.radio, b));

    std::vector<ResultRow> rows;
    for (double lambda : cfg.env.lambdas) {
        const EnvParams env = cfg.env.to_params(lambda);
        for (const auto& u : cfg.users) {
            const PolarPoint user = u.to_polar();
            const std::size_t first = rows.size();
            for (const auto& b : cfg.beams)
                rows.push_back({cfg.experiment, b.theta_deg, b.width_deg, u.theta_deg, u.d_m, lambda, {}, {}});
            if (opts.analytic) {
                QuadratureConfig quad = cfg.quad;
                quad.threads = 1;
                parallel_for(beams.size(), cfg.sim.threads, [&](std::size_t k) {
                    rows[first + k].analytic = total_coverage(radio, beams[k], env, user, quad, cfg.sim.range_mode);
                });
            }
            if (opts.simulate) {
                auto estimates = mc_coverage_beams(env, radio, beams, user, cfg.sim);
                for (std::size_t k = 0; k < beams.size(); ++k) rows[first + k].mc = estimates[k];
            }
        }
    }
    return rows;
}

inline std::vector<ResultRow> run_fig3(const ExperimentConfig& cfg) { return run_points(cfg); }
inline std::vector<ResultRow> run_fig5(const ExperimentConfig& cfg) { return run_points(cfg); }
inline std::vector<ResultRow> run_fig6(const ExperimentConfig& cfg) { return run_points(cfg); }

inline std::vector<CellRow> run_fig4(const ExperimentConfig& cfg) {
    const RadioParams radio = cfg.radio.to_params();
    std::vector<BeamSpec> beams;
    for (const auto& b : cfg.beams) beams.push_back(to_beam(cfg.radio, b));
    std::vector<CellRow> rows;
    for (double lambda : cfg.env.lambdas) {
        const EnvParams env = cfg.env.to_params(lambda);
        for (const auto& u : cfg.users) {
            CellRow row{cfg.experiment, u.theta_deg, u.d_m, lambda, beams.size(), {}, 0.0};
            row.mc = mc_cell_coverage(env, radio, beams, u.to_polar(), cfg.sim);
            row.los_analytic = p_los(blockage_params(env), u.d_m);
            rows.push_back(row);
        }
    }
    return rows;
}

namespace detail {

inline std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

inline std::string num(std::optional<double> v) { return v ? num(*v) : std::string(); }

inline json num_json(std::optional<double> v) { return v ? json(*v) : json(nullptr); }

} // namespace detail

inline const char* kResultHeader =
    "experiment,beam_theta_deg,beam_width_deg,user_theta_deg,user_d_m,lambda,p_direct,p_reflected,p_total,"
    "mc_p_hat,mc_ci_low,mc_ci_high,abs_gap,mc_stderr,mc_n";

inline void write_csv(std::ostream& os, std::span<const ResultRow> rows) {
    using detail::num;
    os << kResultHeader << '\n';
    for (const auto& r : rows) {
        const auto& a = r.analytic;
        const auto& m = r.mc;
        os << r.experiment << ',' << num(r.beam_theta_deg) << ',' << num(r.beam_width_deg) << ','
           << num(r.user_theta_deg) << ',' << num(r.user_d_m) << ',' << num(r.lambda) << ','
           << (a ? num(a->p_direct) : "") << ',' << (a ? num(a->p_reflected) : "") << ','
           << (a ? num(a->p_total) : "") << ',' << (m ? num(m->p_hat) : "") << ',' << (m ? num(m->ci_low) : "")
           << ',' << (m ? num(m->ci_high) : "") << ',' << num(r.abs_gap()) << ','
           << (m ? num(m->std_error) : "") << ',' << (m ? std::to_string(m->n) : "") << '\n';
    }
}

inline json rows_to_json(std::span<const ResultRow> rows) {
    using detail::num_json;
    json out = json::array();
    for (const auto& r : rows) {
        const auto& a = r.analytic;
        const auto& m = r.mc;
        out.push_back({
            {"experiment", r.experiment},
            {"beam_theta_deg", r.beam_theta_deg},
            {"beam_width_deg", r.beam_width_deg},
            {"user_theta_deg", r.user_theta_deg},
            {"user_d_m", r.user_d_m},
            {"lambda", r.lambda},
            {"p_direct", num_json(a ? std::optional(a->p_direct) : std::nullopt)},
            {"p_reflected", num_json(a ? std::optional(a->p_reflected) : std::nullopt)},
            {"p_total", num_json(a ? std::optional(a->p_total) : std::nullopt)},
            {"mc_p_hat", num_json(m ? std::optional(m->p_hat) : std::nullopt)},
            {"mc_ci_low", num_json(m ? std::optional(m->ci_low) : std::nullopt)},
            {"mc_ci_high", num_json(m ? std::optional(m->ci_high) : std::nullopt)},
            {"abs_gap", num_json(r.abs_gap())},
            {"mc_stderr", num_json(m ? std::optional(m->std_error) : std::nullopt)},
            {"mc_n", m ? json(m->n) : json(nullptr)},
        });
    }
    return out;
}

inline const char* kCellHeader =
    "experiment,user_theta_deg,user_d_m,lambda,n_beams,direct_only_p_hat,direct_only_ci_low,direct_only_ci_high,"
    "with_reflections_p_hat,with_reflections_ci_low,with_reflections_ci_high,gap,los_analytic,mc_n";

inline void write_csv(std::ostream& os, std::span<const CellRow> rows) {
    using detail::num;
    os << kCellHeader << '\n';
    for (const auto& r : rows) {
        const auto& d = r.mc.direct_only;
        const auto& w = r.mc.with_reflections;
        os << r.experiment << ',' << num(r.user_theta_deg) << ',' << num(r.user_d_m) << ',' << num(r.lambda) << ','
           << r.n_beams << ',' << num(d.p_hat) << ',' << num(d.ci_low) << ',' << num(d.ci_high) << ','
           << num(w.p_hat) << ',' << num(w.ci_low) << ',' << num(w.ci_high) << ',' << num(r.gap()) << ','
           << num(r.los_analytic) << ',' << w.n << '\n';
    }
}

inline json rows_to_json(std::span<const CellRow> rows) {
    json out = json::array();
    for (const auto& r : rows) {
        const auto& d = r.mc.direct_only;
        const auto& w = r.mc.with_reflections;
        out.push_back({{"experiment", r.experiment},
                       {"user_theta_deg", r.user_theta_deg},
                       {"user_d_m", r.user_d_m},
                       {"lambda", r.lambda},
                       {"n_beams", r.n_beams},
                       {"direct_only_p_hat", d.p_hat},
                       {"direct_only_ci_low", d.ci_low},
                       {"direct_only_ci_high", d.ci_high},
                       {"with_reflections_p_hat", w.p_hat},
                       {"with_reflections_ci_low", w.ci_low},
                       {"with_reflections_ci_high", w.ci_high},
                       {"gap", r.gap()},
                       {"los_analytic", r.los_analytic},
                       {"mc_n", w.n}});
    }
    return out;
}

struct Verdict {
    ResultRow row;
    double tolerance = 0.0; ///< max(tol_abs, 3 stderr)
    bool pass = false;
};

struct CompareReport {
    std::vector<Verdict> verdicts;

    bool all_pass() const {
        return std::all_of(verdicts.begin(), verdicts.end(), [](const Verdict& v) { return v.pass; });
    }
};

/// Absolute tolerance for one row before the 3-sigma widening.
inline double row_tolerance(const CompareBlock& c, const ResultRow& row, bool direct_row) {
    if (direct_row) return c.tol_direct;
    if (row.beam_width_deg <= c.narrow_width_deg + 1e-9 && row.user_d_m <= c.narrow_distance_m + 1e-9)
        return c.tol_reflected_narrow;
    return c.tol_reflected_wide;
}

inline CompareReport compare(const ExperimentConfig& cfg) {
    CompareReport report;
    for (auto& row : run_points(cfg)) {
        BeamSpec beam(deg_to_rad(row.beam_theta_deg), deg_to_rad(row.beam_width_deg), 1.0);
        bool direct_row = direct_event(beam, PolarPoint(deg_to_rad(row.user_theta_deg), row.user_d_m));
        double tol = std::max(row_tolerance(cfg.compare, row, direct_row), 3.0 * row.mc->std_error);
        bool pass = *row.abs_gap() <= tol;
        report.verdicts.push_back({std::move(row), tol, pass});
    }
    return report;
}

inline void write_report_csv(std::ostream& os, const CompareReport& report) {
    using detail::num;
    os << "experiment,beam_theta_deg,beam_width_deg,user_theta_deg,user_d_m,lambda,p_total,mc_p_hat,abs_gap,"
          "tolerance,verdict\n";
    for (const auto& v : report.verdicts) {
        const auto& r = v.row;
        os << r.experiment << ',' << num(r.beam_theta_deg) << ',' << num(r.beam_width_deg) << ','
           << num(r.user_theta_deg) << ',' << num(r.user_d_m) << ',' << num(r.lambda) << ','
           << num(r.analytic->p_total) << ',' << num(r.mc->p_hat) << ',' << num(r.abs_gap()) << ','
           << num(v.tolerance) << ',' << (v.pass ? "pass" : "FAIL") << '\n';
    }
}

inline json report_to_json(const CompareReport& report) {
    json rows = json::array();
    for (const auto& v : report.verdicts) {
        json r = rows_to_json(std::span<const ResultRow>(&v.row, 1)).front();
        r["tolerance"] = v.tolerance;
        r["verdict"] = v.pass ? "pass" : "fail";
        rows.push_back(r);
    }
    return {{"all_pass", report.all_pass()}, {"rows", rows}};
}

} // namespace beamcov::harness
