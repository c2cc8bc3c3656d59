// Acceptance suite: one PASS/FAIL line per criterion. Optional argv[1] is
// the path of the beamcov CLI, used for the determinism check.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "../oracles/ray_sweep.hpp"
#include "../oracles/reflection_riemann.hpp"
#include "beamcov/beamcov.hpp"

using namespace beamcov;
using namespace beamcov::harness;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

struct Outcome {
    bool pass;
    std::string detail;
};

const RadioParams kRadio = RadioParams::from_db(30.0, 1.0, 30e9, -85.0, 0.0, 3.0);

EnvParams env_at(double lambda) { return EnvBlock{}.to_params(lambda); }

BeamSpec beam_deg(double theta, double width) {
    return to_beam(RadioBlock{}, BeamEntry{theta, width, std::nullopt});
}

PolarPoint user_deg(double theta, double d) { return {deg_to_rad(theta), d}; }

unsigned all_threads() { return std::max(1u, std::thread::hardware_concurrency()); }

// 1. closed-form direct anchor and its MC estimate
Outcome direct_anchor() {
    auto t0 = Clock::now();
    BeamSpec beam = beam_deg(90, 10);
    PolarPoint user = user_deg(90, 50);
    double analytic = direct_coverage(kRadio, beam, env_at(2e-4), user);
    SimConfig sim;
    sim.n_drops = 10000;
    sim.base_seed = 2024;
    sim.threads = 1;
    MCEstimate mc = mc_coverage(env_at(2e-4), kRadio, beam, user, sim);
    double elapsed = seconds_since(t0);
    bool ok = std::fabs(analytic - 0.37795) <= 1e-4 && std::fabs(mc.p_hat - 0.37795) <= 0.0146 && elapsed < 30.0;
    return {ok, fmt("analytic %.6f (target 0.37795 +- 1e-4), MC %.4f over %zu drops (band +-0.0146), %.1f s single-threaded",
                    analytic, mc.p_hat, mc.n, elapsed)};
}

// 2. empirical LOS frequency vs exp(-(beta d + p))
Outcome los_oracle() {
    std::mt19937_64 rng(777);
    std::uniform_real_distribution<double> lam(1e-4, 1e-3), dist(20, 200), ang(0, 360);
    bool ok = true;
    std::string detail;
    for (int i = 0; i < 5; ++i) {
        double lambda = lam(rng), d = dist(rng), theta = ang(rng);
        SimConfig sim;
        sim.n_drops = 10000;
        sim.base_seed = 100 + i;
        sim.threads = all_threads();
        MCEstimate mc = mc_los_frequency(env_at(lambda), user_deg(theta, d), sim);
        double expected = p_los(blockage_params(env_at(lambda)), d);
        double band = 3.0 * std::sqrt(expected * (1 - expected) / sim.n_drops);
        bool pass = std::fabs(mc.p_hat - expected) <= band;
        ok = ok && pass;
        detail += fmt("%s(l=%.2e,d=%.0f: %.4f vs %.4f+-%.4f)", i ? " " : "", lambda, d, mc.p_hat, expected, band);
    }
    return {ok, detail};
}

// 3. reflected beams, analytic vs 1e5-drop MC
Outcome reflected_agreement() {
    auto t0 = Clock::now();
    std::vector<BeamSpec> beams{beam_deg(95, 10), beam_deg(100, 10), beam_deg(105, 10)};
    PolarPoint user = user_deg(90, 50);
    SimConfig sim;
    sim.n_drops = 100000;
    sim.base_seed = 31337;
    sim.threads = all_threads();
    auto mc = mc_coverage_beams(env_at(2e-4), kRadio, beams, user, sim);
    bool ok = true;
    std::string detail;
    for (std::size_t k = 0; k < beams.size(); ++k) {
        double a = reflected_coverage(kRadio, beams[k], env_at(2e-4), user);
        double gap = std::fabs(a - mc[k].p_hat);
        ok = ok && gap <= 0.05;
        detail += fmt("%s%.0f deg: analytic %.4f MC %.4f gap %.4f", k ? "; " : "", rad_to_deg(beams[k].theta()), a,
                      mc[k].p_hat, gap);
    }
    double elapsed = seconds_since(t0);
    ok = ok && elapsed < 600.0;
    return {ok, detail + fmt(" (tol 0.05, %.1f s on %u threads)", elapsed, sim.threads)};
}

// 4. doubling check at every figure configuration, and the brute-force Riemann oracle
Outcome quadrature_consistency() {
    std::size_t checked = 0;
    double worst = 0.0;
    for (const char* name : {"fig3", "fig5", "fig6"}) {
        ExperimentConfig cfg = make_preset(name);
        RadioParams radio = cfg.radio.to_params();
        for (double lambda : cfg.env.lambdas)
            for (const auto& u : cfg.users)
                for (const auto& b : cfg.beams) {
                    BeamSpec beam = to_beam(cfg.radio, b);
                    PolarPoint user = u.to_polar();
                    EnvParams env = cfg.env.to_params(lambda);
                    auto terms = reflected_coverage_terms(radio, beam, env, user, cfg.quad, cfg.sim.range_mode);
                    if (terms.alpha_cells == 0) continue; // nothing to integrate
                    beamcov::detail::ReflectionIntegrand integrand(
                        beam, env, user, threshold_distance_reflected(radio, beam, cfg.sim.range_mode));
                    double finer =
                        beamcov::detail::reflected_continuous_on_grid(integrand, 2 * terms.alpha_cells, 2 * terms.r_cells, 1);
                    worst = std::max(worst, std::fabs(finer - terms.continuous) / terms.total());
                    ++checked;
                }
    }
    bool ok = worst < 1e-4 && checked > 0;
    std::string detail = fmt("doubling: %zu configs, worst relative change %.2e (tol 1e-4)", checked, worst);

    std::mt19937_64 rng(4000);
    std::uniform_real_distribution<double> unit(0, 1);
    double worst_abs = 0.0;
    for (int i = 0; i < 5; ++i) {
        double width = unit(rng) < 0.5 ? 10.0 : 30.0;
        double theta_u = 360 * unit(rng);
        double offset = (width / 2 + (90 - width / 2) * unit(rng)) * (unit(rng) < 0.5 ? 1 : -1);
        BeamSpec beam = beam_deg(theta_u + offset, width);
        PolarPoint user = user_deg(theta_u, 25 + 175 * unit(rng));
        EnvParams env = env_at(1e-4 + 9e-4 * unit(rng));
        double production = reflected_coverage(kRadio, beam, env, user);
        double brute = oracle::reflected_atom_midpoint(kRadio, beam, env, user, RangeMode::Paper, 4000) +
                       oracle::reflected_continuous_riemann(kRadio, beam, env, user, RangeMode::Paper, 4000, 4000,
                                                            all_threads());
        worst_abs = std::max(worst_abs, std::fabs(production - brute));
    }
    ok = ok && worst_abs <= 1e-3;
    return {ok, detail + fmt("; 4000x4000 Riemann: worst |diff| %.2e over 5 configs (tol 1e-3)", worst_abs)};
}

std::vector<ResultRow> analytic_rows(const char* preset) {
    return run_points(make_preset(preset), {.analytic = true, .simulate = false});
}

std::vector<double> curve(const std::vector<ResultRow>& rows, double theta, double width,
                          double CoverageBreakdown::*field) {
    std::vector<double> out;
    for (const auto& r : rows)
        if (r.beam_theta_deg == theta && r.beam_width_deg == width) out.push_back((*r.analytic).*field);
    return out;
}

// 5. distance trend
Outcome distance_trend() {
    auto rows = analytic_rows("fig5");
    auto direct = curve(rows, 90, 10, &CoverageBreakdown::p_direct);
    auto r10 = curve(rows, 95, 10, &CoverageBreakdown::p_reflected);
    auto r30 = curve(rows, 105, 30, &CoverageBreakdown::p_reflected);
    const double expected = std::exp(-blockage_params(env_at(2e-4)).beta * 50.0);
    double worst_ratio = 0.0;
    for (std::size_t i = 0; i + 2 < direct.size(); ++i) // d steps are 25 m, so i -> i+2 is 50 m
        worst_ratio = std::max(worst_ratio, std::fabs(direct[i + 2] / direct[i] - expected));
    auto spread = [](const std::vector<double>& v) {
        auto [lo, hi] = std::minmax_element(v.begin(), v.end());
        return *hi - *lo;
    };
    bool ok = direct.size() == 8 && worst_ratio <= 1e-6 && spread(r10) < 0.1 && spread(r30) < 0.1;
    return {ok, fmt("direct 50 m ratio worst |err| %.1e vs exp(-50 beta)=%.6f; reflected spread 10 deg %.4f, 30 deg %.4f "
                    "(tol 0.1)",
                    worst_ratio, expected, spread(r10), spread(r30))};
}

// 6. density trend
Outcome density_trend() {
    auto rows = analytic_rows("fig6");
    auto r10 = curve(rows, 95, 10, &CoverageBreakdown::p_reflected);
    auto r30 = curve(rows, 105, 30, &CoverageBreakdown::p_reflected);
    auto interior_max = [](const std::vector<double>& v) {
        auto it = std::max_element(v.begin(), v.end());
        return it != v.begin() && it != v.end() - 1;
    };
    bool dominated = true;
    for (std::size_t i = 0; i < r10.size(); ++i) dominated = dominated && r30[i] >= r10[i];
    auto argmax = [](const std::vector<double>& v) {
        return static_cast<int>(std::max_element(v.begin(), v.end()) - v.begin());
    };
    bool ok = r10.size() == 21 && r10.front() == 0.0 && r30.front() == 0.0 && interior_max(r10) &&
              interior_max(r30) && dominated;
    auto lambdas = make_preset("fig6").env.lambdas;
    return {ok, fmt("zero at lambda=0: %s; peaks at lambda=%.2e (10 deg, %.4f) and %.2e (30 deg, %.4f); 30 deg >= 10 "
                    "deg everywhere: %s",
                    r10.front() == 0.0 && r30.front() == 0.0 ? "yes" : "no", lambdas[argmax(r10)], r10[argmax(r10)],
                    lambdas[argmax(r30)], r30[argmax(r30)], dominated ? "yes" : "no")};
}

// 7. cell coverage trend
Outcome cell_trend() {
    auto cfg = make_preset("fig4");
    auto rows = run_fig4(cfg);
    bool superset = true;
    double gap50 = NAN, gap200 = NAN;
    for (const auto& r : rows) {
        superset = superset && r.mc.with_reflections.n_direct == r.mc.direct_only.n_direct &&
                   r.mc.with_reflections.p_hat >= r.mc.direct_only.p_hat;
        if (r.user_d_m == 50.0) gap50 = r.gap();
        if (r.user_d_m == 200.0) gap200 = r.gap();
    }
    bool ok = superset && gap200 - gap50 > 0.0;
    return {ok, fmt("superset at all %zu distances: %s; gap(50)=%.4f gap(200)=%.4f over %zu drops", rows.size(),
                    superset ? "yes" : "no", gap50, gap200, cfg.sim.n_drops)};
}

// 8. image method vs ray sweep
Outcome image_method() {
    auto r = oracle::compare_image_method_to_sweep(8888, 1000, 1000000);
    double rate = static_cast<double>(r.agree) / static_cast<double>(r.cases);
    bool ok = rate >= 0.999 && r.unexplained == 0;
    return {ok, fmt("%zu/%zu agree (%.2f%%), %zu with a path; %zu disagreements explained by capture radius, %zu "
                    "unexplained",
                    r.agree, r.cases, 100 * rate, r.positives, r.attributed, r.unexplained)};
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// 9. byte-identical fig3 CSV across thread counts
Outcome determinism(const char* cli) {
    if (cli) {
        auto dir = std::filesystem::temp_directory_path() / "beamcov_acceptance";
        std::filesystem::create_directories(dir);
        std::vector<std::string> outputs;
        for (unsigned t : {1u, 4u, all_threads()}) {
            auto path = dir / fmt("fig3_t%u.csv", t);
            std::string cmd = fmt("\"%s\" sweep --preset fig3 --seed 42 --threads %u --out \"%s\"", cli, t,
                                  path.string().c_str());
            if (std::system(cmd.c_str()) != 0) return {false, "CLI run failed: " + cmd};
            outputs.push_back(slurp(path));
        }
        bool same = std::all_of(outputs.begin(), outputs.end(), [&](const auto& s) { return s == outputs[0]; });
        return {same && !outputs[0].empty(),
                fmt("CLI sweep --preset fig3 --seed 42 at 1/4/%u threads: %s (%zu bytes)", all_threads(),
                    same ? "identical" : "DIFFERENT", outputs[0].size())};
    }
    auto render = [](unsigned threads) {
        auto cfg = make_preset("fig3");
        cfg.sim.threads = threads;
        std::ostringstream out;
        write_csv(out, std::span<const ResultRow>(run_points(cfg)));
        return out.str();
    };
    std::string a = render(1), b = render(4);
    return {a == b, fmt("in-process fig3 CSV at 1 and 4 threads: %s", a == b ? "identical" : "DIFFERENT")};
}

} // namespace

int main(int argc, char** argv) {
    const char* cli = argc > 1 ? argv[1] : nullptr;
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
        {"direct-beam anchor", direct_anchor},
        {"LOS oracle", los_oracle},
        {"reflected-beam agreement", reflected_agreement},
        {"quadrature self-consistency", quadrature_consistency},
        {"distance trend", distance_trend},
        {"density trend", density_trend},
        {"cell coverage trend", cell_trend},
        {"image-method exactness", image_method},
        {"determinism", [cli] { return determinism(cli); }},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        auto t0 = Clock::now();
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failed += !o.pass;
        std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << i + 1 << " (" << criteria[i].first << "): "
                  << o.detail << fmt(" [%.1f s]", seconds_since(t0)) << std::endl;
    }
    std::cout << (failed == 0 ? "all criteria pass" : fmt("%d criteria FAIL", failed)) << std::endl;
    return failed == 0 ? 0 : 1;
}
