// Monte Carlo ground truth: random rectangle scenes, exact LOS checks, and
// first-order specular paths found with the image method.

#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <istream>
#include <ostream>
#include <random>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "beamcov/coverage_analytic.hpp"
#include "beamcov/env_stats.hpp"
#include "beamcov/geometry.hpp"
#include "beamcov/parallel.hpp"

namespace beamcov {

using geometry::OrientedRect;

/// What to do with drops where a building covers the BS or the user.
enum class PlacementPolicy {
    CountBlocked,  ///< keep the drop; an endpoint inside a building is never covered
    RejectOverlap, ///< redraw the drop until both endpoints are outdoors
};

struct SimConfig {
    double area_side = 500.0; ///< square simulation area centered on the BS, m
    std::size_t n_drops = 10000;
    std::uint64_t base_seed = 1;
    RangeMode range_mode = RangeMode::Paper;
    PlacementPolicy placement = PlacementPolicy::CountBlocked;
    unsigned threads = 1;

    void validate() const {
        if (!(area_side > 0.0)) throw std::invalid_argument("SimConfig: area_side must be > 0");
        if (n_drops < 1) throw std::invalid_argument("SimConfig: n_drops must be >= 1");
    }

    friend bool operator==(const SimConfig&, const SimConfig&) = default;
};

struct Scene {
    std::vector<OrientedRect> rects;
    std::uint64_t base_seed = 0;
    std::uint64_t index = 0;
    unsigned attempt = 0; ///< redraws spent under RejectOverlap
};

namespace detail {

inline std::mt19937_64 drop_engine(std::uint64_t base_seed, std::uint64_t index, unsigned attempt) {
    std::seed_seq seq{static_cast<std::uint32_t>(base_seed), static_cast<std::uint32_t>(base_seed >> 32),
                      static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32), attempt};
    return std::mt19937_64(seq);
}

inline double draw_uniform(std::mt19937_64& rng, double lo, double hi) {
    if (lo == hi) return lo;
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline LengthDist::Bounds sampling_bounds(const LengthDist& d) {
    if (!d.bounds()) throw std::invalid_argument("scene generation needs uniform side-length bounds");
    return *d.bounds();
}

} // namespace detail

/// Draws drop `index`: Poisson(lambda * area) buildings with uniform
/// centers, orientations and side lengths. Points in keep_clear are only
/// honoured under RejectOverlap.
inline Scene generate_scene(const EnvParams& env, const SimConfig& cfg, std::uint64_t index,
                            std::span<const Vec2> keep_clear = {}) {
    env.validate();
    cfg.validate();
    Scene scene{{}, cfg.base_seed, index, 0};
    if (env.lambda == 0.0) return scene;
    auto len = detail::sampling_bounds(env.length);
    auto wid = detail::sampling_bounds(env.width);
    const double half = 0.5 * cfg.area_side;
    const double mean_count = env.lambda * cfg.area_side * cfg.area_side;

    for (unsigned attempt = 0;; ++attempt) {
        if (attempt > 100000) throw std::runtime_error("generate_scene: cannot keep endpoints outdoors");
        auto rng = detail::drop_engine(cfg.base_seed, index, attempt);
        int count = std::poisson_distribution<int>(mean_count)(rng);
        scene.rects.clear();
        scene.rects.reserve(static_cast<std::size_t>(count));
        bool clear = true;
        for (int i = 0; i < count; ++i) {
            double cx = detail::draw_uniform(rng, -half, half);
            double cy = detail::draw_uniform(rng, -half, half);
            double phi = detail::draw_uniform(rng, 0.0, kPi);
            double l = detail::draw_uniform(rng, len.lo, len.hi);
            double w = detail::draw_uniform(rng, wid.lo, wid.hi);
            const OrientedRect& r = scene.rects.emplace_back(Vec2{cx, cy}, l, w, phi);
            if (cfg.placement == PlacementPolicy::RejectOverlap)
                for (Vec2 p : keep_clear) clear = clear && !geometry::rect_strictly_contains(r, p);
        }
        scene.attempt = attempt;
        if (clear) return scene;
    }
}

inline bool inside_any(std::span<const OrientedRect> rects, Vec2 p) {
    for (const auto& r : rects)
        if (geometry::rect_contains(r, p)) return true;
    return false;
}

/// No building touches the segment from the BS to the user.
inline bool los_clear(std::span<const OrientedRect> rects, Vec2 user) {
    for (const auto& r : rects)
        if (geometry::segment_intersects_rect({0.0, 0.0}, user, r)) return false;
    return true;
}

inline bool direct_covered(std::span<const OrientedRect> rects, const RadioParams& radio, const BeamSpec& beam,
                           const PolarPoint& user) {
    return direct_event(beam, user) && user.d() <= threshold_distance_direct(radio, beam) &&
           los_clear(rects, user.to_cartesian());
}

/// A first-order specular path BS -> hit -> user.
struct SpecularPath {
    std::size_t rect = 0;
    int edge = 0;
    Vec2 hit;
    double length = 0.0;    ///< |BS -> image of the user| = |BS -> hit| + |hit -> user|
    double direction = 0.0; ///< angle of BS -> hit
};

/// Every unobstructed first-order reflection path from the BS to the user,
/// one candidate per building edge (image method). Sector and range are not
/// applied here.
inline std::vector<SpecularPath> specular_paths(std::span<const OrientedRect> rects, Vec2 user) {
    std::vector<SpecularPath> paths;
    const Vec2 bs{0.0, 0.0};
    if (inside_any(rects, bs) || inside_any(rects, user)) return paths;
    for (std::size_t i = 0; i < rects.size(); ++i) {
        for (int k = 0; k < 4; ++k) {
            geometry::Segment e = rects[i].edge(k);
            Vec2 ev = e.b - e.a;
            double len = geometry::norm(ev);
            Vec2 outward{ev.y / len, -ev.x / len};
            // both endpoints strictly in front of the wall
            double bs_side = geometry::dot(bs - e.a, outward);
            double user_side = geometry::dot(user - e.a, outward);
            if (bs_side <= kGeomTol || user_side <= kGeomTol) continue;
            Vec2 image = user - 2.0 * user_side * outward;
            Vec2 hit = (bs_side / (bs_side + user_side)) * image;
            double along = geometry::dot(hit - e.a, ev) / (len * len);
            double slack = kGeomTol / len;
            if (along < -slack || along > 1.0 + slack) continue;
            // the reflecting building sits behind its own wall, so only the
            // others can block either leg
            bool blocked = false;
            for (std::size_t j = 0; j < rects.size() && !blocked; ++j) {
                if (j == i) continue;
                blocked = geometry::segment_intersects_rect(bs, hit, rects[j]) ||
                          geometry::segment_intersects_rect(hit, user, rects[j]);
            }
            if (blocked) continue;
            paths.push_back({i, k, hit, geometry::norm(image), std::atan2(hit.y, hit.x)});
        }
    }
    return paths;
}

inline bool path_serves(const SpecularPath& path, const BeamSpec& beam, double range) {
    return geometry::sector_contains(beam, path.direction) && path.length <= range;
}

inline bool reflected_covered(std::span<const OrientedRect> rects, const RadioParams& radio, const BeamSpec& beam,
                              const PolarPoint& user, RangeMode mode = RangeMode::Paper) {
    double range = threshold_distance_reflected(radio, beam, mode);
    for (const auto& path : specular_paths(rects, user.to_cartesian()))
        if (path_serves(path, beam, range)) return true;
    return false;
}

struct MCEstimate {
    double p_hat = 0.0;
    double std_error = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
    std::size_t n = 0;
    std::size_t n_direct = 0;
    std::size_t n_reflected = 0;

    /// Binomial estimate with a normal-approximation 95% interval.
    static MCEstimate from_counts(std::size_t n, std::size_t n_direct, std::size_t n_reflected) {
        MCEstimate e;
        e.n = n;
        e.n_direct = n_direct;
        e.n_reflected = n_reflected;
        e.p_hat = static_cast<double>(n_direct + n_reflected) / static_cast<double>(n);
        e.std_error = std::sqrt(e.p_hat * (1.0 - e.p_hat) / static_cast<double>(n));
        constexpr double z95 = 1.959963984540054;
        e.ci_low = std::max(0.0, e.p_hat - z95 * e.std_error);
        e.ci_high = std::min(1.0, e.p_hat + z95 * e.std_error);
        return e;
    }
};

namespace detail {

enum class DropOutcome : std::uint8_t { None, Direct, Reflected };

inline std::vector<Vec2> clear_points(const SimConfig& cfg, Vec2 user) {
    if (cfg.placement == PlacementPolicy::RejectOverlap) return {Vec2{0.0, 0.0}, user};
    return {};
}

} // namespace detail

/// Coverage estimates for several beams evaluated on the same drops. A drop
/// counts as reflected only when the direct path fails.
inline std::vector<MCEstimate> mc_coverage_beams(const EnvParams& env, const RadioParams& radio,
                                                 std::span<const BeamSpec> beams, const PolarPoint& user,
                                                 const SimConfig& cfg) {
    cfg.validate();
    const Vec2 u = user.to_cartesian();
    const auto keep = detail::clear_points(cfg, u);
    const std::size_t nb = beams.size();
    std::vector<double> d0(nb), d0v(nb);
    for (std::size_t b = 0; b < nb; ++b) {
        d0[b] = threshold_distance_direct(radio, beams[b]);
        d0v[b] = threshold_distance_reflected(radio, beams[b], cfg.range_mode);
    }
    std::vector<detail::DropOutcome> outcome(cfg.n_drops * nb, detail::DropOutcome::None);
    parallel_for(cfg.n_drops, cfg.threads, [&](std::size_t drop) {
        Scene scene = generate_scene(env, cfg, drop, keep);
        const bool los = los_clear(scene.rects, u);
        std::vector<SpecularPath> paths;
        bool paths_ready = false;
        for (std::size_t b = 0; b < nb; ++b) {
            auto& slot = outcome[drop * nb + b];
            if (los && direct_event(beams[b], user) && user.d() <= d0[b]) {
                slot = detail::DropOutcome::Direct;
                continue;
            }
            if (!paths_ready) {
                paths = specular_paths(scene.rects, u);
                paths_ready = true;
            }
            for (const auto& path : paths)
                if (path_serves(path, beams[b], d0v[b])) {
                    slot = detail::DropOutcome::Reflected;
                    break;
                }
        }
    });
    std::vector<MCEstimate> estimates;
    for (std::size_t b = 0; b < nb; ++b) {
        std::size_t direct = 0, reflected = 0;
        for (std::size_t drop = 0; drop < cfg.n_drops; ++drop) {
            auto o = outcome[drop * nb + b];
            direct += o == detail::DropOutcome::Direct;
            reflected += o == detail::DropOutcome::Reflected;
        }
        estimates.push_back(MCEstimate::from_counts(cfg.n_drops, direct, reflected));
    }
    return estimates;
}

inline MCEstimate mc_coverage(const EnvParams& env, const RadioParams& radio, const BeamSpec& beam,
                              const PolarPoint& user, const SimConfig& cfg) {
    return mc_coverage_beams(env, radio, std::span<const BeamSpec>(&beam, 1), user, cfg).front();
}

struct CellEstimate {
    MCEstimate with_reflections; ///< at least one beam covers the user, directly or reflected
    MCEstimate direct_only;      ///< at least one beam covers the user directly
};

inline CellEstimate mc_cell_coverage(const EnvParams& env, const RadioParams& radio,
                                     std::span<const BeamSpec> beams, const PolarPoint& user,
                                     const SimConfig& cfg) {
    if (beams.empty()) throw std::invalid_argument("mc_cell_coverage: beam list is empty");
    cfg.validate();
    const Vec2 u = user.to_cartesian();
    const auto keep = detail::clear_points(cfg, u);
    std::vector<detail::DropOutcome> cell(cfg.n_drops, detail::DropOutcome::None);
    parallel_for(cfg.n_drops, cfg.threads, [&](std::size_t drop) {
        Scene scene = generate_scene(env, cfg, drop, keep);
        bool los = los_clear(scene.rects, u);
        for (const auto& beam : beams)
            if (los && direct_event(beam, user) && user.d() <= threshold_distance_direct(radio, beam)) {
                cell[drop] = detail::DropOutcome::Direct;
                return;
            }
        auto paths = specular_paths(scene.rects, u);
        for (const auto& beam : beams) {
            double range = threshold_distance_reflected(radio, beam, cfg.range_mode);
            for (const auto& path : paths)
                if (path_serves(path, beam, range)) {
                    cell[drop] = detail::DropOutcome::Reflected;
                    return;
                }
        }
    });
    std::size_t direct = 0, reflected = 0;
    for (auto o : cell) {
        direct += o == detail::DropOutcome::Direct;
        reflected += o == detail::DropOutcome::Reflected;
    }
    return {MCEstimate::from_counts(cfg.n_drops, direct, reflected),
            MCEstimate::from_counts(cfg.n_drops, direct, 0)};
}

/// Empirical frequency of an unobstructed BS-user segment.
inline MCEstimate mc_los_frequency(const EnvParams& env, const PolarPoint& user, const SimConfig& cfg) {
    cfg.validate();
    const Vec2 u = user.to_cartesian();
    const auto keep = detail::clear_points(cfg, u);
    std::vector<std::uint8_t> clear(cfg.n_drops, 0);
    parallel_for(cfg.n_drops, cfg.threads, [&](std::size_t drop) {
        clear[drop] = los_clear(generate_scene(env, cfg, drop, keep).rects, u) ? 1 : 0;
    });
    std::size_t hits = 0;
    for (auto c : clear) hits += c;
    return MCEstimate::from_counts(cfg.n_drops, hits, 0);
}

/// One rectangle per line: "cx cy length width phi", phi in radians.
inline void dump_scene(std::ostream& os, std::span<const OrientedRect> rects) {
    char buf[160];
    for (const auto& r : rects) {
        std::snprintf(buf, sizeof buf, "%.17g %.17g %.17g %.17g %.17g\n", r.center().x, r.center().y, r.length(),
                      r.width(), r.phi());
        os << buf;
    }
}

/// Inverse of dump_scene. Blank lines and lines starting with '#' are skipped.
inline std::vector<OrientedRect> load_scene(std::istream& is) {
    std::vector<OrientedRect> rects;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        std::istringstream fields(line);
        double cx, cy, l, w, phi;
        std::string extra;
        if (!(fields >> cx >> cy >> l >> w >> phi) || (fields >> extra))
            throw std::runtime_error("load_scene: malformed line " + std::to_string(lineno));
        rects.emplace_back(Vec2{cx, cy}, l, w, phi);
    }
    return rects;
}

} // namespace beamcov
