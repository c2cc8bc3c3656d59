// Brute-force oracle for first-order reflections: shoot a dense fan of rays
// across the beam sector, bounce each off the first wall it meets, and
// report whether any bounced ray passes within a capture radius of the user
// before meeting another wall, with total path length within range.

#pragma once

#include <cmath>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "beamcov/beamcov.hpp"

namespace beamcov::oracle {

using geometry::OrientedRect;
using geometry::Vec2;

namespace detail {

struct Wall {
    Vec2 a;
    Vec2 ev;
    Vec2 normal; // unit
};

struct RayHit {
    double t;
    std::size_t wall;
};

inline std::vector<Wall> walls_of(std::span<const OrientedRect> rects) {
    std::vector<Wall> walls;
    for (const auto& r : rects)
        for (int k = 0; k < 4; ++k) {
            auto e = r.edge(k);
            Vec2 ev = e.b - e.a;
            double len = geometry::norm(ev);
            walls.push_back({e.a, ev, {-ev.y / len, ev.x / len}});
        }
    return walls;
}

inline std::optional<RayHit> cast(std::span<const Wall> walls, Vec2 origin, Vec2 dir, double t_min) {
    std::optional<RayHit> best;
    for (std::size_t i = 0; i < walls.size(); ++i) {
        const Wall& w = walls[i];
        double denom = geometry::cross(dir, w.ev);
        if (denom == 0.0) continue;
        Vec2 ao = w.a - origin;
        double t = geometry::cross(ao, w.ev) / denom;
        double s = geometry::cross(ao, dir) / denom;
        if (s < 0.0 || s > 1.0 || t <= t_min) continue;
        if (!best || t < best->t) best = RayHit{t, i};
    }
    return best;
}

} // namespace detail

struct SweepResult {
    bool covered = false;
    std::size_t rays_hitting_user = 0;
};

inline SweepResult ray_sweep(std::span<const OrientedRect> rects, const BeamSpec& beam, Vec2 user, double range,
                             std::size_t n_rays = 1000000, double capture = 0.1) {
    SweepResult out;
    const auto walls = detail::walls_of(rects);
    const double start = beam.theta() - beam.half_width();
    const double step = beam.width() / static_cast<double>(n_rays - 1);
    for (std::size_t i = 0; i < n_rays; ++i) {
        Vec2 dir = geometry::unit_vector(start + static_cast<double>(i) * step);
        auto first = detail::cast(walls, {0.0, 0.0}, dir, 0.0);
        if (!first) continue;
        const auto& w = walls[first->wall];
        Vec2 hit = first->t * dir;
        Vec2 bounced = dir - 2.0 * geometry::dot(dir, w.normal) * w.normal;
        double along = geometry::dot(user - hit, bounced);
        if (along <= 0.0) continue;
        double miss = std::fabs(geometry::cross(bounced, user - hit));
        if (miss > capture) continue;
        if (first->t + along > range) continue;
        auto second = detail::cast(walls, hit, bounced, 1e-7);
        if (second && second->t < along) continue;
        out.covered = true;
        ++out.rays_hitting_user;
    }
    return out;
}

/// User positions inside the capture disk used to attribute a disagreement
/// to the sweep's capture radius.
inline std::vector<Vec2> capture_disk_samples(Vec2 user, double capture = 0.1) {
    std::vector<Vec2> pts{user};
    for (double rho : {0.25, 0.5, 0.75, 1.0})
        for (int k = 0; k < 64; ++k) pts.push_back(user + rho * capture * geometry::unit_vector(kTwoPi * k / 64.0));
    return pts;
}

/// Random scene of at most two buildings with the BS and user outdoors, and
/// a beam that is often aimed at an actual specular point.
struct SweepCase {
    std::vector<OrientedRect> rects;
    Vec2 user;
    BeamSpec beam{0.0, 0.1, 1.0};
    double range = 0.0;
};

inline SweepCase random_sweep_case(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    auto uni = [&](double lo, double hi) { return lo + (hi - lo) * unit(rng); };
    for (;;) {
        SweepCase c;
        int n = unit(rng) < 0.1 ? 1 : 2;
        for (int i = 0; i < n; ++i)
            c.rects.emplace_back(Vec2{uni(-150, 150), uni(-150, 150)}, uni(40, 60), uni(30, 50), uni(0, kPi));
        c.user = uni(20, 200) * geometry::unit_vector(uni(0, kTwoPi));
        if (inside_any(c.rects, {0.0, 0.0}) || inside_any(c.rects, c.user)) continue;
        double width = deg_to_rad(unit(rng) < 0.5 ? 10.0 : 30.0);
        double theta = uni(0, kTwoPi);
        c.range = 15840.0;
        auto paths = specular_paths(c.rects, c.user);
        if (!paths.empty() && unit(rng) < 0.7) {
            const auto& p = paths[static_cast<std::size_t>(unit(rng) * paths.size()) % paths.size()];
            theta = p.direction + uni(-0.6, 0.6) * width;
            if (unit(rng) < 0.3) c.range = p.length * uni(0.95, 1.05);
        }
        c.beam = BeamSpec(theta, width, 1.0);
        return c;
    }
}

struct SweepAgreement {
    std::size_t cases = 0;
    std::size_t agree = 0;
    std::size_t attributed = 0;   ///< disagreements explained by the capture disk
    std::size_t unexplained = 0;
    std::size_t positives = 0;    ///< cases where the image method finds a path
};

inline SweepAgreement compare_image_method_to_sweep(std::uint64_t seed, std::size_t cases, std::size_t n_rays) {
    std::mt19937_64 rng(seed);
    SweepAgreement out;
    for (std::size_t i = 0; i < cases; ++i) {
        SweepCase c = random_sweep_case(rng);
        auto serves = [&](Vec2 u) {
            for (const auto& p : specular_paths(c.rects, u))
                if (path_serves(p, c.beam, c.range)) return true;
            return false;
        };
        bool image = serves(c.user);
        bool sweep = ray_sweep(c.rects, c.beam, c.user, c.range, n_rays).covered;
        ++out.cases;
        out.positives += image;
        if (image == sweep) {
            ++out.agree;
            continue;
        }
        bool explained = false;
        for (Vec2 p : capture_disk_samples(c.user))
            if (!inside_any(c.rects, p) && serves(p) == sweep) explained = true;
        (explained ? out.attributed : out.unexplained) += 1;
    }
    return out;
}

} // namespace beamcov::oracle
