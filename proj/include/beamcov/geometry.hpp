// Exact 2D geometry for beam sectors, rectangular obstacles, and mirror
// reflection. The base station sits at the origin.

#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>

#include "beamcov/units.hpp"

namespace beamcov::geometry {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    friend constexpr Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
    friend constexpr Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
    friend constexpr Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
    friend constexpr Vec2 operator*(Vec2 a, double s) { return {s * a.x, s * a.y}; }
    friend constexpr bool operator==(Vec2, Vec2) = default;
};

inline constexpr double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline constexpr double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }
inline double distance(Vec2 a, Vec2 b) { return norm(a - b); }
inline Vec2 unit_vector(double theta) { return {std::cos(theta), std::sin(theta)}; }

/// Polar position relative to the base station. theta is kept in [0, 2*pi).
class PolarPoint {
public:
    PolarPoint(double theta, double d) : theta_(normalize_angle(theta)), d_(d) {
        if (!(d >= 0.0)) throw std::invalid_argument("PolarPoint: distance must be >= 0");
    }

    static PolarPoint from_cartesian(Vec2 p) {
        double d = norm(p);
        return {d > 0.0 ? std::atan2(p.y, p.x) : 0.0, d};
    }

    double theta() const { return theta_; }
    double d() const { return d_; }
    Vec2 to_cartesian() const { return d_ * unit_vector(theta_); }

    friend bool operator==(const PolarPoint&, const PolarPoint&) = default;

private:
    double theta_;
    double d_;
};

/// Sector beam: orientation, full angular width, and linear beamforming gain.
class BeamSpec {
public:
    BeamSpec(double theta, double width, double gain_linear)
        : theta_(normalize_angle(theta)), width_(width), gain_(gain_linear) {
        if (!(width > 0.0 && width < kPi))
            throw std::invalid_argument("BeamSpec: width must lie in (0, pi)");
        if (!(gain_linear > 0.0)) throw std::invalid_argument("BeamSpec: gain must be > 0");
    }

    double theta() const { return theta_; }
    double width() const { return width_; }
    double half_width() const { return 0.5 * width_; }
    double gain() const { return gain_; }
    Vec2 axis() const { return unit_vector(theta_); }

    friend bool operator==(const BeamSpec&, const BeamSpec&) = default;

private:
    double theta_;
    double width_;
    double gain_;
};

/// Closed sector test: |theta - theta_j| <= width/2, wraparound aware.
inline bool sector_contains(const BeamSpec& beam, double theta) {
    return angular_distance(theta, beam.theta()) <= beam.half_width() + kGeomTol;
}

inline bool sector_contains(const BeamSpec& beam, const PolarPoint& p) {
    return sector_contains(beam, p.theta());
}

/// Open sector test: a direction on the sector border is not inside.
/// This decides whether a user is served by the direct beam.
inline bool sector_interior_contains(const BeamSpec& beam, double theta) {
    return angular_distance(theta, beam.theta()) < beam.half_width() - kGeomTol;
}

struct Segment {
    Vec2 a;
    Vec2 b;

    double length() const { return distance(a, b); }
};

/// Rectangle with center, length along phi, and width across it.
class OrientedRect {
public:
    OrientedRect(Vec2 center, double length, double width, double phi)
        : center_(center), length_(length), width_(width), phi_(std::fmod(normalize_angle(phi), kPi)) {
        if (!(length > 0.0) || !(width > 0.0))
            throw std::invalid_argument("OrientedRect: length and width must be > 0");
    }

    Vec2 center() const { return center_; }
    double length() const { return length_; }
    double width() const { return width_; }
    double phi() const { return phi_; }

    Vec2 length_axis() const { return unit_vector(phi_); }
    Vec2 width_axis() const { return unit_vector(phi_ + 0.5 * kPi); }

    /// Corners in counter-clockwise order.
    std::array<Vec2, 4> corners() const {
        Vec2 u = 0.5 * length_ * length_axis();
        Vec2 v = 0.5 * width_ * width_axis();
        return {center_ - u - v, center_ + u - v, center_ + u + v, center_ - u + v};
    }

    /// Edge i runs from corner i to corner (i+1) % 4; the interior is on its left.
    Segment edge(int i) const {
        auto c = corners();
        return {c[static_cast<std::size_t>(i)], c[static_cast<std::size_t>((i + 1) % 4)]};
    }

    /// Point in the rectangle's own frame (x along length, y along width).
    Vec2 to_local(Vec2 p) const {
        Vec2 r = p - center_;
        return {dot(r, length_axis()), dot(r, width_axis())};
    }

    friend bool operator==(const OrientedRect&, const OrientedRect&) = default;

private:
    Vec2 center_;
    double length_;
    double width_;
    double phi_;
};

/// Closed containment (boundary counts) with kGeomTol slack.
inline bool rect_contains(const OrientedRect& r, Vec2 p) {
    Vec2 q = r.to_local(p);
    return std::fabs(q.x) <= 0.5 * r.length() + kGeomTol && std::fabs(q.y) <= 0.5 * r.width() + kGeomTol;
}

/// Strict interior containment.
inline bool rect_strictly_contains(const OrientedRect& r, Vec2 p) {
    Vec2 q = r.to_local(p);
    return std::fabs(q.x) < 0.5 * r.length() - kGeomTol && std::fabs(q.y) < 0.5 * r.width() - kGeomTol;
}

/// Infinite line through anchor with direction angle alpha.
class MirrorLine {
public:
    MirrorLine(Vec2 anchor, double alpha) : anchor_(anchor), alpha_(std::fmod(normalize_angle(alpha), kPi)) {}

    Vec2 anchor() const { return anchor_; }
    double alpha() const { return alpha_; }
    Vec2 direction() const { return unit_vector(alpha_); }
    Vec2 normal() const { return unit_vector(alpha_ + 0.5 * kPi); }

    double signed_distance(Vec2 p) const { return dot(p - anchor_, normal()); }

private:
    Vec2 anchor_;
    double alpha_;
};

inline Vec2 mirror_point(const MirrorLine& line, Vec2 x) {
    return x - 2.0 * line.signed_distance(x) * line.normal();
}

/// Distance t >= 0 along direction theta from the origin to the line, if any.
inline std::optional<double> ray_line_distance(double theta, const MirrorLine& line) {
    Vec2 n = line.normal();
    Vec2 d = unit_vector(theta);
    double origin_offset = -line.signed_distance({0.0, 0.0}); // n . (anchor - 0)
    double approach = dot(n, d);
    if (std::fabs(origin_offset) <= kGeomTol) return 0.0; // origin on the line
    if (std::fabs(approach) < 1e-15) return std::nullopt;
    double t = origin_offset / approach;
    if (t < 0.0) return std::nullopt;
    return t;
}

/// True iff segment a-b touches the closed rectangle (endpoints on the
/// boundary count). Liang-Barsky clipping in the rectangle frame.
inline bool segment_intersects_rect(Vec2 a, Vec2 b, const OrientedRect& r) {
    Vec2 p = r.to_local(a);
    Vec2 q = r.to_local(b);
    Vec2 d = q - p;
    double hx = 0.5 * r.length() + kGeomTol;
    double hy = 0.5 * r.width() + kGeomTol;
    double t0 = 0.0;
    double t1 = 1.0;
    auto clip = [&](double denom, double num) {
        // keep the part where denom * t <= num
        if (denom == 0.0) return num >= 0.0;
        double t = num / denom;
        if (denom > 0.0) {
            if (t < t0) return false;
            if (t < t1) t1 = t;
        } else {
            if (t > t1) return false;
            if (t > t0) t0 = t;
        }
        return true;
    };
    return clip(d.x, hx - p.x) && clip(-d.x, hx + p.x) && clip(d.y, hy - p.y) && clip(-d.y, hy + p.y) && t0 <= t1;
}

inline bool segment_intersects_rect(const Segment& s, const OrientedRect& r) {
    return segment_intersects_rect(s.a, s.b, r);
}

struct EdgeHit {
    std::size_t rect = 0;
    int edge = 0;
    Vec2 point;
    double distance = 0.0;
};

/// Nearest edge crossed by the ray from origin along theta, at strictly
/// positive distance. Grazing contacts with edge endpoints count as hits.
inline std::optional<EdgeHit> first_edge_hit(Vec2 origin, double theta, std::span<const OrientedRect> scene) {
    Vec2 dir = unit_vector(theta);
    std::optional<EdgeHit> best;
    auto consider = [&](std::size_t i, int k, double t) {
        if (t <= kGeomTol) return;
        if (!best || t < best->distance) best = EdgeHit{i, k, origin + t * dir, t};
    };
    for (std::size_t i = 0; i < scene.size(); ++i) {
        for (int k = 0; k < 4; ++k) {
            Segment e = scene[i].edge(k);
            Vec2 ev = e.b - e.a;
            Vec2 ao = e.a - origin;
            double denom = cross(dir, ev);
            double len = norm(ev);
            if (std::fabs(denom) > 1e-15 * len) {
                double t = cross(ao, ev) / denom;
                double s = cross(ao, dir) / denom;
                double slack = kGeomTol / len;
                if (s >= -slack && s <= 1.0 + slack) consider(i, k, t);
            } else if (std::fabs(cross(ao, dir)) <= kGeomTol) {
                // ray runs along the edge: first contact is the nearer endpoint ahead
                double ta = dot(ao, dir);
                double tb = dot(e.b - origin, dir);
                double lo = std::min(ta, tb);
                double hi = std::max(ta, tb);
                if (hi > kGeomTol) consider(i, k, lo > kGeomTol ? lo : hi);
            }
        }
    }
    return best;
}

} // namespace beamcov::geometry
