// Analytic beam coverage probability: Friis link budget, the direct-beam
// term, and the first-order reflection term integrated over the position
// and orientation of the first obstacle hit by the beam.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "beamcov/env_stats.hpp"
#include "beamcov/geometry.hpp"
#include "beamcov/parallel.hpp"
#include "beamcov/units.hpp"

namespace beamcov {

using geometry::BeamSpec;
using geometry::PolarPoint;
using geometry::Vec2;

/// How the reflected-path range is derived from the direct range d0.
/// Paper: d0 / sigma. Friis: d0 / sqrt(sigma), the exact solution of the
/// reflected link budget.
enum class RangeMode { Paper, Friis };

struct RadioParams {
    double p_t = 1.0;                  ///< transmit power, W
    double g_u = 1.0;                  ///< user antenna gain, linear
    double f = 30e9;                   ///< carrier, Hz
    double p_n = 1e-12;                ///< noise power, W
    double gamma = 1.0;                ///< SNR threshold, linear
    double sigma = 1.0;                ///< reflection loss, linear >= 1
    static constexpr double c = kSpeedOfLight;

    static RadioParams from_db(double pt_dbm, double gu_dbi, double f_hz, double pn_dbm, double gamma_db,
                               double sigma_db) {
        return {dbm_to_watts(pt_dbm), db_to_linear(gu_dbi), f_hz, dbm_to_watts(pn_dbm),
                db_to_linear(gamma_db), db_to_linear(sigma_db)};
    }

    void validate() const {
        if (!(p_t > 0 && g_u > 0 && f > 0 && p_n > 0 && gamma > 0))
            throw std::invalid_argument("RadioParams: powers, gains, frequency and threshold must be > 0");
        if (!(sigma >= 1.0)) throw std::invalid_argument("RadioParams: reflection loss must be >= 1");
    }

    friend bool operator==(const RadioParams&, const RadioParams&) = default;
};

struct CoverageBreakdown {
    double p_direct = 0.0;
    double p_reflected = 0.0;
    double p_total = 0.0;
};

inline double snr_direct(const RadioParams& radio, const BeamSpec& beam, double d) {
    if (!(d > 0.0)) throw std::invalid_argument("snr_direct: distance must be > 0");
    double k = 4.0 * kPi * d * radio.f;
    return radio.p_t * beam.gain() * radio.g_u * RadioParams::c * RadioParams::c / (k * k * radio.p_n);
}

/// Distance at which the direct SNR equals the threshold.
inline double threshold_distance_direct(const RadioParams& radio, const BeamSpec& beam) {
    return RadioParams::c / (4.0 * kPi * radio.f) *
           std::sqrt(radio.p_t * beam.gain() * radio.g_u / (radio.gamma * radio.p_n));
}

inline double threshold_distance_reflected(const RadioParams& radio, const BeamSpec& beam,
                                           RangeMode mode = RangeMode::Paper) {
    double d0 = threshold_distance_direct(radio, beam);
    return mode == RangeMode::Paper ? d0 / radio.sigma : d0 / std::sqrt(radio.sigma);
}

/// Whether the direct beam serves the user at all. Users on the sector
/// border belong to the reflected regime.
inline bool direct_event(const BeamSpec& beam, const PolarPoint& user) {
    return geometry::sector_interior_contains(beam, user.theta());
}

inline double direct_coverage(const RadioParams& radio, const BeamSpec& beam, const EnvParams& env,
                              const PolarPoint& user) {
    if (!direct_event(beam, user)) return 0.0;
    if (user.d() > threshold_distance_direct(radio, beam)) return 0.0;
    return p_los(blockage_params(env), user.d());
}

struct VirtualUser {
    double theta = 0.0;
    double d = 0.0;
    std::optional<double> d_rv; ///< BS-to-wall distance along theta, if the ray meets the wall
};

/// Mirrors the user across the wall through the point at distance r on the
/// beam axis, with wall orientation alpha.
inline VirtualUser virtual_user(const PolarPoint& user, const BeamSpec& beam, double r, double alpha) {
    if (!(r >= 0.0)) throw std::invalid_argument("virtual_user: r must be >= 0");
    geometry::MirrorLine line(r * beam.axis(), alpha);
    PolarPoint image = PolarPoint::from_cartesian(geometry::mirror_point(line, user.to_cartesian()));
    return {image.theta(), image.d(), geometry::ray_line_distance(image.theta(), line)};
}

struct QuadratureConfig {
    std::size_t initial_alpha = 256;
    std::size_t initial_r = 256;
    int max_refinements = 6;
    double rel_tol = 1e-4; ///< bound on the relative change one further doubling would make
    unsigned threads = 1;

    friend bool operator==(const QuadratureConfig&, const QuadratureConfig&) = default;
};

class QuadratureError : public std::runtime_error {
public:
    QuadratureError(double previous, double last)
        : std::runtime_error("reflected coverage quadrature did not converge (last estimates " +
                             std::to_string(previous) + ", " + std::to_string(last) + ")"),
          previous_(previous), last_(last) {}

    double previous() const { return previous_; }
    double last() const { return last_; }

private:
    double previous_;
    double last_;
};

/// The reflected term split into its two parts, plus the grid that met the
/// tolerance.
struct ReflectedTerms {
    double atom = 0.0;       ///< first obstacle covers the BS
    double continuous = 0.0; ///< first obstacle at r > 0
    std::size_t alpha_cells = 0;
    std::size_t r_cells = 0;
    int refinements = 0;

    double total() const { return atom + continuous; }
};

namespace detail {

/// Everything about one (beam, user, range) that the reflection integrand
/// needs, with the wall-dependent parts computed per orientation.
class ReflectionIntegrand {
public:
    ReflectionIntegrand(const BeamSpec& beam, const EnvParams& env, const PolarPoint& user, double range)
        : beam_(beam), env_(env), bp_(blockage_params(env)), axis_(beam.axis()), user_(user.to_cartesian()),
          left_edge_(geometry::unit_vector(beam.theta() - beam.half_width())),
          right_edge_(geometry::unit_vector(beam.theta() + beam.half_width())), range_(range) {}

    const BlockageParams& blockage() const { return bp_; }

    /// Wall orientations in [0, pi) where the indicator can jump: a wall
    /// parallel to the beam axis, or perpendicular to either sector edge
    /// (the latter matters when the user sits on that edge).
    std::vector<double> alpha_breaks() const {
        std::vector<double> breaks;
        for (double a : {beam_.theta(), beam_.theta() - beam_.half_width() + 0.5 * kPi,
                         beam_.theta() + beam_.half_width() + 0.5 * kPi}) {
            double b = std::fmod(normalize_angle(a), kPi);
            if (std::none_of(breaks.begin(), breaks.end(), [&](double x) { return std::fabs(x - b) < 1e-12; }))
                breaks.push_back(b);
        }
        std::sort(breaks.begin(), breaks.end());
        return breaks;
    }

    /// Values of r in [0, range] for which the mirrored user lies in the
    /// sector, behind the wall, and within range. The constraints are convex
    /// along r, so the set is one interval.
    std::optional<std::pair<double, double>> support(double alpha) const {
        Slice s = slice(alpha);
        double lo = 0.0;
        double hi = range_;
        bool ok = true;
        // c0 + c1 * r >= 0
        auto linear = [&](double c0, double c1) {
            if (c1 > 0.0)
                lo = std::max(lo, -c0 / c1);
            else if (c1 < 0.0)
                hi = std::min(hi, -c0 / c1);
            else if (c0 < 0.0)
                ok = false;
        };
        // user and BS on the same side of the wall: r * nb * (r * nb - nx) >= 0
        linear(-s.nb * s.nx, s.nb * s.nb);
        // mirrored user inside the closed wedge
        linear(geometry::cross(left_edge_, s.image0), geometry::cross(left_edge_, s.drift));
        linear(geometry::cross(s.image0, right_edge_), geometry::cross(s.drift, right_edge_));
        // |image0 + r * drift| <= range
        double a = geometry::dot(s.drift, s.drift);
        double b = 2.0 * geometry::dot(s.image0, s.drift);
        double c = geometry::dot(s.image0, s.image0) - range_ * range_;
        if (a == 0.0) {
            if (c > 0.0) ok = false;
        } else {
            double disc = b * b - 4.0 * a * c;
            if (disc < 0.0) {
                ok = false;
            } else {
                double root = std::sqrt(disc);
                lo = std::max(lo, (-b - root) / (2.0 * a));
                hi = std::min(hi, (-b + root) / (2.0 * a));
            }
        }
        if (!ok || !(lo <= hi)) return std::nullopt;
        return std::pair{lo, hi};
    }

    /// P(LOS after reflection) for a wall through r * axis with orientation alpha.
    double los_after_reflection(double r, double alpha) const {
        Slice s = slice(alpha);
        Vec2 image = s.image0 + r * s.drift;
        double d_v = geometry::norm(image);
        double user_side = std::fabs(s.nx - r * s.nb);
        double bs_side = std::fabs(r * s.nb);
        // similar triangles split the folded path at the wall
        double d_ru = user_side + bs_side > 0.0 ? d_v * user_side / (user_side + bs_side) : 0.0;
        return p_los_after_reflection(bp_, env_, r, d_ru, reflection_angle(beam_.theta(), alpha));
    }

private:
    struct Slice {
        double nb;    // wall normal . beam axis
        double nx;    // wall normal . user
        Vec2 image0;  // user mirrored across the parallel wall through the BS
        Vec2 drift;   // image moves by r * drift as the wall slides along the axis
    };

    Slice slice(double alpha) const {
        Vec2 n = geometry::unit_vector(alpha + 0.5 * kPi);
        double nb = geometry::dot(n, axis_);
        double nx = geometry::dot(n, user_);
        return {nb, nx, user_ - 2.0 * nx * n, 2.0 * nb * n};
    }

    BeamSpec beam_;
    EnvParams env_;
    BlockageParams bp_;
    Vec2 axis_;
    Vec2 user_;
    Vec2 left_edge_;
    Vec2 right_edge_;
    double range_;
};

/// Continuous part on an n_alpha x n_r midpoint grid. The r direction is
/// integrated over the exact support in the variable v = exp(-beta r),
/// which absorbs the exponential density.
inline double reflected_continuous_on_grid(const ReflectionIntegrand& integrand, std::size_t n_alpha,
                                           std::size_t n_r, unsigned threads) {
    const BlockageParams& bp = integrand.blockage();
    if (bp.beta == 0.0) return 0.0;
    // cells are laid out piecewise between the jump orientations, wrapping at pi
    const auto breaks = integrand.alpha_breaks();
    std::vector<double> cell_alpha;
    std::vector<double> cell_width;
    cell_alpha.reserve(n_alpha + breaks.size());
    cell_width.reserve(n_alpha + breaks.size());
    for (std::size_t k = 0; k < breaks.size(); ++k) {
        double start = breaks[k];
        double stop = k + 1 < breaks.size() ? breaks[k + 1] : breaks.front() + kPi;
        double length = stop - start;
        auto cells = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(length / kPi * n_alpha)));
        double h = length / static_cast<double>(cells);
        for (std::size_t c = 0; c < cells; ++c) {
            cell_alpha.push_back(start + (static_cast<double>(c) + 0.5) * h);
            cell_width.push_back(h);
        }
    }
    std::vector<double> rows(cell_alpha.size(), 0.0);
    parallel_for(cell_alpha.size(), threads, [&](std::size_t i) {
        double alpha = cell_alpha[i];
        auto span = integrand.support(alpha);
        if (!span) return;
        double v_near = std::exp(-bp.beta * span->first);
        double v_far = std::exp(-bp.beta * span->second);
        if (!(v_near > v_far)) return;
        double dv = (v_near - v_far) / static_cast<double>(n_r);
        double sum = 0.0;
        for (std::size_t k = 0; k < n_r; ++k) {
            double v = v_far + (static_cast<double>(k) + 0.5) * dv;
            sum += integrand.los_after_reflection(-std::log(v) / bp.beta, alpha);
        }
        rows[i] = sum * dv * cell_width[i];
    });
    double total = 0.0;
    for (double row : rows) total += row;
    return std::exp(-bp.p) / kPi * total;
}

/// Dirac part: the first obstacle covers the BS, so the wall passes through
/// the origin and the image sits at angle 2*alpha - theta_u. That angle
/// sweeps the circle once while alpha sweeps [0, pi), so the indicator holds
/// on a set of measure width/2; and with d_r = 0 the clear-leg probability
/// is exp(-beta d_u) for every psi.
inline double reflected_atom(const BeamSpec& beam, const EnvParams& env, const PolarPoint& user, double range) {
    BlockageParams bp = blockage_params(env);
    if (user.d() > range) return 0.0;
    double clear_leg = p_los_after_reflection(bp, env, 0.0, user.d(), kPi);
    return first_obstacle_density(bp).atom_at_zero() / kPi * beam.half_width() * clear_leg;
}

} // namespace detail

inline ReflectedTerms reflected_coverage_terms(const RadioParams& radio, const BeamSpec& beam, const EnvParams& env,
                                               const PolarPoint& user, const QuadratureConfig& quad = {},
                                               RangeMode mode = RangeMode::Paper) {
    if (!(user.d() > 0.0)) throw std::invalid_argument("reflected_coverage: user distance must be > 0");
    ReflectedTerms terms;
    if (direct_event(beam, user) || env.lambda == 0.0) return terms;
    double range = threshold_distance_reflected(radio, beam, mode);
    // the folded path is never shorter than the straight one
    if (user.d() > range) return terms;

    terms.atom = detail::reflected_atom(beam, env, user, range);
    detail::ReflectionIntegrand integrand(beam, env, user, range);
    std::size_t na = quad.initial_alpha;
    std::size_t nr = quad.initial_r;
    double earlier = 0.0;
    double previous = detail::reflected_continuous_on_grid(integrand, na, nr, quad.threads);
    for (int k = 1; k <= quad.max_refinements; ++k) {
        na *= 2;
        nr *= 2;
        double current = detail::reflected_continuous_on_grid(integrand, na, nr, quad.threads);
        double total = terms.atom + current;
        // the error is first order (indicator jumps), so the next doubling moves the
        // result by about half of this change; the factor 4 leaves room for noise
        if (std::fabs(current - previous) <= 0.25 * quad.rel_tol * total + 1e-15) {
            terms.continuous = current;
            terms.alpha_cells = na;
            terms.r_cells = nr;
            terms.refinements = k;
            return terms;
        }
        earlier = previous;
        previous = current;
    }
    throw QuadratureError(terms.atom + earlier, terms.atom + previous);
}

inline double reflected_coverage(const RadioParams& radio, const BeamSpec& beam, const EnvParams& env,
                                 const PolarPoint& user, const QuadratureConfig& quad = {},
                                 RangeMode mode = RangeMode::Paper) {
    return reflected_coverage_terms(radio, beam, env, user, quad, mode).total();
}

inline CoverageBreakdown total_coverage(const RadioParams& radio, const BeamSpec& beam, const EnvParams& env,
                                        const PolarPoint& user, const QuadratureConfig& quad = {},
                                        RangeMode mode = RangeMode::Paper) {
    if (!(user.d() > 0.0)) throw std::invalid_argument("total_coverage: user distance must be > 0");
    CoverageBreakdown out;
    out.p_direct = direct_coverage(radio, beam, env, user);
    out.p_reflected = reflected_coverage(radio, beam, env, user, quad, mode);
    out.p_total = out.p_direct + out.p_reflected;
    return out;
}

} // namespace beamcov
