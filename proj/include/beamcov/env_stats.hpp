// Blockage statistics of a Boolean model of rectangles whose centers form
// a homogeneous Poisson point process with uniformly distributed
// orientations.

#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>

#include "beamcov/units.hpp"

namespace beamcov {

/// Side-length distribution in meters. The analytic model only consumes
/// the first two moments; the simulator needs the uniform bounds.
class LengthDist {
public:
    static LengthDist uniform(double lo, double hi) {
        if (!(lo > 0.0 && hi >= lo)) throw std::invalid_argument("LengthDist: need 0 < lo <= hi");
        LengthDist d;
        d.mean_ = 0.5 * (lo + hi);
        d.second_moment_ = (lo * lo + lo * hi + hi * hi) / 3.0;
        d.bounds_ = Bounds{lo, hi};
        return d;
    }

    static LengthDist from_moments(double mean, double second_moment) {
        if (!(mean > 0.0)) throw std::invalid_argument("LengthDist: mean must be > 0");
        if (!(second_moment >= mean * mean * (1.0 - 1e-12)))
            throw std::invalid_argument("LengthDist: second moment below mean^2");
        LengthDist d;
        d.mean_ = mean;
        d.second_moment_ = second_moment;
        return d;
    }

    struct Bounds {
        double lo;
        double hi;
        friend bool operator==(const Bounds&, const Bounds&) = default;
    };

    double mean() const { return mean_; }
    double second_moment() const { return second_moment_; }
    const std::optional<Bounds>& bounds() const { return bounds_; }

    friend bool operator==(const LengthDist&, const LengthDist&) = default;

private:
    LengthDist() = default;

    double mean_ = 0.0;
    double second_moment_ = 0.0;
    std::optional<Bounds> bounds_;
};

struct EnvParams {
    double lambda = 0.0; ///< building centers per m^2
    LengthDist length = LengthDist::uniform(40.0, 60.0);
    LengthDist width = LengthDist::uniform(30.0, 50.0);

    void validate() const {
        if (!(lambda >= 0.0)) throw std::invalid_argument("EnvParams: lambda must be >= 0");
    }

    friend bool operator==(const EnvParams&, const EnvParams&) = default;
};

/// Mean obstacle count on a segment of length d is beta * d + p.
struct BlockageParams {
    double beta = 0.0; ///< 1/m
    double p = 0.0;
};

inline BlockageParams blockage_params(const EnvParams& env) {
    env.validate();
    return {2.0 * env.lambda * (env.length.mean() + env.width.mean()) / kPi,
            env.lambda * env.length.mean() * env.width.mean()};
}

/// Probability that no obstacle touches a segment of length d starting at the BS.
inline double p_los(const BlockageParams& bp, double d) {
    if (!(d >= 0.0)) throw std::invalid_argument("p_los: distance must be >= 0");
    return std::exp(-(bp.beta * d + bp.p));
}

/// Law of the distance to the first obstacle along a ray: an atom at zero
/// (an obstacle covering the BS) plus an exponential tail.
class MixedDensity {
public:
    explicit MixedDensity(BlockageParams bp) : bp_(bp) {}

    double atom_at_zero() const { return -std::expm1(-bp_.p); }

    double continuous_part(double r) const {
        if (r <= 0.0) return 0.0;
        return bp_.beta * std::exp(-(bp_.beta * r + bp_.p));
    }

    double cdf(double r) const {
        if (r < 0.0) return 0.0;
        if (bp_.beta == 0.0 && bp_.p == 0.0) return 0.0; // no obstacle ever occurs
        return -std::expm1(-(bp_.beta * r + bp_.p));
    }

    /// atom + integral of the continuous part over (0, inf). Zero when lambda = 0.
    double total_mass() const {
        if (bp_.beta == 0.0) return atom_at_zero();
        return 1.0;
    }

private:
    BlockageParams bp_;
};

inline MixedDensity first_obstacle_density(const BlockageParams& bp) { return MixedDensity(bp); }

/// Reflection angle psi = pi - 2*gamma, where gamma in [0, pi/2] is the acute
/// angle between the incoming direction and the wall line. psi -> 0 is a
/// fold-back, psi -> pi is grazing incidence.
inline double reflection_angle(double incoming_theta, double wall_alpha) {
    double delta = std::fabs(std::remainder(incoming_theta - wall_alpha, kPi));
    return kPi - 2.0 * delta;
}

/// Approximate probability that the wall-to-user leg of a first-order
/// reflection is clear, given the first obstacle at distance d_r and a
/// reflection angle psi.
inline double p_los_after_reflection(const BlockageParams& bp, const EnvParams& env, double d_r, double d_ru,
                                     double psi) {
    if (!(psi >= 0.0 && psi <= kPi)) throw std::invalid_argument("p_los_after_reflection: psi outside [0, pi]");
    if (!(d_r >= 0.0) || !(d_ru >= 0.0))
        throw std::invalid_argument("p_los_after_reflection: distances must be >= 0");

    double result;
    if (psi >= 0.5 * kPi) {
        result = std::exp(-bp.beta * d_ru);
    } else {
        // cot(psi) -> +inf as psi -> 0; the min below then picks the finite branch
        double cot = psi == 0.0 ? std::numeric_limits<double>::infinity() : 1.0 / std::tan(psi);
        double q = env.lambda * cot * (env.length.second_moment() + env.width.second_moment()) / 2.0;
        if (env.lambda == 0.0) q = 0.0;
        double shared = -bp.beta * d_ru + q;
        if (d_r >= d_ru)
            result = std::min(1.0, std::exp(shared));
        else
            result = std::exp(std::min(-bp.beta * (d_ru - d_r), shared));
    }
    return std::clamp(result, 0.0, 1.0);
}

} // namespace beamcov
