// Shared helpers for the test binaries: a seeded generator for property
// tests and the paper-setting fixtures.

#pragma once

#include <cstdint>
#include <random>

#include "beamcov/beamcov.hpp"

namespace beamcov::test {

/// Small hand-rolled generator for property tests.
class Gen {
public:
    explicit Gen(std::uint64_t seed) : rng_(seed) {}

    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
    int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
    double angle() { return uniform(0.0, kTwoPi); }
    geometry::Vec2 point(double half) { return {uniform(-half, half), uniform(-half, half)}; }
    std::mt19937_64& engine() { return rng_; }

private:
    std::mt19937_64 rng_;
};

/// lambda = 2e-4, L ~ U[40, 60], W ~ U[30, 50].
inline EnvParams reference_env(double lambda = 2e-4) {
    EnvParams env;
    env.lambda = lambda;
    env.length = LengthDist::uniform(40.0, 60.0);
    env.width = LengthDist::uniform(30.0, 50.0);
    return env;
}

/// 30 dBm, -85 dBm noise, 30 GHz, 1 dBi user, 0 dB threshold, 3 dB reflection loss.
inline RadioParams reference_radio(double sigma_db = 3.0) {
    return RadioParams::from_db(30.0, 1.0, 30e9, -85.0, 0.0, sigma_db);
}

inline BeamSpec beam_deg(double theta_deg, double width_deg) {
    double gain_dbi = width_deg == 30.0 ? 12.0 : 36.0;
    return BeamSpec(deg_to_rad(theta_deg), deg_to_rad(width_deg), db_to_linear(gain_dbi));
}

inline PolarPoint user_deg(double theta_deg, double d) { return PolarPoint(deg_to_rad(theta_deg), d); }

} // namespace beamcov::test
