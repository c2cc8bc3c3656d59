// Unit conversions and angle helpers shared by every beamcov module.
//
// Angles are radians everywhere inside the library. Degrees and decibels
// only appear at the configuration / CSV boundary.

#pragma once

#include <cmath>
#include <numbers>

namespace beamcov {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
inline constexpr double kSpeedOfLight = 2.99792458e8; // m/s

/// Absolute tolerance for geometric comparisons (meters, or radians for angles).
inline constexpr double kGeomTol = 1e-9;

inline double deg_to_rad(double deg) { return deg * (kPi / 180.0); }
inline double rad_to_deg(double rad) { return rad * (180.0 / kPi); }

/// 10^(x/10). 3 dB maps to 1.99526..., not 2.
inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double lin) { return 10.0 * std::log10(lin); }

/// dBm to watts: 30 dBm is 1 W.
inline double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

/// Wraps an angle into [0, 2*pi).
inline double normalize_angle(double theta) {
    double t = std::fmod(theta, kTwoPi);
    if (t < 0.0) t += kTwoPi;
    // fmod of a tiny negative number can round up to exactly 2*pi
    if (t >= kTwoPi) t = 0.0;
    return t;
}

/// Minimal angular distance between two directions, in [0, pi].
inline double angular_distance(double a, double b) {
    return std::fabs(std::remainder(a - b, kTwoPi));
}

} // namespace beamcov
