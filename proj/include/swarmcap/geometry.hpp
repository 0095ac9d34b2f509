#pragma once

#include <Eigen/Core>

#include <cmath>
#include <numbers>

namespace swarmcap {

using Vec2 = Eigen::Vector2d;

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
inline constexpr double kPi = std::numbers::pi;

// Wraps an angle into [0, 2*pi).
inline double wrap_angle(double a) {
    a = std::fmod(a, kTwoPi);
    if (a < 0.0) a += kTwoPi;
    return a;
}

// Wraps an angle into (-pi, pi].
inline double wrap_signed(double a) {
    a = wrap_angle(a);
    if (a > kPi) a -= kTwoPi;
    return a;
}

inline Vec2 unit_vec(double angle) { return Vec2(std::cos(angle), std::sin(angle)); }

inline double bearing(const Vec2& v) { return wrap_angle(std::atan2(v.y(), v.x())); }

// Closed angular interval [lo, lo + width] on the circle, width in [0, 2*pi).
// Membership is invariant under +2*pi shifts of the query angle.
struct AngularInterval {
    double lo = 0.0;
    double width = 0.0;

    static AngularInterval from_bounds(double lo, double hi) {
        return AngularInterval{wrap_angle(lo), wrap_angle(hi - lo)};
    }

    double hi() const { return wrap_angle(lo + width); }
    double midpoint() const { return wrap_angle(lo + 0.5 * width); }

    bool contains(double a) const { return wrap_angle(a - lo) <= width + 1e-12; }

    // i-th of n evenly spaced candidates, endpoints included (n >= 2).
    double sample(int i, int n) const {
        return wrap_angle(lo + width * static_cast<double>(i) / static_cast<double>(n - 1));
    }

    // Absolute angular distance from a to the interval midpoint.
    double distance_to_midpoint(double a) const {
        return std::abs(wrap_signed(a - midpoint()));
    }
};

}  // namespace swarmcap
