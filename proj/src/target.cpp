#include "swarmcap/target.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace swarmcap {
namespace {

constexpr int kEscapeGrid = 3600;
constexpr int kResampleTries = 64;

// Reflect a direction off the wall nearest to `p` (specular bounce).
double reflect_heading(const Environment& env, const Vec2& p, double heading) {
    Vec2 v = unit_vec(heading);
    Vec2 n;  // outward normal of the nearest wall
    if (env.shape == Environment::Shape::disk) {
        n = p.norm() > 1e-9 ? Vec2(p.normalized()) : Vec2(1.0, 0.0);
    } else {
        const double dx = env.half_width - std::abs(p.x());
        const double dy = env.half_height - std::abs(p.y());
        if (dx <= dy)
            n = Vec2(p.x() >= 0.0 ? 1.0 : -1.0, 0.0);
        else
            n = Vec2(0.0, p.y() >= 0.0 ? 1.0 : -1.0);
    }
    v -= 2.0 * v.dot(n) * n;
    return bearing(v);
}

double max_step_within_margin(const Environment& env, const Vec2& from, double heading,
                              double step, double margin) {
    if (env.contains(from + step * unit_vec(heading), margin)) return step;
    double lo = 0.0, hi = step;
    for (int i = 0; i < 40; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (env.contains(from + mid * unit_vec(heading), margin))
            lo = mid;
        else
            hi = mid;
    }
    return lo;
}

}  // namespace

std::optional<AngularInterval> escape_arc(const Vec2& target_center,
                                          std::span<const Vec2> intruders) {
    if (intruders.empty()) throw std::invalid_argument("escape requires at least one intruder");
    // Directions that increase the distance to intruder i form the open
    // half-circle around the away-bearing c_i. The intersection of these
    // convex cones is a single arc (or empty).
    const double ref = bearing(target_center - intruders[0]);
    double rel_max = 0.0;
    double rel_min = 0.0;
    for (const Vec2& r : intruders) {
        const double rel = wrap_signed(bearing(target_center - r) - ref);
        rel_max = std::max(rel_max, rel);
        rel_min = std::min(rel_min, rel);
    }
    const double lo = rel_max - kPi / 2.0;
    const double hi = rel_min + kPi / 2.0;
    if (hi - lo <= 1e-12) return std::nullopt;
    return AngularInterval::from_bounds(ref + lo, ref + hi);
}

double escape_heading(const Vec2& target_center, std::span<const Vec2> intruders, double step,
                      Rng& rng) {
    const auto arc = escape_arc(target_center, intruders);
    if (arc) return wrap_angle(arc->lo + rng.uniform01() * arc->width);

    // Surrounded: maximize the minimum post-move distance over a fine grid.
    double best_h = 0.0;
    double best_min = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < kEscapeGrid; ++i) {
        const double h = kTwoPi * i / kEscapeGrid;
        const Vec2 post = target_center + step * unit_vec(h);
        double dmin = std::numeric_limits<double>::infinity();
        for (const Vec2& r : intruders) dmin = std::min(dmin, (post - r).norm());
        if (dmin > best_min) {
            best_min = dmin;
            best_h = h;
        }
    }
    return best_h;
}

TargetStep target_step(const TargetState& target, const MotionModel& model,
                       std::span<const Vec2> robot_positions, const Environment& env,
                       double boundary_margin, Rng& rng) {
    if (target.captured) return TargetStep{0.0, 0.0, false, target.waypoint_index};

    const bool escape_capable = model.kind != MotionModel::Kind::random;
    std::vector<Vec2> intruders;
    if (escape_capable) {
        for (const Vec2& r : robot_positions) {
            if ((r - target.center).norm() <= target.escape_radius) intruders.push_back(r);
        }
    }

    if (!intruders.empty()) {
        // Flee at full step. Boundary margin still binds: resample inside the
        // feasible arc, fall back to the best grid heading, truncating the
        // step when cornered against the margin.
        const auto arc = escape_arc(target.center, intruders);
        if (arc) {
            for (int i = 0; i < kResampleTries; ++i) {
                const double h = wrap_angle(arc->lo + rng.uniform01() * arc->width);
                if (env.contains(target.center + target.max_step * unit_vec(h), boundary_margin))
                    return TargetStep{wrap_signed(h - target.heading), target.max_step, true,
                                      target.waypoint_index};
            }
        }
        double best_h = 0.0;
        double best_min = -std::numeric_limits<double>::infinity();
        for (int i = 0; i < kEscapeGrid; ++i) {
            const double h = kTwoPi * i / kEscapeGrid;
            const Vec2 post = target.center + target.max_step * unit_vec(h);
            if (!env.contains(post, boundary_margin)) continue;
            double dmin = std::numeric_limits<double>::infinity();
            for (const Vec2& r : intruders) dmin = std::min(dmin, (post - r).norm());
            if (dmin > best_min) {
                best_min = dmin;
                best_h = h;
            }
        }
        if (best_min > -std::numeric_limits<double>::infinity()) {
            return TargetStep{wrap_signed(best_h - target.heading), target.max_step, true,
                              target.waypoint_index};
        }
        // No full step keeps the margin; shorten along the least-bad heading.
        const double h = escape_heading(target.center, intruders, target.max_step, rng);
        const double s = max_step_within_margin(env, target.center, h, target.max_step,
                                                boundary_margin);
        return TargetStep{wrap_signed(h - target.heading), s, true, target.waypoint_index};
    }

    switch (model.kind) {
        case MotionModel::Kind::random:
        case MotionModel::Kind::random_escape: {
            // Uniform turn and step, resampled so the post-move center keeps
            // the boundary margin (preserves the zero-mean heading model).
            for (int i = 0; i < kResampleTries; ++i) {
                const double turn = rng.uniform(0.0, kTwoPi);
                const double step = rng.uniform(0.0, target.max_step);
                const Vec2 post =
                    target.center + step * unit_vec(target.heading + turn);
                if (env.contains(post, boundary_margin))
                    return TargetStep{turn, step, false, target.waypoint_index};
            }
            const double h = reflect_heading(env, target.center, target.heading);
            const double s =
                max_step_within_margin(env, target.center, h, target.max_step, boundary_margin);
            return TargetStep{wrap_signed(h - target.heading), s, false, target.waypoint_index};
        }
        case MotionModel::Kind::pattern_escape: {
            const PatternSpec& pattern = model.pattern;
            double turn = 0.0;
            double step = pattern.cruise_step;
            int next_wp = target.waypoint_index;
            switch (pattern.kind) {
                case PatternSpec::Kind::constant:
                    break;
                case PatternSpec::Kind::circle:
                    turn = pattern.turn_rate;
                    break;
                case PatternSpec::Kind::waypoints: {
                    if (pattern.waypoints.empty()) break;
                    const Vec2& wp = pattern.waypoints[next_wp % pattern.waypoints.size()];
                    const double dist = (wp - target.center).norm();
                    turn = wrap_signed(bearing(wp - target.center) - target.heading);
                    step = std::min(step, dist);
                    if (dist <= pattern.cruise_step)
                        next_wp = static_cast<int>((next_wp + 1) % pattern.waypoints.size());
                    break;
                }
            }
            double heading = wrap_angle(target.heading + turn);
            if (!env.contains(target.center + step * unit_vec(heading), boundary_margin)) {
                heading = reflect_heading(env, target.center, heading);
                turn = wrap_signed(heading - target.heading);
                step = max_step_within_margin(env, target.center, heading, step, boundary_margin);
            }
            return TargetStep{turn, step, false, next_wp};
        }
    }
    return TargetStep{0.0, 0.0, false, target.waypoint_index};
}

}  // namespace swarmcap
