#pragma once

#include "swarmcap/environment.hpp"
#include "swarmcap/geometry.hpp"
#include "swarmcap/rng.hpp"

#include <optional>
#include <span>
#include <vector>

namespace swarmcap {

struct PatternSpec {
    enum class Kind { constant, circle, waypoints };
    Kind kind = Kind::constant;
    double cruise_step = 0.2;
    double turn_rate = 0.05;       // circle pattern, radians per step
    std::vector<Vec2> waypoints;   // waypoint pattern, visited cyclically
};

struct MotionModel {
    enum class Kind { random, random_escape, pattern_escape };
    Kind kind = Kind::random;
    PatternSpec pattern;
};

struct TargetState {
    Vec2 center = Vec2::Zero();
    double heading = 0.0;
    double radius = 1.0;
    double max_step = 0.2;
    double escape_radius = 4.0;
    bool captured = false;
    int waypoint_index = 0;  // waypoint pattern progress
};

struct TargetStep {
    double turn = 0.0;
    double step = 0.0;
    bool escape_triggered = false;
    int next_waypoint = 0;
};

// Heading that flees every intruder: uniform over the open arc of directions
// that increase the distance to each of them; when the arc is empty, the
// heading maximizing the minimum post-move distance. Global frame. Throws on
// an empty intruder list.
double escape_heading(const Vec2& target_center, std::span<const Vec2> intruders, double step,
                      Rng& rng);

// The feasible escape arc itself (empty when the intruders surround the
// target). Exposed for tests.
std::optional<AngularInterval> escape_arc(const Vec2& target_center,
                                          std::span<const Vec2> intruders);

// One motion decision for a non-captured target. `boundary_margin` is the
// minimum boundary distance every post-move center must keep.
TargetStep target_step(const TargetState& target, const MotionModel& model,
                       std::span<const Vec2> robot_positions, const Environment& env,
                       double boundary_margin, Rng& rng);

}  // namespace swarmcap
