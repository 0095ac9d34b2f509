#pragma once

#include "swarmcap/trace.hpp"

#include <string>
#include <utility>
#include <vector>

namespace swarmcap {

struct Config;

// --- Closed-form parameter bounds -----------------------------------------
//
// All angles in radians; `half_angle` is half the maximum adjacent sensor gap
// (pi/p for symmetric arrays).

// Strict upper bound on the robot step size below which two robots can never
// deadlock head-on. Requires p >= 3 and safe_robot > 2 * robot_radius.
double max_robot_step(double safe_robot, double robot_radius, int p);

// Open interval of admissible robot-signal influence distances, given a step
// size below the max_robot_step bound. Empty (lo >= hi) means infeasible.
std::pair<double, double> robot_influence_interval(double safe_robot, double robot_radius, int p,
                                                   double max_step);

// Smallest admissible encapsulation-ring outer radius: the worst-case range
// at which the keep-out behavior can trigger, plus chatter margin.
double min_encap_radius(double orbit_inner, double robot_radius, int p, double max_step);

// How many robots fit on a ring of the given radius while staying outside
// each other's influence region.
struct RingCapacity {
    double real = 0.0;
    int floor = 0;
};
RingCapacity ring_capacity(double robot_influence, double robot_radius, double ring_radius);

// Angle subtended at a target by two ring robots dispersed to the edge of
// each other's influence region, clamped to (0, pi].
double dispersion_angle(double robot_influence, double robot_radius, double escape_radius);

// Maximum admissible target/robot step-size ratio for an escaping target,
// with the unminimized tangential and radial factors reported separately.
struct EscapeRatio {
    double ratio = 0.0;
    double tangential = 0.0;
    double radial = 0.0;
};
EscapeRatio step_ratio_escape(double half_angle, double alpha);

// Ratio for a randomly moving (potentially adversarial) target, from the worst
// case idle time of a ring robot in a swarm of n.
double step_ratio_random(int n, double robot_influence, double robot_radius, double orbit_inner);

// Ratios for a patterned target: the strict cruise-phase bound and the
// escape-phase bound.
struct PatternRatio {
    double cruise = 0.0;
    EscapeRatio escape;
};
PatternRatio step_ratio_pattern(double half_angle, double alpha);

// --- Whole-configuration feasibility ---------------------------------------

struct FeasibilityCheck {
    std::string name;
    std::string rule;     // human-readable statement of the requirement
    double bound = 0.0;   // computed bound
    double actual = 0.0;  // configured value
    bool pass = false;
    std::string note;
};

struct FeasibilityReport {
    std::vector<FeasibilityCheck> checks;

    bool pass() const {
        for (const auto& c : checks)
            if (!c.pass) return false;
        return true;
    }
};

// Evaluates every parameter bound against a parsed configuration. Failures are
// reported, not thrown; pass `strict` at the call site to escalate.
FeasibilityReport validate_config(const Config& config);

}  // namespace swarmcap
