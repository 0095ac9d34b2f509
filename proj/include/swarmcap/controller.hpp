#pragma once

#include "swarmcap/geometry.hpp"
#include "swarmcap/rng.hpp"
#include "swarmcap/signal.hpp"

#include <optional>
#include <utility>

namespace swarmcap {

// Per-robot control parameters. Stateless between timesteps.
struct RobotParams {
    double radius = 1.0;
    double max_step = 0.3;
    double safe_target = 2.0;
    double safe_robot = 3.0;
    double safe_env = 2.0;
    SensorArray sensors;
    bool baseline_mode = false;     // disables the tangential behaviors
    int heading_candidates = 33;    // odd, endpoints + midpoint included
    bool refine_los = true;         // noiseless symmetric-array refinement
    double robot_margin_inflation = 0.0;  // extra avoidance margin under noise
};

// Concentric orbit bands around a target. The primary band spans
// (inner, outer]; secondary band i > 0 spans (outer + (i-1)w, outer + i*w].
// Tie-breaking rotations alternate, primary clockwise.
struct OrbitSet {
    double inner = 3.0;  // effective inner radius (noise inflation applied)
    double outer = 6.0;  // encapsulation radius
    double width = 3.0;

    // -1 when range <= inner ("inside"); band index otherwise.
    int orbit_of(double range) const;

    // +1 counter-clockwise, -1 clockwise.
    static int rotation(int orbit_index) { return (orbit_index % 2 == 0) ? -1 : +1; }
};

enum class Behavior {
    avoid_boundary,
    random_walk,
    avoid_target,
    orbit_tangent,
    approach_target,
    tangent_fallback,
    min_signal_fallback,
    frozen,
};

const char* to_string(Behavior b);

struct ControlOutput {
    double turn = 0.0;   // heading change, robot frame
    double step = 0.0;   // in [0, max_step]
    Behavior behavior = Behavior::random_walk;
    int rotation = 0;    // -1 / +1 when a tangential direction was taken
    std::optional<double> target_range;  // inferred, when a target was sensed
    int orbit = 0;       // -1 inside, i >= 0 band index; meaningful with target_range
};

// Angular range containing the source bearing for the argmax sensor.
AngularInterval los_range(int k, const SensorArray& sensors);

// Noiseless refinement: comparing the two neighbor readings halves the range.
// Symmetric arrays only; falls back to the unrefined range otherwise.
AngularInterval los_range_refined(int k, const SensorArray& sensors,
                                  const Eigen::ArrayXd& readings);

// Headings guaranteed to increase distance to a source anywhere in `los`.
// Throws when the range is empty (possible-bearing cone spans >= pi).
AngularInterval avoid_range_from(const AngularInterval& los);
AngularInterval avoid_range(int k, const SensorArray& sensors);

// Clockwise (-1) and counter-clockwise (+1) tangential heading ranges.
std::pair<AngularInterval, AngularInterval> tangent_ranges_from(const AngularInterval& los);
std::pair<AngularInterval, AngularInterval> tangent_ranges(int k, const SensorArray& sensors);

// Largest step along heading `theta` that keeps the post-move center at least
// (safe_robot + max_step) from every source position consistent with the
// forward-facing sensors' readings, so separation stays >= safe_robot even if
// the nearest neighbor simultaneously moves max_step closer. The smallest of
// the per-sensor bounds is taken as the worst case; sensors reading zero
// carry no virtual source and impose no constraint.
double dist_avo_rob(const Eigen::ArrayXd& robot_readings, const SignalProfile& robot_profile,
                    double theta, const RobotParams& params);

// Largest step along `theta` keeping the post-move distance to the worst-case
// target position at least `inner_radius`. The worst case places the target at
// the under-approximated range on the admissible bearing nearest to theta,
// then advances it target_max_step toward the robot.
double dist_avo_tar(double inferred_range, const AngularInterval& los, double theta,
                    double inner_radius, double target_max_step, const RobotParams& params);

int current_orbit(double inferred_range, const OrbitSet& orbits);

// Everything a control step needs besides the readings.
struct ControlInputs {
    const SignalModel* signals = nullptr;
    OrbitSet orbits;
    double target_max_step = 0.0;
    double sigma = 0.0;              // current sensor-noise level
    double env_trigger = 0.0;        // boundary-avoid trigger distance
};

// One reactive decision: boundary avoidance, random-walk search, target
// avoidance, orbit tangents, or target approach with fallbacks.
ControlOutput control_step(const ReadingSet& readings, const RobotParams& params,
                           const ControlInputs& in, Rng& rng);

}  // namespace swarmcap
