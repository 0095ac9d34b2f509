#include "swarmcap/controller.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace swarmcap {

const char* to_string(Behavior b) {
    switch (b) {
        case Behavior::avoid_boundary: return "avoid-boundary";
        case Behavior::random_walk: return "random-walk";
        case Behavior::avoid_target: return "avoid-target";
        case Behavior::orbit_tangent: return "orbit-tangent";
        case Behavior::approach_target: return "approach-target";
        case Behavior::tangent_fallback: return "tangent-fallback";
        case Behavior::min_signal_fallback: return "min-signal-fallback";
        case Behavior::frozen: return "frozen";
    }
    return "?";
}

int OrbitSet::orbit_of(double range) const {
    if (range <= inner) return -1;
    if (range <= outer) return 0;
    return static_cast<int>(std::ceil((range - outer) / width));
}

AngularInterval los_range(int k, const SensorArray& sensors) {
    const double hg = sensors.half_gap(k);
    return AngularInterval::from_bounds(sensors.angles[k] - hg, sensors.angles[k] + hg);
}

AngularInterval los_range_refined(int k, const SensorArray& sensors,
                                  const Eigen::ArrayXd& readings) {
    if (!sensors.is_symmetric()) return los_range(k, sensors);
    const int p = sensors.count();
    const double hg = sensors.half_gap(k);
    const double z_prev = readings[(k + p - 1) % p];
    const double z_next = readings[(k + 1) % p];
    if (z_prev > z_next)
        return AngularInterval::from_bounds(sensors.angles[k] - hg, sensors.angles[k]);
    if (z_next > z_prev)
        return AngularInterval::from_bounds(sensors.angles[k], sensors.angles[k] + hg);
    return los_range(k, sensors);
}

AngularInterval avoid_range_from(const AngularInterval& los) {
    if (los.width >= kPi - 1e-12)
        throw std::invalid_argument("avoid range empty: bearing cone spans at least pi");
    return AngularInterval::from_bounds(los.lo + los.width + kPi / 2.0, los.lo + 3.0 * kPi / 2.0);
}

AngularInterval avoid_range(int k, const SensorArray& sensors) {
    return avoid_range_from(los_range(k, sensors));
}

std::pair<AngularInterval, AngularInterval> tangent_ranges_from(const AngularInterval& los) {
    const AngularInterval cw =
        AngularInterval::from_bounds(los.lo + kPi / 2.0, los.lo + los.width + kPi / 2.0);
    const AngularInterval ccw = AngularInterval::from_bounds(los.lo + 3.0 * kPi / 2.0,
                                                             los.lo + los.width + 3.0 * kPi / 2.0);
    return {cw, ccw};
}

std::pair<AngularInterval, AngularInterval> tangent_ranges(int k, const SensorArray& sensors) {
    return tangent_ranges_from(los_range(k, sensors));
}

double dist_avo_rob(const Eigen::ArrayXd& robot_readings, const SignalProfile& robot_profile,
                    double theta, const RobotParams& params) {
    const int p = params.sensors.count();
    theta = wrap_angle(theta);
    const double margin = params.safe_robot * (1.0 + params.robot_margin_inflation) +
                          params.max_step;

    // Sensors within one angular gap of the motion direction contribute their
    // worst-case step bounds; the tightest wins. This always covers the two
    // bracketing sensors, and when theta falls exactly on a sensor axis the
    // flanking pair joins in, so no single reading ever certifies a step on
    // its own. Sensors reading zero carry no virtual source and impose no
    // constraint.
    const double gate = 2.0 * params.sensors.max_half_gap() + 1e-9;
    const double bracket = params.sensors.max_half_gap() + 1e-9;
    double bound = params.max_step;
    for (int k = 0; k < p; ++k) {
        if (robot_readings[k] <= 0.0) continue;
        const double delta = wrap_signed(params.sensors.angles[k] - theta);
        if (std::abs(delta) > gate) continue;
        const double radius = robot_profile.inverse(robot_readings[k]);
        const double slack = radius - margin;
        if (slack <= 0.0) return 0.0;  // source may sit inside the margin reach
        const double r_sin = params.radius * std::sin(delta);
        const double disc = slack * slack - r_sin * r_sin;
        if (disc < 0.0) {
            // The disk geometry cannot certify any step for this sensor. For
            // a bracketing sensor that means no step; a flanking sensor with
            // positive slack simply has nothing to add.
            if (std::abs(delta) <= bracket) return 0.0;
            continue;
        }
        const double b = params.radius * std::cos(delta) + std::sqrt(disc);
        if (b <= 0.0) return 0.0;
        bound = std::min(bound, b);
    }
    return bound;
}

double dist_avo_tar(double inferred_range, const AngularInterval& los, double theta,
                    double inner_radius, double target_max_step, const RobotParams& params) {
    // Worst-case target: at the under-approximated range on the admissible
    // bearing nearest theta, advanced target_max_step toward the robot.
    const double range = inferred_range - target_max_step;
    if (range <= inner_radius) return 0.0;

    double psi = theta;
    if (!los.contains(theta)) {
        const double to_lo = std::abs(wrap_signed(theta - los.lo));
        const double to_hi = std::abs(wrap_signed(theta - los.hi()));
        psi = (to_lo <= to_hi) ? los.lo : los.hi();
    }
    const double delta = wrap_signed(theta - psi);
    const double disc = inner_radius * inner_radius -
                        range * range * std::sin(delta) * std::sin(delta);
    if (disc < 0.0) return params.max_step;  // motion ray never meets the keep-out disk
    const double d_lo = range * std::cos(delta) - std::sqrt(disc);
    if (d_lo < 0.0) return params.max_step;  // keep-out disk behind the motion ray
    return std::min(params.max_step, d_lo);
}

int current_orbit(double inferred_range, const OrbitSet& orbits) {
    return orbits.orbit_of(inferred_range);
}

namespace {

struct PickResult {
    double theta = 0.0;
    double value = 0.0;
    int rotation = 0;
};

struct IntervalSpec {
    AngularInterval interval;
    int rotation = 0;  // -1/+1 for tangent intervals, 0 otherwise
};

// Argmax over discretized intervals. Ties break toward (a) the preferred
// rotation when set, (b) the candidate nearest its interval midpoint, then
// (c) the lowest candidate index.
template <typename Objective>
PickResult pick_heading(const std::vector<IntervalSpec>& intervals, int candidates,
                        int preferred_rotation, const Objective& objective) {
    PickResult best;
    bool have = false;
    double best_rot_rank = 0.0;
    double best_mid_dist = 0.0;
    const int n = std::max(2, candidates);
    for (const IntervalSpec& spec : intervals) {
        for (int i = 0; i < n; ++i) {
            const double theta = spec.interval.sample(i, n);
            const double value = objective(theta);
            const double rot_rank =
                (preferred_rotation != 0 && spec.rotation == preferred_rotation) ? 0.0 : 1.0;
            const double mid_dist = spec.interval.distance_to_midpoint(theta);
            const bool better =
                !have || value > best.value ||
                (value == best.value &&
                 (rot_rank < best_rot_rank ||
                  (rot_rank == best_rot_rank && mid_dist < best_mid_dist)));
            if (better) {
                best = PickResult{theta, value, spec.rotation};
                best_rot_rank = rot_rank;
                best_mid_dist = mid_dist;
                have = true;
            }
        }
    }
    return best;
}

int min_signal_sensor(const Eigen::ArrayXd& readings, Rng& rng) {
    const double lowest = readings.minCoeff();
    std::vector<int> tied;
    for (int k = 0; k < readings.size(); ++k) {
        if (readings[k] == lowest) tied.push_back(k);
    }
    if (tied.size() == 1) return tied.front();
    return tied[rng.uniform_int(static_cast<int>(tied.size()))];
}

}  // namespace

ControlOutput control_step(const ReadingSet& readings, const RobotParams& params,
                           const ControlInputs& in, Rng& rng) {
    const SignalModel& signals = *in.signals;
    const SensorArray& sensors = params.sensors;

    const auto avo_rob = [&](double theta) {
        return dist_avo_rob(readings.robot, signals.robot, theta, params);
    };

    // Boundary too close: retreat into the rear half-plane of the boundary
    // bearing, maximizing the robot-safe step.
    const auto env_est = infer_boundary_distance(readings.env, signals.env_response, sensors);
    if (env_est && env_est->distance <= in.env_trigger) {
        const AngularInterval range = avoid_range(env_est->sensor, sensors);
        const PickResult pick =
            pick_heading({{range, 0}}, params.heading_candidates, 0, avo_rob);
        return ControlOutput{pick.theta, pick.value, Behavior::avoid_boundary, 0, std::nullopt, 0};
    }

    const auto tar_est = infer_distance(readings.target, signals.target, sensors);
    if (!tar_est) {
        // No target sensed: random walk, falling back to the emptiest robot
        // direction when boxed in.
        const double theta = rng.uniform(0.0, kTwoPi);
        const double step = avo_rob(theta);
        if (step > 0.0) {
            return ControlOutput{theta, step, Behavior::random_walk, 0, std::nullopt, 0};
        }
        const int k = min_signal_sensor(readings.robot, rng);
        const double fallback_theta = sensors.angles[k];
        return ControlOutput{fallback_theta, avo_rob(fallback_theta),
                             Behavior::min_signal_fallback, 0, std::nullopt, 0};
    }

    const double range = tar_est->distance;
    const int orbit = in.orbits.orbit_of(range);
    const bool refined = params.refine_los && in.sigma == 0.0 && sensors.is_symmetric();
    const AngularInterval los = refined ? los_range_refined(tar_est->sensor, sensors, readings.target)
                                        : los_range(tar_est->sensor, sensors);

    const auto avo_tar = [&](double theta) {
        return dist_avo_tar(range, los, theta, in.orbits.inner, in.target_max_step, params);
    };

    if (orbit < 0) {
        // Inside the keep-out ring: move away, capped so the robot does not
        // overshoot out of the primary band.
        const AngularInterval range_avo = avoid_range_from(los);
        const PickResult pick =
            pick_heading({{range_avo, 0}}, params.heading_candidates, 0, avo_rob);
        const double required = std::abs(range - in.orbits.inner);
        return ControlOutput{pick.theta, std::min(pick.value, required), Behavior::avoid_target,
                             0, range, orbit};
    }

    const auto [tan_cw, tan_ccw] = tangent_ranges_from(los);

    if (orbit == 0 && !params.baseline_mode) {
        // Primary band: circulate, keeping safe from both robots and target.
        const auto objective = [&](double theta) { return std::min(avo_rob(theta), avo_tar(theta)); };
        const PickResult pick = pick_heading({{tan_cw, -1}, {tan_ccw, +1}},
                                             params.heading_candidates,
                                             OrbitSet::rotation(0), objective);
        return ControlOutput{pick.theta, pick.value, Behavior::orbit_tangent, pick.rotation,
                             range, orbit};
    }

    // Secondary band (or baseline mode): head for the target.
    const PickResult approach = pick_heading({{los, 0}}, params.heading_candidates, 0, avo_rob);
    double step = approach.value;
    const double capped = std::min(step, avo_tar(approach.theta));
    if (capped > 0.0) step = capped;
    if (step > 0.0) {
        return ControlOutput{approach.theta, step, Behavior::approach_target, 0, range, orbit};
    }

    if (!params.baseline_mode) {
        // Blocked toward the target: slide tangentially in the current band.
        const PickResult pick = pick_heading({{tan_cw, -1}, {tan_ccw, +1}},
                                             params.heading_candidates,
                                             OrbitSet::rotation(orbit), avo_rob);
        if (pick.value > 0.0) {
            return ControlOutput{pick.theta, pick.value, Behavior::tangent_fallback,
                                 pick.rotation, range, orbit};
        }
    }

    const int k = min_signal_sensor(readings.robot, rng);
    const double fallback_theta = sensors.angles[k];
    return ControlOutput{fallback_theta, avo_rob(fallback_theta), Behavior::min_signal_fallback,
                         0, range, orbit};
}

}  // namespace swarmcap
