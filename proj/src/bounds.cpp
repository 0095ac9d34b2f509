#include "swarmcap/bounds.hpp"

#include "swarmcap/config.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace swarmcap {

double max_robot_step(double safe_robot, double robot_radius, int p) {
    if (p < 3) throw std::invalid_argument("deadlock-freedom requires at least 3 sensors");
    const double c = std::cos(kPi / p);
    const double chord = std::sqrt(safe_robot * safe_robot + robot_radius * robot_radius -
                                   2.0 * robot_radius * safe_robot * c);
    return 0.5 * (safe_robot + robot_radius * c) - 0.5 * chord;
}

std::pair<double, double> robot_influence_interval(double safe_robot, double robot_radius, int p,
                                                   double max_step) {
    const double c = std::cos(kPi / p);
    const double chord = std::sqrt(safe_robot * safe_robot + robot_radius * robot_radius -
                                   2.0 * robot_radius * safe_robot * c);
    return {chord + 2.0 * max_step, safe_robot + robot_radius * c};
}

double min_encap_radius(double orbit_inner, double robot_radius, int p, double max_step) {
    const double c = std::cos(kPi / p);
    return max_step + robot_radius +
           std::sqrt(orbit_inner * orbit_inner + robot_radius * robot_radius -
                     2.0 * robot_radius * orbit_inner * c);
}

RingCapacity ring_capacity(double robot_influence, double robot_radius, double ring_radius) {
    const double reach = robot_influence + robot_radius;
    const double arg = 1.0 - reach * reach / (2.0 * ring_radius * ring_radius);
    if (arg < -1.0)
        throw std::invalid_argument("ring capacity undefined: influence span exceeds the ring");
    const double step_angle = std::acos(std::min(1.0, arg));
    RingCapacity cap;
    cap.real = kTwoPi / step_angle;
    cap.floor = static_cast<int>(std::floor(cap.real));
    return cap;
}

double dispersion_angle(double robot_influence, double robot_radius, double escape_radius) {
    const double chord = robot_influence + robot_radius;
    if (chord > 2.0 * escape_radius)
        throw std::invalid_argument("dispersion angle undefined: chord exceeds the diameter");
    const double arg = 1.0 - chord * chord / (2.0 * escape_radius * escape_radius);
    // The escape arc cannot exceed pi; clamp (arg in [-1, 1) by the guard).
    return std::acos(std::max(-1.0, arg));
}

EscapeRatio step_ratio_escape(double half_angle, double alpha) {
    EscapeRatio out;
    if (half_angle >= kPi / 2.0) return out;  // fewer than 3 sensors: ratio 0
    if (half_angle <= 0.0) throw std::invalid_argument("half angle must be positive");
    if (alpha <= 0.0 || alpha > kPi) throw std::invalid_argument("dispersion angle out of (0, pi]");
    const double directional = std::sin(half_angle) / half_angle * std::cos(half_angle);
    const double tangential_gain =
        (alpha < kPi) ? alpha / std::sin(kPi - alpha) : std::numeric_limits<double>::infinity();
    out.tangential = tangential_gain * directional;
    out.radial = kPi / 2.0 * directional;
    out.ratio = std::min(kPi / 2.0, tangential_gain) * directional;
    return out;
}

double step_ratio_random(int n, double robot_influence, double robot_radius, double orbit_inner) {
    const RingCapacity cap = ring_capacity(robot_influence, robot_radius, orbit_inner);
    const int idle = n - cap.floor + 1;
    if (idle < 1) return 1.0;  // no excess robots, no waiting
    return 1.0 / static_cast<double>(idle);
}

PatternRatio step_ratio_pattern(double half_angle, double alpha) {
    PatternRatio out;
    if (half_angle >= kPi / 2.0) return out;
    out.cruise = std::sin(half_angle) / half_angle * std::cos(half_angle);
    out.escape = step_ratio_escape(half_angle, alpha);
    return out;
}

namespace {

void add_check(FeasibilityReport& report, std::string name, std::string rule, double bound,
               double actual, bool pass, std::string note = {}) {
    report.checks.push_back(FeasibilityCheck{std::move(name), std::move(rule), bound, actual, pass,
                                             std::move(note)});
}

const char* motion_name(MotionModel::Kind k) {
    switch (k) {
        case MotionModel::Kind::random: return "random";
        case MotionModel::Kind::random_escape: return "random-escape";
        case MotionModel::Kind::pattern_escape: return "pattern-escape";
    }
    return "?";
}

}  // namespace

FeasibilityReport validate_config(const Config& cfg) {
    FeasibilityReport report;
    const SensorArray sensors = cfg.sensor_array();
    const int p = sensors.count();
    const double phi = sensors.max_half_gap();
    const double r_r = cfg.swarm.radius;

    add_check(report, "sensor-count", "at least 3 sensors", 3, p, p >= 3);
    add_check(report, "robot-safe-clearance", "robot safe distance above body contact",
              2.0 * r_r, cfg.swarm.safe_robot, cfg.swarm.safe_robot > 2.0 * r_r);

    // Sensing coverage: at the safe distance of each source kind, the worst
    // sensor-to-source distance must stay inside the influence region.
    const auto coverage = [&](double safe, double influence) {
        return std::sqrt(safe * safe + r_r * r_r - 2.0 * r_r * safe * std::cos(phi)) < influence;
    };
    const double worst_t = std::sqrt(cfg.swarm.safe_target * cfg.swarm.safe_target + r_r * r_r -
                                     2.0 * r_r * cfg.swarm.safe_target * std::cos(phi));
    add_check(report, "coverage-target", "worst sensor range at the target safe distance in reach",
              cfg.signal_target.influence, worst_t,
              coverage(cfg.swarm.safe_target, cfg.signal_target.influence));
    const double worst_r = std::sqrt(cfg.swarm.safe_robot * cfg.swarm.safe_robot + r_r * r_r -
                                     2.0 * r_r * cfg.swarm.safe_robot * std::cos(phi));
    add_check(report, "coverage-robot", "worst sensor range at the robot safe distance in reach",
              cfg.signal_robot.influence, worst_r,
              coverage(cfg.swarm.safe_robot, cfg.signal_robot.influence));
    const double worst_e = cfg.swarm.safe_env - r_r * std::cos(phi);
    add_check(report, "coverage-boundary",
              "nearest sensor inside the boundary influence at the boundary safe distance",
              cfg.signal_env.influence, worst_e, worst_e < cfg.signal_env.influence);

    // Deadlock-freedom bounds on the step size and influence distance.
    double step_bound = 0.0;
    if (p >= 3) {
        step_bound = max_robot_step(cfg.swarm.safe_robot, r_r, p);
        add_check(report, "step-bound", "robot step strictly below the deadlock bound", step_bound,
                  cfg.swarm.max_step, cfg.swarm.max_step < step_bound);
        const auto [lo, hi] =
            robot_influence_interval(cfg.swarm.safe_robot, r_r, p, cfg.swarm.max_step);
        const bool in = lo < cfg.signal_robot.influence && cfg.signal_robot.influence < hi;
        add_check(report, "robot-influence-low", "robot influence above the interval floor", lo,
                  cfg.signal_robot.influence, cfg.signal_robot.influence > lo);
        add_check(report, "robot-influence-high", "robot influence below the interval ceiling", hi,
                  cfg.signal_robot.influence, cfg.signal_robot.influence < hi && in);
    }

    add_check(report, "orbit-width", "secondary-orbit width below the robot influence distance",
              cfg.signal_robot.influence, cfg.orbits.width,
              cfg.orbits.width < cfg.signal_robot.influence);

    // Arena must leave room for targets at their boundary margin.
    const Vec2 ext = cfg.environment.half_extents();
    const double margin = cfg.boundary_margin();
    add_check(report, "arena-margin", "target boundary margin inside the arena",
              std::min(ext.x(), ext.y()), margin, margin < std::min(ext.x(), ext.y()));

    // Inter-target spacing feasibility (dynamics enforce the spacing itself).
    if (cfg.targets.size() > 1) {
        const double spacing = 2.0 * cfg.signal_target.influence + 2.0 * r_r;
        const double usable = 2.0 * std::min(ext.x(), ext.y()) - 2.0 * margin;
        add_check(report, "target-spacing", "required target spacing fits the arena", usable,
                  spacing, spacing < usable);
    }

    const double sigma = cfg.noise.sigma;
    const double inner_eff = cfg.orbits.inner * (1.0 + cfg.noise.inner_inflation * sigma);

    for (std::size_t gi = 0; gi < cfg.targets.size(); ++gi) {
        const TargetConfig& g = cfg.targets[gi];
        const std::string tag = cfg.targets.size() > 1 ? "#" + std::to_string(gi) + "-" : "";

        add_check(report, tag + "escape-domain", "escape radius covers one full-speed retreat",
                  cfg.swarm.safe_target + g.max_step, g.escape_radius,
                  g.escape_radius >= cfg.swarm.safe_target + g.max_step);
        add_check(report, tag + "orbit-inner", "keep-out radius covers one target move",
                  cfg.swarm.safe_target + g.max_step, cfg.orbits.inner,
                  cfg.orbits.inner >= cfg.swarm.safe_target + g.max_step);
        if (g.motion.kind == MotionModel::Kind::random) {
            add_check(report, tag + "orbit-inner-idle", "keep-out radius covers one robot move",
                      cfg.swarm.safe_target + cfg.swarm.max_step, cfg.orbits.inner,
                      cfg.orbits.inner >= cfg.swarm.safe_target + cfg.swarm.max_step);
        }

        const double encap_bound = min_encap_radius(cfg.orbits.inner, r_r, p, cfg.swarm.max_step);
        add_check(report, tag + "encap-radius", "ring outer radius above the worst-case trigger",
                  encap_bound, g.encap_radius, g.encap_radius >= encap_bound);

        try {
            const RingCapacity cap = ring_capacity(cfg.signal_robot.influence, r_r, g.encap_radius);
            add_check(report, tag + "ring-capacity", "required ring robots within capacity",
                      cap.real, g.robots_required,
                      static_cast<double>(g.robots_required) <= cap.real,
                      g.robots_required > cap.real
                          ? "beyond capacity a dynamic equilibrium forms around the target"
                          : "");
        } catch (const std::exception& e) {
            add_check(report, tag + "ring-capacity", "required ring robots within capacity", 0.0,
                      g.robots_required, false, e.what());
        }

        // Step-size ratio for the configured motion model.
        try {
            const double ratio = cfg.step_ratio_for(g);
            add_check(report, tag + std::string("speed-ratio-") + motion_name(g.motion.kind),
                      "target step within the admissible ratio of the robot step",
                      ratio * cfg.swarm.max_step, g.max_step,
                      g.max_step <= ratio * cfg.swarm.max_step + 1e-12);
            if (g.motion.kind == MotionModel::Kind::pattern_escape) {
                const double cruise_ratio =
                    step_ratio_pattern(phi, kPi / 2.0).cruise;  // cruise bound needs no alpha
                add_check(report, tag + "speed-ratio-cruise",
                          "cruise step strictly within the pattern-phase ratio",
                          cruise_ratio * cfg.swarm.max_step, g.motion.pattern.cruise_step,
                          g.motion.pattern.cruise_step < cruise_ratio * cfg.swarm.max_step);
            }
        } catch (const std::exception& e) {
            add_check(report, tag + "speed-ratio", "target step ratio computable", 0.0, g.max_step,
                      false, e.what());
        }

        add_check(report, tag + "ring-band", "noise-inflated keep-out radius below the ring outer",
                  g.encap_radius, inner_eff, inner_eff < g.encap_radius);
    }

    if (cfg.targets.size() > 1) {
        const double enc0 = cfg.targets.front().encap_radius;
        bool uniform = true;
        for (const auto& g : cfg.targets) uniform = uniform && g.encap_radius == enc0;
        add_check(report, "uniform-encap-radius", "all targets share one ring geometry", enc0,
                  enc0, uniform);
    }

    return report;
}

}  // namespace swarmcap
