#pragma once

#include "swarmcap/controller.hpp"
#include "swarmcap/environment.hpp"
#include "swarmcap/signal.hpp"
#include "swarmcap/target.hpp"

#include <json.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace swarmcap {

struct SwarmConfig {
    int count = 10;
    double radius = 1.0;
    int sensors = 7;
    std::vector<double> sensor_angles;  // empty: symmetric placement
    double max_step = 0.3;
    double safe_target = 2.0;
    double safe_robot = 3.0;
    double safe_env = 2.0;
    bool baseline_mode = false;
};

struct TargetConfig {
    double radius = 1.0;
    double escape_radius = 4.0;
    double encap_radius = 6.0;
    int robots_required = 5;  // ring occupancy needed for capture
    double max_step = 0.2;
    MotionModel motion;
};

struct OrbitConfig {
    double inner = 3.0;
    double width = 3.0;
};

struct NoiseConfig {
    double sigma = 0.0;
    double inner_inflation = 1.0;  // inner radius scale: (1 + c * sigma)
    double env_inflation = 1.0;    // boundary-safe scale: (1 + c * sigma)
    double robot_inflation = 0.0;  // robot-avoid margin scale: (1 + c * sigma)
};

struct ControlConfig {
    int heading_candidates = 33;
    bool refine_los = true;
};

struct InitConfig {
    enum class Placement { sector, uniform };
    enum class TargetPlacement { center, uniform };
    Placement placement = Placement::sector;
    TargetPlacement target_placement = TargetPlacement::center;
    double sector_angle = kPi / 4.0;
    double range_min = 0.0;  // 0: derived from the encapsulation radius
    double range_max = 0.0;
};

struct RunConfig {
    long t_max = 4000;
    bool halt_on_violation = false;
};

// Parsed, fully resolved experiment configuration. Parsing rejects unknown
// keys; "auto" step sizes and influence distances are resolved here from the
// closed-form bounds, so swept copies re-derive them per grid point.
struct Config {
    Environment environment;
    SignalProfile signal_target;
    SignalProfile signal_robot;
    SignalProfile signal_env;
    SwarmConfig swarm;
    std::vector<TargetConfig> targets;
    OrbitConfig orbits;
    NoiseConfig noise;
    ControlConfig control;
    InitConfig init;
    RunConfig run;

    static Config from_json(const nlohmann::json& j);
    static Config from_file(const std::string& path);
    nlohmann::json to_json() const;  // resolved values, stable key order
    std::uint64_t hash() const;
    std::string hash_hex() const;

    // Derived pieces used across the simulator.
    SensorArray sensor_array() const;
    SignalModel signal_model() const;
    RobotParams robot_params() const;
    OrbitSet orbit_set() const;       // noise-inflated inner radius
    double env_trigger() const;       // boundary-avoid trigger distance
    double boundary_margin() const;   // minimum target-to-boundary distance
    NoiseSpec noise_spec() const;

    // Applicable target/robot step-size ratio for one target's motion model.
    double step_ratio_for(const TargetConfig& target) const;
};

std::string feasibility_to_text(const struct FeasibilityReport& report);
nlohmann::json feasibility_to_json(const struct FeasibilityReport& report);

}  // namespace swarmcap
