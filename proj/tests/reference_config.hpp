#pragma once

#include <json.hpp>

// Desk-scale reference configuration shared across the test suites: ten
// 7-sensor robots, one escaping target, all parameter bounds satisfied, and
// the escape radius placed so the admissible step ratio is 1.1549.
inline nlohmann::json reference_config_json() {
    return nlohmann::json::parse(R"({
      "environment": {"shape": "rectangle", "width": 64.0, "height": 64.0},
      "signals": {
        "target": {"family": "inverse-square", "peak": 1.0, "influence": 18.0},
        "robot": {"family": "inverse-square", "peak": 1.0, "influence": 3.8},
        "environment": {"family": "inverse-square", "peak": 1.0, "influence": 5.0}
      },
      "swarm": {"count": 10, "radius": 1.0, "sensors": 7, "max_step": 0.35,
                "safe_target": 2.0, "safe_robot": 3.0, "safe_env": 2.0},
      "targets": [{"radius": 1.0, "escape_radius": 4.0626, "encap_radius": 6.0,
                   "robots_required": 5, "max_step": "auto", "lambda_factor": 0.95,
                   "motion": {"model": "random-escape"}}],
      "orbits": {"inner": 2.9, "width": 3.0},
      "noise": {"sigma": 0.0, "inner_inflation": 0.92, "env_inflation": 1.0,
                "robot_inflation": 0.2},
      "init": {"placement": "sector", "range_min": 8.0, "range_max": 24.0},
      "run": {"t_max": 4000}
    })");
}
