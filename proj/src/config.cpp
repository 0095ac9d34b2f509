#include "swarmcap/config.hpp"

#include "swarmcap/bounds.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace swarmcap {
namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& ctx, const std::string& msg) {
    throw std::runtime_error("config: " + ctx + ": " + msg);
}

void require_keys(const json& j, const std::string& ctx, std::set<std::string> allowed) {
    if (!j.is_object()) fail(ctx, "expected an object");
    for (const auto& [key, _] : j.items()) {
        if (!allowed.count(key)) fail(ctx, "unknown key '" + key + "'");
    }
}

double get_num(const json& j, const std::string& ctx, const char* key, double fallback) {
    if (!j.contains(key)) return fallback;
    if (!j[key].is_number()) fail(ctx, std::string(key) + " must be a number");
    return j[key].get<double>();
}

double get_req_num(const json& j, const std::string& ctx, const char* key) {
    if (!j.contains(key)) fail(ctx, std::string("missing key '") + key + "'");
    if (!j[key].is_number()) fail(ctx, std::string(key) + " must be a number");
    return j[key].get<double>();
}

int get_int(const json& j, const std::string& ctx, const char* key, int fallback) {
    if (!j.contains(key)) return fallback;
    if (!j[key].is_number_integer()) fail(ctx, std::string(key) + " must be an integer");
    return j[key].get<int>();
}

bool get_bool(const json& j, const std::string& ctx, const char* key, bool fallback) {
    if (!j.contains(key)) return fallback;
    if (!j[key].is_boolean()) fail(ctx, std::string(key) + " must be a boolean");
    return j[key].get<bool>();
}

std::string get_str(const json& j, const std::string& ctx, const char* key,
                    const std::string& fallback) {
    if (!j.contains(key)) return fallback;
    if (!j[key].is_string()) fail(ctx, std::string(key) + " must be a string");
    return j[key].get<std::string>();
}

// Numeric value or the literal "auto".
bool is_auto(const json& j, const char* key) {
    return j.contains(key) && j[key].is_string() && j[key].get<std::string>() == "auto";
}

SignalProfile parse_profile(const json& j, const std::string& ctx, double default_influence,
                            bool* influence_auto = nullptr) {
    require_keys(j, ctx, {"family", "peak", "influence"});
    SignalProfile p;
    const std::string family = get_str(j, ctx, "family", "linear");
    if (family == "linear")
        p.family = SignalProfile::Family::linear;
    else if (family == "inverse-square")
        p.family = SignalProfile::Family::inverse_square;
    else
        fail(ctx, "family must be 'linear' or 'inverse-square'");
    p.peak = get_num(j, ctx, "peak", 1.0);
    if (p.peak <= 0.0) fail(ctx, "peak must be positive");
    if (influence_auto && is_auto(j, "influence")) {
        *influence_auto = true;
        p.influence = default_influence;
    } else {
        p.influence = get_num(j, ctx, "influence", default_influence);
    }
    if (p.influence <= 0.0) fail(ctx, "influence must be positive");
    return p;
}

MotionModel parse_motion(const json& j, const std::string& ctx) {
    require_keys(j, ctx, {"model", "pattern"});
    MotionModel m;
    const std::string model = get_str(j, ctx, "model", "random");
    if (model == "random")
        m.kind = MotionModel::Kind::random;
    else if (model == "random-escape")
        m.kind = MotionModel::Kind::random_escape;
    else if (model == "pattern-escape")
        m.kind = MotionModel::Kind::pattern_escape;
    else
        fail(ctx, "model must be 'random', 'random-escape' or 'pattern-escape'");

    if (j.contains("pattern")) {
        if (m.kind != MotionModel::Kind::pattern_escape)
            fail(ctx, "pattern given for a non-pattern motion model");
        const json& pj = j["pattern"];
        const std::string pctx = ctx + ".pattern";
        require_keys(pj, pctx, {"kind", "cruise_step", "turn_rate", "points"});
        const std::string kind = get_str(pj, pctx, "kind", "constant");
        if (kind == "constant")
            m.pattern.kind = PatternSpec::Kind::constant;
        else if (kind == "circle")
            m.pattern.kind = PatternSpec::Kind::circle;
        else if (kind == "waypoints")
            m.pattern.kind = PatternSpec::Kind::waypoints;
        else
            fail(pctx, "kind must be 'constant', 'circle' or 'waypoints'");
        m.pattern.cruise_step = get_num(pj, pctx, "cruise_step", 0.2);
        m.pattern.turn_rate = get_num(pj, pctx, "turn_rate", 0.05);
        if (pj.contains("points")) {
            if (!pj["points"].is_array()) fail(pctx, "points must be an array of [x, y]");
            for (const auto& pt : pj["points"]) {
                if (!pt.is_array() || pt.size() != 2) fail(pctx, "points must be [x, y] pairs");
                m.pattern.waypoints.emplace_back(pt[0].get<double>(), pt[1].get<double>());
            }
        }
        if (m.pattern.kind == PatternSpec::Kind::waypoints && m.pattern.waypoints.empty())
            fail(pctx, "waypoint pattern needs at least one point");
    } else if (m.kind == MotionModel::Kind::pattern_escape) {
        m.pattern.kind = PatternSpec::Kind::constant;
    }
    return m;
}

json profile_json(const SignalProfile& p) {
    return json{{"family", p.family == SignalProfile::Family::linear ? "linear" : "inverse-square"},
                {"peak", p.peak},
                {"influence", p.influence}};
}

json motion_json(const MotionModel& m) {
    json j;
    switch (m.kind) {
        case MotionModel::Kind::random: j["model"] = "random"; break;
        case MotionModel::Kind::random_escape: j["model"] = "random-escape"; break;
        case MotionModel::Kind::pattern_escape: j["model"] = "pattern-escape"; break;
    }
    if (m.kind == MotionModel::Kind::pattern_escape) {
        json pj;
        switch (m.pattern.kind) {
            case PatternSpec::Kind::constant: pj["kind"] = "constant"; break;
            case PatternSpec::Kind::circle: pj["kind"] = "circle"; break;
            case PatternSpec::Kind::waypoints: pj["kind"] = "waypoints"; break;
        }
        pj["cruise_step"] = m.pattern.cruise_step;
        if (m.pattern.kind == PatternSpec::Kind::circle) pj["turn_rate"] = m.pattern.turn_rate;
        if (m.pattern.kind == PatternSpec::Kind::waypoints) {
            json pts = json::array();
            for (const Vec2& w : m.pattern.waypoints) pts.push_back({w.x(), w.y()});
            pj["points"] = pts;
        }
        j["pattern"] = pj;
    }
    return j;
}

}  // namespace

Config Config::from_json(const json& root) {
    require_keys(root, "top level",
                 {"environment", "signals", "swarm", "targets", "orbits", "noise", "control",
                  "init", "run"});
    Config cfg;

    if (!root.contains("environment")) fail("top level", "missing 'environment'");
    {
        const json& j = root["environment"];
        require_keys(j, "environment", {"shape", "width", "height", "radius"});
        const std::string shape = get_str(j, "environment", "shape", "rectangle");
        if (shape == "rectangle") {
            cfg.environment.shape = Environment::Shape::rectangle;
            cfg.environment.half_width = 0.5 * get_req_num(j, "environment", "width");
            cfg.environment.half_height = 0.5 * get_req_num(j, "environment", "height");
        } else if (shape == "disk") {
            cfg.environment.shape = Environment::Shape::disk;
            cfg.environment.radius = get_req_num(j, "environment", "radius");
        } else {
            fail("environment", "shape must be 'rectangle' or 'disk'");
        }
    }

    if (!root.contains("swarm")) fail("top level", "missing 'swarm'");
    bool auto_max_step = false;
    {
        const json& j = root["swarm"];
        require_keys(j, "swarm",
                     {"count", "radius", "sensors", "sensor_angles", "max_step", "safe_target",
                      "safe_robot", "safe_env", "baseline_mode"});
        cfg.swarm.count = get_int(j, "swarm", "count", 10);
        if (cfg.swarm.count < 0) fail("swarm", "count must be non-negative");
        cfg.swarm.radius = get_num(j, "swarm", "radius", 1.0);
        cfg.swarm.sensors = get_int(j, "swarm", "sensors", 7);
        if (j.contains("sensor_angles")) {
            for (const auto& a : j["sensor_angles"])
                cfg.swarm.sensor_angles.push_back(a.get<double>());
            cfg.swarm.sensors = static_cast<int>(cfg.swarm.sensor_angles.size());
        }
        cfg.swarm.safe_target = get_num(j, "swarm", "safe_target", 2.0);
        cfg.swarm.safe_robot = get_num(j, "swarm", "safe_robot", 3.0);
        cfg.swarm.safe_env = get_num(j, "swarm", "safe_env", 2.0);
        cfg.swarm.baseline_mode = get_bool(j, "swarm", "baseline_mode", false);
        if (is_auto(j, "max_step"))
            auto_max_step = true;
        else
            cfg.swarm.max_step = get_num(j, "swarm", "max_step", 0.3);
    }

    // Auto step size: a comfortable fraction of the deadlock bound.
    const int p = cfg.swarm.sensors;
    if (auto_max_step) {
        cfg.swarm.max_step = 0.4 * max_robot_step(cfg.swarm.safe_robot, cfg.swarm.radius, p);
    }

    if (!root.contains("signals")) fail("top level", "missing 'signals'");
    bool auto_robot_influence = false;
    {
        const json& j = root["signals"];
        require_keys(j, "signals", {"target", "robot", "environment"});
        if (!j.contains("target") || !j.contains("robot") || !j.contains("environment"))
            fail("signals", "needs 'target', 'robot' and 'environment' profiles");
        cfg.signal_target = parse_profile(j["target"], "signals.target", 12.0);
        cfg.signal_robot =
            parse_profile(j["robot"], "signals.robot", 3.5, &auto_robot_influence);
        cfg.signal_env = parse_profile(j["environment"], "signals.environment", 5.0);
    }
    if (auto_robot_influence) {
        // Upper quarter of the admissible interval: keeps the approach window
        // open while staying clear of the ceiling.
        const auto [lo, hi] = robot_influence_interval(cfg.swarm.safe_robot, cfg.swarm.radius, p,
                                                       cfg.swarm.max_step);
        if (lo >= hi) fail("signals.robot", "no admissible influence for this step size");
        cfg.signal_robot.influence = lo + 0.75 * (hi - lo);
    }

    if (!root.contains("orbits")) fail("top level", "missing 'orbits'");
    {
        const json& j = root["orbits"];
        require_keys(j, "orbits", {"inner", "width"});
        cfg.orbits.inner = get_req_num(j, "orbits", "inner");
        cfg.orbits.width = get_req_num(j, "orbits", "width");
    }

    if (root.contains("noise")) {
        const json& j = root["noise"];
        require_keys(j, "noise",
                     {"sigma", "inner_inflation", "env_inflation", "robot_inflation"});
        cfg.noise.sigma = get_num(j, "noise", "sigma", 0.0);
        cfg.noise.inner_inflation = get_num(j, "noise", "inner_inflation", 1.0);
        cfg.noise.env_inflation = get_num(j, "noise", "env_inflation", 1.0);
        cfg.noise.robot_inflation = get_num(j, "noise", "robot_inflation", 0.0);
        if (cfg.noise.sigma < 0.0) fail("noise", "sigma must be non-negative");
    }

    if (root.contains("control")) {
        const json& j = root["control"];
        require_keys(j, "control", {"heading_candidates", "refine_los"});
        cfg.control.heading_candidates = get_int(j, "control", "heading_candidates", 33);
        if (cfg.control.heading_candidates < 3) fail("control", "heading_candidates must be >= 3");
        cfg.control.refine_los = get_bool(j, "control", "refine_los", true);
    }

    if (!root.contains("targets")) fail("top level", "missing 'targets'");
    if (!root["targets"].is_array() || root["targets"].empty())
        fail("targets", "must be a non-empty array");
    for (std::size_t i = 0; i < root["targets"].size(); ++i) {
        const json& j = root["targets"][i];
        const std::string ctx = "targets[" + std::to_string(i) + "]";
        require_keys(j, ctx,
                     {"radius", "escape_radius", "encap_radius", "robots_required", "max_step",
                      "lambda_factor", "motion"});
        TargetConfig t;
        t.radius = get_num(j, ctx, "radius", 1.0);
        t.escape_radius = get_req_num(j, ctx, "escape_radius");
        t.encap_radius = get_req_num(j, ctx, "encap_radius");
        t.robots_required = get_int(j, ctx, "robots_required", 5);
        if (t.robots_required < 1) fail(ctx, "robots_required must be positive");
        if (j.contains("motion")) t.motion = parse_motion(j["motion"], ctx + ".motion");

        const double lambda_factor = get_num(j, ctx, "lambda_factor", 0.95);
        if (is_auto(j, "max_step") || !j.contains("max_step")) {
            cfg.targets.push_back(t);  // ratio needs the filled config
            cfg.targets.back().max_step =
                lambda_factor * cfg.step_ratio_for(t) * cfg.swarm.max_step;
            continue;
        }
        if (j.contains("lambda_factor")) fail(ctx, "lambda_factor requires max_step 'auto'");
        t.max_step = get_req_num(j, ctx, "max_step");
        if (t.max_step < 0.0) fail(ctx, "max_step must be non-negative");
        cfg.targets.push_back(t);
    }

    if (root.contains("init")) {
        const json& j = root["init"];
        require_keys(j, "init",
                     {"placement", "target_placement", "sector_angle", "range_min", "range_max"});
        const std::string placement = get_str(j, "init", "placement", "sector");
        if (placement == "sector")
            cfg.init.placement = InitConfig::Placement::sector;
        else if (placement == "uniform")
            cfg.init.placement = InitConfig::Placement::uniform;
        else
            fail("init", "placement must be 'sector' or 'uniform'");
        const std::string tplace = get_str(j, "init", "target_placement", "center");
        if (tplace == "center")
            cfg.init.target_placement = InitConfig::TargetPlacement::center;
        else if (tplace == "uniform")
            cfg.init.target_placement = InitConfig::TargetPlacement::uniform;
        else
            fail("init", "target_placement must be 'center' or 'uniform'");
        cfg.init.sector_angle = get_num(j, "init", "sector_angle", kPi / 4.0);
        cfg.init.range_min = get_num(j, "init", "range_min", 0.0);
        cfg.init.range_max = get_num(j, "init", "range_max", 0.0);
    }
    if (cfg.init.range_min <= 0.0)
        cfg.init.range_min = cfg.targets.front().encap_radius + 2.0;
    if (cfg.init.range_max <= cfg.init.range_min)
        cfg.init.range_max = cfg.init.range_min + 12.0;

    if (root.contains("run")) {
        const json& j = root["run"];
        require_keys(j, "run", {"t_max", "halt_on_violation"});
        cfg.run.t_max = get_int(j, "run", "t_max", 4000);
        if (cfg.run.t_max < 0) fail("run", "t_max must be non-negative");
        cfg.run.halt_on_violation = get_bool(j, "run", "halt_on_violation", false);
    }

    return cfg;
}

Config Config::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("config: cannot open " + path);
    json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw std::runtime_error("config: " + path + ": " + e.what());
    }
    return from_json(j);
}

json Config::to_json() const {
    json j;
    if (environment.shape == Environment::Shape::rectangle) {
        j["environment"] = {{"shape", "rectangle"},
                            {"width", 2.0 * environment.half_width},
                            {"height", 2.0 * environment.half_height}};
    } else {
        j["environment"] = {{"shape", "disk"}, {"radius", environment.radius}};
    }
    j["signals"] = {{"target", profile_json(signal_target)},
                    {"robot", profile_json(signal_robot)},
                    {"environment", profile_json(signal_env)}};
    json sw{{"count", swarm.count},
            {"radius", swarm.radius},
            {"max_step", swarm.max_step},
            {"safe_target", swarm.safe_target},
            {"safe_robot", swarm.safe_robot},
            {"safe_env", swarm.safe_env},
            {"baseline_mode", swarm.baseline_mode}};
    if (swarm.sensor_angles.empty())
        sw["sensors"] = swarm.sensors;
    else
        sw["sensor_angles"] = swarm.sensor_angles;
    j["swarm"] = sw;
    json ts = json::array();
    for (const TargetConfig& t : targets) {
        ts.push_back({{"radius", t.radius},
                      {"escape_radius", t.escape_radius},
                      {"encap_radius", t.encap_radius},
                      {"robots_required", t.robots_required},
                      {"max_step", t.max_step},
                      {"motion", motion_json(t.motion)}});
    }
    j["targets"] = ts;
    j["orbits"] = {{"inner", orbits.inner}, {"width", orbits.width}};
    j["noise"] = {{"sigma", noise.sigma},
                  {"inner_inflation", noise.inner_inflation},
                  {"env_inflation", noise.env_inflation},
                  {"robot_inflation", noise.robot_inflation}};
    j["control"] = {{"heading_candidates", control.heading_candidates},
                    {"refine_los", control.refine_los}};
    j["init"] = {{"placement", init.placement == InitConfig::Placement::sector ? "sector"
                                                                               : "uniform"},
                 {"target_placement",
                  init.target_placement == InitConfig::TargetPlacement::center ? "center"
                                                                               : "uniform"},
                 {"sector_angle", init.sector_angle},
                 {"range_min", init.range_min},
                 {"range_max", init.range_max}};
    j["run"] = {{"t_max", run.t_max}, {"halt_on_violation", run.halt_on_violation}};
    return j;
}

std::uint64_t Config::hash() const {
    // FNV-1a over the canonical dump (nlohmann objects serialize key-sorted).
    const std::string s = to_json().dump();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string Config::hash_hex() const {
    std::ostringstream out;
    out << std::hex << hash();
    return out.str();
}

SensorArray Config::sensor_array() const {
    if (!swarm.sensor_angles.empty())
        return SensorArray::from_angles(swarm.sensor_angles, swarm.radius);
    return SensorArray::symmetric(swarm.sensors, swarm.radius);
}

SignalModel Config::signal_model() const {
    return SignalModel::make(signal_target, signal_robot, signal_env);
}

RobotParams Config::robot_params() const {
    RobotParams rp;
    rp.radius = swarm.radius;
    rp.max_step = swarm.max_step;
    rp.safe_target = swarm.safe_target;
    rp.safe_robot = swarm.safe_robot;
    rp.safe_env = swarm.safe_env;
    rp.sensors = sensor_array();
    rp.baseline_mode = swarm.baseline_mode;
    rp.heading_candidates = control.heading_candidates;
    rp.refine_los = control.refine_los;
    rp.robot_margin_inflation = noise.robot_inflation * noise.sigma;
    return rp;
}

OrbitSet Config::orbit_set() const {
    OrbitSet o;
    o.inner = orbits.inner * (1.0 + noise.inner_inflation * noise.sigma);
    o.outer = targets.front().encap_radius;
    o.width = orbits.width;
    return o;
}

double Config::env_trigger() const {
    return swarm.safe_env * (1.0 + noise.env_inflation * noise.sigma) + swarm.max_step;
}

double Config::boundary_margin() const {
    double encap = 0.0;
    for (const TargetConfig& t : targets) encap = std::max(encap, t.encap_radius);
    return encap + swarm.safe_env + swarm.max_step;
}

NoiseSpec Config::noise_spec() const { return NoiseSpec{noise.sigma, noise.sigma > 0.0}; }

double Config::step_ratio_for(const TargetConfig& target) const {
    const double phi = sensor_array().max_half_gap();
    switch (target.motion.kind) {
        case MotionModel::Kind::random:
            return step_ratio_random(swarm.count, signal_robot.influence, swarm.radius,
                                     orbits.inner);
        case MotionModel::Kind::random_escape:
        case MotionModel::Kind::pattern_escape: {
            const double alpha =
                dispersion_angle(signal_robot.influence, swarm.radius, target.escape_radius);
            return step_ratio_escape(phi, alpha).ratio;
        }
    }
    return 0.0;
}

std::string feasibility_to_text(const FeasibilityReport& report) {
    std::ostringstream out;
    for (const FeasibilityCheck& c : report.checks) {
        out << (c.pass ? "[ ok ] " : "[FAIL] ") << c.name << ": " << c.rule
            << " (bound " << c.bound << ", actual " << c.actual << ")";
        if (!c.note.empty()) out << " -- " << c.note;
        out << "\n";
    }
    out << (report.pass() ? "feasible: all checks passed" : "infeasible: see failures above")
        << "\n";
    return out.str();
}

nlohmann::json feasibility_to_json(const FeasibilityReport& report) {
    json checks = json::array();
    for (const FeasibilityCheck& c : report.checks) {
        json jc{{"name", c.name},  {"rule", c.rule}, {"bound", c.bound},
                {"actual", c.actual}, {"pass", c.pass}};
        if (!c.note.empty()) jc["note"] = c.note;
        checks.push_back(jc);
    }
    return json{{"checks", checks}, {"pass", report.pass()}};
}

}  // namespace swarmcap
