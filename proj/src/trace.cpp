#include "swarmcap/trace.hpp"

#include <json.hpp>

#include <cmath>
#include <limits>

namespace swarmcap {

using nlohmann::json;

const char* to_string(SafetyViolation::Kind k) {
    switch (k) {
        case SafetyViolation::Kind::robot_robot: return "robot-robot";
        case SafetyViolation::Kind::robot_target: return "robot-target";
        case SafetyViolation::Kind::robot_boundary: return "robot-boundary";
    }
    return "?";
}

namespace {

json margin_json(double v) {
    if (std::isinf(v)) return nullptr;
    return v;
}

}  // namespace

std::string trace_header_jsonl(std::uint64_t config_hash, std::uint64_t seed) {
    json j{{"type", "header"}, {"version", 1}, {"config_hash", config_hash}, {"seed", seed}};
    return j.dump();
}

std::string trace_record_to_jsonl(const TraceRecord& rec) {
    json robots = json::array();
    for (const RobotTrace& r : rec.robots) {
        json jr{{"x", r.position.x()}, {"y", r.position.y()},   {"heading", r.heading},
                {"behavior", to_string(r.behavior)},            {"turn", r.turn},
                {"step", r.step},       {"orbit", r.orbit},     {"rotation", r.rotation},
                {"frozen", r.frozen}};
        if (r.target_range) jr["target_range"] = *r.target_range;
        robots.push_back(jr);
    }
    json targets = json::array();
    for (const TargetTrace& t : rec.targets) {
        targets.push_back({{"x", t.position.x()},
                           {"y", t.position.y()},
                           {"heading", t.heading},
                           {"escape", t.escape_triggered},
                           {"captured", t.captured}});
    }
    json violations = json::array();
    for (const SafetyViolation& v : rec.violations) {
        violations.push_back({{"kind", to_string(v.kind)},
                              {"first", v.first},
                              {"second", v.second},
                              {"distance", v.distance},
                              {"limit", v.limit}});
    }
    json j{{"t", rec.timestep},
           {"robots", robots},
           {"targets", targets},
           {"margins",
            {{"robot_robot", margin_json(rec.min_robot_robot)},
             {"robot_target", margin_json(rec.min_robot_target)},
             {"robot_boundary", margin_json(rec.min_robot_boundary)}}}};
    if (!violations.empty()) j["violations"] = violations;
    if (!rec.captures.empty()) j["captures"] = rec.captures;
    return j.dump();
}

void DriftAccumulator::observe(const TraceRecord& prev, const TraceRecord& cur) {
    for (std::size_t i = 0; i < prev.robots.size(); ++i) {
        const RobotTrace& r0 = prev.robots[i];
        if (r0.frozen) continue;

        // Associate the step with the nearest live target at its start.
        int gi = -1;
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t g = 0; g < prev.targets.size(); ++g) {
            if (prev.targets[g].captured) continue;
            const double d = (prev.targets[g].position - r0.position).norm();
            if (d < best) {
                best = d;
                gi = static_cast<int>(g);
            }
        }
        if (gi < 0) continue;

        const Vec2 los = prev.targets[gi].position - r0.position;
        const double norm = los.norm();
        if (norm <= 1e-12) continue;
        const Vec2 l_hat = los / norm;
        const Vec2 t_hat(-l_hat.y(), l_hat.x());
        const Vec2 u_r = cur.robots[i].position - r0.position;
        const Vec2 u_g = cur.targets[gi].position - prev.targets[gi].position;
        const Vec2 rel = u_g - u_r;

        radial_[r0.behavior].add(rel.dot(l_hat));
        tangential_[r0.behavior].add(rel.dot(t_hat));
        if (r0.behavior == Behavior::orbit_tangent && r0.rotation == -1)
            tan_cw_.add(rel.dot(t_hat));
        if (r0.behavior == Behavior::approach_target) {
            const double after =
                (cur.targets[gi].position - cur.robots[i].position).squaredNorm();
            dv_.add(after - norm * norm);
        }
    }
}

DriftStats DriftAccumulator::finish(long min_samples) const {
    DriftStats stats;
    stats.squared_distance_drift = dv_.sample();
    for (const auto& [b, w] : radial_) stats.radial[b] = w.sample();
    for (const auto& [b, w] : tangential_) stats.tangential[b] = w.sample();
    stats.tangential_clockwise = tan_cw_.sample();
    stats.sufficient = stats.squared_distance_drift.count >= min_samples;
    return stats;
}

DriftStats drift_diagnostics(std::span<const TraceRecord> trace, long min_samples) {
    DriftAccumulator acc;
    for (std::size_t i = 1; i < trace.size(); ++i) acc.observe(trace[i - 1], trace[i]);
    return acc.finish(min_samples);
}

}  // namespace swarmcap
