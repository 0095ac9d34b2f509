#include "swarmcap/world.hpp"

#include "swarmcap/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace swarmcap {
namespace {

constexpr int kPlacementTries = 100000;
constexpr std::uint64_t kGlobalPlacementIndex = 0xffffffffULL;

}  // namespace

SimSetup make_setup(const Config& config) {
    SimSetup s{config,
               config.signal_model(),
               config.robot_params(),
               config.orbit_set(),
               config.noise_spec(),
               config.env_trigger(),
               config.boundary_margin(),
               config.hash()};
    return s;
}

WorldState init_world(const SimSetup& setup, std::uint64_t seed) {
    const Config& cfg = setup.config;
    WorldState state;
    state.seed = seed;
    state.timestep = 0;

    // Targets first: inside the boundary margin, spaced so a robot can sense
    // at most one at a time. Center placement pins the first target.
    const double spacing = 2.0 * cfg.signal_target.influence + 2.0 * cfg.swarm.radius;
    for (std::size_t g = 0; g < cfg.targets.size(); ++g) {
        Rng rng = Rng::for_stream(seed, stream_id(RngStream::placement, 0x10000 + g), 0);
        bool placed = false;
        const bool pin_center =
            g == 0 && cfg.init.target_placement == InitConfig::TargetPlacement::center;
        for (int attempt = 0; attempt < kPlacementTries && !placed; ++attempt) {
            const Vec2 ext = setup.config.environment.half_extents();
            const Vec2 c = pin_center ? Vec2::Zero()
                                      : Vec2(rng.uniform(-ext.x(), ext.x()),
                                             rng.uniform(-ext.y(), ext.y()));
            if (!cfg.environment.contains(c, setup.boundary_margin)) {
                if (pin_center) break;  // a pinned center can never satisfy it
                continue;
            }
            bool ok = true;
            for (const TargetState& other : state.targets)
                ok = ok && (other.center - c).norm() > spacing;
            if (!ok) continue;
            TargetState t;
            t.center = c;
            t.heading = rng.uniform(0.0, kTwoPi);
            t.radius = cfg.targets[g].radius;
            t.max_step = cfg.targets[g].max_step;
            t.escape_radius = cfg.targets[g].escape_radius;
            state.targets.push_back(t);
            placed = true;
        }
        if (!placed) throw std::runtime_error("placement failed: over-dense target configuration");
    }
    state.captured_at.assign(state.targets.size(), -1);
    state.escape_last.assign(state.targets.size(), false);

    // Robots: sector placement around the first target, or uniform. When the
    // sector annulus jams, the radial span grows (the sector angle is the
    // experiment contract; the span is not). Initial spacing exceeds the
    // controller's avoidance margin so nobody is born immobilized.
    const double init_spacing = cfg.swarm.safe_robot *
                                    (1.0 + cfg.noise.robot_inflation * cfg.noise.sigma) +
                                cfg.swarm.max_step + cfg.swarm.radius + 0.5;
    Rng global_rng = Rng::for_stream(seed, stream_id(RngStream::placement, kGlobalPlacementIndex), 0);
    const double sector_start = global_rng.uniform(0.0, kTwoPi);
    for (int i = 0; i < cfg.swarm.count; ++i) {
        Rng rng = Rng::for_stream(seed, stream_id(RngStream::placement, i), 0);
        bool placed = false;
        double range_max = cfg.init.range_max;
        for (int attempt = 0; attempt < kPlacementTries && !placed; ++attempt) {
            if (attempt > 0 && attempt % 4000 == 0) range_max += 2.0;
            Vec2 pos;
            if (cfg.init.placement == InitConfig::Placement::sector) {
                const double ang = sector_start + rng.uniform(0.0, cfg.init.sector_angle);
                const double range = rng.uniform(cfg.init.range_min, range_max);
                pos = state.targets.front().center + range * unit_vec(ang);
            } else {
                const Vec2 ext = cfg.environment.half_extents();
                pos = Vec2(rng.uniform(-ext.x(), ext.x()), rng.uniform(-ext.y(), ext.y()));
            }
            if (!cfg.environment.contains(pos, cfg.swarm.safe_env)) continue;
            bool ok = true;
            for (const RobotWorldState& other : state.robots)
                ok = ok && (other.pose.position - pos).norm() >= init_spacing;
            for (const TargetState& t : state.targets)
                ok = ok && (t.center - pos).norm() > cfg.swarm.safe_target;
            if (!ok) continue;
            RobotWorldState r;
            r.pose.position = pos;
            r.pose.heading = rng.uniform(0.0, kTwoPi);
            state.robots.push_back(r);
            placed = true;
        }
        if (!placed) throw std::runtime_error("placement failed: over-dense robot configuration");
    }
    return state;
}

ReadingSet robot_readings(const WorldState& state, const SimSetup& setup, int robot_index) {
    std::vector<Vec2> target_sources;
    for (std::size_t g = 0; g < state.targets.size(); ++g) {
        if (!state.targets[g].captured) target_sources.push_back(state.targets[g].center);
    }
    std::vector<Vec2> robot_sources;
    for (std::size_t r = 0; r < state.robots.size(); ++r) {
        if (static_cast<int>(r) != robot_index)
            robot_sources.push_back(state.robots[r].pose.position);
    }
    SourceView view{target_sources, robot_sources, &setup.config.environment};
    Rng rng = Rng::for_stream(state.seed, stream_id(RngStream::robot_sense, robot_index),
                              static_cast<std::uint64_t>(state.timestep));
    return sense(state.robots[robot_index].pose, setup.params.sensors, setup.signals, view,
                 setup.noise, rng);
}

ControlOutput robot_control(const WorldState& state, const SimSetup& setup, int robot_index) {
    if (state.robots[robot_index].frozen) {
        ControlOutput out;
        out.behavior = Behavior::frozen;
        return out;
    }
    const ReadingSet readings = robot_readings(state, setup, robot_index);
    ControlInputs in;
    in.signals = &setup.signals;
    in.orbits = setup.orbits;
    in.sigma = setup.noise.sigma;
    in.env_trigger = setup.env_trigger;
    double d_g = 0.0;
    for (const TargetConfig& t : setup.config.targets) d_g = std::max(d_g, t.max_step);
    in.target_max_step = d_g;
    Rng rng = Rng::for_stream(state.seed, stream_id(RngStream::robot_control, robot_index),
                              static_cast<std::uint64_t>(state.timestep));
    return control_step(readings, setup.params, in, rng);
}

std::vector<ControlOutput> compute_controls(const WorldState& state, const SimSetup& setup) {
    std::vector<ControlOutput> out(state.robots.size());
    for (std::size_t i = 0; i < state.robots.size(); ++i)
        out[i] = robot_control(state, setup, static_cast<int>(i));
    return out;
}

std::vector<TargetStep> compute_target_steps(const WorldState& state, const SimSetup& setup) {
    std::vector<Vec2> robot_positions;
    robot_positions.reserve(state.robots.size());
    for (const RobotWorldState& r : state.robots) robot_positions.push_back(r.pose.position);

    std::vector<TargetStep> out(state.targets.size());
    for (std::size_t g = 0; g < state.targets.size(); ++g) {
        if (state.targets[g].captured) continue;
        Rng rng = Rng::for_stream(state.seed, stream_id(RngStream::target_motion, g),
                                  static_cast<std::uint64_t>(state.timestep));
        out[g] = target_step(state.targets[g], setup.config.targets[g].motion, robot_positions,
                             setup.config.environment, setup.boundary_margin, rng);
    }
    return out;
}

std::vector<SafetyViolation> check_safety(const WorldState& state, const SimSetup& setup) {
    std::vector<SafetyViolation> out;
    const double safe_r = setup.config.swarm.safe_robot;
    const double safe_g = setup.config.swarm.safe_target;
    const double safe_e = setup.config.swarm.safe_env;

    const int n = static_cast<int>(state.robots.size());
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            const double d =
                (state.robots[i].pose.position - state.robots[j].pose.position).norm();
            if (d < safe_r)
                out.push_back({SafetyViolation::Kind::robot_robot, i, j, d, safe_r});
        }
        if (!state.robots[i].frozen) {
            for (std::size_t g = 0; g < state.targets.size(); ++g) {
                if (state.targets[g].captured) continue;
                const double d =
                    (state.robots[i].pose.position - state.targets[g].center).norm();
                if (d < safe_g)
                    out.push_back({SafetyViolation::Kind::robot_target, i,
                                   static_cast<int>(g), d, safe_g});
            }
        }
        const double db = setup.config.environment.boundary_distance(state.robots[i].pose.position);
        if (db < safe_e)
            out.push_back({SafetyViolation::Kind::robot_boundary, i, -1, db, safe_e});
    }
    return out;
}

EncapsulationStatus check_encapsulation(const WorldState& state, const SimSetup& setup,
                                        int target_index) {
    EncapsulationStatus status;
    const TargetState& g = state.targets[target_index];
    const double inner = setup.config.swarm.safe_target;
    const double outer = setup.config.targets[target_index].encap_radius;

    std::vector<int> ring;
    for (std::size_t i = 0; i < state.robots.size(); ++i) {
        const double d = (state.robots[i].pose.position - g.center).norm();
        if (d > inner && d <= outer) ring.push_back(static_cast<int>(i));
    }
    status.count = static_cast<int>(ring.size());
    for (std::size_t a = 0; a < ring.size() && status.spacing_ok; ++a) {
        for (std::size_t b = a + 1; b < ring.size(); ++b) {
            const double d = (state.robots[ring[a]].pose.position -
                              state.robots[ring[b]].pose.position)
                                 .norm();
            if (d < setup.config.swarm.safe_robot) {
                status.spacing_ok = false;
                break;
            }
        }
    }
    status.encapsulated = status.spacing_ok &&
                          status.count >= setup.config.targets[target_index].robots_required;
    return status;
}

namespace {

// Detects fresh encapsulations, freezes the ring, silences the targets.
std::vector<int> detect_and_apply_captures(WorldState& state, const SimSetup& setup) {
    std::vector<int> captured;
    for (std::size_t g = 0; g < state.targets.size(); ++g) {
        if (state.targets[g].captured) continue;
        const EncapsulationStatus status =
            check_encapsulation(state, setup, static_cast<int>(g));
        if (!status.encapsulated) continue;
        state.targets[g].captured = true;
        state.captured_at[g] = state.timestep;
        captured.push_back(static_cast<int>(g));
        // Shut-off burst: ring robots freeze, robots outside are unaffected.
        const double inner = setup.config.swarm.safe_target;
        const double outer = setup.config.targets[g].encap_radius;
        for (RobotWorldState& r : state.robots) {
            const double d = (r.pose.position - state.targets[g].center).norm();
            if (d > inner && d <= outer) r.frozen = true;
        }
    }
    return captured;
}

}  // namespace

StepEvents advance(WorldState& state, const SimSetup& setup,
                   const std::vector<ControlOutput>& controls,
                   const std::vector<TargetStep>& target_steps) {
    for (std::size_t i = 0; i < state.robots.size(); ++i) {
        RobotWorldState& r = state.robots[i];
        if (r.frozen) continue;
        r.pose.heading = wrap_angle(r.pose.heading + controls[i].turn);
        r.pose.position += controls[i].step * unit_vec(r.pose.heading);
    }
    for (std::size_t g = 0; g < state.targets.size(); ++g) {
        TargetState& t = state.targets[g];
        if (t.captured) {
            state.escape_last[g] = false;
            continue;
        }
        t.heading = wrap_angle(t.heading + target_steps[g].turn);
        t.center += target_steps[g].step * unit_vec(t.heading);
        t.waypoint_index = target_steps[g].next_waypoint;
        state.escape_last[g] = target_steps[g].escape_triggered;
    }
    ++state.timestep;

    StepEvents events;
    events.violations = check_safety(state, setup);
    events.captures = detect_and_apply_captures(state, setup);
    return events;
}

StepEvents step(WorldState& state, const SimSetup& setup) {
    const std::vector<ControlOutput> controls = compute_controls(state, setup);
    const std::vector<TargetStep> target_steps = compute_target_steps(state, setup);
    return advance(state, setup, controls, target_steps);
}

namespace {

TraceRecord make_record(const WorldState& state, const SimSetup& setup,
                        const std::vector<ControlOutput>& controls, const StepEvents& arrival) {
    TraceRecord rec;
    rec.timestep = state.timestep;
    rec.robots.resize(state.robots.size());
    for (std::size_t i = 0; i < state.robots.size(); ++i) {
        RobotTrace& rt = rec.robots[i];
        rt.position = state.robots[i].pose.position;
        rt.heading = state.robots[i].pose.heading;
        rt.frozen = state.robots[i].frozen;
        rt.behavior = controls[i].behavior;
        rt.turn = controls[i].turn;
        rt.step = controls[i].step;
        rt.target_range = controls[i].target_range;
        rt.orbit = controls[i].orbit;
        rt.rotation = controls[i].rotation;
    }
    rec.targets.resize(state.targets.size());
    for (std::size_t g = 0; g < state.targets.size(); ++g) {
        TargetTrace& tt = rec.targets[g];
        tt.position = state.targets[g].center;
        tt.heading = state.targets[g].heading;
        tt.captured = state.targets[g].captured;
        tt.escape_triggered = state.escape_last[g];
    }

    double min_rr = std::numeric_limits<double>::infinity();
    double min_rt = std::numeric_limits<double>::infinity();
    double min_rb = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < state.robots.size(); ++i) {
        for (std::size_t j = i + 1; j < state.robots.size(); ++j)
            min_rr = std::min(min_rr, (state.robots[i].pose.position -
                                       state.robots[j].pose.position)
                                          .norm());
        for (std::size_t g = 0; g < state.targets.size(); ++g) {
            if (state.targets[g].captured) continue;
            min_rt = std::min(min_rt, (state.robots[i].pose.position -
                                       state.targets[g].center)
                                          .norm());
        }
        min_rb = std::min(min_rb, setup.config.environment.boundary_distance(
                                      state.robots[i].pose.position));
    }
    rec.min_robot_robot = min_rr;
    rec.min_robot_target = min_rt;
    rec.min_robot_boundary = min_rb;
    rec.violations = arrival.violations;
    rec.captures = arrival.captures;
    return rec;
}

}  // namespace

RunResult run(const SimSetup& setup, std::uint64_t seed, long t_max, bool keep_trace,
              std::ostream* trace_out) {
    WorldState state = init_world(setup, seed);

    RunResult result;
    RunSummary& summary = result.summary;
    summary.seed = seed;
    summary.config_hash = setup.config.hash_hex();
    summary.encap_step.assign(state.targets.size(), -1);

    if (trace_out) *trace_out << trace_header_jsonl(setup.config_hash, seed) << "\n";

    DriftAccumulator drift;
    TraceRecord prev;
    bool have_prev = false;

    // The initial state may already satisfy the ring condition.
    StepEvents arrival;
    arrival.captures = [&] {
        std::vector<int> caps;
        for (std::size_t g = 0; g < state.targets.size(); ++g) {
            if (state.targets[g].captured) continue;
            if (check_encapsulation(state, setup, static_cast<int>(g)).encapsulated)
                caps.push_back(static_cast<int>(g));
        }
        // Apply via the regular path so freezing matches.
        return caps;
    }();
    if (!arrival.captures.empty()) {
        for (int g : arrival.captures) {
            state.targets[g].captured = true;
            state.captured_at[g] = 0;
            const double inner = setup.config.swarm.safe_target;
            const double outer = setup.config.targets[g].encap_radius;
            for (RobotWorldState& r : state.robots) {
                const double d = (r.pose.position - state.targets[g].center).norm();
                if (d > inner && d <= outer) r.frozen = true;
            }
        }
    }

    bool halted = false;
    while (true) {
        const std::vector<ControlOutput> controls = compute_controls(state, setup);
        const TraceRecord rec = make_record(state, setup, controls, arrival);
        summary.violation_count += static_cast<long>(rec.violations.size());
        for (const RobotTrace& r : rec.robots) ++summary.behavior_histogram[r.behavior];
        if (have_prev) drift.observe(prev, rec);
        if (trace_out) *trace_out << trace_record_to_jsonl(rec) << "\n";
        if (keep_trace) result.trace.push_back(rec);
        prev = rec;
        have_prev = true;

        if (state.all_captured() || state.timestep >= t_max || halted) break;

        const std::vector<TargetStep> target_steps = compute_target_steps(state, setup);
        arrival = advance(state, setup, controls, target_steps);
        if (setup.config.run.halt_on_violation && !arrival.violations.empty()) halted = true;
    }

    summary.steps = state.timestep;
    summary.success = state.all_captured();
    for (std::size_t g = 0; g < state.targets.size(); ++g)
        summary.encap_step[g] = state.captured_at[g];
    summary.drift = drift.finish();
    return result;
}

nlohmann::json summary_to_json(const RunSummary& s) {
    nlohmann::json hist;
    for (const auto& [b, n] : s.behavior_histogram) hist[to_string(b)] = n;
    nlohmann::json drift;
    const auto sample_json = [](const DriftSample& d) {
        return nlohmann::json{{"mean", d.mean}, {"stderr", d.stderr_}, {"count", d.count}};
    };
    drift["squared_distance_drift"] = sample_json(s.drift.squared_distance_drift);
    drift["tangential_clockwise"] = sample_json(s.drift.tangential_clockwise);
    nlohmann::json rad, tan;
    for (const auto& [b, d] : s.drift.radial) rad[to_string(b)] = sample_json(d);
    for (const auto& [b, d] : s.drift.tangential) tan[to_string(b)] = sample_json(d);
    drift["radial"] = rad;
    drift["tangential"] = tan;
    drift["sufficient"] = s.drift.sufficient;

    return nlohmann::json{{"seed", s.seed},
                          {"config_hash", s.config_hash},
                          {"steps", s.steps},
                          {"success", s.success},
                          {"encap_step", s.encap_step},
                          {"violations", s.violation_count},
                          {"behaviors", hist},
                          {"drift", drift}};
}

RunSummary summary_from_json(const nlohmann::json& j) {
    RunSummary s;
    s.seed = j.at("seed").get<std::uint64_t>();
    s.config_hash = j.at("config_hash").get<std::string>();
    s.steps = j.at("steps").get<long>();
    s.success = j.at("success").get<bool>();
    s.encap_step = j.at("encap_step").get<std::vector<long>>();
    s.violation_count = j.at("violations").get<long>();
    static const Behavior kAll[] = {Behavior::avoid_boundary,     Behavior::random_walk,
                                    Behavior::avoid_target,       Behavior::orbit_tangent,
                                    Behavior::approach_target,    Behavior::tangent_fallback,
                                    Behavior::min_signal_fallback, Behavior::frozen};
    for (Behavior b : kAll) {
        if (j.at("behaviors").contains(to_string(b)))
            s.behavior_histogram[b] = j.at("behaviors").at(to_string(b)).get<long>();
    }
    return s;
}

}  // namespace swarmcap
