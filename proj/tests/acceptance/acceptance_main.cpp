// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Runs the full desk-scale batteries, so expect a few minutes.

#include "swarmcap/bounds.hpp"
#include "swarmcap/experiment.hpp"
#include "swarmcap/world.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <iostream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

using namespace swarmcap;

namespace {

int g_failures = 0;

void report(int index, const char* name, bool pass, const std::string& detail) {
    std::printf("[%d] %-24s %s  (%s)\n", index, name, pass ? "PASS" : "FAIL", detail.c_str());
    std::fflush(stdout);
    if (!pass) ++g_failures;
}

// The reference desk-scale configuration: ten 7-sensor robots, one target,
// step ratio 1.1549 at the escape radius, all bounds satisfied.
nlohmann::json reference_json() {
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

nlohmann::json with_motion(nlohmann::json cfg, const std::string& model) {
    if (model == "pattern-escape") {
        cfg["targets"][0]["motion"] = {
            {"model", model}, {"pattern", {{"kind", "constant"}, {"cruise_step", 0.29}}}};
        cfg["targets"][0]["lambda_factor"] = 1.0;
    } else {
        cfg["targets"][0]["motion"] = {{"model", model}};
    }
    return cfg;
}

nlohmann::json static_target_json() {
    nlohmann::json cfg = reference_json();
    cfg["targets"][0]["motion"] = {
        {"model", "pattern-escape"}, {"pattern", {{"kind", "constant"}, {"cruise_step", 0.0}}}};
    cfg["targets"][0]["max_step"] = 0.0;
    cfg["targets"][0].erase("lambda_factor");
    cfg["swarm"]["max_step"] = "auto";
    cfg["signals"]["robot"]["influence"] = "auto";
    return cfg;
}

std::vector<std::uint64_t> seed_range(std::uint64_t from, int count) {
    std::vector<std::uint64_t> seeds(count);
    for (int i = 0; i < count; ++i) seeds[i] = from + i;
    return seeds;
}

// --- 1. Collision freedom ---------------------------------------------------

void criterion_collision_freedom() {
    long violations = 0;
    long runs = 0;
    int errors = 0;
    for (const char* model : {"random", "random-escape", "pattern-escape"}) {
        for (double sigma : {0.0, 0.25, 0.5}) {
            nlohmann::json cfg = with_motion(reference_json(), model);
            cfg["noise"]["sigma"] = sigma;
            const Config parsed = Config::from_json(cfg);
            if (!validate_config(parsed).pass()) {
                ++errors;
                continue;
            }
            const auto outcomes = run_batch(parsed, seed_range(1, 50), 4000);
            for (const RunOutcome& o : outcomes) {
                ++runs;
                if (o.failed)
                    ++errors;
                else
                    violations += o.summary.violation_count;
            }
        }
    }
    std::ostringstream d;
    d << violations << " violations, " << errors << " errors in " << runs
      << " runs: 3 models x sigma {0, 0.25, 0.5} x 50 seeds x 4000 steps";
    report(1, "collision-freedom", violations == 0 && errors == 0 && runs == 450, d.str());
}

// --- 2. Eventual encapsulation under the bounds -----------------------------

void criterion_eventual_encapsulation() {
    const Config cfg = Config::from_json(reference_json());  // model 2, 0.95 ratio
    const auto outcomes = run_batch(cfg, seed_range(1, 50), 4000);
    int successes = 0;
    long violations = 0;
    for (const RunOutcome& o : outcomes) {
        if (!o.failed && o.summary.success) ++successes;
        if (!o.failed) violations += o.summary.violation_count;
    }
    std::ostringstream d;
    d << successes << "/50 captured within 4000 steps, " << violations
      << " violations (failures must be timeouts)";
    report(2, "eventual-encapsulation", successes >= 45 && violations == 0, d.str());
}

// --- 3. Noise degradation ----------------------------------------------------

void criterion_noise_degradation() {
    nlohmann::json base = with_motion(reference_json(), "pattern-escape");

    base["noise"]["sigma"] = 0.0;
    const auto clean = run_batch(Config::from_json(base), seed_range(1, 50), 4000);
    const AggregateStats clean_stats = aggregate(clean, 4000);

    base["noise"]["sigma"] = 0.55;
    const auto noisy = run_batch(Config::from_json(base), seed_range(1, 50), 4000);
    const AggregateStats noisy_stats = aggregate(noisy, 4000);

    const bool pass = clean_stats.success_rate >= 0.9 && noisy_stats.success_rate >= 0.25 &&
                      noisy_stats.success_rate <= 0.55;
    std::ostringstream d;
    d << "success " << clean_stats.success_rate << " at sigma 0, " << noisy_stats.success_rate
      << " at sigma 0.55 (need >= 0.9 and within [0.25, 0.55])";
    report(3, "noise-degradation", pass, d.str());
}

// --- 4. Step-ratio formula anchors -------------------------------------------

void criterion_ratio_anchors() {
    bool pass = true;
    std::ostringstream d;

    const double zero = step_ratio_escape(kPi / 2.0, 1.0).ratio;  // fewer than 3 sensors
    pass = pass && zero == 0.0;

    const double saturated = step_ratio_escape(kPi / 1e4, 2.4).ratio;
    pass = pass && std::abs(saturated - kPi / 2.0) < 1e-3;

    double prev = std::numeric_limits<double>::infinity();
    bool monotone = true;
    for (int i = 0; i < 20; ++i) {
        const double resc = 3.0 + 0.5 * i;
        const double lam =
            step_ratio_escape(kPi / 7.0, dispersion_angle(3.8, 1.0, resc)).ratio;
        monotone = monotone && lam <= prev + 1e-12;
        prev = lam;
    }
    pass = pass && monotone;

    d << "ratio(p<3) = " << zero << ", |ratio(p=1e4) - pi/2| = "
      << std::abs(saturated - kPi / 2.0) << ", non-increasing over 20 escape radii: "
      << (monotone ? "yes" : "no");
    report(4, "ratio-formula-anchors", pass, d.str());
}

// --- 5. Drift signs -----------------------------------------------------------

void criterion_drift_signs() {
    // Stationary target, orbiting enabled: pool drift statistics over seeds
    // until the approach phase contributes at least 1e4 step samples.
    nlohmann::json cfg = static_target_json();
    cfg["targets"][0]["robots_required"] = 8;  // keep robots circulating longer
    const SimSetup setup = make_setup(Config::from_json(cfg));

    DriftAccumulator acc;
    long seeds_used = 0;
    DriftStats stats;
    for (std::uint64_t seed = 1; seed <= 400; ++seed) {
        const RunResult result = run(setup, seed, 1200, true);
        for (std::size_t i = 1; i < result.trace.size(); ++i)
            acc.observe(result.trace[i - 1], result.trace[i]);
        ++seeds_used;
        stats = acc.finish(10000);
        if (stats.squared_distance_drift.count >= 10000 &&
            stats.tangential_clockwise.count >= 10000)
            break;
    }

    const DriftSample& dv = stats.squared_distance_drift;
    const DriftSample& tan_cw = stats.tangential_clockwise;
    const bool dv_ok = dv.count >= 10000 && dv.mean < 0.0 && dv.mean + dv.half_width() < 0.0;
    const bool tan_ok =
        tan_cw.count >= 10000 && tan_cw.mean < 0.0 && tan_cw.mean + tan_cw.half_width() < 0.0;

    // Expected drive: heading uniform over the symmetric cone converges to
    // the directional factor along the sensor axis within three sigma.
    Rng rng(424242);
    const double phi = kPi / 7.0;
    const double step = 0.35;
    const double axis = 0.8;
    Vec2 sum = Vec2::Zero(), sumsq = Vec2::Zero();
    const int n = 1000000;
    for (int i = 0; i < n; ++i) {
        const Vec2 u = step * unit_vec(rng.uniform(axis - phi, axis + phi));
        sum += u;
        sumsq += u.cwiseProduct(u);
    }
    bool drive_ok = true;
    const Vec2 mean = sum / n;
    const Vec2 expected = step * (std::sin(phi) / phi) * unit_vec(axis);
    for (int c = 0; c < 2; ++c) {
        const double var = sumsq[c] / n - mean[c] * mean[c];
        drive_ok = drive_ok && std::abs(mean[c] - expected[c]) <= 3.0 * std::sqrt(var / n);
    }

    std::ostringstream d;
    d << "squared-distance drift " << dv.mean << " +- " << dv.half_width() << " (n=" << dv.count
      << "), clockwise tangential " << tan_cw.mean << " +- " << tan_cw.half_width()
      << " (n=" << tan_cw.count << "), directional-factor MC within 3 sigma: "
      << (drive_ok ? "yes" : "no") << ", seeds " << seeds_used;
    report(5, "drift-signs", dv_ok && tan_ok && drive_ok, d.str());
}

// --- 6. Deadlock freedom at the step-bound edge -------------------------------

struct HeadOnOutcome {
    bool passed = false;
    long steps = 0;
    double min_separation = std::numeric_limits<double>::infinity();
    double final_a_x = 0.0;
};

// Two goal-driven robots in a corridor, each crossing through the other's
// start region, exercising the step bound and its tangential fallbacks.
HeadOnOutcome head_on_scenario(double max_step, double robot_influence, std::uint64_t seed,
                               long step_cap) {
    const SignalModel signals =
        SignalModel::make(SignalProfile{SignalProfile::Family::linear, 1.0, 18.0},
                          SignalProfile{SignalProfile::Family::linear, 1.0, robot_influence},
                          SignalProfile{SignalProfile::Family::linear, 1.0, 5.0});
    Environment corridor;
    corridor.shape = Environment::Shape::rectangle;
    corridor.half_width = 30.0;
    corridor.half_height = 6.0;

    RobotParams params;
    params.radius = 1.0;
    params.max_step = max_step;
    params.safe_robot = 3.0;
    params.safe_env = 2.0;
    params.sensors = SensorArray::symmetric(7, 1.0);
    const double phi = params.sensors.max_half_gap();
    const double env_trigger = params.safe_env + params.max_step;

    Rng init(seed);
    const double jitter = (seed == 0) ? 0.0 : init.uniform(-0.2, 0.2);
    Pose pose[2] = {{Vec2(-8.0, jitter), 0.0}, {Vec2(8.0, -jitter), kPi}};
    const Vec2 goal[2] = {Vec2(8.0, 0.0), Vec2(-8.0, 0.0)};
    NoiseSpec off;

    // Goal-driven argmax: ties prefer the candidate nearest the goal bearing.
    const auto pick = [&](const AngularInterval& range, const Eigen::ArrayXd& readings,
                          double goal_rel) {
        double best_theta = range.midpoint();
        double best = -1.0;
        double best_goal = std::numeric_limits<double>::infinity();
        for (int i = 0; i < 33; ++i) {
            const double theta = range.sample(i, 33);
            const double v = dist_avo_rob(readings, signals.robot, theta, params);
            const double to_goal = std::abs(wrap_signed(theta - goal_rel));
            if (v > best || (v == best && to_goal < best_goal)) {
                best = v;
                best_theta = theta;
                best_goal = to_goal;
            }
        }
        return std::pair<double, double>(best_theta, best);
    };

    HeadOnOutcome out;
    bool arrived[2] = {false, false};
    for (long t = 0; t < step_cap; ++t) {
        Pose next[2] = {pose[0], pose[1]};
        for (int i = 0; i < 2; ++i) {
            if (arrived[i]) continue;
            const std::vector<Vec2> other{pose[1 - i].position};
            SourceView view{{}, other, &corridor};
            Rng rng = Rng::for_stream(seed, stream_id(RngStream::robot_control, i),
                                      static_cast<std::uint64_t>(t));
            const ReadingSet readings = sense(pose[i], params.sensors, signals, view, off, rng);

            double theta = 0.0, step = 0.0;
            const auto env_est =
                infer_boundary_distance(readings.env, signals.env_response, params.sensors);
            const double goal_rel =
                wrap_signed(bearing(goal[i] - pose[i].position) - pose[i].heading);
            if (env_est && env_est->distance <= env_trigger) {
                const auto [th, st] =
                    pick(avoid_range(env_est->sensor, params.sensors), readings.robot, goal_rel);
                theta = th;
                step = st;
            } else {
                const AngularInterval cone =
                    AngularInterval::from_bounds(goal_rel - phi, goal_rel + phi);
                auto [th, st] = pick(cone, readings.robot, goal_rel);
                if (st <= 0.0) {
                    const auto [cw, ccw] = tangent_ranges_from(cone);
                    auto [thc, stc] = pick(cw, readings.robot, goal_rel);
                    auto [tha, sta] = pick(ccw, readings.robot, goal_rel);
                    if (stc >= sta) {
                        th = thc;
                        st = stc;
                    } else {
                        th = tha;
                        st = sta;
                    }
                }
                theta = th;
                step = st;
            }
            next[i].heading = wrap_angle(pose[i].heading + theta);
            next[i].position = pose[i].position + step * unit_vec(next[i].heading);
        }
        pose[0] = next[0];
        pose[1] = next[1];
        out.min_separation =
            std::min(out.min_separation, (pose[0].position - pose[1].position).norm());
        for (int i = 0; i < 2; ++i)
            arrived[i] = arrived[i] || (pose[i].position - goal[i]).norm() < 1.0;
        if (arrived[0] && arrived[1]) {
            out.passed = true;
            out.steps = t + 1;
            break;
        }
    }
    out.final_a_x = pose[0].position.x();
    if (!out.passed) out.steps = step_cap;
    return out;
}

void criterion_deadlock_freedom() {
    const double bound = max_robot_step(3.0, 1.0, 7);

    // At 0.99x the bound with the influence distance mid-interval: every seed
    // passes within 500 steps and no pair breaks the safe separation.
    const double good_step = 0.99 * bound;
    const auto [lo, hi] = robot_influence_interval(3.0, 1.0, 7, good_step);
    const double good_influence = 0.5 * (lo + hi);
    int passes = 0;
    double min_sep = std::numeric_limits<double>::infinity();
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
        const HeadOnOutcome o = head_on_scenario(good_step, good_influence, seed, 500);
        if (o.passed) ++passes;
        min_sep = std::min(min_sep, o.min_separation);
    }

    // At 1.05x the bound the admissible influence interval is empty; with an
    // influence distance below its floor the pair stands off persistently and
    // reproducibly (diagnostic).
    const double bad_step = 1.05 * bound;
    const auto [bad_lo, bad_hi] = robot_influence_interval(3.0, 1.0, 7, bad_step);
    const bool interval_empty = bad_lo >= bad_hi;
    const HeadOnOutcome stand1 = head_on_scenario(bad_step, 5.5, 0, 500);
    const HeadOnOutcome stand2 = head_on_scenario(bad_step, 5.5, 0, 500);
    const bool standoff =
        !stand1.passed && !stand2.passed && stand1.final_a_x == stand2.final_a_x;

    std::ostringstream d;
    d << passes << "/100 passes within 500 steps at 0.99x bound (min separation " << min_sep
      << "), interval empty at 1.05x: " << (interval_empty ? "yes" : "no")
      << ", reproducible standoff: " << (standoff ? "yes" : "no");
    report(6, "deadlock-freedom",
           passes == 100 && min_sep >= 3.0 - 1e-9 && interval_empty && standoff, d.str());
}

// --- 7. Baseline comparison ----------------------------------------------------

void criterion_baseline_comparison() {
    SweepSpec::Axis axis;
    axis.path = "swarm.sensors";
    axis.values = {nlohmann::json(4), nlohmann::json(6), nlohmann::json(8), nlohmann::json(10)};
    const BaselineTable table =
        compare_baseline(static_target_json(), seed_range(1, 50), 4000, axis);

    bool pass = table.rows.size() == 4;
    std::ostringstream d;
    for (const BaselineRow& row : table.rows) {
        const bool row_ok = row.with_orbits.median <= row.baseline.median;
        pass = pass && row_ok;
        d << "p=" << row.axis_values[0] << ": " << row.with_orbits.median << " vs "
          << row.baseline.median << (row_ok ? " ok; " : " WORSE; ");
    }
    report(7, "baseline-comparison", pass, d.str());
}

// --- 8. Oracle equivalence and property suites ----------------------------------

void criterion_oracle_suites() {
    bool pass = true;
    std::ostringstream d;

    // Virtual-source conservativeness, 1e5 randomized placements.
    {
        Rng rng(9001);
        const SignalProfile profile{SignalProfile::Family::linear, 1.0, 8.0};
        bool ok = true;
        long n = 0;
        while (n < 100000) {
            const int p = 3 + rng.uniform_int(14);
            const SensorArray sensors = SensorArray::symmetric(p, 0.5 + rng.uniform01());
            const int sources = 1 + rng.uniform_int(5);
            std::vector<Vec2> src;
            double nearest = std::numeric_limits<double>::infinity();
            for (int s = 0; s < sources; ++s) {
                const Vec2 v = (sensors.mount_radius + 0.2 + 7.0 * rng.uniform01()) *
                               unit_vec(rng.uniform(0.0, kTwoPi));
                src.push_back(v);
                nearest = std::min(nearest, v.norm());
            }
            Eigen::ArrayXd readings = Eigen::ArrayXd::Zero(p);
            for (int k = 0; k < p; ++k) {
                const Vec2 pos = sensors.mount_radius * unit_vec(sensors.angles[k]);
                for (const Vec2& s : src) readings[k] += profile.strength((s - pos).norm());
            }
            if (readings.maxCoeff() <= 0.0) continue;
            const auto est = infer_distance(readings, profile, sensors);
            ok = ok && est && est->distance <= nearest + 1e-9;
            ++n;
        }
        pass = pass && ok;
        d << "conservativeness 1e5: " << (ok ? "ok" : "FAIL");
    }

    // Robot-avoid bound, 1e4 randomized in-cone adversarial cases.
    {
        Rng rng(9002);
        const SignalProfile robot_profile{SignalProfile::Family::linear, 1.0, 3.8};
        bool ok = true;
        for (int iter = 0; iter < 10000; ++iter) {
            RobotParams params;
            params.radius = 1.0;
            params.max_step = 0.2 + 0.2 * rng.uniform01();
            params.safe_robot = 2.6 + 0.8 * rng.uniform01();
            params.sensors = SensorArray::symmetric(5 + rng.uniform_int(8), 1.0);
            const double theta = rng.uniform(0.0, kTwoPi);
            const double pre = params.safe_robot + params.max_step + 2.5 * rng.uniform01();
            const Vec2 neighbor =
                pre * unit_vec(theta +
                               (2.0 * rng.uniform01() - 1.0) * params.sensors.max_half_gap());
            Eigen::ArrayXd readings = Eigen::ArrayXd::Zero(params.sensors.count());
            for (int k = 0; k < params.sensors.count(); ++k) {
                const Vec2 pos = unit_vec(params.sensors.angles[k]);
                readings[k] = robot_profile.strength(
                    std::min(robot_profile.influence, (neighbor - pos).norm()));
            }
            const double step = dist_avo_rob(readings, robot_profile, theta, params);
            const Vec2 post = step * unit_vec(theta);
            const Vec2 chase = neighbor + params.max_step * (post - neighbor).normalized();
            ok = ok && (chase - post).norm() >= params.safe_robot - 1e-9;
        }
        pass = pass && ok;
        d << ", avoid-bound adversarial 1e4: " << (ok ? "ok" : "FAIL");
    }

    // Safety-oracle fuzz, 1e6 states against an independent recomputation.
    {
        const SimSetup setup = make_setup(Config::from_json(reference_json()));
        Rng rng(9003);
        bool ok = true;
        for (int iter = 0; iter < 1000000 && ok; ++iter) {
            WorldState state;
            state.seed = 1;
            const int n = 2 + rng.uniform_int(5);
            for (int i = 0; i < n; ++i) {
                RobotWorldState r;
                r.pose.position = Vec2(rng.uniform(-33.0, 33.0), rng.uniform(-33.0, 33.0));
                r.frozen = rng.uniform01() < 0.1;
                state.robots.push_back(r);
            }
            TargetState t;
            t.center = Vec2(rng.uniform(-30.0, 30.0), rng.uniform(-30.0, 30.0));
            t.captured = rng.uniform01() < 0.2;
            state.targets.push_back(t);
            state.captured_at.assign(1, t.captured ? 0 : -1);
            state.escape_last.assign(1, false);

            long expected = 0;
            for (int i = 0; i < n; ++i) {
                for (int j = i + 1; j < n; ++j)
                    if ((state.robots[i].pose.position - state.robots[j].pose.position).norm() <
                        setup.config.swarm.safe_robot)
                        ++expected;
                if (!state.robots[i].frozen && !t.captured &&
                    (state.robots[i].pose.position - t.center).norm() <
                        setup.config.swarm.safe_target)
                    ++expected;
                if (setup.config.environment.boundary_distance(
                        state.robots[i].pose.position) < setup.config.swarm.safe_env)
                    ++expected;
            }
            ok = static_cast<long>(check_safety(state, setup).size()) == expected;
        }
        pass = pass && ok;
        d << ", safety fuzz 1e6: " << (ok ? "ok" : "FAIL");
    }

    // Determinism: byte-identical traces for the same seed; batch summaries
    // independent of worker-thread count.
    {
        const Config cfg = Config::from_json(reference_json());
        const SimSetup setup = make_setup(cfg);
        std::ostringstream a, b;
        run(setup, 77, 4000, false, &a);
        run(setup, 77, 4000, false, &b);
        bool ok = a.str() == b.str();
        const auto batch1 = run_batch(cfg, seed_range(1, 8), 1000, 1);
        const auto batch4 = run_batch(cfg, seed_range(1, 8), 1000, 4);
        for (std::size_t i = 0; i < batch1.size(); ++i)
            ok = ok && summary_to_json(batch1[i].summary).dump() ==
                           summary_to_json(batch4[i].summary).dump();
        pass = pass && ok;
        d << ", determinism: " << (ok ? "ok" : "FAIL");
    }

    report(8, "oracle-suites", pass, d.str());
}

}  // namespace

int main(int argc, char** argv) {
    int only = 0;
    if (argc > 1) only = std::atoi(argv[1]);
    const auto want = [&](int i) { return only == 0 || only == i; };

    if (want(1)) criterion_collision_freedom();
    if (want(2)) criterion_eventual_encapsulation();
    if (want(3)) criterion_noise_degradation();
    if (want(4)) criterion_ratio_anchors();
    if (want(5)) criterion_drift_signs();
    if (want(6)) criterion_deadlock_freedom();
    if (want(7)) criterion_baseline_comparison();
    if (want(8)) criterion_oracle_suites();

    if (g_failures == 0)
        std::printf("acceptance: all criteria passed\n");
    else
        std::printf("acceptance: %d criteria FAILED\n", g_failures);
    return g_failures == 0 ? 0 : 1;
}
