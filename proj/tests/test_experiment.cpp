#include "swarmcap/experiment.hpp"

#include "reference_config.hpp"

#include <doctest.h>

#include <sstream>

using namespace swarmcap;

TEST_CASE("nearest-rank percentiles") {
    std::vector<double> v{5.0, 1.0, 3.0, 2.0, 4.0};
    CHECK(nearest_rank_percentile(v, 0.5) == 3.0);
    CHECK(nearest_rank_percentile(v, 0.25) == 2.0);
    CHECK(nearest_rank_percentile(v, 0.75) == 4.0);
    CHECK(nearest_rank_percentile(v, 1.0) == 5.0);
    CHECK(nearest_rank_percentile({7.0}, 0.5) == 7.0);
}

TEST_CASE("override paths reach nested keys and array elements") {
    nlohmann::json cfg = reference_config_json();
    apply_override(cfg, "swarm.sensors", 9);
    CHECK(cfg["swarm"]["sensors"] == 9);
    apply_override(cfg, "targets.0.escape_radius", 5.5);
    CHECK(cfg["targets"][0]["escape_radius"] == 5.5);
    apply_override(cfg, "noise.sigma", 0.3);
    CHECK(cfg["noise"]["sigma"] == 0.3);
}

TEST_CASE("batch: duplicate seeds reproduce, order and threads do not matter") {
    nlohmann::json quick = reference_config_json();
    quick["run"]["t_max"] = 250;
    const Config cfg = Config::from_json(quick);

    const std::vector<std::uint64_t> seeds{4, 9, 4, 7};
    const auto a = run_batch(cfg, seeds, 250, 1);
    const auto b = run_batch(cfg, seeds, 250, 4);
    REQUIRE(a.size() == 4);
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK_FALSE(a[i].failed);
        CHECK(summary_to_json(a[i].summary).dump() == summary_to_json(b[i].summary).dump());
    }
    // Duplicate seeds give identical summaries.
    CHECK(summary_to_json(a[0].summary).dump() == summary_to_json(a[2].summary).dump());
}

TEST_CASE("aggregation is a pure fold over stored summaries") {
    nlohmann::json quick = reference_config_json();
    quick["run"]["t_max"] = 250;
    const Config cfg = Config::from_json(quick);
    std::vector<std::uint64_t> seeds;
    for (std::uint64_t s = 1; s <= 8; ++s) seeds.push_back(s);
    const auto outcomes = run_batch(cfg, seeds, 250, 2);
    const AggregateStats direct = aggregate(outcomes, 250);

    // Store as JSON lines, reload, re-aggregate: identical table row.
    std::ostringstream store;
    for (const auto& o : outcomes) store << summary_to_json(o.summary).dump() << "\n";
    std::istringstream load(store.str());
    std::vector<RunOutcome> reloaded;
    std::string line;
    while (std::getline(load, line)) {
        RunOutcome o;
        o.summary = summary_from_json(nlohmann::json::parse(line));
        reloaded.push_back(o);
    }
    const AggregateStats again = aggregate(reloaded, 250);
    CHECK(direct.runs == again.runs);
    CHECK(direct.successes == again.successes);
    CHECK(direct.median == again.median);
    CHECK(direct.q25 == again.q25);
    CHECK(direct.q75 == again.q75);
    CHECK(direct.min == again.min);
    CHECK(direct.max == again.max);
    CHECK(direct.violations == again.violations);
}

TEST_CASE("sweep: bounds mode evaluates the grid, infeasible points are skipped") {
    SweepSpec spec;
    spec.base = reference_config_json();
    spec.mode = SweepSpec::Mode::bounds;
    SweepSpec::Axis axis;
    axis.path = "swarm.sensors";
    axis.values = {nlohmann::json(2), nlohmann::json(7), nlohmann::json(10)};
    spec.axes.push_back(axis);

    const SweepTable table = sweep(spec);
    REQUIRE(table.rows.size() == 3);
    CHECK(table.rows[0].skipped);  // two sensors cannot satisfy the bounds
    CHECK_FALSE(table.rows[1].skipped);
    CHECK_FALSE(table.rows[2].skipped);
    const double lam7 = table.rows[1].bounds["targets"][0]["ratio_escape"].get<double>();
    const double lam10 = table.rows[2].bounds["targets"][0]["ratio_escape"].get<double>();
    CHECK(lam7 == doctest::Approx(1.1549).epsilon(1e-3));
    CHECK(lam10 > lam7);

    const std::string csv = table.to_csv();
    CHECK(csv.find("ratio_escape") != std::string::npos);
    CHECK(csv.find("config_hash") != std::string::npos);

    // Empty grid: empty table.
    SweepSpec none = spec;
    none.axes.clear();
    none.axes.push_back({"swarm.sensors", {}});
    std::size_t points = 1;
    for (const auto& a : none.axes) points *= a.values.size();
    CHECK(points == 0);
}

TEST_CASE("sweep: simulation mode runs the grid with per-point auto resolution") {
    nlohmann::json base = reference_config_json();
    base["swarm"]["max_step"] = "auto";
    base["signals"]["robot"]["influence"] = "auto";
    base["run"]["t_max"] = 400;

    SweepSpec spec;
    spec.base = base;
    spec.seeds = 3;
    spec.t_max = 400;
    spec.axes.push_back({"swarm.sensors", {nlohmann::json(6), nlohmann::json(8)}});

    const SweepTable table = sweep(spec, 2);
    REQUIRE(table.rows.size() == 2);
    for (const SweepRow& row : table.rows) {
        CHECK_FALSE(row.skipped);
        CHECK(row.stats.runs == 3);
        CHECK(row.stats.violations == 0);
        CHECK(row.seeds == 3);
        CHECK_FALSE(row.config_hash.empty());
    }
    // Different sensor counts resolve to different configs.
    CHECK(table.rows[0].config_hash != table.rows[1].config_hash);

    const std::string svg = boxplot_svg(table, "sweep");
    CHECK(svg.find("<svg") != std::string::npos);
    CHECK(svg.find("<rect") != std::string::npos);
}

TEST_CASE("baseline comparison: rejects moving targets, near-parity at one ring robot") {
    // Moving target rejected.
    CHECK_THROWS(compare_baseline(reference_config_json(), {1, 2}, 400));

    // Static target, single ring robot required: the tangential behaviors
    // rarely engage, so both modes take about the same time.
    nlohmann::json stat = reference_config_json();
    stat["targets"][0]["max_step"] = 0.0;
    stat["targets"][0].erase("lambda_factor");
    stat["targets"][0]["motion"] = {{"model", "random"}};
    stat["targets"][0]["robots_required"] = 1;
    std::vector<std::uint64_t> seeds;
    for (std::uint64_t s = 1; s <= 12; ++s) seeds.push_back(s);
    const BaselineTable table = compare_baseline(stat, seeds, 2000, std::nullopt, 2);
    REQUIRE(table.rows.size() == 1);
    const BaselineRow& row = table.rows[0];
    CHECK(row.with_orbits.success_rate == 1.0);
    CHECK(row.baseline.success_rate == 1.0);
    const double ratio = row.with_orbits.median / row.baseline.median;
    CHECK(ratio >= 0.8);
    CHECK(ratio <= 1.2);

    // Identical seeds across modes share the random-walk prefix until first
    // target contact: the first capture can differ, but both must capture.
    const std::string csv = table.to_csv();
    CHECK(csv.find("median_orbits") != std::string::npos);
}

TEST_CASE("sweep spec parsing: unknown keys rejected, modes parsed") {
    nlohmann::json bad{{"base", reference_config_json()}, {"unknown_thing", 1}};
    CHECK_THROWS(SweepSpec::from_json(bad));
    nlohmann::json good{{"base", reference_config_json()},
                        {"axes", nlohmann::json::array(
                                     {{{"path", "noise.sigma"},
                                       {"values", {0.0, 0.1}}}})},
                        {"seeds", 5},
                        {"mode", "bounds"}};
    const SweepSpec spec = SweepSpec::from_json(good);
    CHECK(spec.seeds == 5);
    CHECK(spec.mode == SweepSpec::Mode::bounds);
    REQUIRE(spec.axes.size() == 1);
    CHECK(spec.axes[0].values.size() == 2);
}

TEST_CASE("config parsing: unknown keys rejected with paths") {
    nlohmann::json bad = reference_config_json();
    bad["swarm"]["typo_key"] = 1;
    CHECK_THROWS_WITH_AS(static_cast<void>(Config::from_json(bad)),
                         doctest::Contains("typo_key"), std::runtime_error);

    nlohmann::json bad2 = reference_config_json();
    bad2["orbits"].erase("inner");
    CHECK_THROWS(static_cast<void>(Config::from_json(bad2)));
}

TEST_CASE("baseline modes share the random-walk prefix until first target contact") {
    nlohmann::json stat = reference_config_json();
    stat["targets"][0]["max_step"] = 0.0;
    stat["targets"][0].erase("lambda_factor");
    stat["targets"][0]["motion"] = {{"model", "random"}};
    // Start beyond the target influence so a genuine search prefix exists.
    stat["init"]["range_min"] = 20.0;
    stat["init"]["range_max"] = 26.0;

    nlohmann::json with = stat;
    with["swarm"]["baseline_mode"] = false;
    nlohmann::json without = stat;
    without["swarm"]["baseline_mode"] = true;

    const RunResult a = run(make_setup(Config::from_json(with)), 31, 400, true);
    const RunResult b = run(make_setup(Config::from_json(without)), 31, 400, true);

    // Find the first step where any robot leaves pure search behavior.
    const auto first_contact = [](const RunResult& r) {
        for (std::size_t t = 0; t < r.trace.size(); ++t) {
            for (const RobotTrace& rt : r.trace[t].robots) {
                if (rt.behavior != Behavior::random_walk &&
                    rt.behavior != Behavior::min_signal_fallback &&
                    rt.behavior != Behavior::avoid_boundary)
                    return t;
            }
        }
        return r.trace.size();
    };
    const std::size_t contact = std::min(first_contact(a), first_contact(b));
    REQUIRE(contact > 0);
    for (std::size_t t = 0; t < contact; ++t) {
        REQUIRE(trace_record_to_jsonl(a.trace[t]) == trace_record_to_jsonl(b.trace[t]));
    }
}
