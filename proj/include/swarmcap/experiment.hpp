#pragma once

#include "swarmcap/world.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace swarmcap {

// Number of worker threads: SWARMCAP_THREADS overrides hardware concurrency.
int resolve_threads();

struct RunOutcome {
    RunSummary summary;
    bool failed = false;  // the run threw; siblings are unaffected
    std::string error;
};

// One summary per seed, executed concurrently with per-run isolation. Output
// order follows the seed list regardless of scheduling.
std::vector<RunOutcome> run_batch(const Config& config, const std::vector<std::uint64_t>& seeds,
                                  long t_max, int threads = 0);

// Box statistics of completion time over a batch (timeouts capped at t_max),
// nearest-rank percentiles.
struct AggregateStats {
    int runs = 0;
    int successes = 0;
    double success_rate = 0.0;
    double median = 0.0;
    double q25 = 0.0;
    double q75 = 0.0;
    double min = 0.0;
    double max = 0.0;
    long violations = 0;
    int errors = 0;
};

AggregateStats aggregate(const std::vector<RunOutcome>& outcomes, long t_max);

double nearest_rank_percentile(std::vector<double> values, double fraction);

struct SweepSpec {
    enum class Mode { simulation, bounds };

    nlohmann::json base;  // raw config json; overrides re-resolve "auto" fields
    struct Axis {
        std::string path;  // dotted path, e.g. "swarm.sensors" or "targets.0.escape_radius"
        std::vector<nlohmann::json> values;
    };
    std::vector<Axis> axes;
    int seeds = 50;
    std::uint64_t seed_start = 1;
    long t_max = 4000;
    Mode mode = Mode::simulation;

    static SweepSpec from_json(const nlohmann::json& j);
    static SweepSpec from_file(const std::string& path);
};

struct SweepRow {
    std::vector<std::string> axis_values;
    bool skipped = false;  // infeasible grid point
    std::string skip_reason;
    AggregateStats stats;            // simulation mode
    nlohmann::json bounds;           // bounds mode: every closed-form value
    std::string config_hash;
    std::uint64_t seed_start = 0;
    int seeds = 0;
};

struct SweepTable {
    std::vector<std::string> axis_names;
    std::vector<SweepRow> rows;
    SweepSpec::Mode mode = SweepSpec::Mode::simulation;

    std::string to_csv() const;
};

// Applies one axis override to a raw config json (dotted path).
void apply_override(nlohmann::json& config, const std::string& path, const nlohmann::json& value);

SweepTable sweep(const SweepSpec& spec, int threads = 0);

// Theory-bound values for one configuration (the `bounds` CLI payload).
nlohmann::json bounds_payload(const Config& config);

struct BaselineRow {
    std::vector<std::string> axis_values;
    AggregateStats with_orbits;
    AggregateStats baseline;
    std::string config_hash;
};

struct BaselineTable {
    std::vector<std::string> axis_names;
    std::vector<BaselineRow> rows;

    std::string to_csv() const;
};

// Paired comparison on identical seeds with the tangential behaviors on and
// off. Rejects configurations with a moving target.
BaselineTable compare_baseline(const nlohmann::json& base_config,
                               const std::vector<std::uint64_t>& seeds, long t_max,
                               const std::optional<SweepSpec::Axis>& axis = std::nullopt,
                               int threads = 0);

// Minimal standalone SVG box plot for a sweep table (one box per row).
std::string boxplot_svg(const SweepTable& table, const std::string& title);

}  // namespace swarmcap
