#include "swarmcap/bounds.hpp"
#include "swarmcap/experiment.hpp"
#include "swarmcap/world.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

using swarmcap::Config;

std::vector<std::uint64_t> parse_seed_range(const std::string& spec) {
    std::vector<std::uint64_t> seeds;
    const auto dots = spec.find("..");
    if (dots == std::string::npos) {
        std::istringstream in(spec);
        std::string tok;
        while (std::getline(in, tok, ',')) seeds.push_back(std::stoull(tok));
        return seeds;
    }
    const std::uint64_t a = std::stoull(spec.substr(0, dots));
    const std::uint64_t b = std::stoull(spec.substr(dots + 2));
    for (std::uint64_t s = a; s <= b; ++s) seeds.push_back(s);
    return seeds;
}

int gate_config(const Config& cfg, bool force) {
    const swarmcap::FeasibilityReport report = swarmcap::validate_config(cfg);
    if (!report.pass()) {
        std::cerr << swarmcap::feasibility_to_text(report);
        if (!force) {
            std::cerr << "refusing to run an infeasible configuration (--force overrides)\n";
            return 2;
        }
        std::cerr << "running anyway (--force)\n";
    }
    return 0;
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << content;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"swarmcap: minimalist-swarm target encapsulation simulator"};
    app.require_subcommand(1);
    int threads = 0;
    app.add_option("--threads", threads, "worker threads (default: SWARMCAP_THREADS or all cores)");

    // validate
    auto* validate = app.add_subcommand("validate", "evaluate every parameter bound for a config");
    std::string validate_path;
    bool validate_strict = false, validate_json = false;
    validate->add_option("config", validate_path)->required();
    validate->add_flag("--strict", validate_strict, "exit nonzero on any failed check");
    validate->add_flag("--json", validate_json, "machine-readable report");

    // run
    auto* run_cmd = app.add_subcommand("run", "single seeded simulation run");
    std::string run_path, run_trace, run_summary_path;
    std::uint64_t run_seed = 1;
    long run_tmax = -1;
    bool run_force = false, run_no_strict = false;
    run_cmd->add_option("config", run_path)->required();
    run_cmd->add_option("--seed", run_seed, "run seed")->required();
    run_cmd->add_option("--tmax", run_tmax, "step cap (default: config run.t_max)");
    run_cmd->add_option("--trace", run_trace, "write a JSONL trace");
    run_cmd->add_option("--summary", run_summary_path, "write the run summary JSON");
    run_cmd->add_flag("--force", run_force, "run even if the config fails validation");
    run_cmd->add_flag("--no-strict", run_no_strict, "exit zero even with safety violations");

    // batch
    auto* batch_cmd = app.add_subcommand("batch", "many seeds of one config");
    std::string batch_path, batch_seeds = "1..50", batch_out;
    long batch_tmax = -1;
    bool batch_force = false, batch_no_strict = false;
    batch_cmd->add_option("config", batch_path)->required();
    batch_cmd->add_option("--seeds", batch_seeds, "range A..B or comma list");
    batch_cmd->add_option("--tmax", batch_tmax, "step cap (default: config run.t_max)");
    batch_cmd->add_option("--out", batch_out, "write one summary JSON per line");
    batch_cmd->add_flag("--force", batch_force);
    batch_cmd->add_flag("--no-strict", batch_no_strict);

    // sweep
    auto* sweep_cmd = app.add_subcommand("sweep", "grid of configs from a sweep spec");
    std::string sweep_path, sweep_out, sweep_svg;
    bool sweep_no_strict = false;
    sweep_cmd->add_option("spec", sweep_path)->required();
    sweep_cmd->add_option("--out", sweep_out, "write the CSV table");
    sweep_cmd->add_option("--svg", sweep_svg, "write a box-plot SVG");
    sweep_cmd->add_flag("--no-strict", sweep_no_strict);

    // compare-baseline
    auto* cmp_cmd = app.add_subcommand("compare-baseline",
                                       "paired medians with tangential behaviors on/off");
    std::string cmp_path, cmp_seeds = "1..50", cmp_param, cmp_values, cmp_out;
    long cmp_tmax = -1;
    cmp_cmd->add_option("config", cmp_path)->required();
    cmp_cmd->add_option("--seeds", cmp_seeds, "range A..B or comma list");
    cmp_cmd->add_option("--tmax", cmp_tmax, "step cap (default: config run.t_max)");
    cmp_cmd->add_option("--param", cmp_param, "config path to sweep, e.g. swarm.sensors");
    cmp_cmd->add_option("--values", cmp_values, "comma-separated values for --param");
    cmp_cmd->add_option("--out", cmp_out, "write the CSV table");

    // bounds
    auto* bounds_cmd = app.add_subcommand("bounds", "print every closed-form parameter bound");
    std::string bounds_path;
    bool bounds_json = false;
    bounds_cmd->add_option("config", bounds_path)->required();
    bounds_cmd->add_flag("--json", bounds_json);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*validate) {
            const Config cfg = Config::from_file(validate_path);
            const swarmcap::FeasibilityReport report = swarmcap::validate_config(cfg);
            if (validate_json)
                std::cout << swarmcap::feasibility_to_json(report).dump(2) << "\n";
            else
                std::cout << swarmcap::feasibility_to_text(report);
            return (validate_strict && !report.pass()) ? 2 : 0;
        }

        if (*run_cmd) {
            const Config cfg = Config::from_file(run_path);
            if (int rc = gate_config(cfg, run_force)) return rc;
            const long t_max = run_tmax >= 0 ? run_tmax : cfg.run.t_max;
            const swarmcap::SimSetup setup = swarmcap::make_setup(cfg);
            std::ofstream trace_file;
            std::ostream* trace = nullptr;
            if (!run_trace.empty()) {
                trace_file.open(run_trace);
                if (!trace_file) throw std::runtime_error("cannot write " + run_trace);
                trace = &trace_file;
            }
            const swarmcap::RunResult result = swarmcap::run(setup, run_seed, t_max, false, trace);
            const nlohmann::json summary = swarmcap::summary_to_json(result.summary);
            if (!run_summary_path.empty()) write_file(run_summary_path, summary.dump(2) + "\n");
            std::cout << summary.dump(2) << "\n";
            if (result.summary.violation_count > 0 && !run_no_strict) return 2;
            return 0;
        }

        if (*batch_cmd) {
            const Config cfg = Config::from_file(batch_path);
            if (int rc = gate_config(cfg, batch_force)) return rc;
            const long t_max = batch_tmax >= 0 ? batch_tmax : cfg.run.t_max;
            const auto seeds = parse_seed_range(batch_seeds);
            const auto outcomes = swarmcap::run_batch(cfg, seeds, t_max, threads);
            std::ostringstream lines;
            long violations = 0;
            int failures = 0;
            for (const auto& o : outcomes) {
                if (o.failed) {
                    ++failures;
                    lines << nlohmann::json{{"seed", o.summary.seed}, {"error", o.error}}.dump()
                          << "\n";
                    continue;
                }
                violations += o.summary.violation_count;
                lines << swarmcap::summary_to_json(o.summary).dump() << "\n";
            }
            if (!batch_out.empty())
                write_file(batch_out, lines.str());
            else
                std::cout << lines.str();
            const swarmcap::AggregateStats stats = swarmcap::aggregate(outcomes, t_max);
            std::cerr << "runs " << stats.runs << "  successes " << stats.successes << "  median "
                      << stats.median << "  violations " << stats.violations << "  errors "
                      << stats.errors << "\n";
            if ((violations > 0 || failures > 0) && !batch_no_strict) return 2;
            return 0;
        }

        if (*sweep_cmd) {
            const swarmcap::SweepSpec spec = swarmcap::SweepSpec::from_file(sweep_path);
            const swarmcap::SweepTable table = swarmcap::sweep(spec, threads);
            const std::string csv = table.to_csv();
            if (!sweep_out.empty())
                write_file(sweep_out, csv);
            else
                std::cout << csv;
            if (!sweep_svg.empty()) write_file(sweep_svg, swarmcap::boxplot_svg(table, "sweep"));
            long violations = 0;
            for (const auto& row : table.rows) violations += row.stats.violations;
            if (violations > 0 && !sweep_no_strict) return 2;
            return 0;
        }

        if (*cmp_cmd) {
            std::ifstream in(cmp_path);
            if (!in) throw std::runtime_error("cannot open " + cmp_path);
            nlohmann::json raw;
            in >> raw;
            const Config cfg = Config::from_json(raw);
            const long t_max = cmp_tmax >= 0 ? cmp_tmax : cfg.run.t_max;
            std::optional<swarmcap::SweepSpec::Axis> axis;
            if (!cmp_param.empty()) {
                swarmcap::SweepSpec::Axis a;
                a.path = cmp_param;
                std::istringstream vs(cmp_values);
                std::string tok;
                while (std::getline(vs, tok, ','))
                    a.values.push_back(nlohmann::json::parse(tok));
                axis = a;
            }
            const auto seeds = parse_seed_range(cmp_seeds);
            const swarmcap::BaselineTable table =
                swarmcap::compare_baseline(raw, seeds, t_max, axis, threads);
            const std::string csv = table.to_csv();
            if (!cmp_out.empty())
                write_file(cmp_out, csv);
            else
                std::cout << csv;
            return 0;
        }

        if (*bounds_cmd) {
            const Config cfg = Config::from_file(bounds_path);
            const nlohmann::json payload = swarmcap::bounds_payload(cfg);
            if (bounds_json) {
                std::cout << payload.dump(2) << "\n";
            } else {
                std::cout << payload.dump(2) << "\n";
            }
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
