#include "swarmcap/experiment.hpp"

#include "swarmcap/bounds.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace swarmcap {

int resolve_threads() {
    if (const char* env = std::getenv("SWARMCAP_THREADS")) {
        const int n = std::atoi(env);
        if (n > 0) return n;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

namespace {

template <typename F>
void parallel_for(int count, int threads, const F& body) {
    if (threads <= 0) threads = resolve_threads();
    threads = std::min(threads, count);
    if (threads <= 1) {
        for (int i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int t = 0; t < threads; ++t) {
        pool.emplace_back([&] {
            for (int i = next.fetch_add(1); i < count; i = next.fetch_add(1)) body(i);
        });
    }
    for (std::thread& th : pool) th.join();
}

double completion_time(const RunSummary& s, long t_max) {
    if (!s.success) return static_cast<double>(t_max);
    long last = 0;
    for (long e : s.encap_step) last = std::max(last, e);
    return static_cast<double>(last);
}

}  // namespace

std::vector<RunOutcome> run_batch(const Config& config, const std::vector<std::uint64_t>& seeds,
                                  long t_max, int threads) {
    const SimSetup setup = make_setup(config);
    std::vector<RunOutcome> out(seeds.size());
    parallel_for(static_cast<int>(seeds.size()), threads, [&](int i) {
        try {
            out[i].summary = run(setup, seeds[i], t_max).summary;
        } catch (const std::exception& e) {
            out[i].failed = true;
            out[i].error = e.what();
            out[i].summary.seed = seeds[i];
        }
    });
    return out;
}

double nearest_rank_percentile(std::vector<double> values, double fraction) {
    if (values.empty()) return 0.0;
    std::sort(values.begin(), values.end());
    const std::size_t rank = static_cast<std::size_t>(
        std::ceil(fraction * static_cast<double>(values.size())));
    return values[std::max<std::size_t>(rank, 1) - 1];
}

AggregateStats aggregate(const std::vector<RunOutcome>& outcomes, long t_max) {
    AggregateStats stats;
    std::vector<double> times;
    for (const RunOutcome& o : outcomes) {
        if (o.failed) {
            ++stats.errors;
            continue;
        }
        ++stats.runs;
        if (o.summary.success) ++stats.successes;
        stats.violations += o.summary.violation_count;
        times.push_back(completion_time(o.summary, t_max));
    }
    if (stats.runs > 0) stats.success_rate = static_cast<double>(stats.successes) / stats.runs;
    if (!times.empty()) {
        stats.median = nearest_rank_percentile(times, 0.5);
        stats.q25 = nearest_rank_percentile(times, 0.25);
        stats.q75 = nearest_rank_percentile(times, 0.75);
        stats.min = *std::min_element(times.begin(), times.end());
        stats.max = *std::max_element(times.begin(), times.end());
    }
    return stats;
}

SweepSpec SweepSpec::from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw std::runtime_error("sweep spec: expected an object");
    for (const auto& [key, _] : j.items()) {
        static const std::vector<std::string> allowed = {"base",  "base_path", "axes", "seeds",
                                                         "seed_start", "t_max", "mode"};
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
            throw std::runtime_error("sweep spec: unknown key '" + key + "'");
    }
    SweepSpec spec;
    if (j.contains("base")) {
        spec.base = j["base"];
    } else if (j.contains("base_path")) {
        std::ifstream in(j["base_path"].get<std::string>());
        if (!in) throw std::runtime_error("sweep spec: cannot open base config");
        in >> spec.base;
    } else {
        throw std::runtime_error("sweep spec: needs 'base' or 'base_path'");
    }
    if (j.contains("axes")) {
        for (const auto& a : j["axes"]) {
            Axis axis;
            axis.path = a.at("path").get<std::string>();
            for (const auto& v : a.at("values")) axis.values.push_back(v);
            if (axis.values.empty()) throw std::runtime_error("sweep spec: empty axis values");
            spec.axes.push_back(axis);
        }
    }
    if (j.contains("seeds")) spec.seeds = j["seeds"].get<int>();
    if (j.contains("seed_start")) spec.seed_start = j["seed_start"].get<std::uint64_t>();
    if (j.contains("t_max")) spec.t_max = j["t_max"].get<long>();
    if (j.contains("mode")) {
        const std::string mode = j["mode"].get<std::string>();
        if (mode == "simulation")
            spec.mode = Mode::simulation;
        else if (mode == "bounds")
            spec.mode = Mode::bounds;
        else
            throw std::runtime_error("sweep spec: mode must be 'simulation' or 'bounds'");
    }
    return spec;
}

SweepSpec SweepSpec::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("sweep spec: cannot open " + path);
    nlohmann::json j;
    in >> j;
    return from_json(j);
}

void apply_override(nlohmann::json& config, const std::string& path,
                    const nlohmann::json& value) {
    nlohmann::json* node = &config;
    std::istringstream tokens(path);
    std::string token;
    std::vector<std::string> parts;
    while (std::getline(tokens, token, '.')) parts.push_back(token);
    if (parts.empty()) throw std::runtime_error("override: empty path");
    for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
        const std::string& part = parts[i];
        if (node->is_array()) {
            node = &(*node)[static_cast<std::size_t>(std::stoul(part))];
        } else {
            node = &(*node)[part];
        }
    }
    if (node->is_array())
        (*node)[static_cast<std::size_t>(std::stoul(parts.back()))] = value;
    else
        (*node)[parts.back()] = value;
}

nlohmann::json bounds_payload(const Config& cfg) {
    nlohmann::json out;
    const SensorArray sensors = cfg.sensor_array();
    const int p = sensors.count();
    const double phi = sensors.max_half_gap();
    out["sensors"] = p;
    out["half_angle"] = phi;
    out["step_bound"] = max_robot_step(cfg.swarm.safe_robot, cfg.swarm.radius, p);
    const auto [lo, hi] =
        robot_influence_interval(cfg.swarm.safe_robot, cfg.swarm.radius, p, cfg.swarm.max_step);
    out["robot_influence_interval"] = {lo, hi};
    out["min_encap_radius"] =
        min_encap_radius(cfg.orbits.inner, cfg.swarm.radius, p, cfg.swarm.max_step);
    nlohmann::json per_target = nlohmann::json::array();
    for (const TargetConfig& t : cfg.targets) {
        nlohmann::json jt;
        try {
            const RingCapacity cap =
                ring_capacity(cfg.signal_robot.influence, cfg.swarm.radius, t.encap_radius);
            jt["ring_capacity"] = cap.real;
            jt["ring_capacity_floor"] = cap.floor;
        } catch (const std::exception& e) {
            jt["ring_capacity_error"] = e.what();
        }
        try {
            const double alpha =
                dispersion_angle(cfg.signal_robot.influence, cfg.swarm.radius, t.escape_radius);
            jt["dispersion_angle"] = alpha;
            const EscapeRatio er = step_ratio_escape(phi, alpha);
            jt["ratio_escape"] = er.ratio;
            jt["ratio_escape_tangential"] = er.tangential;
            jt["ratio_escape_radial"] = er.radial;
            jt["ratio_cruise"] = step_ratio_pattern(phi, alpha).cruise;
        } catch (const std::exception& e) {
            jt["ratio_error"] = e.what();
        }
        jt["ratio_random"] = step_ratio_random(cfg.swarm.count, cfg.signal_robot.influence,
                                               cfg.swarm.radius, cfg.orbits.inner);
        jt["applicable_ratio"] = cfg.step_ratio_for(t);
        jt["max_step"] = t.max_step;
        per_target.push_back(jt);
    }
    out["targets"] = per_target;
    out["feasibility"] = feasibility_to_json(validate_config(cfg));
    return out;
}

namespace {

std::string value_to_string(const nlohmann::json& v) {
    if (v.is_string()) return v.get<std::string>();
    return v.dump();
}

}  // namespace

SweepTable sweep(const SweepSpec& spec, int threads) {
    SweepTable table;
    table.mode = spec.mode;
    for (const auto& axis : spec.axes) table.axis_names.push_back(axis.path);

    // Cartesian product, last axis fastest.
    std::size_t points = 1;
    for (const auto& axis : spec.axes) points *= axis.values.size();

    for (std::size_t idx = 0; idx < points; ++idx) {
        nlohmann::json raw = spec.base;
        SweepRow row;
        std::size_t rem = idx;
        for (std::size_t a = spec.axes.size(); a-- > 0;) {
            const auto& axis = spec.axes[a];
            const std::size_t vi = rem % axis.values.size();
            rem /= axis.values.size();
            apply_override(raw, axis.path, axis.values[vi]);
            row.axis_values.insert(row.axis_values.begin(),
                                   value_to_string(axis.values[vi]));
        }

        Config cfg;
        try {
            cfg = Config::from_json(raw);
        } catch (const std::exception& e) {
            row.skipped = true;
            row.skip_reason = e.what();
            table.rows.push_back(row);
            continue;
        }
        row.config_hash = cfg.hash_hex();
        row.seed_start = spec.seed_start;
        row.seeds = spec.seeds;

        const FeasibilityReport report = validate_config(cfg);
        if (!report.pass()) {
            row.skipped = true;
            for (const FeasibilityCheck& c : report.checks) {
                if (!c.pass) {
                    row.skip_reason = "infeasible: " + c.name;
                    break;
                }
            }
            table.rows.push_back(row);
            continue;
        }

        if (spec.mode == SweepSpec::Mode::bounds) {
            row.bounds = bounds_payload(cfg);
            table.rows.push_back(row);
            continue;
        }

        std::vector<std::uint64_t> seeds(spec.seeds);
        for (int s = 0; s < spec.seeds; ++s) seeds[s] = spec.seed_start + s;
        const std::vector<RunOutcome> outcomes = run_batch(cfg, seeds, spec.t_max, threads);
        row.stats = aggregate(outcomes, spec.t_max);
        table.rows.push_back(row);
    }
    return table;
}

std::string SweepTable::to_csv() const {
    std::ostringstream out;
    for (const std::string& name : axis_names) out << name << ",";
    if (mode == SweepSpec::Mode::bounds) {
        out << "skipped,ratio_escape,ratio_cruise,ratio_random,ring_capacity,step_bound,"
               "config_hash\n";
        for (const SweepRow& row : rows) {
            for (const std::string& v : row.axis_values) out << v << ",";
            if (row.skipped) {
                out << "1,,,,,," << row.config_hash << "\n";
                continue;
            }
            const nlohmann::json& t0 = row.bounds["targets"][0];
            out << "0," << t0.value("ratio_escape", 0.0) << "," << t0.value("ratio_cruise", 0.0)
                << "," << t0.value("ratio_random", 0.0) << "," << t0.value("ring_capacity", 0.0)
                << "," << row.bounds.value("step_bound", 0.0) << "," << row.config_hash << "\n";
        }
        return out.str();
    }
    out << "skipped,runs,successes,success_rate,median,q25,q75,min,max,violations,errors,"
           "config_hash,seed_start,seeds\n";
    for (const SweepRow& row : rows) {
        for (const std::string& v : row.axis_values) out << v << ",";
        if (row.skipped) {
            out << "1,0,0,0,,,,,,0,0," << row.config_hash << "," << row.seed_start << ","
                << row.seeds << "\n";
            continue;
        }
        const AggregateStats& s = row.stats;
        out << "0," << s.runs << "," << s.successes << "," << s.success_rate << "," << s.median
            << "," << s.q25 << "," << s.q75 << "," << s.min << "," << s.max << ","
            << s.violations << "," << s.errors << "," << row.config_hash << "," << row.seed_start
            << "," << row.seeds << "\n";
    }
    return out.str();
}

BaselineTable compare_baseline(const nlohmann::json& base_config,
                               const std::vector<std::uint64_t>& seeds, long t_max,
                               const std::optional<SweepSpec::Axis>& axis, int threads) {
    {
        const Config probe = Config::from_json(base_config);
        for (const TargetConfig& t : probe.targets) {
            const bool cruising = t.motion.kind == MotionModel::Kind::pattern_escape &&
                                  t.motion.pattern.cruise_step > 0.0;
            if (t.max_step > 0.0 || cruising)
                throw std::runtime_error(
                    "baseline comparison requires a static target (zero step sizes)");
        }
    }

    BaselineTable table;
    std::vector<nlohmann::json> axis_values{nlohmann::json()};
    if (axis) {
        table.axis_names.push_back(axis->path);
        axis_values = axis->values;
    }

    for (const nlohmann::json& v : axis_values) {
        nlohmann::json raw = base_config;
        BaselineRow row;
        if (axis) {
            apply_override(raw, axis->path, v);
            row.axis_values.push_back(value_to_string(v));
        }

        nlohmann::json with = raw;
        apply_override(with, "swarm.baseline_mode", false);
        nlohmann::json without = raw;
        apply_override(without, "swarm.baseline_mode", true);

        const Config cfg_with = Config::from_json(with);
        const Config cfg_without = Config::from_json(without);
        row.config_hash = cfg_with.hash_hex();
        row.with_orbits = aggregate(run_batch(cfg_with, seeds, t_max, threads), t_max);
        row.baseline = aggregate(run_batch(cfg_without, seeds, t_max, threads), t_max);
        table.rows.push_back(row);
    }
    return table;
}

std::string BaselineTable::to_csv() const {
    std::ostringstream out;
    for (const std::string& name : axis_names) out << name << ",";
    out << "median_orbits,median_baseline,success_orbits,success_baseline,violations_orbits,"
           "violations_baseline,config_hash\n";
    for (const BaselineRow& row : rows) {
        for (const std::string& v : row.axis_values) out << v << ",";
        out << row.with_orbits.median << "," << row.baseline.median << ","
            << row.with_orbits.success_rate << "," << row.baseline.success_rate << ","
            << row.with_orbits.violations << "," << row.baseline.violations << ","
            << row.config_hash << "\n";
    }
    return out.str();
}

std::string boxplot_svg(const SweepTable& table, const std::string& title) {
    std::vector<const SweepRow*> rows;
    for (const SweepRow& row : table.rows)
        if (!row.skipped) rows.push_back(&row);

    const double width = 120.0 + 70.0 * static_cast<double>(rows.size());
    const double height = 360.0;
    const double plot_left = 70.0, plot_right = width - 20.0;
    const double plot_top = 50.0, plot_bottom = height - 50.0;

    double vmax = 1.0;
    for (const SweepRow* row : rows) vmax = std::max(vmax, row->stats.max);
    const auto y = [&](double v) {
        return plot_bottom - (plot_bottom - plot_top) * (v / vmax);
    };

    std::ostringstream svg;
    svg << "<svg xmlns='http://www.w3.org/2000/svg' width='" << width << "' height='" << height
        << "'>\n";
    svg << "<text x='" << width / 2 << "' y='24' text-anchor='middle' font-size='15'>" << title
        << "</text>\n";
    svg << "<line x1='" << plot_left << "' y1='" << plot_bottom << "' x2='" << plot_right
        << "' y2='" << plot_bottom << "' stroke='black'/>\n";
    svg << "<line x1='" << plot_left << "' y1='" << plot_top << "' x2='" << plot_left << "' y2='"
        << plot_bottom << "' stroke='black'/>\n";
    for (int i = 0; i <= 4; ++i) {
        const double v = vmax * i / 4.0;
        svg << "<text x='" << plot_left - 8 << "' y='" << y(v) + 4
            << "' text-anchor='end' font-size='11'>" << static_cast<long>(v) << "</text>\n";
    }

    double cx = plot_left + 45.0;
    std::ostringstream medians;
    bool first = true;
    for (const SweepRow* row : rows) {
        const AggregateStats& s = row->stats;
        const double half = 18.0;
        svg << "<line x1='" << cx << "' y1='" << y(s.min) << "' x2='" << cx << "' y2='"
            << y(s.max) << "' stroke='gray'/>\n";
        svg << "<rect x='" << cx - half << "' y='" << y(s.q75) << "' width='" << 2 * half
            << "' height='" << std::max(1.0, y(s.q25) - y(s.q75))
            << "' fill='#9ecae1' stroke='black'/>\n";
        svg << "<line x1='" << cx - half << "' y1='" << y(s.median) << "' x2='" << cx + half
            << "' y2='" << y(s.median) << "' stroke='black' stroke-width='2'/>\n";
        std::string label;
        for (std::size_t i = 0; i < row->axis_values.size(); ++i)
            label += (i ? "/" : "") + row->axis_values[i];
        svg << "<text x='" << cx << "' y='" << plot_bottom + 18
            << "' text-anchor='middle' font-size='11'>" << label << "</text>\n";
        medians << (first ? "M" : "L") << cx << "," << y(s.median);
        first = false;
        cx += 70.0;
    }
    if (rows.size() > 1)
        svg << "<path d='" << medians.str() << "' fill='none' stroke='#3182bd'/>\n";
    svg << "</svg>\n";
    return svg.str();
}

}  // namespace swarmcap
