#pragma once

#include "swarmcap/controller.hpp"
#include "swarmcap/geometry.hpp"

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace swarmcap {

struct RobotTrace {
    Vec2 position = Vec2::Zero();
    double heading = 0.0;
    bool frozen = false;
    Behavior behavior = Behavior::random_walk;
    double turn = 0.0;
    double step = 0.0;
    std::optional<double> target_range;
    int orbit = 0;
    int rotation = 0;
};

struct TargetTrace {
    Vec2 position = Vec2::Zero();
    double heading = 0.0;
    bool escape_triggered = false;
    bool captured = false;
};

struct SafetyViolation {
    enum class Kind { robot_robot, robot_target, robot_boundary };
    Kind kind = Kind::robot_robot;
    int first = 0;
    int second = -1;  // -1 for boundary
    double distance = 0.0;
    double limit = 0.0;
};

const char* to_string(SafetyViolation::Kind k);

// One record per timestep: ground-truth state, the decisions taken from it,
// and the events observed on arrival. Margins are recomputed from true
// positions, never from robot estimates.
struct TraceRecord {
    long timestep = 0;
    std::vector<RobotTrace> robots;
    std::vector<TargetTrace> targets;
    double min_robot_robot = 0.0;     // +inf when undefined
    double min_robot_target = 0.0;    // vs live targets
    double min_robot_boundary = 0.0;
    std::vector<SafetyViolation> violations;
    std::vector<int> captures;  // target indices captured on arrival
};

std::string trace_record_to_jsonl(const TraceRecord& rec);
std::string trace_header_jsonl(std::uint64_t config_hash, std::uint64_t seed);

// Mean / standard-error / count triple for one drift statistic.
struct DriftSample {
    double mean = 0.0;
    double stderr_ = 0.0;
    long count = 0;

    double half_width(double z = 3.0) const { return z * stderr_; }
};

// Empirical drift statistics, computed purely from trace records. Radial and
// tangential components of the per-step change of the robot-to-target
// line-of-sight vector, grouped by behavior label; squared-distance drift over
// approach steps; the clockwise-commitment subset of orbit steps.
struct DriftStats {
    DriftSample squared_distance_drift;  // approach-target steps
    std::map<Behavior, DriftSample> radial;
    std::map<Behavior, DriftSample> tangential;
    DriftSample tangential_clockwise;  // orbit-tangent steps taken clockwise
    bool sufficient = false;           // sample floor met for the key statistics
};

class DriftAccumulator {
  public:
    void observe(const TraceRecord& prev, const TraceRecord& cur);
    DriftStats finish(long min_samples = 1000) const;

  private:
    struct Welford {
        double mean = 0.0;
        double m2 = 0.0;
        long n = 0;
        void add(double x) {
            ++n;
            const double d = x - mean;
            mean += d / n;
            m2 += d * (x - mean);
        }
        DriftSample sample() const {
            DriftSample s;
            s.mean = mean;
            s.count = n;
            s.stderr_ = (n > 1) ? std::sqrt(m2 / (static_cast<double>(n) - 1.0) / n) : 0.0;
            return s;
        }
    };
    Welford dv_;
    std::map<Behavior, Welford> radial_;
    std::map<Behavior, Welford> tangential_;
    Welford tan_cw_;
};

DriftStats drift_diagnostics(std::span<const TraceRecord> trace, long min_samples = 1000);

}  // namespace swarmcap
