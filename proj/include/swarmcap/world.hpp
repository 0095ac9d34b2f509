#pragma once

#include "swarmcap/config.hpp"
#include "swarmcap/controller.hpp"
#include "swarmcap/target.hpp"
#include "swarmcap/trace.hpp"

#include <cstdint>
#include <iosfwd>
#include <map>
#include <vector>

namespace swarmcap {

struct RobotWorldState {
    Pose pose;
    bool frozen = false;
};

// Full simulation state at one timestep. Entities own counter-based RNG
// streams derived from the run seed, so state evolution is independent of
// evaluation order.
struct WorldState {
    long timestep = 0;
    std::uint64_t seed = 0;
    std::vector<RobotWorldState> robots;
    std::vector<TargetState> targets;
    std::vector<long> captured_at;  // -1 while live
    std::vector<bool> escape_last;  // escape triggered on the last move

    bool all_captured() const {
        for (long t : captured_at)
            if (t < 0) return false;
        return true;
    }
};

// Immutable per-run context derived from a configuration.
struct SimSetup {
    Config config;
    SignalModel signals;
    RobotParams params;
    OrbitSet orbits;  // effective (noise-inflated) inner radius
    NoiseSpec noise;
    double env_trigger = 0.0;
    double boundary_margin = 0.0;
    std::uint64_t config_hash = 0;
};

SimSetup make_setup(const Config& config);

// Places robots and targets by rejection sampling with all invariants
// satisfied. Throws after too many rejections (over-dense configuration).
WorldState init_world(const SimSetup& setup, std::uint64_t seed);

// Readings and control decision for one robot against the immutable state.
// Pure per index: any evaluation order yields the same outputs.
ReadingSet robot_readings(const WorldState& state, const SimSetup& setup, int robot_index);
ControlOutput robot_control(const WorldState& state, const SimSetup& setup, int robot_index);
std::vector<ControlOutput> compute_controls(const WorldState& state, const SimSetup& setup);
std::vector<TargetStep> compute_target_steps(const WorldState& state, const SimSetup& setup);

struct StepEvents {
    std::vector<SafetyViolation> violations;
    std::vector<int> captures;
};

// Applies all moves simultaneously from the snapshot, then evaluates the
// safety oracle and the encapsulation detector on the post-move state.
StepEvents advance(WorldState& state, const SimSetup& setup,
                   const std::vector<ControlOutput>& controls,
                   const std::vector<TargetStep>& target_steps);

// One synchronous timestep: sense/decide from the snapshot, move, check.
StepEvents step(WorldState& state, const SimSetup& setup);

// Ground-truth safety oracle: strict violations of the three safe distances.
// Frozen robots are exempt from the target check (they hold ring distance by
// construction); captured targets are not checked.
std::vector<SafetyViolation> check_safety(const WorldState& state, const SimSetup& setup);

struct EncapsulationStatus {
    int count = 0;             // robots in the ring
    bool spacing_ok = true;    // pairwise ring spacing >= safe_robot
    bool encapsulated = false;
};

EncapsulationStatus check_encapsulation(const WorldState& state, const SimSetup& setup,
                                        int target_index);

struct RunSummary {
    std::uint64_t seed = 0;
    std::string config_hash;
    long steps = 0;
    bool success = false;                // all targets captured
    std::vector<long> encap_step;        // per target, -1 on timeout
    long violation_count = 0;
    std::map<Behavior, long> behavior_histogram;
    DriftStats drift;
};

nlohmann::json summary_to_json(const RunSummary& s);
RunSummary summary_from_json(const nlohmann::json& j);

struct RunResult {
    RunSummary summary;
    std::vector<TraceRecord> trace;  // populated when keep_trace
};

// Runs until every target is captured or t_max steps have been applied.
// Emits one JSONL record per timestep to trace_out when given.
RunResult run(const SimSetup& setup, std::uint64_t seed, long t_max, bool keep_trace = false,
              std::ostream* trace_out = nullptr);

}  // namespace swarmcap
