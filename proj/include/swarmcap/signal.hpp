#pragma once

#include "swarmcap/environment.hpp"
#include "swarmcap/geometry.hpp"
#include "swarmcap/rng.hpp"

#include <Eigen/Core>

#include <optional>
#include <span>
#include <vector>

namespace swarmcap {

// Radial strength profile of a signal source: strictly decreasing on
// [0, influence), zero from the influence distance outward, analytically
// invertible.
struct SignalProfile {
    enum class Family { linear, inverse_square };

    Family family = Family::linear;
    double peak = 1.0;       // strength at d = 0
    double influence = 5.0;  // cutoff distance

    // Strength at distance d (>= 0 required).
    double strength(double d) const;

    // Distance at which the profile emits intensity z. Clamped to
    // [0, influence]: z >= peak maps to 0, z <= 0 maps to influence.
    double inverse(double z) const;
};

double signal_strength(const SignalProfile& profile, double d);

// Ring of isotropic sensors on a robot body. Angles are bearings relative to
// the robot heading, sorted, distinct, in [0, 2*pi).
struct SensorArray {
    Eigen::ArrayXd angles;
    double mount_radius = 1.0;

    static SensorArray symmetric(int p, double mount_radius);
    static SensorArray from_angles(std::vector<double> angles, double mount_radius);

    int count() const { return static_cast<int>(angles.size()); }
    bool is_symmetric() const { return symmetric_; }

    // Half of the larger angular gap the sensor makes with its two neighbors.
    double half_gap(int k) const;
    // Half of the maximum adjacent gap over the whole array (= pi/p when
    // symmetric, computed exactly in that case).
    double max_half_gap() const;

    double left_gap(int k) const;   // gap to the angularly previous sensor
    double right_gap(int k) const;  // gap to the angularly next sensor

  private:
    bool symmetric_ = false;
    int symmetric_count_ = 0;
};

// Non-negative per-sensor intensities for the three source kinds.
struct ReadingSet {
    Eigen::ArrayXd target;
    Eigen::ArrayXd robot;
    Eigen::ArrayXd env;
};

// Multiplicative relative Gaussian noise: z -> (1 - n) * z with
// n ~ N(0, sigma^2) resampled until n <= 1, so readings stay non-negative.
struct NoiseSpec {
    double sigma = 0.0;
    bool enabled = false;
};

double noise_factor(const NoiseSpec& noise, Rng& rng);

struct Pose {
    Vec2 position = Vec2::Zero();
    double heading = 0.0;
};

// Point sources and the boundary visible to one robot. Robot sources must
// exclude the sensing robot itself; captured targets must already be removed.
struct SourceView {
    std::span<const Vec2> target_sources;
    std::span<const Vec2> robot_sources;
    const Environment* environment = nullptr;  // null: no boundary source
};

struct SignalModel;

ReadingSet sense(const Pose& pose, const SensorArray& sensors, const SignalModel& signals,
                 const SourceView& view, const NoiseSpec& noise, Rng& rng);

// Closest center-to-source distance consistent with a sensor-to-source
// distance, given the sensor mount radius and the bearing half-angle of the
// sensor's admissible cone. A guaranteed under-approximation.
double virtual_source_distance(double d_sensor, double mount_radius, double half_angle);

struct RangeEstimate {
    double distance = 0.0;  // center-based under-approximation
    int sensor = 0;         // argmax sensor index
};

// Argmax-sensor range inference for point-source kinds. Empty when no sensor
// reads a positive intensity. Argmax ties break toward the lowest index.
std::optional<RangeEstimate> infer_distance(const Eigen::ArrayXd& readings,
                                            const SignalProfile& profile,
                                            const SensorArray& sensors);

// Effective response of the boundary line source: the line integral of the
// environment profile along an infinite straight wall at perpendicular
// distance h, tabulated once and inverted by bisection on the monotone table.
class BoundaryResponse {
  public:
    BoundaryResponse() = default;
    explicit BoundaryResponse(const SignalProfile& profile, int table_size = 4096);

    double response(double h) const;  // interpolated table lookup
    double invert(double z) const;    // perpendicular distance for a reading
    double influence() const { return influence_; }

  private:
    std::vector<double> values_;  // response at h = i * dh
    double dh_ = 0.0;
    double influence_ = 0.0;
};

// Boundary-kind analogue of infer_distance: inverts the effective line
// response, then applies the virtual-source bound.
std::optional<RangeEstimate> infer_boundary_distance(const Eigen::ArrayXd& env_readings,
                                                     const BoundaryResponse& response,
                                                     const SensorArray& sensors);

// Per-sensor virtual-source radii (sensor-centered): the inverse profile of
// each reading; sensors reading zero get the full influence distance.
Eigen::ArrayXd virtual_radii(const Eigen::ArrayXd& readings, const SignalProfile& profile);

// The three per-kind profiles plus the cached boundary response.
struct SignalModel {
    SignalProfile target;
    SignalProfile robot;
    SignalProfile env;
    BoundaryResponse env_response;

    static SignalModel make(SignalProfile target, SignalProfile robot, SignalProfile env) {
        SignalModel m{target, robot, env, BoundaryResponse(env)};
        return m;
    }

    // Quadrature step shared by sensing and the response table.
    double env_quadrature_step() const { return env.influence / 1000.0; }
};

}  // namespace swarmcap
