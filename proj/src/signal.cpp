#include "swarmcap/signal.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace swarmcap {

double SignalProfile::strength(double d) const {
    if (d < 0.0) throw std::invalid_argument("signal distance must be non-negative");
    if (d >= influence) return 0.0;
    switch (family) {
        case Family::linear:
            return peak * (1.0 - d / influence);
        case Family::inverse_square: {
            // Shifted inverse-square, normalized to peak at 0 and zero at the
            // cutoff; analytically invertible and finite at the source.
            const double s = 1.0 / ((1.0 + influence) * (1.0 + influence));
            const double raw = 1.0 / ((1.0 + d) * (1.0 + d));
            return peak * (raw - s) / (1.0 - s);
        }
    }
    return 0.0;
}

double SignalProfile::inverse(double z) const {
    if (z <= 0.0) return influence;
    if (z >= peak) return 0.0;
    switch (family) {
        case Family::linear:
            return influence * (1.0 - z / peak);
        case Family::inverse_square: {
            const double s = 1.0 / ((1.0 + influence) * (1.0 + influence));
            const double raw = (z / peak) * (1.0 - s) + s;
            return 1.0 / std::sqrt(raw) - 1.0;
        }
    }
    return influence;
}

double signal_strength(const SignalProfile& profile, double d) { return profile.strength(d); }

SensorArray SensorArray::symmetric(int p, double mount_radius) {
    if (p < 1) throw std::invalid_argument("sensor count must be positive");
    SensorArray a;
    a.angles = Eigen::ArrayXd(p);
    for (int k = 0; k < p; ++k) a.angles[k] = kTwoPi * k / p;
    a.mount_radius = mount_radius;
    a.symmetric_ = true;
    a.symmetric_count_ = p;
    return a;
}

SensorArray SensorArray::from_angles(std::vector<double> angles, double mount_radius) {
    if (angles.empty()) throw std::invalid_argument("sensor angles must be non-empty");
    for (double& a : angles) a = wrap_angle(a);
    std::sort(angles.begin(), angles.end());
    for (std::size_t i = 1; i < angles.size(); ++i) {
        if (angles[i] - angles[i - 1] < 1e-12)
            throw std::invalid_argument("sensor angles must be distinct");
    }
    SensorArray a;
    a.angles = Eigen::Map<Eigen::ArrayXd>(angles.data(), static_cast<Eigen::Index>(angles.size()));
    a.mount_radius = mount_radius;
    return a;
}

double SensorArray::left_gap(int k) const {
    if (symmetric_) return kTwoPi / symmetric_count_;
    const int p = count();
    const int prev = (k + p - 1) % p;
    return wrap_angle(angles[k] - angles[prev]);
}

double SensorArray::right_gap(int k) const {
    if (symmetric_) return kTwoPi / symmetric_count_;
    const int p = count();
    const int next = (k + 1) % p;
    return wrap_angle(angles[next] - angles[k]);
}

double SensorArray::half_gap(int k) const {
    if (symmetric_) return kPi / symmetric_count_;
    return 0.5 * std::max(left_gap(k), right_gap(k));
}

double SensorArray::max_half_gap() const {
    if (symmetric_) return kPi / symmetric_count_;
    double m = 0.0;
    for (int k = 0; k < count(); ++k) m = std::max(m, right_gap(k));
    return 0.5 * m;
}

double noise_factor(const NoiseSpec& noise, Rng& rng) {
    if (!noise.enabled || noise.sigma <= 0.0) return 1.0;
    // Resample (not clamp) so the distribution below the truncation point
    // keeps its shape; unbounded below.
    for (int attempt = 0; attempt < 1000; ++attempt) {
        const double n = rng.normal(0.0, noise.sigma);
        if (n <= 1.0) return 1.0 - n;
    }
    return 0.0;
}

ReadingSet sense(const Pose& pose, const SensorArray& sensors, const SignalModel& signals,
                 const SourceView& view, const NoiseSpec& noise, Rng& rng) {
    const int p = sensors.count();
    ReadingSet out;
    out.target = Eigen::ArrayXd::Zero(p);
    out.robot = Eigen::ArrayXd::Zero(p);
    out.env = Eigen::ArrayXd::Zero(p);

    for (int k = 0; k < p; ++k) {
        const Vec2 sensor_pos =
            pose.position + sensors.mount_radius * unit_vec(pose.heading + sensors.angles[k]);

        double zg = 0.0;
        for (const Vec2& s : view.target_sources) {
            const double d = (s - sensor_pos).norm();
            if (d < signals.target.influence) zg += signals.target.strength(d);
        }
        double zr = 0.0;
        for (const Vec2& s : view.robot_sources) {
            const double d = (s - sensor_pos).norm();
            if (d < signals.robot.influence) zr += signals.robot.strength(d);
        }
        double ze = 0.0;
        if (view.environment != nullptr) {
            const SignalProfile& pe = signals.env;
            ze = view.environment->boundary_integral(
                sensor_pos, pe.influence, signals.env_quadrature_step(),
                [&pe](double d) { return pe.strength(d); });
        }

        // Noise draw order is fixed (target, robot, env) per sensor so streams
        // replay identically.
        out.target[k] = zg * noise_factor(noise, rng);
        out.robot[k] = zr * noise_factor(noise, rng);
        out.env[k] = ze * noise_factor(noise, rng);
    }
    return out;
}

double virtual_source_distance(double d_sensor, double mount_radius, double half_angle) {
    const double rs = mount_radius * std::sin(half_angle);
    const double disc = d_sensor * d_sensor - rs * rs;
    if (disc < -1e-12) throw std::invalid_argument("degenerate virtual-source geometry");
    return mount_radius * std::cos(half_angle) + std::sqrt(std::max(0.0, disc));
}

namespace {

int argmax_index(const Eigen::ArrayXd& readings) {
    int best = 0;
    for (int k = 1; k < readings.size(); ++k) {
        if (readings[k] > readings[best]) best = k;  // ties keep lowest index
    }
    return best;
}

}  // namespace

std::optional<RangeEstimate> infer_distance(const Eigen::ArrayXd& readings,
                                            const SignalProfile& profile,
                                            const SensorArray& sensors) {
    const int k = argmax_index(readings);
    if (readings[k] <= 0.0) return std::nullopt;
    // Noise-amplified readings can imply a source closer than the geometric
    // minimum; clamp into the valid domain (the bound saturates at its
    // closest-possible value there).
    const double hg = sensors.half_gap(k);
    const double floor = sensors.mount_radius * std::sin(hg);
    const double d_sensor = std::max(profile.inverse(readings[k]), floor);
    return RangeEstimate{virtual_source_distance(d_sensor, sensors.mount_radius, hg), k};
}

BoundaryResponse::BoundaryResponse(const SignalProfile& profile, int table_size) {
    influence_ = profile.influence;
    values_.resize(table_size + 1);
    dh_ = influence_ / table_size;
    const double step = influence_ / 1000.0;
    for (int i = 0; i <= table_size; ++i) {
        const double h = dh_ * i;
        values_[i] =
            line_source_integral(h, influence_, step, [&](double d) { return profile.strength(d); });
    }
    values_.back() = 0.0;
}

double BoundaryResponse::response(double h) const {
    if (h <= 0.0) return values_.front();
    if (h >= influence_) return 0.0;
    const double x = h / dh_;
    const int i = std::min(static_cast<int>(x), static_cast<int>(values_.size()) - 2);
    const double frac = x - i;
    return values_[i] + frac * (values_[i + 1] - values_[i]);
}

double BoundaryResponse::invert(double z) const {
    if (z <= 0.0) return influence_;
    if (z >= values_.front()) return 0.0;
    // Monotone decreasing table: binary search for the bracketing nodes, then
    // linear interpolation inside the bracket.
    int lo = 0;
    int hi = static_cast<int>(values_.size()) - 1;
    while (hi - lo > 1) {
        const int mid = (lo + hi) / 2;
        if (values_[mid] > z)
            lo = mid;
        else
            hi = mid;
    }
    const double span = values_[lo] - values_[hi];
    const double frac = span > 0.0 ? (values_[lo] - z) / span : 0.0;
    return dh_ * (lo + frac);
}

std::optional<RangeEstimate> infer_boundary_distance(const Eigen::ArrayXd& env_readings,
                                                     const BoundaryResponse& response,
                                                     const SensorArray& sensors) {
    const int k = argmax_index(env_readings);
    if (env_readings[k] <= 0.0) return std::nullopt;
    const double hg = sensors.half_gap(k);
    const double floor = sensors.mount_radius * std::sin(hg);
    const double h_sensor = std::max(response.invert(env_readings[k]), floor);
    return RangeEstimate{virtual_source_distance(h_sensor, sensors.mount_radius, hg), k};
}

Eigen::ArrayXd virtual_radii(const Eigen::ArrayXd& readings, const SignalProfile& profile) {
    Eigen::ArrayXd radii(readings.size());
    for (int k = 0; k < readings.size(); ++k) radii[k] = profile.inverse(readings[k]);
    return radii;
}

}  // namespace swarmcap
