#include "swarmcap/environment.hpp"

#include <algorithm>
#include <cmath>

namespace swarmcap {
namespace {

// Trapezoid sum of f(|segment(t) - point|) along a segment clipped to the
// disk of radius `reach` around `point`.
double segment_integral(const Vec2& a, const Vec2& b, const Vec2& point, double reach,
                        double max_step, const std::function<double(double)>& f) {
    const Vec2 ab = b - a;
    const double len = ab.norm();
    if (len <= 0.0) return 0.0;
    const Vec2 u = ab / len;
    const double tc = (point - a).dot(u);
    const double h2 = (point - (a + tc * u)).squaredNorm();
    const double r2 = reach * reach;
    if (h2 >= r2) return 0.0;
    const double w = std::sqrt(r2 - h2);
    const double t0 = std::max(0.0, tc - w);
    const double t1 = std::min(len, tc + w);
    if (t1 <= t0) return 0.0;

    const int n = std::max(2, static_cast<int>(std::ceil((t1 - t0) / max_step)) + 1);
    const double dt = (t1 - t0) / (n - 1);
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
        const double t = t0 + dt * i;
        const double d = (a + t * u - point).norm();
        const double v = f(d);
        sum += (i == 0 || i == n - 1) ? 0.5 * v : v;
    }
    return sum * dt;
}

}  // namespace

double Environment::boundary_distance(const Vec2& p) const {
    if (shape == Shape::disk) return radius - p.norm();
    const double dx = half_width - std::abs(p.x());
    const double dy = half_height - std::abs(p.y());
    return std::min(dx, dy);
}

double Environment::boundary_integral(const Vec2& point, double reach, double max_step,
                                      const std::function<double(double)>& f) const {
    if (boundary_distance(point) >= reach) return 0.0;

    if (shape == Shape::rectangle) {
        const Vec2 c1(-half_width, -half_height);
        const Vec2 c2(half_width, -half_height);
        const Vec2 c3(half_width, half_height);
        const Vec2 c4(-half_width, half_height);
        double sum = 0.0;
        sum += segment_integral(c1, c2, point, reach, max_step, f);
        sum += segment_integral(c2, c3, point, reach, max_step, f);
        sum += segment_integral(c3, c4, point, reach, max_step, f);
        sum += segment_integral(c4, c1, point, reach, max_step, f);
        return sum;
    }

    // Disk: arc of the boundary circle within `reach` of the point.
    const double rho = point.norm();
    const double cos_lim = (radius * radius + rho * rho - reach * reach) / (2.0 * radius * rho);
    double half_arc;  // half-angle of the visible arc, at the disk center
    if (rho <= 1e-12 || cos_lim <= -1.0) {
        half_arc = kPi;  // whole boundary in reach
    } else if (cos_lim >= 1.0) {
        return 0.0;
    } else {
        half_arc = std::acos(cos_lim);
    }
    const double psi0 = (rho > 1e-12) ? std::atan2(point.y(), point.x()) : 0.0;
    const double arc_len = 2.0 * half_arc * radius;
    const int n = std::max(2, static_cast<int>(std::ceil(arc_len / max_step)) + 1);
    const double dpsi = 2.0 * half_arc / (n - 1);
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
        const double psi = psi0 - half_arc + dpsi * i;
        const Vec2 q(radius * std::cos(psi), radius * std::sin(psi));
        const double v = f((q - point).norm());
        sum += (i == 0 || i == n - 1) ? 0.5 * v : v;
    }
    return sum * dpsi * radius;
}

double line_source_integral(double h, double reach, double max_step,
                            const std::function<double(double)>& f) {
    if (h >= reach) return 0.0;
    const double w = std::sqrt(reach * reach - h * h);
    const int n = std::max(2, static_cast<int>(std::ceil(2.0 * w / max_step)) + 1);
    const double dt = 2.0 * w / (n - 1);
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
        const double t = -w + dt * i;
        const double v = f(std::sqrt(h * h + t * t));
        sum += (i == 0 || i == n - 1) ? 0.5 * v : v;
    }
    return sum * dt;
}

}  // namespace swarmcap
