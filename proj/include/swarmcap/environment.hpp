#pragma once

#include "swarmcap/geometry.hpp"

#include <functional>

namespace swarmcap {

// 2D convex bounded arena. Both shapes have exact boundary-distance functions
// and support line-integral quadrature over the boundary near a query point.
struct Environment {
    enum class Shape { rectangle, disk };

    Shape shape = Shape::rectangle;
    double half_width = 20.0;   // rectangle
    double half_height = 20.0;  // rectangle
    double radius = 20.0;       // disk

    // Distance from an interior point to the boundary (negative outside).
    double boundary_distance(const Vec2& p) const;

    bool contains(const Vec2& p, double margin = 0.0) const {
        return boundary_distance(p) >= margin;
    }

    // Axis-aligned bounding half-extents, for rejection sampling.
    Vec2 half_extents() const {
        if (shape == Shape::disk) return Vec2(radius, radius);
        return Vec2(half_width, half_height);
    }

    // Composite-trapezoid line integral of f(distance to `point`) over the
    // part of the boundary within `reach` of `point`, with arclength step
    // <= max_step. f must vanish at distances >= reach.
    double boundary_integral(const Vec2& point, double reach, double max_step,
                             const std::function<double(double)>& f) const;
};

// Trapezoid integral of f(sqrt(h^2 + t^2)) dt over an infinite straight line at
// perpendicular distance h, truncated where the integrand vanishes (>= reach).
// Shares the step-size convention of Environment::boundary_integral so that a
// wall reading and its inversion model agree.
double line_source_integral(double h, double reach, double max_step,
                            const std::function<double(double)>& f);

}  // namespace swarmcap
