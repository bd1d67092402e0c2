#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "tactoidlab/potential.hpp"

namespace tactoidlab {

// Planar curve as ordered vertex samples with per-vertex tangent angle,
// parametrization speed, and curvature.  Arclength accumulates over chords.
struct Curve {
    std::vector<Vec2> pts;
    std::vector<double> s;
    std::vector<double> theta;
    std::vector<double> speed;
    std::vector<double> curvature;
    bool closed = false;
    int normal_sign = 1;  // nu = normal_sign * (sin theta, -cos theta)

    std::size_t size() const { return pts.size(); }

    Vec2 normal(std::size_t i) const {
        return {normal_sign * std::sin(theta[i]), -normal_sign * std::cos(theta[i])};
    }
    Vec2 tangent(std::size_t i) const { return {std::cos(theta[i]), std::sin(theta[i])}; }
    double length() const { return s.empty() ? 0.0 : s.back() + closing_gap(); }

    double closing_gap() const {
        if (!closed || pts.size() < 2) return 0.0;
        return std::hypot(pts.front()[0] - pts.back()[0], pts.front()[1] - pts.back()[1]);
    }

    static Curve from_points(std::vector<Vec2> points, bool closed_flag);
    static Curve from_samples(std::vector<Vec2> points, std::vector<double> theta_samples,
                              bool closed_flag);
};

namespace detail {

inline double wrap_angle(double d) {
    while (d > std::numbers::pi) d -= 2.0 * std::numbers::pi;
    while (d < -std::numbers::pi) d += 2.0 * std::numbers::pi;
    return d;
}

inline void fill_arclength(Curve& c) {
    const std::size_t n = c.pts.size();
    c.s.assign(n, 0.0);
    for (std::size_t i = 1; i < n; ++i)
        c.s[i] = c.s[i - 1] + std::hypot(c.pts[i][0] - c.pts[i - 1][0],
                                         c.pts[i][1] - c.pts[i - 1][1]);
}

// curvature = d theta / d s with angle differences wrapped to (-pi, pi]
inline void fill_curvature(Curve& c) {
    const std::size_t n = c.pts.size();
    c.curvature.assign(n, 0.0);
    if (n < 3) return;
    auto ds = [&](std::size_t i, std::size_t j) {
        double d = c.s[j] - c.s[i];
        return d != 0.0 ? d : 1e-300;
    };
    for (std::size_t i = 1; i + 1 < n; ++i)
        c.curvature[i] = wrap_angle(c.theta[i + 1] - c.theta[i - 1]) / ds(i - 1, i + 1);
    if (c.closed) {
        const double wrap_len = c.closing_gap();
        const double d0 = (c.s[1] - c.s[0]) + wrap_len;
        c.curvature[0] = wrap_angle(c.theta[1] - c.theta[n - 1]) / (d0 != 0.0 ? d0 : 1e-300);
        const double dn = (c.s[n - 1] - c.s[n - 2]) + wrap_len;
        c.curvature[n - 1] = wrap_angle(c.theta[0] - c.theta[n - 2]) / (dn != 0.0 ? dn : 1e-300);
    } else {
        c.curvature[0] = wrap_angle(c.theta[1] - c.theta[0]) / ds(0, 1);
        c.curvature[n - 1] = wrap_angle(c.theta[n - 1] - c.theta[n - 2]) / ds(n - 2, n - 1);
    }
}

} // namespace detail

inline Curve Curve::from_points(std::vector<Vec2> points, bool closed_flag) {
    if (points.size() < 2) throw std::invalid_argument("curve needs >= 2 points");
    Curve c;
    c.pts = std::move(points);
    c.closed = closed_flag;
    detail::fill_arclength(c);
    const std::size_t n = c.pts.size();
    c.theta.assign(n, 0.0);
    auto chord_angle = [&](std::size_t i, std::size_t j) {
        return std::atan2(c.pts[j][1] - c.pts[i][1], c.pts[j][0] - c.pts[i][0]);
    };
    for (std::size_t i = 0; i < n; ++i) {
        if (i > 0 && i + 1 < n) c.theta[i] = chord_angle(i - 1, i + 1);
        else if (c.closed) c.theta[i] = (i == 0) ? chord_angle(n - 1, 1) : chord_angle(n - 2, 0);
        else c.theta[i] = (i == 0) ? chord_angle(0, 1) : chord_angle(n - 2, n - 1);
    }
    c.speed.assign(n, 1.0);
    detail::fill_curvature(c);
    return c;
}

inline Curve Curve::from_samples(std::vector<Vec2> points, std::vector<double> theta_samples,
                                 bool closed_flag) {
    if (points.size() != theta_samples.size())
        throw std::invalid_argument("curve samples size mismatch");
    Curve c;
    c.pts = std::move(points);
    c.theta = std::move(theta_samples);
    c.closed = closed_flag;
    detail::fill_arclength(c);
    c.speed.assign(c.pts.size(), 1.0);
    detail::fill_curvature(c);
    return c;
}

inline double point_segment_distance(const Vec2& p, const Vec2& a, const Vec2& b) {
    const double dx = b[0] - a[0], dy = b[1] - a[1];
    const double len2 = dx * dx + dy * dy;
    double t = 0.0;
    if (len2 > 0.0)
        t = std::clamp(((p[0] - a[0]) * dx + (p[1] - a[1]) * dy) / len2, 0.0, 1.0);
    return std::hypot(p[0] - (a[0] + t * dx), p[1] - (a[1] + t * dy));
}

inline double distance_to_curve(const Vec2& p, const Curve& c) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < c.pts.size(); ++i)
        best = std::min(best, point_segment_distance(p, c.pts[i - 1], c.pts[i]));
    if (c.closed && c.pts.size() > 2)
        best = std::min(best, point_segment_distance(p, c.pts.back(), c.pts.front()));
    return best;
}

inline double directed_hausdorff(const Curve& a, const Curve& b) {
    double worst = 0.0;
    for (const auto& p : a.pts) worst = std::max(worst, distance_to_curve(p, b));
    return worst;
}

inline double hausdorff_distance(const Curve& a, const Curve& b) {
    return std::max(directed_hausdorff(a, b), directed_hausdorff(b, a));
}

} // namespace tactoidlab
