#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "tactoidlab/curve.hpp"
#include "tactoidlab/interp.hpp"

namespace tactoidlab {

namespace detail {

// base-sector interface point: boundary foot minus t(s) along the inward
// characteristic direction (sin ks, cos ks)
inline Vec2 astroid_point(int k, double s) {
    const double beta = 1.0 / (2.0 * (k + 1));
    return {(1.0 - beta) * std::cos(s) + beta * std::cos((2 * k + 1) * s),
            (1.0 - beta) * std::sin(s) - beta * std::sin((2 * k + 1) * s)};
}

inline bool point_in_polygon(const std::vector<Vec2>& poly, Vec2 p) {
    bool in = false;
    for (std::size_t i = 0, j = poly.size() - 1; i < poly.size(); j = i++) {
        const bool straddle = (poly[i][1] > p[1]) != (poly[j][1] > p[1]);
        if (straddle) {
            const double xc = poly[j][0] + (p[1] - poly[j][1]) / (poly[i][1] - poly[j][1]) *
                                               (poly[i][0] - poly[j][0]);
            if (p[0] < xc) in = !in;
        }
    }
    return in;
}

} // namespace detail

// closed interface curve with 2(k+1) cusps; `samples` vertices per symmetry
// sector, cusp vertices duplicated so each carries its one-sided tangent
inline Curve astroid_interface(int k, int samples = 512) {
    if (k < 1) throw std::invalid_argument("astroid_interface: k must be >= 1");
    if (samples < 8) throw std::invalid_argument("astroid_interface: too few samples");
    const double phi = std::numbers::pi / (k + 1);
    const double c = (2.0 * k + 1.0) / (2.0 * (k + 1.0));
    std::vector<Vec2> pts;
    std::vector<double> theta, speed;
    pts.reserve(static_cast<std::size_t>(2 * (k + 1)) * samples);
    for (int sector = 0; sector < 2 * (k + 1); ++sector)
        for (int i = 0; i < samples; ++i) {
            const double s = sector * phi + phi * i / (samples - 1);
            pts.push_back(detail::astroid_point(k, s));
            // tangent flips through each cusp with the sign of sin((k+1)s)
            double sgn = std::sin((k + 1) * s) >= 0.0 ? 1.0 : -1.0;
            if (i == 0) sgn = (sector % 2 == 0) ? 1.0 : -1.0;           // right limit
            if (i == samples - 1) sgn = (sector % 2 == 0) ? 1.0 : -1.0; // left limit
            theta.push_back(std::atan2(sgn * std::sin(k * s), -sgn * std::cos(k * s)));
            speed.push_back(2.0 * c * std::abs(std::sin((k + 1) * s)));
        }
    Curve curve = Curve::from_samples(std::move(pts), std::move(theta), true);
    curve.speed = std::move(speed);
    return curve;
}

inline double island_area(int k) {
    const int per_sector = std::max(16384 / (k + 1) + 2, 64);
    const Curve c = astroid_interface(k, per_sector);
    double acc = 0.0;
    const std::size_t n = c.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2& a = c.pts[i];
        const Vec2& b = c.pts[(i + 1) % n];
        acc += a[0] * b[1] - b[0] * a[1];
    }
    return std::abs(acc) / 2.0;
}

// divergence-free unit field outside the astroid island, zero inside;
// built once per k so grid sampling stays cheap
class AstroidConstruction {
  public:
    explicit AstroidConstruction(int k, int polygon_samples = 1024)
        : k_(k), interface_(astroid_interface(k, std::max(polygon_samples / (2 * (k + 1)), 32))) {
        if (k < 1) throw std::invalid_argument("AstroidConstruction: k must be >= 1");
    }

    const Curve& interface_curve() const { return interface_; }

    bool in_island(Vec2 x) const { return detail::point_in_polygon(interface_.pts, x); }

    // foot parameter of the characteristic through x (x outside the island)
    double foot_parameter(Vec2 x) const {
        const double phi = std::numbers::pi / (k_ + 1);
        double alpha = std::atan2(x[1], x[0]);
        if (alpha < 0.0) alpha += 2.0 * std::numbers::pi;
        int sector = std::min(static_cast<int>(alpha / phi), 2 * k_ + 1);
        auto g = [&](double s) {
            return -(x[0] - std::cos(s)) * std::cos(k_ * s) +
                   (x[1] - std::sin(s)) * std::sin(k_ * s);
        };
        const double pad = phi * 1e-9;
        double lo = sector * phi + pad, hi = (sector + 1) * phi - pad;
        if (g(lo) * g(hi) > 0.0) {
            // scan for a bracket; the fan is injective within the sector
            bool found = false;
            const int n = 128;
            double prev = g(lo), s_prev = lo;
            for (int i = 1; i <= n; ++i) {
                const double s = lo + (hi - lo) * i / n;
                const double val = g(s);
                if (prev * val <= 0.0) {
                    lo = s_prev;
                    hi = s;
                    found = true;
                    break;
                }
                prev = val;
                s_prev = s;
            }
            if (!found)
                throw std::runtime_error("astroid_field: no characteristic foot in sector");
        }
        return bisect_root(g, lo, hi, 1e-14);
    }

    Vec2 field(Vec2 x) const {
        if (std::hypot(x[0], x[1]) > 1.0 + 1e-12)
            throw std::domain_error("astroid_field: point outside the unit disk");
        if (in_island(x)) return {0.0, 0.0};
        const double s = foot_parameter(x);
        return {-std::cos(k_ * s), std::sin(k_ * s)};
    }

  private:
    int k_;
    Curve interface_;
};

inline Vec2 astroid_field(int k, Vec2 x) { return AstroidConstruction(k).field(x); }

} // namespace tactoidlab
