#pragma once

#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

#include "tactoidlab/potential.hpp"

namespace tactoidlab {

// Characteristic of the angle/divergence hyperbolic system: a circular arc
// of signed curvature v0, degenerating to a straight line as v0 -> 0.  The
// divergence value is transported unchanged.
inline std::pair<Vec2, double> trace_characteristic(Vec2 x0, double theta0, double v0,
                                                    double t) {
    if (std::abs(v0) < 1e-12) {
        return {{x0[0] - t * std::sin(theta0), x0[1] + t * std::cos(theta0)}, theta0};
    }
    const double th = theta0 + v0 * t;
    return {{x0[0] + (std::cos(th) - std::cos(theta0)) / v0,
             x0[1] + (std::sin(th) - std::sin(theta0)) / v0},
            th};
}

struct ResidualGrids {
    int nx = 0, ny = 0;
    std::vector<double> r1, r2;  // zero on the boundary ring, central inside
};

// Central-difference residuals of the transport system for sampled smooth
// theta (no branch jumps across the grid) and v.
inline ResidualGrids pde_residual(const std::vector<double>& theta,
                                  const std::vector<double>& v, int nx, int ny,
                                  double h) {
    if (nx < 3 || ny < 3 || theta.size() != static_cast<std::size_t>(nx) * ny ||
        v.size() != theta.size() || h <= 0.0)
        throw std::invalid_argument("pde_residual: malformed grids");
    ResidualGrids out;
    out.nx = nx;
    out.ny = ny;
    out.r1.assign(theta.size(), 0.0);
    out.r2.assign(theta.size(), 0.0);
    auto id = [nx](int i, int j) { return static_cast<std::size_t>(j) * nx + i; };
    for (int j = 1; j + 1 < ny; ++j)
        for (int i = 1; i + 1 < nx; ++i) {
            const std::size_t q = id(i, j);
            const double st = std::sin(theta[q]), ct = std::cos(theta[q]);
            const double tx = (theta[id(i + 1, j)] - theta[id(i - 1, j)]) / (2.0 * h);
            const double ty = (theta[id(i, j + 1)] - theta[id(i, j - 1)]) / (2.0 * h);
            const double vx = (v[id(i + 1, j)] - v[id(i - 1, j)]) / (2.0 * h);
            const double vy = (v[id(i, j + 1)] - v[id(i, j - 1)]) / (2.0 * h);
            out.r1[q] = -st * tx + ct * ty - v[q];
            out.r2[q] = -st * vx + ct * vy;
        }
    return out;
}

} // namespace tactoidlab
