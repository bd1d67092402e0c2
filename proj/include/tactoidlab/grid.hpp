#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "tactoidlab/curve.hpp"
#include "tactoidlab/potential.hpp"

namespace tactoidlab {

enum class Shape { Rectangle, Disk };
enum class BcKind { DegreeData, Constant, OneD, PeriodicX_DirichletY };
enum class MaskState : std::uint8_t { Outside = 0, Inside = 1, Boundary = 2 };

struct BoundaryData {
    BcKind kind = BcKind::Constant;
    int k = 0;            // DegreeData winding
    double alpha = 0.0;   // DegreeData phase
    Vec2 value{0.0, 0.0}; // Constant
    double a = 0.0;       // OneD / PeriodicX_DirichletY second component

    static BoundaryData degree(int k, double alpha) {
        BoundaryData b; b.kind = BcKind::DegreeData; b.k = k; b.alpha = alpha; return b;
    }
    static BoundaryData constant(Vec2 v) {
        BoundaryData b; b.kind = BcKind::Constant; b.value = v; return b;
    }
    static BoundaryData oned(double a) {
        if (a < 0.0 || a >= 1.0) throw std::domain_error("boundary data: a must lie in [0, 1)");
        BoundaryData b; b.kind = BcKind::OneD; b.a = a; return b;
    }
    static BoundaryData periodic_x_dirichlet_y(double a) {
        BoundaryData b = oned(a); b.kind = BcKind::PeriodicX_DirichletY; return b;
    }
};

// Cell-centered grid: nx x ny cells tile the full extent, nodes sit at cell
// centers x_i = x0 + i h with x0 half a cell in from the edge, so h nx equals
// the width (or the disk diameter) and a 64 x 160 grid on a 0.4 x 1.0
// rectangle is exactly isotropic.  Disks are embedded in their bounding
// square; an inner radius carves an annulus for diagnostics.
struct Domain {
    Shape shape = Shape::Rectangle;
    double width = 0.0, height = 0.0;
    double radius = 0.0, inner_radius = 0.0;
    int nx = 0, ny = 0;
    double h = 0.0, x0 = 0.0, y0 = 0.0;
    BoundaryData bc;
    std::vector<MaskState> mask;

    int idx(int i, int j) const { return j * nx + i; }
    double x(int i) const { return x0 + h * i; }
    double y(int j) const { return y0 + h * j; }
    bool periodic_x() const {
        return shape == Shape::Rectangle &&
               (bc.kind == BcKind::OneD || bc.kind == BcKind::PeriodicX_DirichletY);
    }
    // periodic neighbor step: all nx columns are distinct, period nx
    int wrap_x(int i) const {
        if (!periodic_x()) return i;
        return (i % nx + nx) % nx;
    }
    MaskState at(int i, int j) const { return mask[idx(i, j)]; }
    bool inside(int i, int j) const { return at(i, j) == MaskState::Inside; }

    static Domain rectangle(double width, double height, int nx, int ny, BoundaryData bc) {
        if (nx < 4 || ny < 4) throw std::invalid_argument("rectangle grid too small");
        if (bc.kind == BcKind::DegreeData)
            throw std::invalid_argument("degree boundary data requires a disk");
        Domain d;
        d.shape = Shape::Rectangle;
        d.width = width; d.height = height;
        d.nx = nx; d.ny = ny;
        d.h = width / nx;
        if (std::abs(d.h * ny - height) > 1e-12 * std::max(1.0, height))
            throw std::invalid_argument("rectangle grid must be isotropic: h nx = width and h ny = height");
        d.x0 = -0.5 * width + 0.5 * d.h;
        d.y0 = -0.5 * height + 0.5 * d.h;
        d.bc = bc;
        d.mask.assign(static_cast<std::size_t>(nx) * ny, MaskState::Inside);
        const bool per = d.periodic_x();
        for (int j = 0; j < ny; ++j)
            for (int i = 0; i < nx; ++i) {
                const bool y_edge = (j == 0 || j == ny - 1);
                const bool x_edge = !per && (i == 0 || i == nx - 1);
                if (y_edge || x_edge) d.mask[d.idx(i, j)] = MaskState::Boundary;
            }
        return d;
    }

    static Domain disk(double radius, int n, BoundaryData bc, double inner_radius = 0.0) {
        if (n < 8) throw std::invalid_argument("disk grid too small");
        Domain d;
        d.shape = Shape::Disk;
        d.radius = radius; d.inner_radius = inner_radius;
        d.width = d.height = 2.0 * radius;
        d.nx = d.ny = n;
        d.h = 2.0 * radius / n;
        d.x0 = d.y0 = -radius + 0.5 * d.h;
        d.bc = bc;
        d.mask.assign(static_cast<std::size_t>(n) * n, MaskState::Outside);
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i) {
                // grid-edge cells stay out of the interior so every inside
                // stencil has all four neighbours in the array
                if (i == 0 || j == 0 || i + 1 == n || j + 1 == n) continue;
                const double r = std::hypot(d.x(i), d.y(j));
                if (r < radius - 1e-12 && r > inner_radius + 1e-12)
                    d.mask[d.idx(i, j)] = MaskState::Inside;
            }
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i) {
                if (d.mask[d.idx(i, j)] == MaskState::Inside) continue;
                const bool near =
                    (i > 0 && d.inside(i - 1, j)) || (i + 1 < n && d.inside(i + 1, j)) ||
                    (j > 0 && d.inside(i, j - 1)) || (j + 1 < n && d.inside(i, j + 1));
                if (near) d.mask[d.idx(i, j)] = MaskState::Boundary;
            }
        return d;
    }
};

// circle trace evaluated at angle phi (disk shapes)
inline Vec2 boundary_angle_value(const Domain& d, double phi) {
    if (d.bc.kind == BcKind::Constant) return d.bc.value;
    const double s = d.radius * phi;  // arclength on the circle
    const double arg = d.bc.k * s + d.bc.alpha;
    return {std::cos(arg), std::sin(arg)};
}

inline Vec2 boundary_value(const Domain& d, int i, int j) {
    switch (d.bc.kind) {
        case BcKind::Constant:
            return d.bc.value;
        case BcKind::OneD:
        case BcKind::PeriodicX_DirichletY: {
            const double a = d.bc.a;
            const double sx = (d.y(j) >= 0.0) ? 1.0 : -1.0;
            return {sx * std::sqrt(1.0 - a * a), a};
        }
        case BcKind::DegreeData: {
            return boundary_angle_value(d, std::atan2(d.y(j), d.x(i)));
        }
    }
    return {0.0, 0.0};
}

struct GridField {
    Domain dom;
    std::vector<double> u1, u2;

    Vec2 at(int i, int j) const {
        const int id = dom.idx(i, j);
        return {u1[id], u2[id]};
    }
};

inline void apply_boundary(GridField& f) {
    for (int j = 0; j < f.dom.ny; ++j)
        for (int i = 0; i < f.dom.nx; ++i) {
            if (f.dom.inside(i, j)) continue;
            const Vec2 v = boundary_value(f.dom, i, j);
            const int id = f.dom.idx(i, j);
            f.u1[id] = v[0];
            f.u2[id] = v[1];
        }
}

inline GridField make_field(const Domain& d) {
    GridField f;
    f.dom = d;
    f.u1.assign(d.mask.size(), 0.0);
    f.u2.assign(d.mask.size(), 0.0);
    apply_boundary(f);
    return f;
}

template <class F>
GridField sample_field(const Domain& d, F&& fn) {
    GridField f;
    f.dom = d;
    f.u1.resize(d.mask.size());
    f.u2.resize(d.mask.size());
    for (int j = 0; j < d.ny; ++j)
        for (int i = 0; i < d.nx; ++i) {
            const Vec2 v = fn(d.x(i), d.y(j));
            f.u1[d.idx(i, j)] = v[0];
            f.u2[d.idx(i, j)] = v[1];
        }
    return f;
}

namespace detail {

// Derivative along one axis at an inside node.  Central differences through
// any cell that holds live data (interior or Dirichlet ring); the one-sided
// second-order fallback only fires next to bare outside cells, matching the
// stencils the gradient flow itself uses.
inline double axis_derivative(const GridField& f, const std::vector<double>& comp,
                              int i, int j, int di, int dj) {
    const Domain& d = f.dom;
    const double h = d.h;
    auto value = [&](int ii, int jj) { return comp[d.idx(d.wrap_x(ii), jj)]; };
    auto usable = [&](int ii, int jj) {
        ii = d.wrap_x(ii);
        if (ii < 0 || ii >= d.nx || jj < 0 || jj >= d.ny) return false;
        if (d.shape == Shape::Rectangle) return true;
        return d.at(ii, jj) != MaskState::Outside;
    };
    const bool plus = usable(i + di, j + dj);
    const bool minus = usable(i - di, j - dj);
    if (plus && minus)
        return (value(i + di, j + dj) - value(i - di, j - dj)) / (2.0 * h);
    if (minus && usable(i - 2 * di, j - 2 * dj))
        return (3.0 * value(i, j) - 4.0 * value(i - di, j - dj) +
                value(i - 2 * di, j - 2 * dj)) / (2.0 * h);
    if (plus && usable(i + 2 * di, j + 2 * dj))
        return (-3.0 * value(i, j) + 4.0 * value(i + di, j + dj) -
                value(i + 2 * di, j + 2 * dj)) / (2.0 * h);
    // fall back to central through whatever data the ring holds
    return (value(i + di, j + dj) - value(i - di, j - dj)) / (2.0 * h);
}

} // namespace detail

inline std::vector<double> divergence(const GridField& f) {
    const Domain& d = f.dom;
    std::vector<double> out(d.mask.size(), 0.0);
    for (int j = 0; j < d.ny; ++j)
        for (int i = 0; i < d.nx; ++i) {
            if (!d.inside(i, j)) continue;
            out[d.idx(i, j)] = detail::axis_derivative(f, f.u1, i, j, 1, 0) +
                               detail::axis_derivative(f, f.u2, i, j, 0, 1);
        }
    return out;
}

struct EnergyBreakdown {
    double potential = 0.0;
    double gradient = 0.0;
    double divergence = 0.0;
    double total = 0.0;
};

// Discrete energy (1/2) int W/eps + eps |grad u|^2 + L (div u)^2 as midpoint
// sums; gradients by plain central differences at inside nodes, divergence by
// the mask-aware operator above.  Boundary cells are part of the domain in
// the cell-centered reading, so their (prescribed) potential term counts too.
inline EnergyBreakdown energy_eps(const GridField& f, double eps, double L,
                                  const PotentialSpec& spec) {
    if (eps <= 0.0) throw std::domain_error("energy_eps: eps must be positive");
    const Domain& d = f.dom;
    const std::vector<double> div = divergence(f);
    const double h = d.h;
    double pot = 0.0, grad = 0.0, divE = 0.0;
    for (int j = 0; j < d.ny; ++j)
        for (int i = 0; i < d.nx; ++i) {
            if (!d.inside(i, j)) {
                if (d.at(i, j) == MaskState::Boundary)
                    pot += eval_V(norm(f.at(i, j)), spec);
                continue;
            }
            const int id = d.idx(i, j);
            const Vec2 u{f.u1[id], f.u2[id]};
            pot += eval_V(norm(u), spec);
            const double u1x = (f.u1[d.idx(d.wrap_x(i + 1), j)] - f.u1[d.idx(d.wrap_x(i - 1), j)]) / (2 * h);
            const double u2x = (f.u2[d.idx(d.wrap_x(i + 1), j)] - f.u2[d.idx(d.wrap_x(i - 1), j)]) / (2 * h);
            const double u1y = (f.u1[d.idx(i, j + 1)] - f.u1[d.idx(i, j - 1)]) / (2 * h);
            const double u2y = (f.u2[d.idx(i, j + 1)] - f.u2[d.idx(i, j - 1)]) / (2 * h);
            grad += u1x * u1x + u1y * u1y + u2x * u2x + u2y * u2y;
            divE += div[id] * div[id];
        }
    EnergyBreakdown e;
    const double cell = h * h;
    e.potential = 0.5 / eps * pot * cell;
    e.gradient = 0.5 * eps * grad * cell;
    e.divergence = 0.5 * L * divE * cell;
    e.total = e.potential + e.gradient + e.divergence;
    return e;
}

inline Vec2 bilinear_sample(const GridField& f, double x, double y) {
    const Domain& d = f.dom;
    const double gx = (x - d.x0) / d.h;
    const double gy = (y - d.y0) / d.h;
    const int i = std::clamp(static_cast<int>(std::floor(gx)), 0, d.nx - 2);
    const int j = std::clamp(static_cast<int>(std::floor(gy)), 0, d.ny - 2);
    const double tx = gx - i, ty = gy - j;
    auto lerp2 = [&](const std::vector<double>& c) {
        const double low = c[d.idx(i, j)] * (1 - tx) + c[d.idx(i + 1, j)] * tx;
        const double high = c[d.idx(i, j + 1)] * (1 - tx) + c[d.idx(i + 1, j + 1)] * tx;
        return low * (1 - ty) + high * ty;
    };
    return {lerp2(f.u1), lerp2(f.u2)};
}

class DegreeUndefinedError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Fourier degree: sample the field on the circle of radius t, normalize to
// unit modulus, and sum n |u_n|^2 over the low half of the spectrum.
inline double degree_fourier(const GridField& f, double t, int M = 1024) {
    if (M < 512) throw std::invalid_argument("degree_fourier: need M >= 512 samples");
    std::vector<double> w1(M), w2(M);
    for (int m = 0; m < M; ++m) {
        const double phi = 2.0 * std::numbers::pi * m / M;
        const Vec2 u = bilinear_sample(f, t * std::cos(phi), t * std::sin(phi));
        const double r = norm(u);
        if (r < 0.25)
            throw DegreeUndefinedError("degree_fourier: |u| < 1/4 on the sampling circle");
        w1[m] = u[0] / r;
        w2[m] = u[1] / r;
    }
    std::vector<double> ct(M), st(M);
    for (int m = 0; m < M; ++m) {
        const double ang = 2.0 * std::numbers::pi * m / M;
        ct[m] = std::cos(ang);
        st[m] = std::sin(ang);
    }
    double deg = 0.0;
    for (int n = -M / 4; n <= M / 4; ++n) {
        if (n == 0) continue;
        double re = 0.0, im = 0.0;
        for (int m = 0; m < M; ++m) {
            // e^{-2 pi i n m / M} via the precomputed unit-root table
            const int q = ((n * m) % M + M) % M;
            const double c = ct[q], s = -st[q];
            re += w1[m] * c - w2[m] * s;
            im += w1[m] * s + w2[m] * c;
        }
        re /= M; im /= M;
        deg += n * (re * re + im * im);
    }
    return deg;
}

// (1/2pi) closed-loop integral of (u x du) / |u|^2, trapezoid rule over the
// polyline with centered differences for du/ds.
inline double winding_number(const GridField& f, const Curve& loop) {
    const std::size_t n = loop.pts.size();
    if (n < 3) throw std::invalid_argument("winding_number: loop too short");
    std::vector<Vec2> u(n);
    for (std::size_t i = 0; i < n; ++i) {
        u[i] = bilinear_sample(f, loop.pts[i][0], loop.pts[i][1]);
        if (norm(u[i]) < 0.25)
            throw DegreeUndefinedError("winding_number: |u| < 1/4 on the loop");
    }
    const double gap = loop.closing_gap();
    auto integrand = [&](std::size_t i) {
        std::size_t prev, next;
        double ds;
        if (loop.closed) {
            prev = (i == 0) ? n - 1 : i - 1;
            next = (i + 1 == n) ? 0 : i + 1;
            if (i == 0) ds = (loop.s[1] - loop.s[0]) + gap;
            else if (i + 1 == n) ds = gap + (loop.s[n - 1] - loop.s[n - 2]);
            else ds = loop.s[i + 1] - loop.s[i - 1];
        } else {
            prev = (i == 0) ? 0 : i - 1;
            next = (i + 1 == n) ? n - 1 : i + 1;
            ds = loop.s[next] - loop.s[prev];
        }
        if (ds == 0.0) return 0.0;
        const Vec2 du{(u[next][0] - u[prev][0]) / ds, (u[next][1] - u[prev][1]) / ds};
        const double r2 = u[i][0] * u[i][0] + u[i][1] * u[i][1];
        return cross(u[i], du) / r2;
    };
    double total = 0.0;
    for (std::size_t i = 1; i < n; ++i)
        total += 0.5 * (integrand(i - 1) + integrand(i)) * (loop.s[i] - loop.s[i - 1]);
    if (loop.closed)
        total += 0.5 * (integrand(n - 1) + integrand(0)) * gap;
    return total / (2.0 * std::numbers::pi);
}

struct DivBoundReport {
    int d = 0;
    double lhs = 0.0;
    double rhs = 0.0;
    bool applicable = false;
    bool satisfied = false;
    std::string message;
};

// Divergence lower bound over the annulus rho < r < rho_prime for fields of
// constant degree d not in {0, 1}:
//   int_A (div u)^2 >= |pi d ln(rho'/rho) + 4|        (d < 0)
//   int_A (div u)^2 >= |pi (d-1) ln(rho'/rho) - 4|    (d > 1)
inline DivBoundReport div_lower_bound_check(const GridField& f, double rho, double rho_prime) {
    if (!(0.0 < rho && rho < rho_prime))
        throw std::domain_error("div_lower_bound_check: need 0 < rho < rho_prime");
    const Domain& dom = f.dom;
    // modulus floor on annulus nodes
    for (int j = 0; j < dom.ny; ++j)
        for (int i = 0; i < dom.nx; ++i) {
            if (!dom.inside(i, j)) continue;
            const double r = std::hypot(dom.x(i), dom.y(j));
            if (r < rho || r > rho_prime) continue;
            if (norm(f.at(i, j)) < 0.5 - 1e-9)
                throw std::domain_error("div_lower_bound_check: |u| < 1/2 on the annulus");
        }
    // degree must be the same across the annulus
    double dsum = 0.0, dmin = 1e300, dmax = -1e300;
    for (int q = 0; q < 8; ++q) {
        const double t = rho + (rho_prime - rho) * (q + 0.5) / 8.0;
        const double dq = degree_fourier(f, t);
        dsum += dq;
        dmin = std::min(dmin, dq);
        dmax = std::max(dmax, dq);
    }
    if (dmax - dmin > 1e-2)
        throw std::domain_error("div_lower_bound_check: degree varies across radii");
    const double dmean = dsum / 8.0;
    const int d = static_cast<int>(std::llround(dmean));
    if (std::abs(dmean - d) > 0.1)
        throw std::domain_error("div_lower_bound_check: degree is not near an integer");

    DivBoundReport rep;
    rep.d = d;
    // lhs by polar quadrature of the bilinear-interpolated divergence grid
    GridField divf;
    divf.dom = dom;
    divf.u1 = divergence(f);
    divf.u2.assign(divf.u1.size(), 0.0);
    const int nr = 256, nt = 512;
    double lhs = 0.0;
    for (int a = 0; a < nr; ++a) {
        const double r = rho + (rho_prime - rho) * (a + 0.5) / nr;
        double ring = 0.0;
        for (int m = 0; m < nt; ++m) {
            const double phi = 2.0 * std::numbers::pi * m / nt;
            const double dv = bilinear_sample(divf, r * std::cos(phi), r * std::sin(phi))[0];
            ring += dv * dv;
        }
        lhs += ring * r;
    }
    lhs *= (rho_prime - rho) / nr * 2.0 * std::numbers::pi / nt;
    rep.lhs = lhs;
    const double lr = std::log(rho_prime / rho);
    if (d == 0 || d == 1) {
        rep.applicable = false;
        rep.message = "no lower bound for degree 0 or 1";
        return rep;
    }
    rep.applicable = true;
    rep.rhs = (d < 0) ? std::abs(std::numbers::pi * d * lr + 4.0)
                      : std::abs(std::numbers::pi * (d - 1) * lr - 4.0);
    rep.satisfied = rep.lhs >= rep.rhs - (rep.rhs * 1e-3 + 1e-6);
    return rep;
}

} // namespace tactoidlab
