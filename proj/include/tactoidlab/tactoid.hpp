#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "tactoidlab/curve.hpp"
#include "tactoidlab/interp.hpp"
#include "tactoidlab/quadrature.hpp"
#include "tactoidlab/sharp.hpp"
#include "tactoidlab/wallcost.hpp"

namespace tactoidlab {

struct SingularOdeError : std::runtime_error {
    double theta_at_crossing;
    explicit SingularOdeError(double th)
        : std::runtime_error("solve_profile: f'' + f crosses zero at theta = " +
                             std::to_string(th)),
          theta_at_crossing(th) {}
};

struct CrossCheckError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// reduced interface energy density: half an isotropic interface, the wall
// contribution per unit interface length, and the fan contribution
inline double f_theta(double theta, const PotentialSpec& spec) {
    if (theta < -1e-12 || theta > std::numbers::pi + 1e-9)
        throw std::domain_error("f_theta: theta must lie in [0, pi]");
    theta = std::clamp(theta, 0.0, std::numbers::pi);
    const double half = theta / 2.0;
    const double sh = std::sin(half), ch = std::cos(half);
    const double half_k0 = 0.5 * wall_cost(0.0, spec);

    double middle, tail;
    if (spec.kind == PotentialKind::ChernSimonsHiggs) {
        // K(sin)/cos = G(sin) cos^2: smooth through theta = pi
        middle = reduced_wall_kernel(sh, spec) * ch * ch;
        tail = (half >= std::numbers::pi / 2.0)
                   ? 0.0
                   : integrate([&](double phi) { return reduced_wall_kernel(std::sin(phi), spec); },
                               half, std::numbers::pi / 2.0)
                         .value;
    } else {
        middle = (ch < 1e-8) ? 0.0 : wall_cost(sh, spec) / ch;
        tail = h_cumulative(1.0, spec) - h_cumulative(std::min(sh, 1.0), spec);
    }
    return half_k0 + middle + tail * std::sin(theta);
}

namespace detail {

// second derivative by Richardson-extrapolated differences; one-sided from
// below near theta = pi where the formula's even reflection is only C^1
inline double f_second(double theta, const PotentialSpec& spec, double h = 1e-3) {
    auto f = [&](double t) { return f_theta(t, spec); };
    if (theta + h <= std::numbers::pi) {
        auto central = [&](double hh) {
            return (f(theta + hh) - 2.0 * f(theta) + f(theta - hh)) / (hh * hh);
        };
        return (4.0 * central(h / 2.0) - central(h)) / 3.0;
    }
    auto one_sided = [&](double hh) {
        return (2.0 * f(theta) - 5.0 * f(theta - hh) + 4.0 * f(theta - 2.0 * hh) -
                f(theta - 3.0 * hh)) /
               (hh * hh);
    };
    return (4.0 * one_sided(h / 2.0) - one_sided(h)) / 3.0;
}

inline double f_first(double theta, const PotentialSpec& spec, double h = 1e-6) {
    const double hi = std::min(theta + h, std::numbers::pi);
    const double lo = theta - h;
    return (f_theta(hi, spec) - f_theta(lo, spec)) / (hi - lo);
}

} // namespace detail

// opening angle at the interface-wall junction: root of
// g(theta) = f'(theta) sin(theta) - f(theta) cos(theta)
inline double junction_angle(const PotentialSpec& spec) {
    auto g = [&](double th) {
        return detail::f_first(th, spec) * std::sin(th) - f_theta(th, spec) * std::cos(th);
    };
    const double lo = 0.01, hi = std::numbers::pi - 0.01;
    const int n = 256;
    double s_prev = lo, g_prev = g(lo);
    for (int i = 1; i <= n; ++i) {
        const double s = lo + (hi - lo) * i / n;
        const double gs = g(s);
        if (g_prev == 0.0) return s_prev;
        if (g_prev * gs < 0.0) return bisect_root(g, s_prev, s, 1e-13);
        s_prev = s;
        g_prev = gs;
    }
    std::ostringstream table;
    table << "junction_angle: no sign change of g on the scan grid; g-table:";
    for (int i = 0; i <= 8; ++i) {
        const double s = lo + (hi - lo) * i / 8;
        table << " g(" << s << ")=" << g(s) << ";";
    }
    throw std::runtime_error(table.str());
}

struct ProfileResult {
    double lambda = 1.0;       // as requested
    double lambda_eff = -1.0;  // signed multiplier actually used in the ODE
    double theta_star = 0.0;
    double l = 0.0;            // quadrant interface arclength
    std::vector<double> s, theta, dtheta;  // dtheta = d(theta)/ds at samples
    std::vector<double> x_raw, y;          // interface integrated from (0, 0)
    std::vector<double> e_red;             // running integral of f(theta)
};

// integrates theta' = -lambda_eff/(f'' + f) from theta* until theta = pi,
// co-integrating the interface position and the reduced energy
inline ProfileResult solve_profile(double lambda, const PotentialSpec& spec,
                                   double rel_tol = 1e-10) {
    if (lambda == 0.0 || !std::isfinite(lambda))
        throw std::invalid_argument("solve_profile: lambda must be nonzero and finite");
    ProfileResult out;
    out.lambda = lambda;
    out.lambda_eff = -std::abs(lambda);
    out.theta_star = junction_angle(spec);

    const double pi = std::numbers::pi;
    auto rhs = [&](double th, double st[4]) {
        const double thc = std::min(th, pi);
        const double denom = detail::f_second(thc, spec) + f_theta(thc, spec);
        if (denom <= 0.0) throw SingularOdeError(thc);
        st[0] = std::abs(lambda) / denom;  // theta'
        st[1] = std::cos(thc);             // x'
        st[2] = std::sin(thc);             // y'
        st[3] = f_theta(thc, spec);        // reduced-energy density
    };

    double y[4] = {out.theta_star, 0.0, 0.0, 0.0};
    double s = 0.0;
    double k1[4];
    rhs(y[0], k1);
    auto push = [&](double sv, const double st[4], double dth) {
        out.s.push_back(sv);
        out.theta.push_back(st[0]);
        out.x_raw.push_back(st[1]);
        out.y.push_back(st[2]);
        out.e_red.push_back(st[3]);
        out.dtheta.push_back(dth);
    };
    push(s, y, k1[0]);

    // Cash-Karp 4(5) embedded pair
    static constexpr double a2 = 0.2, a3 = 0.3, a4 = 0.6, a5 = 1.0, a6 = 0.875;
    static constexpr double b21 = 0.2;
    static constexpr double b31 = 3.0 / 40.0, b32 = 9.0 / 40.0;
    static constexpr double b41 = 0.3, b42 = -0.9, b43 = 1.2;
    static constexpr double b51 = -11.0 / 54.0, b52 = 2.5, b53 = -70.0 / 27.0, b54 = 35.0 / 27.0;
    static constexpr double b61 = 1631.0 / 55296.0, b62 = 175.0 / 512.0, b63 = 575.0 / 13824.0,
                            b64 = 44275.0 / 110592.0, b65 = 253.0 / 4096.0;
    static constexpr double c1 = 37.0 / 378.0, c3 = 250.0 / 621.0, c4 = 125.0 / 594.0,
                            c6 = 512.0 / 1771.0;
    static constexpr double d1 = 2825.0 / 27648.0, d3 = 18575.0 / 48384.0,
                            d4 = 13525.0 / 55296.0, d5 = 277.0 / 14336.0, d6 = 0.25;
    (void)a2; (void)a3; (void)a4; (void)a5; (void)a6;

    // the solution dilates as 1/|lambda|; matching the step cap to that scale
    // keeps the sampled polygon commuting with dilation, so the area scaling
    // law survives discretization
    const double h_max = 0.004 / std::abs(lambda);
    double h = 1e-4 / std::abs(lambda);
    const double abs_tol = 1e-12;
    bool done = false;
    int guard = 0;

    while (!done) {
        if (++guard > 2000000) throw std::runtime_error("solve_profile: step limit exceeded");
        double k2[4], k3[4], k4[4], k5[4], k6[4], y5[4], y4[4];
        rhs(y[0], k1);
        rhs(y[0] + h * b21 * k1[0], k2);
        rhs(y[0] + h * (b31 * k1[0] + b32 * k2[0]), k3);
        rhs(y[0] + h * (b41 * k1[0] + b42 * k2[0] + b43 * k3[0]), k4);
        rhs(y[0] + h * (b51 * k1[0] + b52 * k2[0] + b53 * k3[0] + b54 * k4[0]), k5);
        rhs(y[0] + h * (b61 * k1[0] + b62 * k2[0] + b63 * k3[0] + b64 * k4[0] + b65 * k5[0]), k6);
        double err = 0.0;
        for (int c = 0; c < 4; ++c) {
            y5[c] = y[c] + h * (c1 * k1[c] + c3 * k3[c] + c4 * k4[c] + c6 * k6[c]);
            y4[c] = y[c] + h * (d1 * k1[c] + d3 * k3[c] + d4 * k4[c] + d5 * k5[c] + d6 * k6[c]);
            const double scale = abs_tol + rel_tol * std::max(std::abs(y[c]), std::abs(y5[c]));
            err = std::max(err, std::abs(y5[c] - y4[c]) / scale);
        }
        if (err > 1.0) {
            h *= std::max(0.9 * std::pow(err, -0.25), 0.2);
            continue;
        }
        if (y5[0] >= pi) {
            // shrink the final step until theta lands on pi
            double h_land = h * (pi - y[0]) / (y5[0] - y[0]);
            auto land = [&](double hh) {
                rhs(y[0] + hh * b21 * k1[0], k2);
                rhs(y[0] + hh * (b31 * k1[0] + b32 * k2[0]), k3);
                rhs(y[0] + hh * (b41 * k1[0] + b42 * k2[0] + b43 * k3[0]), k4);
                rhs(y[0] + hh * (b51 * k1[0] + b52 * k2[0] + b53 * k3[0] + b54 * k4[0]), k5);
                rhs(y[0] + hh * (b61 * k1[0] + b62 * k2[0] + b63 * k3[0] + b64 * k4[0] +
                                 b65 * k5[0]),
                    k6);
                return y[0] + hh * (c1 * k1[0] + c3 * k3[0] + c4 * k4[0] + c6 * k6[0]);
            };
            for (int it = 0; it < 60; ++it) {
                const double th_new = land(h_land);
                const double miss = pi - th_new;
                if (std::abs(miss) <= 1e-13) break;
                const double slope = (th_new - y[0]) / h_land;
                const double next = h_land + miss / slope;
                if (next <= 0.0) break;
                h_land = next;
            }
            land(h_land);
            for (int c = 0; c < 4; ++c)
                y5[c] = y[c] + h_land * (c1 * k1[c] + c3 * k3[c] + c4 * k4[c] + c6 * k6[c]);
            y5[0] = pi;
            s += h_land;
            done = true;
        } else {
            s += h;
        }
        for (int c = 0; c < 4; ++c) y[c] = y5[c];
        double kend[4];
        rhs(y[0], kend);
        push(s, y, kend[0]);
        if (!done) h = std::min(h * std::min(0.9 * std::pow(std::max(err, 1e-16), -0.2), 5.0), h_max);
    }
    out.l = s;
    return out;
}

struct TactoidSolution {
    double lambda = 1.0;
    double lambda_eff = -1.0;
    double theta_star = 0.0;
    double l = 0.0;
    double x0 = 0.0;     // junction abscissa
    double y_top = 0.0;  // interface height on the x2 axis
    double area = 0.0;   // full island
    std::vector<double> s, theta, psi, dtheta;
    std::vector<double> t;             // characteristic lengths, wall grid
    std::vector<double> wall_density;  // K(u.nu)|wall'| per interface sample
    Curve interface;                   // quadrant, junction to top
    Curve wall;                        // quadrant, display-capped in t
    std::vector<Vec2> island;          // full closed polygon
};

// geometric assembly: interface anchored to the axes, wall r + t nu, wall
// cost density in the bounded product form, island by mirror symmetry
inline TactoidSolution reconstruct(const ProfileResult& prof, const PotentialSpec& spec,
                                   double t_display_cap = 10.0) {
    const double pi = std::numbers::pi;
    const std::size_t n = prof.s.size();
    if (n < 4) throw std::invalid_argument("reconstruct: profile too short");

    TactoidSolution sol;
    sol.lambda = prof.lambda;
    sol.lambda_eff = prof.lambda_eff;
    sol.theta_star = prof.theta_star;
    sol.l = prof.l;
    sol.s = prof.s;
    sol.theta = prof.theta;
    sol.dtheta = prof.dtheta;
    sol.x0 = -prof.x_raw.back();
    sol.y_top = prof.y.back();

    std::vector<Vec2> ipts(n);
    for (std::size_t i = 0; i < n; ++i)
        ipts[i] = {prof.x_raw[i] + sol.x0, prof.y[i]};
    sol.interface = Curve::from_samples(ipts, prof.theta, false);

    sol.psi.resize(n);
    for (std::size_t i = 0; i < n; ++i) sol.psi[i] = prof.theta[i] / 2.0;

    // characteristic length, wall vertices, and the bounded cost density
    sol.wall_density.resize(n);
    std::vector<Vec2> wpts;
    std::vector<double> wtheta, wt, wspeed, ws;
    double t_prev = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double th = prof.theta[i];
        const double ch = std::cos(th / 2.0);
        const double denom = 1.0 + std::cos(th);  // = 2 cos^2(theta/2)
        const double t_i = (denom > 1e-14) ? prof.y[i] / denom
                                           : std::numeric_limits<double>::infinity();
        if (i > 0 && std::isfinite(t_i) && t_i <= t_prev)
            throw std::runtime_error("reconstruct: characteristic length not increasing");
        if (std::isfinite(t_i)) t_prev = t_i;

        const double half_term = ch * ch + 0.5 * prof.dtheta[i] * prof.y[i];
        if (spec.kind == PotentialKind::ChernSimonsHiggs) {
            sol.wall_density[i] = reduced_wall_kernel(std::sin(th / 2.0), spec) * half_term;
        } else {
            const double c3 = std::max(ch, 1e-7);
            sol.wall_density[i] =
                wall_cost(std::sin(th / 2.0), spec) * half_term / (c3 * c3 * c3);
        }

        if (std::isfinite(t_i) && t_i <= t_display_cap) {
            const Vec2 nu{std::sin(th), -std::cos(th)};
            wpts.push_back({ipts[i][0] + t_i * nu[0], ipts[i][1] + t_i * nu[1]});
            wtheta.push_back(th / 2.0);
            wt.push_back(t_i);
            ws.push_back(prof.s[i]);
            wspeed.push_back((denom > 1e-14)
                                 ? (1.0 + prof.dtheta[i] * prof.y[i] / denom) / ch
                                 : std::numeric_limits<double>::infinity());
        }
    }
    sol.t = std::move(wt);
    sol.wall = Curve::from_samples(std::move(wpts), std::move(wtheta), false);
    sol.wall.s = std::move(ws);  // keep the interface parameter as the wall parameter
    sol.wall.speed = std::move(wspeed);
    detail::fill_curvature(sol.wall);

    // full island: reflect the quadrant across both axes
    std::vector<Vec2>& poly = sol.island;
    poly.reserve(4 * n);
    for (std::size_t i = 0; i < n; ++i) poly.push_back(ipts[i]);                       // Q1
    for (std::size_t i = n - 1; i-- > 0;) poly.push_back({-ipts[i][0], ipts[i][1]});   // Q2
    for (std::size_t i = 1; i < n; ++i) poly.push_back({-ipts[i][0], -ipts[i][1]});    // Q3
    for (std::size_t i = n - 1; i-- > 1;) poly.push_back({ipts[i][0], -ipts[i][1]});   // Q4
    double acc = 0.0;
    for (std::size_t i = 0; i < poly.size(); ++i) {
        const Vec2& a = poly[i];
        const Vec2& b = poly[(i + 1) % poly.size()];
        acc += a[0] * b[1] - b[0] * a[1];
    }
    sol.area = std::abs(acc) / 2.0;
    (void)pi;
    return sol;
}

// junction data in the four-curve convention: isotropic island as region 0,
// upper fan 1, outer far field 2, lower fan 3
inline JunctionData tactoid_junction(const TactoidSolution& sol, double L = 0.5) {
    const double th = sol.theta_star, ps = th / 2.0;
    JunctionData j;
    j.P = {sol.x0, 0.0};
    j.tau01 = {std::cos(th), std::sin(th)};
    j.tau12 = {std::cos(ps), std::sin(ps)};
    j.tau23 = {std::cos(ps), -std::sin(ps)};
    j.tau03 = {std::cos(th), -std::sin(th)};
    auto rot = [](Vec2 v) { return Vec2{v[1], -v[0]}; };
    j.nu01 = rot(j.tau01);
    j.nu12 = rot(j.tau12);
    j.nu23 = rot(j.tau23);
    j.nu03 = rot(j.tau03);
    j.u1 = {-std::cos(th), -std::sin(th)};
    j.u2 = {1.0, 0.0};
    j.u3 = {-std::cos(th), std::sin(th)};
    j.div1 = j.div2 = j.div3 = 0.0;
    j.L = L;
    return j;
}

// mirror a wall across an axis (0: x1 -> -x1, 1: x2 -> -x2), optionally
// flipping the trace sign; preserves the wall jump conditions exactly
inline WallData mirror_wall(const WallData& w, int axis, bool flip_sign) {
    WallData out = w;
    const double sg = flip_sign ? -1.0 : 1.0;
    auto mp = [axis](Vec2 v) {
        if (axis == 0) return Vec2{-v[0], v[1]};
        return Vec2{v[0], -v[1]};
    };
    for (auto& p : out.curve.pts) p = mp(p);
    for (std::size_t i = 0; i < out.curve.theta.size(); ++i)
        out.curve.theta[i] = (axis == 0) ? std::numbers::pi - out.curve.theta[i]
                                         : -out.curve.theta[i];
    out.curve.normal_sign = -out.curve.normal_sign;
    for (auto& u : out.u_left) u = {sg * mp(u)[0], sg * mp(u)[1]};
    for (auto& u : out.u_right) u = {sg * mp(u)[0], sg * mp(u)[1]};
    return out;
}

// SharpConfig for the assembled island: closed interface, four walls with
// the bounded cost density, divergence-free outer field
inline SharpConfig tactoid_sharp_config(const TactoidSolution& sol, double L = 0.5) {
    SharpConfig cfg;
    cfg.L = L;
    cfg.lambda = std::abs(sol.lambda);

    InterfaceData itf;
    itf.curve = Curve::from_points(sol.island, true);
    itf.u_star_tau = -1.0;
    itf.div_star.assign(sol.island.size(), 0.0);
    cfg.interfaces.push_back(std::move(itf));

    WallData w;
    w.curve = sol.wall;
    const std::size_t wn = sol.wall.size();
    w.u_left.resize(wn);
    w.u_right.resize(wn);
    w.div_left.assign(wn, 0.0);
    w.div_right.assign(wn, 0.0);
    for (std::size_t i = 0; i < wn; ++i) {
        const double th = 2.0 * sol.wall.theta[i];  // psi = theta/2 on the wall
        w.u_left[i] = {-std::cos(th), -std::sin(th)};
        w.u_right[i] = {1.0, 0.0};
    }
    w.energy_param = std::make_pair(sol.s, sol.wall_density);

    cfg.walls.push_back(mirror_wall(w, 0, true));   // upper left
    cfg.walls.push_back(mirror_wall(mirror_wall(w, 0, true), 1, false));  // lower left
    cfg.walls.push_back(mirror_wall(w, 1, false));  // lower right
    cfg.walls.push_back(std::move(w));              // upper right

    NematicRegion outer;
    outer.field = RegionField::DivergenceFree;
    cfg.regions.push_back(std::move(outer));
    IsotropicRegion island;
    island.polygon = sol.island;
    cfg.isotropic.push_back(std::move(island));
    return cfg;
}

struct TactoidEnergy {
    double reduced = 0.0;  // 4 * integral of f(theta) over the quadrant
    double sharp = 0.0;    // independent sharp-interface evaluation
    SharpEnergyBreakdown breakdown;
};

inline TactoidEnergy tactoid_energy(const TactoidSolution& sol, const PotentialSpec& spec,
                                    double L = 0.5) {
    TactoidEnergy e;
    std::vector<double> f_vals(sol.s.size());
    for (std::size_t i = 0; i < sol.s.size(); ++i) f_vals[i] = f_theta(sol.theta[i], spec);
    e.reduced = 4.0 * trapezoid(sol.s, f_vals);
    e.breakdown = e0_energy(tactoid_sharp_config(sol, L), L, spec);
    e.sharp = e.breakdown.total;
    if (std::abs(e.sharp - e.reduced) > 0.02 * std::abs(e.reduced))
        throw CrossCheckError("tactoid_energy: reduced and sharp evaluations disagree: " +
                              std::to_string(e.reduced) + " vs " + std::to_string(e.sharp));
    return e;
}

inline TactoidSolution solve_tactoid(double lambda, const PotentialSpec& spec) {
    return reconstruct(solve_profile(lambda, spec), spec);
}

// area(lambda) = area(1)/lambda^2; the law is verified, then exploited, and
// the returned solution is re-solved at the calibrated multiplier
inline TactoidSolution calibrate_lambda(double target_area, const PotentialSpec& spec) {
    if (!(target_area > 0.0) || !std::isfinite(target_area))
        throw std::range_error("calibrate_lambda: target area must be positive and finite");
    const TactoidSolution base = solve_tactoid(1.0, spec);
    const TactoidSolution half = solve_tactoid(2.0, spec);
    if (std::abs(half.area - base.area / 4.0) > 1e-6 * base.area)
        throw std::runtime_error("calibrate_lambda: dilation scaling law violated: area(1)=" +
                                 std::to_string(base.area) + " area(2)=" +
                                 std::to_string(half.area));
    double lam = std::sqrt(base.area / target_area);
    TactoidSolution sol = solve_tactoid(lam, spec);
    for (int it = 0; it < 5 && std::abs(sol.area - target_area) > 1e-6 * target_area; ++it) {
        lam *= std::sqrt(sol.area / target_area);
        sol = solve_tactoid(lam, spec);
    }
    if (std::abs(sol.area - target_area) > 1e-6 * target_area)
        throw std::range_error("calibrate_lambda: could not reach the target area");
    return sol;
}

} // namespace tactoidlab
