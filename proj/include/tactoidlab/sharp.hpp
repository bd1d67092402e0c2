#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "tactoidlab/curve.hpp"
#include "tactoidlab/potential.hpp"
#include "tactoidlab/quadrature.hpp"
#include "tactoidlab/wallcost.hpp"

namespace tactoidlab {

struct InvalidConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class RegionField { Constant, DivergenceFree, Sampled };

struct NematicRegion {
    std::vector<Vec2> polygon;
    RegionField field = RegionField::DivergenceFree;
    Vec2 u_const{1.0, 0.0};
    std::vector<double> div_samples;   // Sampled only
    std::vector<double> div_weights;   // quadrature weights (area elements)
};

struct IsotropicRegion {
    std::vector<Vec2> polygon;
};

struct WallData {
    Curve curve;
    std::vector<Vec2> u_left, u_right;       // per-vertex side traces
    std::vector<double> div_left, div_right; // per-vertex side divergences
    // optional precomputed K(u.nu)|r'| on curve's own parameter grid, for
    // walls whose geometric tail is unbounded while the cost stays finite
    std::optional<std::pair<std::vector<double>, std::vector<double>>> energy_param;
};

struct InterfaceData {
    Curve curve;
    double u_star_tau = 1.0;                 // nematic trace = u_star_tau * tangent
    std::vector<double> div_star;            // per-vertex nematic-side divergence
    std::optional<std::vector<Vec2>> trace;  // explicit samples, validated if given
};

struct JunctionData {
    // four curves meet at P: 01 and 03 are interfaces against the isotropic
    // region 0, 12 and 23 are walls between nematic patches; tangents point
    // away from P, normals are the tangents rotated by -pi/2
    Vec2 P{0.0, 0.0};
    Vec2 tau01, tau12, tau23, tau03;
    Vec2 nu01, nu12, nu23, nu03;
    Vec2 u1, u2, u3;
    double div1 = 0.0, div2 = 0.0, div3 = 0.0;
    double L = 0.0;
};

struct SharpConfig {
    double L = 0.5;
    double lambda = 0.0;
    std::vector<NematicRegion> regions;
    std::vector<IsotropicRegion> isotropic;
    std::vector<WallData> walls;
    std::vector<InterfaceData> interfaces;
    std::vector<JunctionData> junctions;
};

inline void validate_config(const SharpConfig& cfg) {
    for (std::size_t w = 0; w < cfg.walls.size(); ++w) {
        const WallData& wd = cfg.walls[w];
        const std::size_t n = wd.curve.size();
        if (wd.u_left.size() != n || wd.u_right.size() != n)
            throw InvalidConfigError("wall " + std::to_string(w) + ": side traces missing");
        for (std::size_t i = 0; i < n; ++i) {
            const Vec2 nu = wd.curve.normal(i);
            const Vec2 tau = wd.curve.tangent(i);
            const double jn = dot(wd.u_left[i], nu) - dot(wd.u_right[i], nu);
            const double jt = dot(wd.u_left[i], tau) + dot(wd.u_right[i], tau);
            if (std::abs(jn) > 1e-8)
                throw InvalidConfigError("wall " + std::to_string(w) +
                                         ": normal trace jump at vertex " + std::to_string(i));
            if (std::abs(jt) > 1e-8)
                throw InvalidConfigError("wall " + std::to_string(w) +
                                         ": tangential traces not opposite at vertex " +
                                         std::to_string(i));
        }
    }
    for (std::size_t k = 0; k < cfg.interfaces.size(); ++k) {
        const InterfaceData& itf = cfg.interfaces[k];
        if (std::abs(std::abs(itf.u_star_tau) - 1.0) > 1e-12)
            throw InvalidConfigError("interface " + std::to_string(k) +
                                     ": trace orientation must be +1 or -1");
        if (itf.trace) {
            if (itf.trace->size() != itf.curve.size())
                throw InvalidConfigError("interface " + std::to_string(k) +
                                         ": trace sample count mismatch");
            for (std::size_t i = 0; i < itf.trace->size(); ++i)
                if (std::abs(dot((*itf.trace)[i], itf.curve.normal(i))) >= 1e-8)
                    throw InvalidConfigError("interface " + std::to_string(k) +
                                             ": trace not tangent at vertex " +
                                             std::to_string(i));
        }
    }
}

// natural boundary condition across a wall
inline double wall_jump_residual(double u_dot_nu, double div1, double div2, double L,
                                 const PotentialSpec& spec) {
    if (std::abs(u_dot_nu) > 1.0)
        throw std::domain_error("wall_jump_residual: |u.nu| must be <= 1");
    return wall_cost_derivative(std::abs(u_dot_nu), spec) - L * (div2 - div1);
}

namespace detail {

inline std::vector<double> central_derivative(const std::vector<double>& s,
                                              const std::vector<double>& f) {
    const std::size_t n = s.size();
    std::vector<double> d(n, 0.0);
    if (n < 2) return d;
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t lo = (i == 0) ? 0 : i - 1;
        const std::size_t hi = (i + 1 == n) ? i : i + 1;
        d[i] = (f[hi] - f[lo]) / (s[hi] - s[lo]);
    }
    return d;
}

} // namespace detail

// stationarity of the wall position under normal perturbations
inline std::vector<double> wall_evolution_residual(
    const std::vector<double>& s, const std::vector<double>& div1,
    const std::vector<double>& div2, const std::vector<double>& u1_tau,
    const std::vector<double>& kappa, const std::vector<double>& u_dot_nu, double L,
    const PotentialSpec& spec) {
    const std::size_t n = s.size();
    if (div1.size() != n || div2.size() != n || u1_tau.size() != n || kappa.size() != n ||
        u_dot_nu.size() != n)
        throw std::invalid_argument("wall_evolution_residual: sample count mismatch");
    std::vector<double> sum(n);
    for (std::size_t i = 0; i < n; ++i) sum[i] = div1[i] + div2[i];
    const std::vector<double> sum_p = detail::central_derivative(s, sum);
    const std::vector<double> tau_p = detail::central_derivative(s, u1_tau);
    std::vector<double> r(n);
    for (std::size_t i = 0; i < n; ++i)
        r[i] = 0.5 * L * (div1[i] * div1[i] - div2[i] * div2[i]) -
               L * sum_p[i] * u1_tau[i] - L * sum[i] * tau_p[i] -
               wall_cost(std::abs(u_dot_nu[i]), spec) * kappa[i];
    return r;
}

// stationarity of an isotropic-nematic interface at multiplier lambda
inline std::vector<double> interface_residual(const std::vector<double>& s,
                                              const std::vector<double>& div_star,
                                              double u_star_tau,
                                              const std::vector<double>& kappa,
                                              double lambda, double L,
                                              const PotentialSpec& spec) {
    const std::size_t n = s.size();
    if (div_star.size() != n || kappa.size() != n)
        throw std::invalid_argument("interface_residual: sample count mismatch");
    if (std::abs(std::abs(u_star_tau) - 1.0) > 1e-12)
        throw std::invalid_argument("interface_residual: u_star_tau must be +1 or -1");
    const double half_k0 = 0.5 * wall_cost(0.0, spec);
    const std::vector<double> div_p = detail::central_derivative(s, div_star);
    std::vector<double> r(n);
    for (std::size_t i = 0; i < n; ++i)
        r[i] = 0.5 * L * div_star[i] * div_star[i] - L * div_p[i] * u_star_tau +
               half_k0 * kappa[i] - lambda;
    return r;
}

// force balance of the four curves meeting at a junction
inline Vec2 junction_residual(const JunctionData& j, const PotentialSpec& spec) {
    auto check_unit = [](const Vec2& v, double tol, const char* what) {
        if (std::abs(norm(v) - 1.0) > tol)
            throw std::invalid_argument(std::string("junction_residual: ") + what +
                                        " must be unit");
    };
    check_unit(j.tau01, 1e-12, "tau01");
    check_unit(j.tau12, 1e-12, "tau12");
    check_unit(j.tau23, 1e-12, "tau23");
    check_unit(j.tau03, 1e-12, "tau03");
    check_unit(j.nu01, 1e-12, "nu01");
    check_unit(j.nu12, 1e-12, "nu12");
    check_unit(j.nu23, 1e-12, "nu23");
    check_unit(j.nu03, 1e-12, "nu03");
    check_unit(j.u1, 1e-10, "u1");
    check_unit(j.u2, 1e-10, "u2");
    check_unit(j.u3, 1e-10, "u3");

    const double half_k0 = 0.5 * wall_cost(0.0, spec);
    const double k12 = wall_cost(std::abs(dot(j.u1, j.nu12)), spec);
    const double k23 = wall_cost(std::abs(dot(j.u2, j.nu23)), spec);

    Vec2 r{0.0, 0.0};
    for (int c = 0; c < 2; ++c) {
        r[c] = half_k0 * (j.tau01[c] + j.tau03[c]) + k12 * j.tau12[c] + k23 * j.tau23[c] -
               j.L * (j.div1 * dot(j.u1, j.tau01) * j.nu01[c] +
                      j.div3 * dot(j.u3, j.tau03) * j.nu03[c]) +
               j.L * ((j.div1 + j.div2) * dot(j.u1, j.tau12) * j.nu12[c] +
                      (j.div2 + j.div3) * dot(j.u2, j.tau23) * j.nu23[c]);
    }
    return r;
}

struct SharpEnergyBreakdown {
    double bulk = 0.0;
    double perimeter = 0.0;
    double wall = 0.0;
    double total = 0.0;
};

inline SharpEnergyBreakdown e0_energy(const SharpConfig& cfg, double L,
                                      const PotentialSpec& spec) {
    validate_config(cfg);
    SharpEnergyBreakdown e;

    for (const NematicRegion& reg : cfg.regions) {
        if (reg.field != RegionField::Sampled) continue;
        if (reg.div_samples.size() != reg.div_weights.size())
            throw InvalidConfigError("sampled region: divergence/weight size mismatch");
        double acc = 0.0;
        for (std::size_t i = 0; i < reg.div_samples.size(); ++i)
            acc += reg.div_samples[i] * reg.div_samples[i] * reg.div_weights[i];
        e.bulk += 0.5 * L * acc;
    }

    const double half_k0 = 0.5 * wall_cost(0.0, spec);
    for (const InterfaceData& itf : cfg.interfaces) e.perimeter += half_k0 * itf.curve.length();

    for (const WallData& w : cfg.walls) {
        if (w.energy_param) {
            e.wall += trapezoid(w.energy_param->first, w.energy_param->second);
            continue;
        }
        const Curve& c = w.curve;
        const std::size_t n = c.size();
        std::vector<double> kv(n);
        for (std::size_t i = 0; i < n; ++i)
            kv[i] = wall_cost(std::abs(dot(w.u_left[i], c.normal(i))), spec);
        double acc = 0.0;
        for (std::size_t i = 0; i + 1 < n; ++i)
            acc += 0.5 * (kv[i] + kv[i + 1]) * (c.s[i + 1] - c.s[i]);
        if (c.closed && n > 1) acc += 0.5 * (kv[n - 1] + kv[0]) * c.closing_gap();
        e.wall += acc;
    }

    e.total = e.bulk + e.perimeter + e.wall;
    return e;
}

} // namespace tactoidlab
