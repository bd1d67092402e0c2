#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "tactoidlab/interp.hpp"
#include "tactoidlab/potential.hpp"
#include "tactoidlab/quadrature.hpp"

namespace tactoidlab {

// Wall cost K(z): the heteroclinic energy of a transition whose normal
// component is frozen at z,
//     K(z) = \int_{-w}^{w} sqrt(V(sqrt(z^2 + y^2))) dy,   w = sqrt(1 - z^2).
//
// For the polynomial well the integrand factors as
// sqrt(z^2 + w^2 s^2) * w^2 (1 - s^2) under y = w s, so K(z) =
// (1 - z^2)^{3/2} * G(z) with a reduced kernel G that stays smooth and O(1)
// all the way to z = 1.  Evaluating through G avoids the catastrophic
// cancellation that plagues the direct integral near the closing wall, which
// matters later when K is divided by powers of cos(theta/2).

inline double reduced_wall_kernel(double z, const PotentialSpec& spec) {
    if (spec.kind != PotentialKind::ChernSimonsHiggs)
        throw std::logic_error("reduced kernel is specific to the polynomial well");
    const double w2 = 1.0 - z * z;
    auto f = [&](double s) {
        return std::sqrt(z * z + w2 * s * s) * (1.0 - s * s);
    };
    return 2.0 * std::sqrt(spec.scale) * integrate(f, 0.0, 1.0, 1e-12).value;
}

inline double wall_cost(double z, const PotentialSpec& spec) {
    if (z < 0.0 || z > 1.0) throw std::domain_error("wall_cost: z outside [0, 1]");
    if (z == 1.0) return 0.0;
    const double w = std::sqrt(1.0 - z * z);
    if (spec.kind == PotentialKind::ChernSimonsHiggs)
        return w * w * w * reduced_wall_kernel(z, spec);
    auto f = [&](double s) {
        return eval_sqrtV(std::sqrt(z * z + w * w * s * s), spec);
    };
    return 2.0 * w * integrate(f, 0.0, 1.0, 1e-11).value;
}

// K'(z) by differentiation under the integral; the boundary terms vanish
// because sqrt(V) is zero on the unit circle.  The factor z / t is bounded by
// one on the whole range, so the integrand is as smooth as (sqrt V)'.
inline double wall_cost_derivative(double z, const PotentialSpec& spec) {
    if (z < 0.0 || z > 1.0) throw std::domain_error("wall_cost_derivative: z outside [0, 1]");
    if (z == 0.0) return 0.0;   // odd-in-z integrand
    if (z == 1.0) {
        // K ~ G(1) (1 - z^2)^{3/2} near the top, so the slope closes to zero
        return 0.0;
    }
    const double w = std::sqrt(1.0 - z * z);
    auto f = [&](double s) {
        const double t = std::sqrt(z * z + w * w * s * s);
        return eval_sqrtV_prime(t, spec) * (z / t);
    };
    return 2.0 * w * integrate(f, 0.0, 1.0, 1e-11).value;
}

// H(v) = \int_0^v K(w) / (1 - w^2)^2 dw.  Under w = sin(phi) the integrand
// becomes K(sin phi) / cos^3(phi), which for admissible potentials (decay
// K ~ C (1-w^2)^{3/2}) is bounded up to v = 1; for the polynomial well it is
// exactly the reduced kernel G(sin phi).
inline double h_cumulative(double v, const PotentialSpec& spec) {
    if (v < 0.0 || v > 1.0) throw std::domain_error("h_cumulative: v outside [0, 1]");
    if (v == 0.0) return 0.0;
    const double phi1 = std::asin(v);
    if (spec.kind == PotentialKind::ChernSimonsHiggs) {
        auto f = [&](double phi) { return reduced_wall_kernel(std::sin(phi), spec); };
        return integrate(f, 0.0, phi1, 1e-11).value;
    }
    auto f = [&](double phi) {
        const double c = std::cos(phi);
        if (c < 1e-7) {
            // probe the decay condition instead of dividing by ~0
            const double k = wall_cost(std::sin(phi), spec);
            const double ratio = k / (c * c * c);
            if (!std::isfinite(ratio) || std::abs(ratio) > 1e8)
                throw std::runtime_error(
                    "h_cumulative: potential violates the wall-cost decay condition");
            return ratio;
        }
        return wall_cost(std::sin(phi), spec) / (c * c * c);
    };
    return integrate(f, 0.0, phi1, 1e-10).value;
}

struct WallCostTable {
    std::vector<double> z_samples;
    std::vector<double> K_values;
    std::vector<double> Kp_values;
    std::vector<double> H_values;
    double c0 = 0.0;
    double z_star = 0.0;   // interior maximum of K

    double K(double z) const { return k_interp(z); }
    double Kp(double z) const { return kp_interp(z); }
    double H(double v) const { return h_interp(v); }

    Pchip k_interp, kp_interp, h_interp;
};

inline WallCostTable build_wall_cost_table(const PotentialSpec& spec, int n = 512) {
    if (n < 8) throw std::invalid_argument("wall cost table needs >= 8 samples");
    WallCostTable t;
    t.z_samples.resize(n);
    t.K_values.resize(n);
    t.Kp_values.resize(n);
    t.H_values.resize(n);
    for (int i = 0; i < n; ++i) {
        const double z = static_cast<double>(i) / (n - 1);
        t.z_samples[i] = z;
        t.K_values[i] = wall_cost(z, spec);
        t.Kp_values[i] = wall_cost_derivative(z, spec);
        t.H_values[i] = h_cumulative(z, spec);
    }
    t.c0 = modica_mortola_constant(spec);
    // bracket the interior maximum on the grid, then polish
    int imax = 1;
    for (int i = 1; i + 1 < n; ++i)
        if (t.K_values[i] > t.K_values[imax]) imax = i;
    const double lo = t.z_samples[imax > 0 ? imax - 1 : 0];
    const double hi = t.z_samples[imax + 1 < n ? imax + 1 : n - 1];
    t.z_star = golden_section_min([&](double z) { return -wall_cost(z, spec); }, lo, hi);
    t.k_interp = Pchip(t.z_samples, t.K_values);
    t.kp_interp = Pchip(t.z_samples, t.Kp_values);
    t.h_interp = Pchip(t.z_samples, t.H_values);
    return t;
}

} // namespace tactoidlab
