#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

#include "tactoidlab/interp.hpp"
#include "tactoidlab/quadrature.hpp"

namespace tactoidlab {

using Vec2 = std::array<double, 2>;

inline double dot(const Vec2& a, const Vec2& b) { return a[0] * b[0] + a[1] * b[1]; }
inline double cross(const Vec2& a, const Vec2& b) { return a[0] * b[1] - a[1] * b[0]; }
inline double norm(const Vec2& a) { return std::hypot(a[0], a[1]); }

enum class PotentialKind { ChernSimonsHiggs, Tabulated };

// Radial double-well potential W(u) = V(|u|) vanishing at |u| = 0 and |u| = 1.
// The default is V(t) = t^2 (t^2 - 1)^2; arbitrary wells enter as tables.
struct PotentialSpec {
    PotentialKind kind = PotentialKind::ChernSimonsHiggs;
    double scale = 1.0;
    double t_max = 1.5;
    std::optional<Pchip> table;        // V(t) on [0, t_max]
    std::optional<Pchip> sqrt_table;   // sqrt(V(t)), built alongside

    static PotentialSpec csh(double scale = 1.0) {
        PotentialSpec s;
        s.kind = PotentialKind::ChernSimonsHiggs;
        s.scale = scale;
        return s;
    }

    static PotentialSpec tabulated(std::vector<double> t, std::vector<double> v,
                                   double scale = 1.0) {
        if (t.size() < 4) throw std::invalid_argument("potential table too small");
        if (t.front() != 0.0 || t.back() < 1.5)
            throw std::invalid_argument("potential table must span [0, t_max] with t_max >= 1.5");
        if (std::abs(v.front()) > 1e-12)
            throw std::invalid_argument("potential table must have V(0) = 0");
        bool saw_one = false;
        for (std::size_t i = 0; i < t.size(); ++i) {
            if (v[i] < -1e-12) throw std::invalid_argument("potential table must be nonnegative");
            if (std::abs(t[i] - 1.0) < 1e-12) {
                saw_one = true;
                if (std::abs(v[i]) > 1e-12)
                    throw std::invalid_argument("potential table must have V(1) = 0");
            }
        }
        if (!saw_one)
            throw std::invalid_argument("potential table must sample t = 1 exactly");
        PotentialSpec s;
        s.kind = PotentialKind::Tabulated;
        s.scale = scale;
        s.t_max = t.back();
        std::vector<double> sq(v.size());
        for (std::size_t i = 0; i < v.size(); ++i) sq[i] = std::sqrt(std::max(v[i], 0.0));
        s.sqrt_table.emplace(t, std::move(sq));
        s.table.emplace(std::move(t), std::move(v));
        return s;
    }
};

inline double eval_V(double t, const PotentialSpec& spec) {
    if (t < 0.0) throw std::domain_error("eval_V: negative radius");
    if (spec.kind == PotentialKind::ChernSimonsHiggs) {
        const double m = t * t - 1.0;
        return spec.scale * t * t * m * m;
    }
    if (t > spec.t_max) throw std::domain_error("eval_V: radius beyond table range");
    return spec.scale * std::max(spec.table->eval(t), 0.0);
}

// sqrt(V) evaluated without squaring-then-rooting; for the polynomial well this
// is t |1 - t^2| exactly, which is what the wall-cost integrands need near t = 1.
inline double eval_sqrtV(double t, const PotentialSpec& spec) {
    if (spec.kind == PotentialKind::ChernSimonsHiggs)
        return std::sqrt(spec.scale) * t * std::abs(1.0 - t * t);
    if (t > spec.t_max) throw std::domain_error("eval_sqrtV: radius beyond table range");
    return std::sqrt(spec.scale) * std::max(spec.sqrt_table->eval(t), 0.0);
}

// d/dt sqrt(V); used when differentiating the wall cost under the integral.
inline double eval_sqrtV_prime(double t, const PotentialSpec& spec) {
    if (spec.kind == PotentialKind::ChernSimonsHiggs) {
        const double s = (t < 1.0) ? 1.0 : -1.0;
        return std::sqrt(spec.scale) * s * (1.0 - 3.0 * t * t);
    }
    return std::sqrt(spec.scale) * spec.sqrt_table->derivative(t);
}

inline Vec2 eval_W_grad(const Vec2& u, const PotentialSpec& spec) {
    const double r2 = u[0] * u[0] + u[1] * u[1];
    if (spec.kind == PotentialKind::ChernSimonsHiggs) {
        const double g = 2.0 * spec.scale * (r2 - 1.0) * (3.0 * r2 - 1.0);
        return {g * u[0], g * u[1]};
    }
    const double r = std::sqrt(r2);
    if (r == 0.0) return {0.0, 0.0};   // radially smooth well, gradient vanishes
    if (r > spec.t_max) throw std::domain_error("eval_W_grad: radius beyond table range");
    const double g = spec.scale * spec.table->derivative(r) / r;
    return {g * u[0], g * u[1]};
}

inline double modica_mortola_constant(const PotentialSpec& spec) {
    return integrate([&](double s) { return eval_sqrtV(s, spec); }, 0.0, 1.0, 1e-12).value;
}

// Largest observed ratio min(t^2, |1-t^2|) / sqrt(V(t)) over a dense grid on
// [0, t_max]; the potential-condition constant.  Grid points where both sides
// vanish are skipped.
inline double hat_constant(const PotentialSpec& spec, int n = 10000) {
    double c = 0.0;
    for (int i = 0; i <= n; ++i) {
        const double t = spec.t_max * static_cast<double>(i) / n;
        const double lhs = std::min(t * t, std::abs(1.0 - t * t));
        const double sv = eval_sqrtV(t, spec);
        if (sv == 0.0) {
            if (lhs > 0.0) return std::numeric_limits<double>::infinity();
            continue;
        }
        c = std::max(c, lhs / sv);
    }
    return c;
}

struct HeteroclinicProfile {
    std::vector<double> t;   // abscissae on [-half_width, half_width]
    std::vector<double> f;   // odd transition profile
    double energy = 0.0;     // int V(sqrt(a^2+f^2)) dt; equals the wall cost K(a)
    double a = 0.0;
};

// Optimal wall cross-section: the first integral of the transition problem
// gives f' = sqrt(V(sqrt(a^2 + f^2))), integrated outward from f(0) = 0.
// At a = 0 the origin is a degenerate equilibrium (the profile splits into two
// interfaces), so the march starts at a small positive seed; its omitted core
// contributes O(seed^2) energy.  If the window is too short for the march to
// land on the far state, it is widened and the march rerun.
inline HeteroclinicProfile heteroclinic_profile(double a, const PotentialSpec& spec,
                                                double half_width = 20.0,
                                                int samples = 2001) {
    if (a < 0.0 || a > 1.0) throw std::domain_error("heteroclinic_profile: a outside [0, 1]");
    HeteroclinicProfile out;
    out.a = a;
    const int half = samples / 2;
    out.t.resize(2 * half + 1);
    out.f.resize(2 * half + 1);
    for (int i = -half; i <= half; ++i)
        out.t[i + half] = half_width * static_cast<double>(i) / half;
    if (a >= 1.0) {        // endpoints coincide, constant zero profile
        return out;
    }
    const double ceiling = std::sqrt(1.0 - a * a);
    auto rhs = [&](double f) {
        const double r = std::sqrt(a * a + f * f);
        return (f < ceiling) ? eval_sqrtV(r, spec) : 0.0;
    };
    const double h = half_width / half;
    const int substeps = 16;
    const double dt = h / substeps;
    double f = (a > 0.0) ? 0.0 : 1e-4;
    double energy_half = 0.0;
    out.f[half] = f;
    for (int i = 1; i <= half; ++i) {
        for (int s = 0; s < substeps; ++s) {
            // RK4 on f, trapezoid on the energy density V (= f'^2 on the orbit)
            const double k1 = rhs(f);
            const double k2 = rhs(f + 0.5 * dt * k1);
            const double k3 = rhs(f + 0.5 * dt * k2);
            const double k4 = rhs(f + dt * k3);
            const double e0 = k1 * k1;
            f = std::min(f + dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4), ceiling);
            const double e1 = rhs(f) * rhs(f);
            energy_half += 0.5 * dt * (e0 + e1);
        }
        out.f[half + i] = f;
        out.f[half - i] = -f;
    }
    if (ceiling - f > 1e-4 && half_width < 200.0)
        return heteroclinic_profile(a, spec, 2.0 * half_width, samples);
    out.energy = 2.0 * energy_half;
    return out;
}

} // namespace tactoidlab
