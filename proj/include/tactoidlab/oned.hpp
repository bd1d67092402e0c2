#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "tactoidlab/interp.hpp"
#include "tactoidlab/potential.hpp"
#include "tactoidlab/wallcost.hpp"

namespace tactoidlab {

struct OneDProfile {
    double H = 0.5;
    std::vector<double> y, u1, u2;
};

struct OneDLimitState {
    enum class Kind { SingleWall, TwoInterface };
    Kind kind = Kind::SingleWall;
    double a = 0.0;
    double m = 1.0;          // jump height, SingleWall only
    double energy = 0.0;
    bool tie_break = false;  // set when both families cost the same
};

inline double gamma_energy_1d(const OneDLimitState& s, double L, double H,
                              const PotentialSpec& spec) {
    if (s.kind == OneDLimitState::Kind::TwoInterface) {
        if (s.a != 0.0)
            throw std::invalid_argument("gamma_energy_1d: TwoInterface requires a = 0");
        return 2.0 * modica_mortola_constant(spec);
    }
    if (!(s.m >= s.a && s.m <= 1.0))
        throw std::invalid_argument("gamma_energy_1d: SingleWall needs m in [a, 1]");
    return L * (s.m - s.a) * (s.m - s.a) / H + wall_cost(s.m, spec);
}

inline OneDLimitState gamma_minimizer(double a, double H, double L,
                                      const PotentialSpec& spec) {
    if (!(a >= 0.0 && a < 1.0) || H <= 0.0 || L <= 0.0)
        throw std::invalid_argument("gamma_minimizer: need a in [0,1), H > 0, L > 0");
    auto g = [&](double m) { return L * (m - a) * (m - a) / H + wall_cost(m, spec); };

    const int n = 10000;
    int best = 0;
    int valleys = 0;
    std::vector<double> val(n + 1);
    for (int i = 0; i <= n; ++i) {
        val[i] = g(a + (1.0 - a) * i / n);
        if (val[i] < val[best]) best = i;
    }
    for (int i = 1; i < n; ++i)
        if (val[i] < val[i - 1] && val[i] <= val[i + 1]) ++valleys;

    // polish around the scan argmin; if the scan saw several valleys the
    // scan itself is the safeguard and golden section only refines locally
    const double lo = a + (1.0 - a) * std::max(best - 1, 0) / n;
    const double hi = a + (1.0 - a) * std::min(best + 1, n) / n;
    double m_star = (valleys > 1 && (best == 0 || best == n))
                        ? (a + (1.0 - a) * best / n)
                        : golden_section_min(g, lo, hi);
    if (g(a) < g(m_star)) m_star = a;
    if (g(1.0) < g(m_star)) m_star = 1.0;

    OneDLimitState s;
    s.kind = OneDLimitState::Kind::SingleWall;
    s.a = a;
    s.m = m_star;
    s.energy = g(m_star);

    if (a == 0.0) {
        const double two = 2.0 * modica_mortola_constant(spec);
        if (two < s.energy - 1e-12) {
            s.kind = OneDLimitState::Kind::TwoInterface;
            s.energy = two;
        } else if (std::abs(two - s.energy) <= 1e-12) {
            s.kind = OneDLimitState::Kind::TwoInterface;
            s.energy = two;
            s.tie_break = true;
        }
    }
    return s;
}

// smallest L at which the interior single-wall branch (m scanned away from
// the degenerate m = 0 tie) stops beating the two-interface competitor
inline double single_wall_threshold(double H, const PotentialSpec& spec,
                                    double m_lo = 0.3) {
    const double two = 2.0 * modica_mortola_constant(spec);
    auto interior_gap = [&](double L) {
        auto g = [&](double m) { return L * m * m / H + wall_cost(m, spec); };
        auto scan = grid_scan_min(g, m_lo, 1.0, 4000);
        const double lo = std::max(m_lo, scan.first - (1.0 - m_lo) / 4000);
        const double hi = std::min(1.0, scan.first + (1.0 - m_lo) / 4000);
        return g(golden_section_min(g, lo, hi)) - two;
    };
    return bisect_root(interior_gap, 0.02, 2.0, 1e-12);
}

inline OneDProfile composite_profile(double a, const OneDLimitState& s, double H,
                                     double eps, int ny, const PotentialSpec& spec) {
    if (ny < 3) throw std::invalid_argument("composite_profile: ny too small");
    OneDProfile p;
    p.H = H;
    p.y.resize(ny);
    p.u1.resize(ny);
    p.u2.resize(ny);
    const double h = 2.0 * H / (ny - 1);

    if (s.kind == OneDLimitState::Kind::TwoInterface) {
        const HeteroclinicProfile het = heteroclinic_profile(0.0, spec);
        Pchip f(het.t, het.f);
        // the seeded march away from the degenerate origin delays the rise,
        // so recenter the ramp on its half-crossing
        double shift = 0.0;
        for (size_t i = 1; i < het.f.size(); ++i) {
            if (het.f[i] >= 0.5 && het.f[i - 1] < 0.5) {
                const double w = (0.5 - het.f[i - 1]) / (het.f[i] - het.f[i - 1]);
                shift = het.t[i - 1] + w * (het.t[i] - het.t[i - 1]);
                break;
            }
        }
        const double tmax = het.t.back() - shift;
        auto ramp = [&](double eta) {
            if (eta >= tmax) return 1.0;
            if (eta <= -tmax) return 0.0;
            return std::max(f.eval(eta + shift), 0.0);
        };
        for (int i = 0; i < ny; ++i) {
            const double y = -H + i * h;
            p.y[i] = y;
            const double sgn = (y >= 0.0) ? 1.0 : -1.0;
            p.u1[i] = sgn * ramp((std::abs(y) - H / 2.0) / eps);
            p.u2[i] = 0.0;
        }
        return p;
    }

    const double m = s.m;
    const HeteroclinicProfile het = heteroclinic_profile(m, spec);
    Pchip f(het.t, het.f);
    const double tmax = het.t.back();
    const double far = std::sqrt(std::max(0.0, 1.0 - m * m));
    auto layer = [&](double eta) {
        if (eta >= tmax) return far;
        if (eta <= -tmax) return -far;
        return f.eval(eta);
    };
    const double smooth = 2.0 * eps;  // kink rounding scale
    // normalize the rounded tent so it vanishes exactly at the slab ends;
    // otherwise pinning the trace would cut an O(1/h) slope spike into u2
    const double soft_end = std::sqrt(H * H + smooth * smooth) - smooth;
    for (int i = 0; i < ny; ++i) {
        const double y = -H + i * h;
        p.y[i] = y;
        const double soft_abs = std::sqrt(y * y + smooth * smooth) - smooth;
        const double u2 = a + (m - a) * std::max(0.0, 1.0 - soft_abs / soft_end);
        const double sgn = (y >= 0.0) ? 1.0 : -1.0;
        const double outer = sgn * std::sqrt(std::max(0.0, 1.0 - u2 * u2));
        p.u1[i] = outer - sgn * far + layer(y / eps);
        p.u2[i] = u2;
    }
    // pin the endpoints to the admissible trace exactly
    p.u1.front() = -std::sqrt(1.0 - a * a);
    p.u1.back() = std::sqrt(1.0 - a * a);
    p.u2.front() = a;
    p.u2.back() = a;
    return p;
}

inline double energy_eps_1d(const OneDProfile& p, double eps, double L,
                            const PotentialSpec& spec) {
    const std::size_t n = p.y.size();
    if (n < 2 || p.u1.size() != n || p.u2.size() != n)
        throw std::invalid_argument("energy_eps_1d: malformed profile");
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double h = p.y[i + 1] - p.y[i];
        const double d1 = (p.u1[i + 1] - p.u1[i]) / h;
        const double d2 = (p.u2[i + 1] - p.u2[i]) / h;
        const double m1 = 0.5 * (p.u1[i + 1] + p.u1[i]);
        const double m2 = 0.5 * (p.u2[i + 1] + p.u2[i]);
        const double w = eval_V(std::hypot(m1, m2), spec);
        total += 0.5 * h * (w / eps + eps * (d1 * d1 + d2 * d2) + L * d2 * d2);
    }
    return total;
}

struct OneDRunRecord {
    OneDProfile profile;
    std::vector<std::pair<long, double>> energy_history;
    long steps = 0;
    bool converged = false;
    double final_rate = 0.0;
};

namespace detail {

// tridiagonal solve of (I - c D2) x = rhs with Dirichlet ends kept fixed
inline void thomas_dirichlet(std::vector<double>& x, const std::vector<double>& rhs,
                             double c, std::vector<double>& cp, std::vector<double>& dp) {
    const std::size_t n = x.size();
    const double b = 1.0 + 2.0 * c;
    cp.assign(n, 0.0);
    dp.assign(n, 0.0);
    // unknowns 1..n-2; x[0], x[n-1] already hold the boundary values
    cp[1] = -c / b;
    dp[1] = (rhs[1] + c * x[0] + ((1 == n - 2) ? c * x[n - 1] : 0.0)) / b;
    for (std::size_t i = 2; i + 1 < n; ++i) {
        const double denom = b + c * cp[i - 1];
        cp[i] = -c / denom;
        dp[i] = (rhs[i] + c * dp[i - 1] + ((i == n - 2) ? c * x[n - 1] : 0.0)) / denom;
    }
    for (std::size_t i = n - 2; i >= 1; --i)
        x[i] = dp[i] - cp[i] * ((i + 1 <= n - 2) ? x[i + 1] : 0.0);
}

} // namespace detail

// gradient flow of the slab energy: implicit diffusion (unconditionally
// stable tridiagonal solves), explicit potential term; dt is limited by the
// potential stiffness alone, which keeps eps = 1e-3 runs affordable
inline OneDRunRecord relax_1d(double a, double H, double eps, double L,
                              const PotentialSpec& spec, const OneDProfile& init,
                              double rate_tol = 1e-8, long max_steps = 4000000,
                              long record_every = 2000) {
    OneDProfile p = init;
    const std::size_t n = p.y.size();
    if (n < 3) throw std::invalid_argument("relax_1d: init profile too small");
    if (std::abs(p.y.front() + H) > 1e-9 || std::abs(p.y.back() - H) > 1e-9)
        throw std::invalid_argument("relax_1d: init profile must span [-H, H]");
    const double h = p.y[1] - p.y[0];
    const double dt = 0.05 * eps;
    const double c1 = dt * eps / (h * h);
    const double c2 = dt * (eps + L) / (h * h);

    // admissible trace at the slab ends
    p.u1.front() = -std::sqrt(1.0 - a * a);
    p.u1.back() = std::sqrt(1.0 - a * a);
    p.u2.front() = a;
    p.u2.back() = a;

    OneDRunRecord rec;
    rec.energy_history.emplace_back(0, energy_eps_1d(p, eps, L, spec));

    std::vector<double> rhs1(n), rhs2(n), cp(n), dp(n), prev1, prev2;
    double rate = 0.0;
    long s = 0;
    for (; s < max_steps;) {
        for (std::size_t i = 1; i + 1 < n; ++i) {
            const Vec2 w = eval_W_grad({p.u1[i], p.u2[i]}, spec);
            rhs1[i] = p.u1[i] - dt * w[0] / (2.0 * eps);
            rhs2[i] = p.u2[i] - dt * w[1] / (2.0 * eps);
        }
        prev1 = p.u1;
        prev2 = p.u2;
        detail::thomas_dirichlet(p.u1, rhs1, c1, cp, dp);
        detail::thomas_dirichlet(p.u2, rhs2, c2, cp, dp);
        ++s;
        rate = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            rate = std::max({rate, std::abs(p.u1[i] - prev1[i]), std::abs(p.u2[i] - prev2[i])});
        rate /= dt;
        if (!std::isfinite(rate))
            throw std::runtime_error("relax_1d: flow diverged at step " + std::to_string(s));
        if (s % record_every == 0)
            rec.energy_history.emplace_back(s, energy_eps_1d(p, eps, L, spec));
        if (rate < rate_tol) break;
    }
    if (s % record_every != 0)
        rec.energy_history.emplace_back(s, energy_eps_1d(p, eps, L, spec));
    rec.profile = std::move(p);
    rec.steps = s;
    rec.final_rate = rate;
    rec.converged = rate < rate_tol;
    return rec;
}

} // namespace tactoidlab
