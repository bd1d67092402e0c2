#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "tactoidlab/grid.hpp"
#include "tactoidlab/potential.hpp"

namespace tactoidlab {

enum class InitKind { BoundaryExtension, SeededRandom, IsotropicDisk, Prescribed };

struct SimConfig {
    Domain domain;
    double eps = 0.05;
    double L = 0.5;
    PotentialSpec potential = PotentialSpec::csh();
    std::optional<double> dt;            // auto-selected when empty
    long max_steps = 200000;
    double stop_rate = 1e-6;             // sup |du/dt| threshold
    long record_every = 200;
    InitKind init = InitKind::BoundaryExtension;
    std::uint64_t seed = 1;
    double noise_amplitude = 0.3;
    Vec2 iso_center{0.0, 0.0};
    double iso_radius = 0.0;
    std::optional<GridField> prescribed;
};

// explicit-Euler bound with a conservative 0.2 safety factor: diffusion from
// the Laplacian/div-grad stencils, reaction from the potential stiffness
inline double stable_time_step(const SimConfig& cfg) {
    const double h = cfg.domain.h;
    return std::min(0.2 * h * h / (4.0 * cfg.eps + 4.0 * cfg.L), 0.2 * cfg.eps);
}

namespace detail {

// portable uniform in (-amp, amp): top 53 bits of the engine output
inline double symmetric_uniform(std::mt19937_64& rng, double amp) {
    const double x = static_cast<double>(rng() >> 11) * 0x1p-53;
    return amp * (2.0 * x - 1.0);
}

} // namespace detail

inline GridField initial_field(const SimConfig& cfg) {
    const Domain& d = cfg.domain;
    if (cfg.init == InitKind::Prescribed) {
        if (!cfg.prescribed)
            throw std::invalid_argument("initial_field: prescribed init requires a field");
        const GridField& p = *cfg.prescribed;
        if (p.dom.nx != d.nx || p.dom.ny != d.ny)
            throw std::invalid_argument("initial_field: prescribed field has wrong grid size");
        GridField f = p;
        apply_boundary(f);
        return f;
    }

    GridField f = make_field(d);
    if (d.shape == Shape::Disk) {
        // radial ramp from zero toward the boundary trace
        for (int j = 0; j < d.ny; ++j)
            for (int i = 0; i < d.nx; ++i) {
                const double r = std::hypot(d.x(i), d.y(j));
                const double ramp = std::min(r / d.radius, 1.0);
                const double phi = std::atan2(d.y(j), d.x(i));
                const Vec2 g = boundary_angle_value(d, phi);
                f.u1[d.idx(i, j)] = ramp * g[0];
                f.u2[d.idx(i, j)] = ramp * g[1];
            }
    } else {
        // linear interpolation between bottom and top boundary rows
        for (int j = 0; j < d.ny; ++j) {
            const double t = (d.ny > 1) ? static_cast<double>(j) / (d.ny - 1) : 0.0;
            for (int i = 0; i < d.nx; ++i) {
                const Vec2 lo = boundary_value(d, i, 0);
                const Vec2 hi = boundary_value(d, i, d.ny - 1);
                f.u1[d.idx(i, j)] = (1.0 - t) * lo[0] + t * hi[0];
                f.u2[d.idx(i, j)] = (1.0 - t) * lo[1] + t * hi[1];
            }
        }
    }

    if (cfg.init == InitKind::SeededRandom) {
        std::mt19937_64 rng(cfg.seed);
        for (int j = 0; j < d.ny; ++j)
            for (int i = 0; i < d.nx; ++i) {
                const double n1 = detail::symmetric_uniform(rng, cfg.noise_amplitude);
                const double n2 = detail::symmetric_uniform(rng, cfg.noise_amplitude);
                if (d.at(i, j) == MaskState::Inside) {
                    f.u1[d.idx(i, j)] += n1;
                    f.u2[d.idx(i, j)] += n2;
                }
            }
    } else if (cfg.init == InitKind::IsotropicDisk) {
        for (int j = 0; j < d.ny; ++j)
            for (int i = 0; i < d.nx; ++i) {
                if (d.at(i, j) != MaskState::Inside) continue;
                const double dist = std::hypot(d.x(i) - cfg.iso_center[0], d.y(j) - cfg.iso_center[1]);
                const double c = std::clamp((dist - cfg.iso_radius) / (2.0 * d.h), 0.0, 1.0);
                const double w = c * c * (3.0 - 2.0 * c);
                f.u1[d.idx(i, j)] *= w;
                f.u2[d.idx(i, j)] *= w;
            }
    }
    apply_boundary(f);
    return f;
}

struct RunRecord {
    GridField field;
    std::vector<std::pair<long, EnergyBreakdown>> energy_history;
    long steps = 0;
    bool converged = false;
    double final_rate = 0.0;
};

// Discrete energy whose gradient the flow descends: forward-difference
// gradient term plus central-difference divergence term.  Recorded in the
// energy history; the reporting functional energy_eps uses central gradients.
inline EnergyBreakdown descended_energy(const GridField& f, double eps, double L,
                                        const PotentialSpec& spec) {
    const Domain& d = f.dom;
    const double h = d.h, h2 = h * h;
    const bool per = d.periodic_x();
    auto qat = [&](int i, int j) { return d.idx(per ? d.wrap_x(i) : i, j); };
    double pot = 0.0, grad = 0.0, divv = 0.0;
    for (int j = 0; j < d.ny; ++j)
        for (int i = 0; i < d.nx; ++i) {
            const std::size_t q = d.idx(i, j);
            const bool in = d.mask[q] == MaskState::Inside;
            if (in) {
                pot += eval_V(std::hypot(f.u1[q], f.u2[q]), spec);
                const double ux = (f.u1[qat(i + 1, j)] - f.u1[qat(i - 1, j)]) / (2.0 * h);
                const double vy = (f.u2[d.idx(i, j + 1)] - f.u2[d.idx(i, j - 1)]) / (2.0 * h);
                divv += (ux + vy) * (ux + vy);
            }
            // forward edges touching at least one inside node
            if (i + 1 < d.nx || d.periodic_x()) {
                const std::size_t qr = d.idx(d.periodic_x() ? d.wrap_x(i + 1) : i + 1, j);
                if (in || d.mask[qr] == MaskState::Inside) {
                    const double dx1 = (f.u1[qr] - f.u1[q]) / h;
                    const double dx2 = (f.u2[qr] - f.u2[q]) / h;
                    grad += dx1 * dx1 + dx2 * dx2;
                }
            }
            if (j + 1 < d.ny) {
                const std::size_t qt = d.idx(i, j + 1);
                if (in || d.mask[qt] == MaskState::Inside) {
                    const double dy1 = (f.u1[qt] - f.u1[q]) / h;
                    const double dy2 = (f.u2[qt] - f.u2[q]) / h;
                    grad += dy1 * dy1 + dy2 * dy2;
                }
            }
        }
    EnergyBreakdown e;
    e.potential = h2 * pot / (2.0 * eps);
    e.gradient = h2 * eps * grad / 2.0;
    e.divergence = h2 * L * divv / 2.0;
    e.total = e.potential + e.gradient + e.divergence;
    return e;
}

class FlowStepper {
  public:
    FlowStepper(const SimConfig& cfg)
        : cfg_(cfg), dt_(cfg.dt ? *cfg.dt : stable_time_step(cfg)),
          div_(cfg.domain.nx * static_cast<std::size_t>(cfg.domain.ny), 0.0),
          n1_(div_.size(), 0.0), n2_(div_.size(), 0.0) {
        if (dt_ <= 0.0) throw std::invalid_argument("FlowStepper: dt must be positive");
    }

    double dt() const { return dt_; }
    const std::vector<double>& central_divergence() const { return div_; }

    // one explicit Euler step; returns sup |du/dt| over inside nodes
    double step(GridField& f) {
        const Domain& d = cfg_.domain;
        const double h = d.h, inv_h2 = 1.0 / (h * h), inv_2h = 1.0 / (2.0 * h);
        const double eps = cfg_.eps, L = cfg_.L;
        const bool per = d.periodic_x();

        auto qat = [&](int i, int j) { return d.idx(per ? d.wrap_x(i) : i, j); };

        // central divergence at inside nodes, zero elsewhere
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
        for (int j = 0; j < d.ny; ++j)
            for (int i = 0; i < d.nx; ++i) {
                const std::size_t q = d.idx(i, j);
                if (d.mask[q] != MaskState::Inside) { div_[q] = 0.0; continue; }
                const double ux = (f.u1[qat(i + 1, j)] - f.u1[qat(i - 1, j)]) * inv_2h;
                const double vy = (f.u2[d.idx(i, j + 1)] - f.u2[d.idx(i, j - 1)]) * inv_2h;
                div_[q] = ux + vy;
            }

        double rate = 0.0;
#ifdef _OPENMP
#pragma omp parallel for schedule(static) reduction(max : rate)
#endif
        for (int j = 0; j < d.ny; ++j)
            for (int i = 0; i < d.nx; ++i) {
                const std::size_t q = d.idx(i, j);
                if (d.mask[q] != MaskState::Inside) {
                    n1_[q] = f.u1[q];
                    n2_[q] = f.u2[q];
                    continue;
                }
                const std::size_t ql = qat(i - 1, j), qr = qat(i + 1, j);
                const std::size_t qb = d.idx(i, j - 1), qt = d.idx(i, j + 1);
                const double lap1 = (f.u1[ql] + f.u1[qr] + f.u1[qb] + f.u1[qt] - 4.0 * f.u1[q]) * inv_h2;
                const double lap2 = (f.u2[ql] + f.u2[qr] + f.u2[qb] + f.u2[qt] - 4.0 * f.u2[q]) * inv_h2;
                const double gdx = (div_[qr] - div_[ql]) * inv_2h;
                const double gdy = (div_[qt] - div_[qb]) * inv_2h;
                const Vec2 w = eval_W_grad({f.u1[q], f.u2[q]}, cfg_.potential);
                const double r1 = eps * lap1 + L * gdx - w[0] / (2.0 * eps);
                const double r2 = eps * lap2 + L * gdy - w[1] / (2.0 * eps);
                n1_[q] = f.u1[q] + dt_ * r1;
                n2_[q] = f.u2[q] + dt_ * r2;
                const double m = std::max(std::abs(r1), std::abs(r2));
                if (m > rate) rate = m;
            }
        f.u1.swap(n1_);
        f.u2.swap(n2_);
        return rate;
    }

  private:
    SimConfig cfg_;
    double dt_;
    std::vector<double> div_;
    std::vector<double> n1_, n2_;
};

inline RunRecord relax(const SimConfig& cfg) {
    GridField f = initial_field(cfg);
    FlowStepper stepper(cfg);
    RunRecord rec{f, {}, 0, false, 0.0};

    auto record = [&](long step, const GridField& field) {
        rec.energy_history.emplace_back(step, descended_energy(field, cfg.eps, cfg.L, cfg.potential));
    };

    record(0, f);
    double rate = 0.0;
    long s = 0;
    for (; s < cfg.max_steps; ) {
        rate = stepper.step(f);
        ++s;
        if (!std::isfinite(rate))
            throw std::runtime_error("relax: field diverged (non-finite update) at step " + std::to_string(s));
        if (s % cfg.record_every == 0) record(s, f);
        if (rate < cfg.stop_rate) break;
    }
    if (s % cfg.record_every != 0) record(s, f);
    rec.field = std::move(f);
    rec.steps = s;
    rec.final_rate = rate;
    rec.converged = rate < cfg.stop_rate;
    return rec;
}

// largest variation along x over inside nodes of any row, both components
inline double max_x_variation(const GridField& f) {
    const Domain& d = f.dom;
    double worst = 0.0;
    for (int j = 0; j < d.ny; ++j) {
        double lo1 = 1e300, hi1 = -1e300, lo2 = 1e300, hi2 = -1e300;
        bool any = false;
        for (int i = 0; i < d.nx; ++i) {
            const std::size_t q = d.idx(i, j);
            if (d.mask[q] != MaskState::Inside) continue;
            any = true;
            lo1 = std::min(lo1, f.u1[q]); hi1 = std::max(hi1, f.u1[q]);
            lo2 = std::min(lo2, f.u2[q]); hi2 = std::max(hi2, f.u2[q]);
        }
        if (any) worst = std::max({worst, hi1 - lo1, hi2 - lo2});
    }
    return worst;
}

} // namespace tactoidlab
