#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace tactoidlab {

struct QuadResult {
    double value = 0.0;
    double error = 0.0;   // absolute error estimate
};

class QuadratureError : public std::runtime_error {
public:
    QuadratureError(const std::string& msg, double achieved)
        : std::runtime_error(msg + " (achieved abs error " + std::to_string(achieved) + ")"),
          achieved_error(achieved) {}
    double achieved_error;
};

namespace detail {

// Gauss 7 / Kronrod 15 nodes and weights on [-1, 1].
inline constexpr double gk_x[8] = {
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000};

inline constexpr double gk_wk[8] = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714};

inline constexpr double gk_wg[4] = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327};

template <class F>
QuadResult gk15(F&& f, double a, double b) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    const double fc = f(c);
    double kronrod = gk_wk[7] * fc;
    double gauss = gk_wg[3] * fc;
    for (int i = 0; i < 7; ++i) {
        const double dx = h * gk_x[i];
        const double fsum = f(c - dx) + f(c + dx);
        kronrod += gk_wk[i] * fsum;
        if (i % 2 == 1) gauss += gk_wg[i / 2] * fsum;
    }
    QuadResult r;
    r.value = kronrod * h;
    r.error = std::abs((kronrod - gauss) * h);
    return r;
}

template <class F>
void gk_adaptive(F& f, double a, double b, double tol, int depth,
                 double& sum, double& err_sum) {
    QuadResult r = gk15(f, a, b);
    if (r.error <= tol || depth >= 52) {
        sum += r.value;
        err_sum += r.error;
        return;
    }
    const double m = 0.5 * (a + b);
    gk_adaptive(f, a, m, 0.5 * tol, depth + 1, sum, err_sum);
    gk_adaptive(f, m, b, 0.5 * tol, depth + 1, sum, err_sum);
}

} // namespace detail

// Adaptive Gauss-Kronrod integration of f over [a, b].  The local acceptance
// tolerance combines the relative target against a first whole-interval pass
// with an absolute floor of 1e-14, below which subdivision cannot help.
template <class F>
QuadResult integrate(F&& f, double a, double b, double rel_tol = 1e-12,
                     double abs_floor = 1e-14) {
    if (a == b) return {0.0, 0.0};
    QuadResult whole = detail::gk15(f, a, b);
    const double tol = std::max(abs_floor, rel_tol * std::abs(whole.value));
    if (whole.error <= tol) return whole;
    double sum = 0.0, err = 0.0;
    detail::gk_adaptive(f, a, b, tol, 0, sum, err);
    if (!std::isfinite(sum))
        throw QuadratureError("quadrature produced a non-finite value", err);
    return {sum, err};
}

// Deterministic pairwise summation; the result does not depend on any
// parallel decomposition because it is a fixed serial recursion tree.
inline double pairwise_sum(std::span<const double> v) {
    if (v.size() <= 8) {
        double s = 0.0;
        for (double x : v) s += x;
        return s;
    }
    const std::size_t half = v.size() / 2;
    return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

inline double trapezoid(std::span<const double> x, std::span<const double> y) {
    double s = 0.0;
    for (std::size_t i = 1; i < x.size(); ++i)
        s += 0.5 * (x[i] - x[i - 1]) * (y[i] + y[i - 1]);
    return s;
}

inline std::vector<double> cumulative_trapezoid(std::span<const double> x,
                                                std::span<const double> y) {
    std::vector<double> out(x.size(), 0.0);
    for (std::size_t i = 1; i < x.size(); ++i)
        out[i] = out[i - 1] + 0.5 * (x[i] - x[i - 1]) * (y[i] + y[i - 1]);
    return out;
}

} // namespace tactoidlab
