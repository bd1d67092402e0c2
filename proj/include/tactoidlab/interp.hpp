#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <vector>

namespace tactoidlab {

// Monotone cubic interpolant (Fritsch-Carlson limiting).  Chosen over plain
// cubic splines so that nonnegative monotone data stays nonnegative between
// the samples.
class Pchip {
public:
    Pchip() = default;

    Pchip(std::vector<double> x, std::vector<double> y)
        : x_(std::move(x)), y_(std::move(y)) {
        const std::size_t n = x_.size();
        if (n < 2 || y_.size() != n)
            throw std::invalid_argument("pchip needs >= 2 matching samples");
        for (std::size_t i = 1; i < n; ++i)
            if (!(x_[i] > x_[i - 1]))
                throw std::invalid_argument("pchip abscissae must increase");
        d_.resize(n);
        std::vector<double> h(n - 1), delta(n - 1);
        for (std::size_t i = 0; i + 1 < n; ++i) {
            h[i] = x_[i + 1] - x_[i];
            delta[i] = (y_[i + 1] - y_[i]) / h[i];
        }
        if (n == 2) {
            d_[0] = d_[1] = delta[0];
            return;
        }
        for (std::size_t i = 1; i + 1 < n; ++i) {
            if (delta[i - 1] * delta[i] <= 0.0) {
                d_[i] = 0.0;
            } else {
                const double w1 = 2.0 * h[i] + h[i - 1];
                const double w2 = h[i] + 2.0 * h[i - 1];
                d_[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
            }
        }
        d_[0] = edge_derivative(h[0], h[1], delta[0], delta[1]);
        d_[n - 1] = edge_derivative(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
    }

    double operator()(double t) const { return eval(t); }

    double eval(double t) const {
        const auto [i, u] = locate(t);
        const double h = x_[i + 1] - x_[i];
        const double t2 = u * u, t3 = t2 * u;
        const double h00 = 2 * t3 - 3 * t2 + 1;
        const double h10 = t3 - 2 * t2 + u;
        const double h01 = -2 * t3 + 3 * t2;
        const double h11 = t3 - t2;
        return h00 * y_[i] + h * h10 * d_[i] + h01 * y_[i + 1] + h * h11 * d_[i + 1];
    }

    double derivative(double t) const {
        const auto [i, u] = locate(t);
        const double h = x_[i + 1] - x_[i];
        const double t2 = u * u;
        const double g00 = (6 * t2 - 6 * u) / h;
        const double g10 = 3 * t2 - 4 * u + 1;
        const double g01 = (-6 * t2 + 6 * u) / h;
        const double g11 = 3 * t2 - 2 * u;
        return g00 * y_[i] + g10 * d_[i] + g01 * y_[i + 1] + g11 * d_[i + 1];
    }

    double x_min() const { return x_.front(); }
    double x_max() const { return x_.back(); }

private:
    static double edge_derivative(double h0, double h1, double d0, double d1) {
        // one-sided three-point estimate, clipped to preserve monotonicity
        double d = ((2 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
        if (d * d0 <= 0.0) return 0.0;
        if (d0 * d1 < 0.0 && std::abs(d) > 3.0 * std::abs(d0)) return 3.0 * d0;
        return d;
    }

    std::pair<std::size_t, double> locate(double t) const {
        if (t < x_.front() || t > x_.back())
            throw std::domain_error("pchip evaluation outside sampled range");
        std::size_t i = std::upper_bound(x_.begin(), x_.end(), t) - x_.begin();
        i = std::min(std::max<std::size_t>(i, 1), x_.size() - 1) - 1;
        return {i, (t - x_[i]) / (x_[i + 1] - x_[i])};
    }

    std::vector<double> x_, y_, d_;
};

// Golden-section search for the minimum of a unimodal scalar function.
template <class F>
double golden_section_min(F&& f, double a, double b, double tol = 1e-12) {
    const double invphi = 0.6180339887498949;
    double x1 = b - invphi * (b - a);
    double x2 = a + invphi * (b - a);
    double f1 = f(x1), f2 = f(x2);
    while (b - a > tol) {
        if (f1 <= f2) {
            b = x2; x2 = x1; f2 = f1;
            x1 = b - invphi * (b - a);
            f1 = f(x1);
        } else {
            a = x1; x1 = x2; f1 = f2;
            x2 = a + invphi * (b - a);
            f2 = f(x2);
        }
    }
    return 0.5 * (a + b);
}

// Dense scan returning the best sample; used both as a unimodality check and
// as the fallback when golden section cannot be trusted.
template <class F>
std::pair<double, double> grid_scan_min(F&& f, double a, double b, int n) {
    double best_x = a, best_f = f(a);
    for (int i = 1; i < n; ++i) {
        const double x = a + (b - a) * static_cast<double>(i) / (n - 1);
        const double v = f(x);
        if (v < best_f) { best_f = v; best_x = x; }
    }
    return {best_x, best_f};
}

// Bisection on a bracketing interval; f(a) and f(b) must differ in sign.
template <class F>
double bisect_root(F&& f, double a, double b, double tol = 1e-13, int max_iter = 200) {
    double fa = f(a), fb = f(b);
    if (fa == 0.0) return a;
    if (fb == 0.0) return b;
    if (fa * fb > 0.0)
        throw std::invalid_argument("bisection bracket does not change sign");
    for (int it = 0; it < max_iter && (b - a) > tol; ++it) {
        const double m = 0.5 * (a + b);
        const double fm = f(m);
        if (fm == 0.0) return m;
        if (fa * fm < 0.0) { b = m; fb = fm; }
        else { a = m; fa = fm; }
    }
    return 0.5 * (a + b);
}

} // namespace tactoidlab
