#include <catch2/catch_amalgamated.hpp>

#include <tactoidlab/tactoid.hpp>

#include <cmath>
#include <numbers>
#include <vector>

using namespace tactoidlab;

namespace {

const PotentialSpec csh = PotentialSpec::csh();
constexpr double pi = std::numbers::pi;

double junction_gap(double th) {
    return detail::f_first(th, csh) * std::sin(th) - f_theta(th, csh) * std::cos(th);
}

} // namespace

TEST_CASE("reduced interface energy density: endpoints and continuity") {
    CHECK(std::abs(f_theta(0.0, csh) - 0.75) < 1e-9);
    CHECK(std::abs(f_theta(pi, csh) - 0.25) < 1e-9);
    // the wall term K(sin(theta/2))/cos(theta/2) has a removable limit at pi
    CHECK(std::abs(f_theta(pi - 1e-4, csh) - f_theta(pi, csh)) < 1e-3);
    CHECK(std::abs(f_theta(pi - 1e-8, csh) - f_theta(pi, csh)) < 1e-6);
    // interior values exceed both endpoints (the wall term is positive)
    CHECK(f_theta(2.0, csh) > 0.75);
    CHECK_THROWS_AS(f_theta(-0.1, csh), std::domain_error);
    CHECK_THROWS_AS(f_theta(pi + 0.1, csh), std::domain_error);
}

TEST_CASE("junction angle: root quality and uniqueness") {
    const double ts = junction_angle(csh);
    CHECK(std::abs(ts - 2.6478450840638885) < 1e-9);
    CHECK(std::abs(junction_gap(ts)) < 1e-8);
    // at theta = pi/2 the cosine term drops out
    CHECK(std::abs(junction_gap(pi / 2.0) - detail::f_first(pi / 2.0, csh)) < 1e-12);
    // exactly one sign change across the scan window
    int changes = 0;
    double prev = junction_gap(0.01);
    for (int i = 1; i <= 10000; ++i) {
        const double th = 0.01 + (pi - 0.02) * i / 10000.0;
        const double cur = junction_gap(th);
        if (prev * cur < 0.0) ++changes;
        prev = cur;
    }
    CHECK(changes == 1);
}

TEST_CASE("interface profile: monotonicity, residual, scaling") {
    const ProfileResult prof = solve_profile(1.0, csh);
    const std::size_t n = prof.s.size();
    REQUIRE(n > 100);
    CHECK(prof.lambda == 1.0);
    CHECK(prof.lambda_eff == -1.0);
    CHECK(std::abs(prof.theta.front() - prof.theta_star) < 1e-14);
    CHECK(prof.theta.back() == pi);
    CHECK(std::abs(prof.l - 1.0588027334981527) < 1e-9);

    SECTION("theta strictly increases and stays interior") {
        for (std::size_t i = 1; i < n; ++i) CHECK(prof.theta[i] > prof.theta[i - 1]);
        for (std::size_t i = 1; i + 1 < n; ++i) {
            CHECK(prof.theta[i] > prof.theta_star);
            CHECK(prof.theta[i] < pi);
        }
    }

    SECTION("sampled path satisfies the interface equation") {
        double worst_stored = 0.0, worst_fd = 0.0;
        for (std::size_t i = 1; i + 1 < n; ++i) {
            const double stiff =
                detail::f_second(prof.theta[i], csh) + f_theta(prof.theta[i], csh);
            CHECK(stiff > 0.0);
            worst_stored =
                std::max(worst_stored, std::abs(stiff * prof.dtheta[i] + prof.lambda_eff));
            // independent slope from the nonuniform second-order three-point formula
            const double dm = prof.s[i] - prof.s[i - 1];
            const double dp = prof.s[i + 1] - prof.s[i];
            const double fd = (dm * dm * prof.theta[i + 1] - dp * dp * prof.theta[i - 1] +
                               (dp * dp - dm * dm) * prof.theta[i]) /
                              (dm * dp * (dm + dp));
            worst_fd = std::max(worst_fd, std::abs(stiff * fd + prof.lambda_eff));
        }
        CHECK(worst_stored < 1e-6);
        CHECK(worst_fd < 1e-5);
    }

    SECTION("doubling the multiplier halves every length") {
        const ProfileResult p2 = solve_profile(2.0, csh);
        CHECK(std::abs(p2.l - prof.l / 2.0) < 1e-8);
        CHECK(std::abs(p2.theta_star - prof.theta_star) < 1e-14);
        // the sign of lambda only sets lambda_eff, not the geometry
        const ProfileResult pm = solve_profile(-1.0, csh);
        CHECK(pm.lambda_eff == -1.0);
        CHECK(std::abs(pm.l - prof.l) < 1e-14);
    }

    SECTION("parameter validation") {
        CHECK_THROWS_AS(solve_profile(0.0, csh), std::invalid_argument);
        CHECK_THROWS_AS(solve_profile(std::numeric_limits<double>::infinity(), csh),
                        std::invalid_argument);
    }
}

TEST_CASE("reconstruction: geometry of the island quadrant") {
    const TactoidSolution sol = solve_tactoid(1.0, csh);
    const std::size_t n = sol.s.size();

    SECTION("frozen regression values") {
        CHECK(std::abs(sol.theta_star - 2.6478450840638885) < 1e-9);
        CHECK(std::abs(sol.l - 1.0588027334981527) < 1e-9);
        CHECK(std::abs(sol.x0 - 1.0179504094559388) < 1e-9);
        CHECK(std::abs(sol.area - 0.6902134493014812) < 1e-9);
    }

    SECTION("interface runs from the x1-axis junction to the vertical top") {
        CHECK(std::abs(sol.interface.pts.front()[0] - sol.x0) < 1e-14);
        CHECK(sol.interface.pts.front()[1] == 0.0);
        CHECK(std::abs(sol.interface.pts.back()[0]) < 1e-12);
        CHECK(std::abs(sol.interface.pts.back()[1] - sol.y_top) < 1e-14);
        // vertical approach to the x2-axis
        CHECK(std::abs(sol.theta.back() - pi) < 1e-4);
        // at unit multiplier the top height equals half the interface cost
        CHECK(std::abs(sol.y_top - 0.25) < 1e-8);
    }

    SECTION("wall angles and characteristic lengths") {
        REQUIRE(sol.t.size() == sol.wall.size());
        CHECK(sol.t.front() == 0.0);
        for (std::size_t i = 1; i < sol.t.size(); ++i) CHECK(sol.t[i] > sol.t[i - 1]);
        for (std::size_t i = 0; i < n; ++i)
            CHECK(std::abs(sol.psi[i] - sol.theta[i] / 2.0) < 1e-10);
        // wall vertices carry psi as tangent angle; chords agree to second order
        // in the local spacing, which coarsens toward the display cap
        double worst = 0.0;
        for (std::size_t i = 1; i + 1 < sol.wall.size(); ++i) {
            const Vec2 a = sol.wall.pts[i - 1], b = sol.wall.pts[i + 1];
            worst = std::max(
                worst, std::abs(std::atan2(b[1] - a[1], b[0] - a[0]) - sol.wall.theta[i]));
        }
        CHECK(worst < 1e-3);
        // stored parametrization speed against chord differences
        double worst_sp = 0.0;
        for (std::size_t i = 1; i + 1 < sol.wall.size(); ++i) {
            const Vec2 a = sol.wall.pts[i - 1], b = sol.wall.pts[i + 1];
            const double fd = std::hypot(b[0] - a[0], b[1] - a[1]) /
                              (sol.wall.s[i + 1] - sol.wall.s[i - 1]);
            worst_sp = std::max(worst_sp, std::abs(fd - sol.wall.speed[i]) / sol.wall.speed[i]);
        }
        CHECK(worst_sp < 1e-2);
    }

    SECTION("wall traces satisfy the normal-continuity identity") {
        for (std::size_t i = 0; i < sol.wall.size(); ++i) {
            const double ps = sol.wall.theta[i], th = 2.0 * ps;
            const Vec2 nu{std::sin(ps), -std::cos(ps)};
            const double left = -std::cos(th) * nu[0] - std::sin(th) * nu[1];
            CHECK(std::abs(left - nu[0]) < 1e-6);
        }
    }

    SECTION("characteristic fan does not self-intersect") {
        // segment endpoints: interface sample and its wall image, matched by parameter
        std::vector<Vec2> from, to;
        for (std::size_t w = 0; w < sol.wall.size(); ++w)
            for (std::size_t q = 0; q < n; ++q)
                if (sol.s[q] == sol.wall.s[w]) {
                    from.push_back(sol.interface.pts[q]);
                    to.push_back(sol.wall.pts[w]);
                    break;
                }
        REQUIRE(from.size() == sol.wall.size());
        auto orient = [](Vec2 p, Vec2 q, Vec2 r) {
            return (q[0] - p[0]) * (r[1] - p[1]) - (q[1] - p[1]) * (r[0] - p[0]);
        };
        int crossings = 0;
        for (std::size_t i = 0; i + 1 < from.size(); ++i)
            for (std::size_t j = i + 1; j < from.size(); ++j) {
                const double d1 = orient(from[i], to[i], from[j]);
                const double d2 = orient(from[i], to[i], to[j]);
                const double d3 = orient(from[j], to[j], from[i]);
                const double d4 = orient(from[j], to[j], to[i]);
                if (d1 * d2 < 0.0 && d3 * d4 < 0.0) ++crossings;
            }
        CHECK(crossings == 0);
    }

    SECTION("island polygon closes with four-fold mirror symmetry") {
        REQUIRE(sol.island.size() > 4 * (n - 2));
        double minx = 1e300, maxx = -1e300, miny = 1e300, maxy = -1e300;
        for (const Vec2& p : sol.island) {
            minx = std::min(minx, p[0]);
            maxx = std::max(maxx, p[0]);
            miny = std::min(miny, p[1]);
            maxy = std::max(maxy, p[1]);
        }
        CHECK(std::abs(maxx - sol.x0) < 1e-14);
        CHECK(std::abs(minx + sol.x0) < 1e-14);
        CHECK(std::abs(maxy - sol.y_top) < 1e-14);
        CHECK(std::abs(miny + sol.y_top) < 1e-14);
    }

    SECTION("short profiles are rejected") {
        ProfileResult tiny;
        tiny.s = {0.0, 0.1};
        tiny.theta = {2.6, 2.7};
        CHECK_THROWS_AS(reconstruct(tiny, csh), std::invalid_argument);
    }
}

TEST_CASE("tactoid energy: two independent routes agree") {
    const TactoidSolution sol = solve_tactoid(1.0, csh);
    const TactoidEnergy e = tactoid_energy(sol, csh);

    CHECK(std::abs(e.reduced - 1.3804345892183953) < 1e-9);
    CHECK(std::abs(e.sharp - 1.3804319629194903) < 1e-9);
    CHECK(std::abs(e.sharp - e.reduced) < 0.005 * e.reduced);

    // the breakdown carries no bulk term: the outer field is divergence-free
    CHECK(e.breakdown.bulk == 0.0);
    CHECK(e.breakdown.perimeter > 1.0);
    CHECK(e.breakdown.wall > 0.3);
    CHECK(std::abs(e.breakdown.total - (e.breakdown.perimeter + e.breakdown.wall)) < 1e-14);

    // stationarity under the area constraint: E = 2 lambda A
    CHECK(std::abs(e.reduced - 2.0 * sol.lambda * sol.area) < 1e-3 * e.reduced);

    // both evaluations scale linearly under dilation
    const TactoidSolution s2 = solve_tactoid(2.0, csh);
    const TactoidEnergy e2 = tactoid_energy(s2, csh);
    CHECK(std::abs(2.0 * e2.reduced - e.reduced) < 1e-8);
    CHECK(std::abs(2.0 * e2.sharp - e.sharp) < 1e-6);
}

TEST_CASE("area calibration exploits the dilation law") {
    const TactoidSolution base = solve_tactoid(1.0, csh);

    SECTION("doubling the multiplier quarters the area") {
        const TactoidSolution s2 = solve_tactoid(2.0, csh);
        CHECK(std::abs(s2.area - base.area / 4.0) < 1e-6 * base.area);
        const TactoidSolution sh = solve_tactoid(0.5, csh);
        CHECK(sh.area > base.area);
        CHECK(std::abs(sh.area - 4.0 * base.area) < 1e-5 * sh.area);
    }

    SECTION("round trip and an off-scale target") {
        const TactoidSolution rt = calibrate_lambda(base.area, csh);
        CHECK(std::abs(rt.lambda - 1.0) < 1e-6);
        CHECK(std::abs(rt.area - base.area) < 1e-6 * base.area);
        const TactoidSolution small = calibrate_lambda(0.1, csh);
        CHECK(std::abs(small.area - 0.1) < 1e-6 * 0.1);
        CHECK(small.lambda > 2.0);
    }

    SECTION("invalid targets are rejected") {
        CHECK_THROWS_AS(calibrate_lambda(0.0, csh), std::range_error);
        CHECK_THROWS_AS(calibrate_lambda(-1.0, csh), std::range_error);
        CHECK_THROWS_AS(calibrate_lambda(std::numeric_limits<double>::quiet_NaN(), csh),
                        std::range_error);
    }
}
