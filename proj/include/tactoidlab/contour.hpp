#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "tactoidlab/curve.hpp"
#include "tactoidlab/grid.hpp"

namespace tactoidlab {

namespace detail {

// A contour vertex lives on a grid edge; the edge id doubles as the stitching
// key so that segments sharing an endpoint reference the identical point.
struct EdgeHit {
    std::int64_t key;
    Vec2 p;
};

inline std::int64_t edge_key(bool horizontal, int i, int j, int nx) {
    return (static_cast<std::int64_t>(j) * nx + i) * 2 + (horizontal ? 0 : 1);
}

} // namespace detail

// Marching squares for the level set {|u| = level}.  Cells are scanned in
// row-major order and the resulting segments stitched into polylines, each
// closed or ending where the mask does.
inline std::vector<Curve> interface_contour(const GridField& f, double level) {
    if (level <= 0.0 || level >= 1.0)
        throw std::domain_error("interface_contour: level must lie in (0, 1)");
    const Domain& d = f.dom;
    std::vector<double> mod(d.mask.size());
    for (std::size_t i = 0; i < mod.size(); ++i)
        mod[i] = std::hypot(f.u1[i], f.u2[i]);

    auto corner = [&](int i, int j) { return mod[d.idx(i, j)]; };
    auto interp = [&](int i0, int j0, int i1, int j1) -> Vec2 {
        const double a = corner(i0, j0), b = corner(i1, j1);
        const double t = (std::abs(b - a) < 1e-300) ? 0.5 : (level - a) / (b - a);
        const double tc = std::clamp(t, 0.0, 1.0);
        return {d.x(i0) + tc * (d.x(i1) - d.x(i0)), d.y(j0) + tc * (d.y(j1) - d.y(j0))};
    };

    std::vector<std::pair<detail::EdgeHit, detail::EdgeHit>> segs;
    for (int j = 0; j + 1 < d.ny; ++j)
        for (int i = 0; i + 1 < d.nx; ++i) {
            // skip cells entirely outside the mask
            if (d.at(i, j) == MaskState::Outside && d.at(i + 1, j) == MaskState::Outside &&
                d.at(i, j + 1) == MaskState::Outside && d.at(i + 1, j + 1) == MaskState::Outside)
                continue;
            int c = 0;
            if (corner(i, j) >= level) c |= 1;
            if (corner(i + 1, j) >= level) c |= 2;
            if (corner(i + 1, j + 1) >= level) c |= 4;
            if (corner(i, j + 1) >= level) c |= 8;
            if (c == 0 || c == 15) continue;
            const detail::EdgeHit B{detail::edge_key(true, i, j, d.nx), interp(i, j, i + 1, j)};
            const detail::EdgeHit R{detail::edge_key(false, i + 1, j, d.nx), interp(i + 1, j, i + 1, j + 1)};
            const detail::EdgeHit T{detail::edge_key(true, i, j + 1, d.nx), interp(i, j + 1, i + 1, j + 1)};
            const detail::EdgeHit L{detail::edge_key(false, i, j, d.nx), interp(i, j, i, j + 1)};
            auto add = [&](const detail::EdgeHit& a, const detail::EdgeHit& b) {
                if (a.p[0] != b.p[0] || a.p[1] != b.p[1]) segs.emplace_back(a, b);
            };
            switch (c) {
                case 1: add(L, B); break;
                case 2: add(B, R); break;
                case 3: add(L, R); break;
                case 4: add(T, R); break;
                case 6: add(B, T); break;
                case 7: add(L, T); break;
                case 8: add(L, T); break;
                case 9: add(B, T); break;
                case 11: add(T, R); break;
                case 12: add(L, R); break;
                case 13: add(B, R); break;
                case 14: add(L, B); break;
                case 5: case 10: {
                    const double center = 0.25 * (corner(i, j) + corner(i + 1, j) +
                                                  corner(i, j + 1) + corner(i + 1, j + 1));
                    const bool high = center >= level;
                    if ((c == 5) == high) { add(B, R); add(T, L); }
                    else { add(L, B); add(T, R); }
                    break;
                }
                default: break;
            }
        }

    // stitch: walk unused segments through shared edge keys
    std::multimap<std::int64_t, std::size_t> by_key;
    for (std::size_t si = 0; si < segs.size(); ++si) {
        by_key.emplace(segs[si].first.key, si);
        by_key.emplace(segs[si].second.key, si);
    }
    std::vector<bool> used(segs.size(), false);
    std::vector<Curve> out;
    for (std::size_t start = 0; start < segs.size(); ++start) {
        if (used[start]) continue;
        used[start] = true;
        std::vector<detail::EdgeHit> chain{segs[start].first, segs[start].second};
        for (int dir = 0; dir < 2; ++dir) {
            bool forward = (dir == 0);
            while (true) {
                const std::int64_t tip = forward ? chain.back().key : chain.front().key;
                std::size_t found = segs.size();
                auto [lo, hi] = by_key.equal_range(tip);
                for (auto it = lo; it != hi; ++it)
                    if (!used[it->second]) { found = it->second; break; }
                if (found == segs.size()) break;
                used[found] = true;
                const auto& sg = segs[found];
                const detail::EdgeHit& next = (sg.first.key == tip) ? sg.second : sg.first;
                if (forward) chain.push_back(next);
                else chain.insert(chain.begin(), next);
            }
        }
        bool closed = chain.size() > 2 && chain.front().key == chain.back().key;
        std::vector<Vec2> pts;
        pts.reserve(chain.size());
        for (std::size_t q = 0; q + (closed ? 1 : 0) < chain.size(); ++q)
            pts.push_back(chain[q].p);
        if (pts.size() >= 2) out.push_back(Curve::from_points(std::move(pts), closed));
    }
    return out;
}

} // namespace tactoidlab
