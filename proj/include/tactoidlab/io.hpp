#pragma once

// Configuration parsing (flat "section.key = value" text), deterministic CSV
// and JSON emission at full double precision, sharp-interface JSON round trip,
// and run manifests tying every output file to its exact configuration.

#include <cctype>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "curve.hpp"
#include "grid.hpp"
#include "version.hpp"
#include "oned.hpp"
#include "potential.hpp"
#include "relax.hpp"
#include "sharp.hpp"
#include "tactoid.hpp"
#include "wallcost.hpp"

namespace tactoidlab {

struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// 17 significant digits: lossless double round trip in decimal
inline std::string format17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
}

namespace detail {

inline std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

}  // namespace detail

// Key-value text with line tracking.  Every key must be consumed by the
// config builder; leftovers are rejected by name and line.
class KeyValueText {
  public:
    explicit KeyValueText(const std::string& text) {
        std::istringstream in(text);
        std::string raw;
        int line = 0;
        while (std::getline(in, raw)) {
            ++line;
            const std::size_t hash = raw.find('#');
            if (hash != std::string::npos) raw.erase(hash);
            const std::string stripped = detail::trim(raw);
            if (stripped.empty()) continue;
            const std::size_t eq = stripped.find('=');
            if (eq == std::string::npos)
                throw ParseError("line " + std::to_string(line) +
                                 ": expected 'key = value', got '" + stripped + "'");
            const std::string key = detail::trim(stripped.substr(0, eq));
            const std::string value = detail::trim(stripped.substr(eq + 1));
            if (key.empty())
                throw ParseError("line " + std::to_string(line) + ": empty key");
            if (entries_.count(key))
                throw ParseError(key + " (line " + std::to_string(line) +
                                 "): duplicate key, first set on line " +
                                 std::to_string(entries_[key].line));
            entries_[key] = Entry{value, line, false};
        }
    }

    bool has(const std::string& key) const { return entries_.count(key) != 0; }

    int line_of(const std::string& key) const {
        auto it = entries_.find(key);
        return it == entries_.end() ? 0 : it->second.line;
    }

    [[noreturn]] void fail(const std::string& key, const std::string& what) const {
        throw ParseError(key + " (line " + std::to_string(line_of(key)) + "): " + what);
    }

    std::string get_string(const std::string& key, const std::string& fallback) {
        auto it = entries_.find(key);
        if (it == entries_.end()) return fallback;
        it->second.used = true;
        return it->second.value;
    }

    double get_real(const std::string& key, double fallback) {
        auto it = entries_.find(key);
        if (it == entries_.end()) return fallback;
        it->second.used = true;
        return parse_real(key, it->second.value);
    }

    std::optional<double> get_real_optional(const std::string& key) {
        auto it = entries_.find(key);
        if (it == entries_.end()) return std::nullopt;
        it->second.used = true;
        return parse_real(key, it->second.value);
    }

    long long get_integer(const std::string& key, long long fallback) {
        auto it = entries_.find(key);
        if (it == entries_.end()) return fallback;
        it->second.used = true;
        const std::string& v = it->second.value;
        std::size_t pos = 0;
        long long out = 0;
        try {
            out = std::stoll(v, &pos);
        } catch (const std::exception&) {
            fail(key, "expected an integer, got '" + v + "'");
        }
        if (pos != v.size()) fail(key, "expected an integer, got '" + v + "'");
        return out;
    }

    // any key never consumed is unknown (or inapplicable to this configuration)
    void reject_leftovers() const {
        for (const auto& [key, e] : entries_)
            if (!e.used)
                throw ParseError("unknown key '" + key + "' (line " +
                                 std::to_string(e.line) + ")");
    }

  private:
    struct Entry {
        std::string value;
        int line = 0;
        bool used = false;
    };

    double parse_real(const std::string& key, const std::string& v) {
        std::size_t pos = 0;
        double out = 0.0;
        try {
            out = std::stod(v, &pos);
        } catch (const std::exception&) {
            fail(key, "expected a real number, got '" + v + "'");
        }
        if (pos != v.size()) fail(key, "expected a real number, got '" + v + "'");
        return out;
    }

    std::map<std::string, Entry> entries_;
};

// Flat dotted key-value text -> fully resolved simulation config.  Unknown
// keys, type mismatches, and violated invariants fail by key and line.
inline SimConfig parse_sim_config(const std::string& text) {
    KeyValueText kv(text);
    SimConfig cfg;

    const std::string shape = kv.get_string("domain.shape", "rectangle");
    if (shape != "rectangle" && shape != "disk")
        kv.fail("domain.shape", "expected 'rectangle' or 'disk', got '" + shape + "'");

    const std::string bck = kv.get_string("bc.kind", "");
    if (bck.empty())
        throw ParseError("bc.kind: required key missing (oned, degree, or constant)");
    BoundaryData bc;
    if (bck == "oned") {
        if (shape != "rectangle") kv.fail("bc.kind", "oned data requires a rectangle");
        const double a = kv.get_real("bc.a", 0.0);
        if (a < 0.0 || a >= 1.0) kv.fail("bc.a", "a in [0,1) required, got " + format17(a));
        bc = BoundaryData::oned(a);
    } else if (bck == "degree") {
        if (shape != "disk") kv.fail("bc.kind", "degree data requires a disk");
        const long long k = kv.get_integer("bc.k", 1);
        bc = BoundaryData::degree(static_cast<int>(k), kv.get_real("bc.alpha", 0.0));
    } else if (bck == "constant") {
        bc = BoundaryData::constant({kv.get_real("bc.u1", 1.0), kv.get_real("bc.u2", 0.0)});
    } else {
        kv.fail("bc.kind", "expected 'oned', 'degree', or 'constant', got '" + bck + "'");
    }

    if (shape == "rectangle") {
        const double width = kv.get_real("domain.width", 0.4);
        const double height = kv.get_real("domain.height", 1.0);
        if (width <= 0.0) kv.fail("domain.width", "width must be positive");
        if (height <= 0.0) kv.fail("domain.height", "height must be positive");
        const long long nx = kv.get_integer("grid.nx", 64);
        const long long ny = kv.get_integer("grid.ny", 160);
        if (nx < 4) kv.fail("grid.nx", "nx must be at least 4");
        if (ny < 4) kv.fail("grid.ny", "ny must be at least 4");
        try {
            cfg.domain = Domain::rectangle(width, height, static_cast<int>(nx),
                                           static_cast<int>(ny), bc);
        } catch (const std::invalid_argument& e) {
            throw ParseError("grid.nx/grid.ny: " + std::string(e.what()));
        }
    } else {
        const double radius = kv.get_real("domain.radius", 1.0);
        const double inner = kv.get_real("domain.inner_radius", 0.0);
        if (radius <= 0.0) kv.fail("domain.radius", "radius must be positive");
        if (inner < 0.0 || inner >= radius)
            kv.fail("domain.inner_radius", "inner_radius in [0, radius) required");
        const long long n = kv.get_integer("grid.n", 128);
        if (n < 8) kv.fail("grid.n", "n must be at least 8");
        try {
            cfg.domain = Domain::disk(radius, static_cast<int>(n), bc, inner);
        } catch (const std::invalid_argument& e) {
            throw ParseError("grid.n: " + std::string(e.what()));
        }
    }

    cfg.eps = kv.get_real("solver.eps", cfg.eps);
    if (cfg.eps <= 0.0) kv.fail("solver.eps", "eps must be positive");
    cfg.L = kv.get_real("solver.L", cfg.L);
    if (cfg.L < 0.0) kv.fail("solver.L", "L must be nonnegative");
    cfg.dt = kv.get_real_optional("solver.dt");
    if (cfg.dt) {
        if (*cfg.dt <= 0.0) kv.fail("solver.dt", "dt must be positive");
        const double bound = stable_time_step(cfg);
        if (*cfg.dt > bound * (1.0 + 1e-12))
            kv.fail("solver.dt", "dt exceeds the explicit stability bound " + format17(bound));
    }
    cfg.max_steps = kv.get_integer("solver.max_steps", cfg.max_steps);
    if (cfg.max_steps < 1) kv.fail("solver.max_steps", "max_steps must be at least 1");
    cfg.stop_rate = kv.get_real("solver.stop_tol", cfg.stop_rate);
    if (cfg.stop_rate <= 0.0) kv.fail("solver.stop_tol", "stop_tol must be positive");
    cfg.record_every = kv.get_integer("solver.record_every", cfg.record_every);
    if (cfg.record_every < 1) kv.fail("solver.record_every", "record_every must be at least 1");

    const std::string init = kv.get_string("init.kind", "boundary");
    if (init == "boundary") {
        cfg.init = InitKind::BoundaryExtension;
    } else if (init == "random") {
        cfg.init = InitKind::SeededRandom;
        const long long seed = kv.get_integer("init.seed", 1);
        if (seed < 0) kv.fail("init.seed", "seed must be nonnegative");
        cfg.seed = static_cast<std::uint64_t>(seed);
        cfg.noise_amplitude = kv.get_real("init.amplitude", cfg.noise_amplitude);
        if (cfg.noise_amplitude < 0.0) kv.fail("init.amplitude", "amplitude must be nonnegative");
    } else if (init == "isotropic_disk") {
        cfg.init = InitKind::IsotropicDisk;
        cfg.iso_center = {kv.get_real("init.center_x", 0.0), kv.get_real("init.center_y", 0.0)};
        cfg.iso_radius = kv.get_real("init.radius", 0.25);
        if (cfg.iso_radius <= 0.0) kv.fail("init.radius", "radius must be positive");
    } else {
        kv.fail("init.kind",
                "expected 'boundary', 'random', or 'isotropic_disk', got '" + init + "'");
    }

    kv.reject_leftovers();
    return cfg;
}

// Echo with every resolved value, including the auto-selected dt.  Re-parsing
// the echo reproduces the configuration bit for bit.
inline std::string echo_sim_config(const SimConfig& cfg) {
    std::ostringstream os;
    const Domain& d = cfg.domain;
    const bool rect = d.shape == Shape::Rectangle;
    os << "domain.shape = " << (rect ? "rectangle" : "disk") << "\n";
    if (rect) {
        os << "domain.width = " << format17(d.width) << "\n";
        os << "domain.height = " << format17(d.height) << "\n";
        os << "grid.nx = " << d.nx << "\n";
        os << "grid.ny = " << d.ny << "\n";
    } else {
        os << "domain.radius = " << format17(d.radius) << "\n";
        os << "domain.inner_radius = " << format17(d.inner_radius) << "\n";
        os << "grid.n = " << d.nx << "\n";
    }
    switch (d.bc.kind) {
        case BcKind::OneD:
        case BcKind::PeriodicX_DirichletY:
            os << "bc.kind = oned\n";
            os << "bc.a = " << format17(d.bc.a) << "\n";
            break;
        case BcKind::DegreeData:
            os << "bc.kind = degree\n";
            os << "bc.k = " << d.bc.k << "\n";
            os << "bc.alpha = " << format17(d.bc.alpha) << "\n";
            break;
        case BcKind::Constant:
            os << "bc.kind = constant\n";
            os << "bc.u1 = " << format17(d.bc.value[0]) << "\n";
            os << "bc.u2 = " << format17(d.bc.value[1]) << "\n";
            break;
    }
    os << "solver.eps = " << format17(cfg.eps) << "\n";
    os << "solver.L = " << format17(cfg.L) << "\n";
    os << "solver.dt = " << format17(cfg.dt ? *cfg.dt : stable_time_step(cfg)) << "\n";
    os << "solver.max_steps = " << cfg.max_steps << "\n";
    os << "solver.stop_tol = " << format17(cfg.stop_rate) << "\n";
    os << "solver.record_every = " << cfg.record_every << "\n";
    switch (cfg.init) {
        case InitKind::BoundaryExtension:
            os << "init.kind = boundary\n";
            break;
        case InitKind::SeededRandom:
            os << "init.kind = random\n";
            os << "init.seed = " << cfg.seed << "\n";
            os << "init.amplitude = " << format17(cfg.noise_amplitude) << "\n";
            break;
        case InitKind::IsotropicDisk:
            os << "init.kind = isotropic_disk\n";
            os << "init.center_x = " << format17(cfg.iso_center[0]) << "\n";
            os << "init.center_y = " << format17(cfg.iso_center[1]) << "\n";
            os << "init.radius = " << format17(cfg.iso_radius) << "\n";
            break;
        case InitKind::Prescribed:
            os << "init.kind = boundary\n";  // prescribed data is not expressible in text
            break;
    }
    return os.str();
}

// ---------------- CSV builders (strings, written atomically later) ----------

inline std::string field_csv(const GridField& f) {
    const Domain& d = f.dom;
    const std::vector<double> div = divergence(f);
    std::string out = "x,y,u1,u2,modulus,div\n";
    for (int j = 0; j < d.ny; ++j)
        for (int i = 0; i < d.nx; ++i) {
            if (d.mask[d.idx(i, j)] != MaskState::Inside) continue;
            const std::size_t q = d.idx(i, j);
            out += format17(d.x(i)) + ',' + format17(d.y(j)) + ',' + format17(f.u1[q]) + ',' +
                   format17(f.u2[q]) + ',' + format17(std::hypot(f.u1[q], f.u2[q])) + ',' +
                   format17(div[q]) + '\n';
        }
    return out;
}

inline std::string curve_csv(const Curve& c) {
    std::string out = "s,x,y\n";
    for (std::size_t i = 0; i < c.size(); ++i)
        out += format17(c.s[i]) + ',' + format17(c.pts[i][0]) + ',' + format17(c.pts[i][1]) + '\n';
    return out;
}

inline std::string contour_csv(const std::vector<Curve>& curves) {
    std::string out = "curve,s,x,y\n";
    for (std::size_t k = 0; k < curves.size(); ++k)
        for (std::size_t i = 0; i < curves[k].size(); ++i)
            out += std::to_string(k) + ',' + format17(curves[k].s[i]) + ',' +
                   format17(curves[k].pts[i][0]) + ',' + format17(curves[k].pts[i][1]) + '\n';
    return out;
}

inline std::string energy_csv(const std::vector<std::pair<long, EnergyBreakdown>>& history) {
    std::string out = "step,potential,gradient,divergence,total\n";
    for (const auto& [step, e] : history)
        out += std::to_string(step) + ',' + format17(e.potential) + ',' + format17(e.gradient) +
               ',' + format17(e.divergence) + ',' + format17(e.total) + '\n';
    return out;
}

inline std::string wallcost_csv(const WallCostTable& t) {
    std::string out = "z,K,Kp,H\n";
    for (std::size_t i = 0; i < t.z_samples.size(); ++i)
        out += format17(t.z_samples[i]) + ',' + format17(t.K_values[i]) + ',' +
               format17(t.Kp_values[i]) + ',' + format17(t.H_values[i]) + '\n';
    return out;
}

inline std::string profile_csv(const OneDProfile& p) {
    std::string out = "y,u1,u2\n";
    for (std::size_t i = 0; i < p.y.size(); ++i)
        out += format17(p.y[i]) + ',' + format17(p.u1[i]) + ',' + format17(p.u2[i]) + '\n';
    return out;
}

// wall rows pair the retained (display-capped) wall vertices with the
// characteristic length and half-angle at the same interface sample
inline std::string wall_csv(const TactoidSolution& sol) {
    std::string out = "sigma,x,y,t,psi\n";
    for (std::size_t i = 0; i < sol.wall.size(); ++i)
        out += format17(sol.wall.s[i]) + ',' + format17(sol.wall.pts[i][0]) + ',' +
               format17(sol.wall.pts[i][1]) + ',' + format17(sol.t[i]) + ',' +
               format17(sol.psi[i]) + '\n';
    return out;
}

// ---------------- sharp-interface JSON round trip ---------------------------

namespace detail {

inline nlohmann::ordered_json vec2_json(const Vec2& v) {
    return nlohmann::ordered_json::array({v[0], v[1]});
}

inline nlohmann::ordered_json vec2_list_json(const std::vector<Vec2>& vs) {
    nlohmann::ordered_json a = nlohmann::ordered_json::array();
    for (const Vec2& v : vs) a.push_back(vec2_json(v));
    return a;
}

inline nlohmann::ordered_json curve_json(const Curve& c) {
    nlohmann::ordered_json j;
    j["closed"] = c.closed;
    j["normal_sign"] = c.normal_sign;
    nlohmann::ordered_json x = nlohmann::ordered_json::array();
    nlohmann::ordered_json y = nlohmann::ordered_json::array();
    for (const Vec2& p : c.pts) {
        x.push_back(p[0]);
        y.push_back(p[1]);
    }
    j["x"] = std::move(x);
    j["y"] = std::move(y);
    j["s"] = c.s;
    j["theta"] = c.theta;
    j["speed"] = c.speed;
    return j;
}

inline Vec2 vec2_from(const nlohmann::json& j, const std::string& what) {
    if (!j.is_array() || j.size() != 2)
        throw ParseError(what + ": expected a two-entry array");
    return {j[0].get<double>(), j[1].get<double>()};
}

inline std::vector<Vec2> vec2_list_from(const nlohmann::json& j, const std::string& what) {
    std::vector<Vec2> out;
    if (!j.is_array()) throw ParseError(what + ": expected an array of points");
    out.reserve(j.size());
    for (const auto& e : j) out.push_back(vec2_from(e, what));
    return out;
}

inline Curve curve_from(const nlohmann::json& j, const std::string& what) {
    if (!j.is_object()) throw ParseError(what + ": expected a curve object");
    Curve c;
    c.closed = j.value("closed", false);
    c.normal_sign = j.value("normal_sign", 1);
    if (c.normal_sign != 1 && c.normal_sign != -1)
        throw ParseError(what + ": normal_sign must be +1 or -1");
    const auto x = j.at("x").get<std::vector<double>>();
    const auto y = j.at("y").get<std::vector<double>>();
    if (x.size() != y.size()) throw ParseError(what + ": x and y lengths differ");
    c.pts.resize(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) c.pts[i] = {x[i], y[i]};
    if (j.contains("theta")) {
        c.theta = j.at("theta").get<std::vector<double>>();
        if (c.theta.size() != c.pts.size()) throw ParseError(what + ": theta length mismatch");
    }
    if (c.theta.empty()) {
        Curve built = Curve::from_points(c.pts, c.closed);
        built.normal_sign = c.normal_sign;
        c = std::move(built);
    } else {
        fill_arclength(c);
        c.speed.assign(c.pts.size(), 1.0);
    }
    if (j.contains("s")) {
        const auto s = j.at("s").get<std::vector<double>>();
        if (s.size() != c.pts.size()) throw ParseError(what + ": s length mismatch");
        c.s = s;
    }
    if (j.contains("speed")) {
        const auto sp = j.at("speed").get<std::vector<double>>();
        if (sp.size() != c.pts.size()) throw ParseError(what + ": speed length mismatch");
        c.speed = sp;
    }
    fill_curvature(c);
    return c;
}

}  // namespace detail

inline nlohmann::ordered_json sharp_config_json(const SharpConfig& cfg) {
    using nlohmann::ordered_json;
    ordered_json j;
    j["L"] = cfg.L;
    j["lambda"] = cfg.lambda;
    j["regions"] = ordered_json::array();
    for (const NematicRegion& r : cfg.regions) {
        ordered_json e;
        switch (r.field) {
            case RegionField::Constant:
                e["field"] = "constant";
                e["u"] = detail::vec2_json(r.u_const);
                break;
            case RegionField::DivergenceFree:
                e["field"] = "divergence_free";
                break;
            case RegionField::Sampled:
                e["field"] = "sampled";
                e["div"] = r.div_samples;
                e["weights"] = r.div_weights;
                break;
        }
        e["polygon"] = detail::vec2_list_json(r.polygon);
        j["regions"].push_back(std::move(e));
    }
    j["isotropic"] = ordered_json::array();
    for (const IsotropicRegion& r : cfg.isotropic) {
        ordered_json e;
        e["polygon"] = detail::vec2_list_json(r.polygon);
        j["isotropic"].push_back(std::move(e));
    }
    j["walls"] = ordered_json::array();
    for (const WallData& w : cfg.walls) {
        ordered_json e;
        e["curve"] = detail::curve_json(w.curve);
        e["u_left"] = detail::vec2_list_json(w.u_left);
        e["u_right"] = detail::vec2_list_json(w.u_right);
        e["div_left"] = w.div_left;
        e["div_right"] = w.div_right;
        if (w.energy_param) {
            e["energy_param"] = {{"s", w.energy_param->first},
                                 {"density", w.energy_param->second}};
        }
        j["walls"].push_back(std::move(e));
    }
    j["interfaces"] = ordered_json::array();
    for (const InterfaceData& f : cfg.interfaces) {
        ordered_json e;
        e["curve"] = detail::curve_json(f.curve);
        e["u_star_tau"] = f.u_star_tau;
        e["div_star"] = f.div_star;
        if (f.trace) e["trace"] = detail::vec2_list_json(*f.trace);
        j["interfaces"].push_back(std::move(e));
    }
    j["junctions"] = ordered_json::array();
    for (const JunctionData& q : cfg.junctions) {
        ordered_json e;
        e["P"] = detail::vec2_json(q.P);
        e["tau01"] = detail::vec2_json(q.tau01);
        e["tau12"] = detail::vec2_json(q.tau12);
        e["tau23"] = detail::vec2_json(q.tau23);
        e["tau03"] = detail::vec2_json(q.tau03);
        e["nu01"] = detail::vec2_json(q.nu01);
        e["nu12"] = detail::vec2_json(q.nu12);
        e["nu23"] = detail::vec2_json(q.nu23);
        e["nu03"] = detail::vec2_json(q.nu03);
        e["u1"] = detail::vec2_json(q.u1);
        e["u2"] = detail::vec2_json(q.u2);
        e["u3"] = detail::vec2_json(q.u3);
        e["div1"] = q.div1;
        e["div2"] = q.div2;
        e["div3"] = q.div3;
        e["L"] = q.L;
        j["junctions"].push_back(std::move(e));
    }
    return j;
}

inline SharpConfig load_sharp_config(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("sharp config: ") + e.what());
    }
    try {
        SharpConfig cfg;
        cfg.L = j.value("L", 0.5);
        cfg.lambda = j.value("lambda", 0.0);
        if (j.contains("regions"))
            for (const auto& e : j.at("regions")) {
                NematicRegion r;
                const std::string kind = e.value("field", "divergence_free");
                if (kind == "constant") {
                    r.field = RegionField::Constant;
                    if (e.contains("u")) r.u_const = detail::vec2_from(e.at("u"), "region u");
                } else if (kind == "divergence_free") {
                    r.field = RegionField::DivergenceFree;
                } else if (kind == "sampled") {
                    r.field = RegionField::Sampled;
                    r.div_samples = e.at("div").get<std::vector<double>>();
                    r.div_weights = e.at("weights").get<std::vector<double>>();
                } else {
                    throw ParseError("region field: expected constant, divergence_free, or "
                                     "sampled, got '" + kind + "'");
                }
                if (e.contains("polygon"))
                    r.polygon = detail::vec2_list_from(e.at("polygon"), "region polygon");
                cfg.regions.push_back(std::move(r));
            }
        if (j.contains("isotropic"))
            for (const auto& e : j.at("isotropic")) {
                IsotropicRegion r;
                if (e.contains("polygon"))
                    r.polygon = detail::vec2_list_from(e.at("polygon"), "isotropic polygon");
                cfg.isotropic.push_back(std::move(r));
            }
        if (j.contains("walls"))
            for (const auto& e : j.at("walls")) {
                WallData w;
                w.curve = detail::curve_from(e.at("curve"), "wall curve");
                w.u_left = detail::vec2_list_from(e.at("u_left"), "wall u_left");
                w.u_right = detail::vec2_list_from(e.at("u_right"), "wall u_right");
                w.div_left = e.at("div_left").get<std::vector<double>>();
                w.div_right = e.at("div_right").get<std::vector<double>>();
                if (e.contains("energy_param"))
                    w.energy_param = std::make_pair(
                        e.at("energy_param").at("s").get<std::vector<double>>(),
                        e.at("energy_param").at("density").get<std::vector<double>>());
                cfg.walls.push_back(std::move(w));
            }
        if (j.contains("interfaces"))
            for (const auto& e : j.at("interfaces")) {
                InterfaceData f;
                f.curve = detail::curve_from(e.at("curve"), "interface curve");
                f.u_star_tau = e.value("u_star_tau", 1.0);
                f.div_star = e.at("div_star").get<std::vector<double>>();
                if (e.contains("trace"))
                    f.trace = detail::vec2_list_from(e.at("trace"), "interface trace");
                cfg.interfaces.push_back(std::move(f));
            }
        if (j.contains("junctions"))
            for (const auto& e : j.at("junctions")) {
                JunctionData q;
                q.P = detail::vec2_from(e.at("P"), "junction P");
                q.tau01 = detail::vec2_from(e.at("tau01"), "junction tau01");
                q.tau12 = detail::vec2_from(e.at("tau12"), "junction tau12");
                q.tau23 = detail::vec2_from(e.at("tau23"), "junction tau23");
                q.tau03 = detail::vec2_from(e.at("tau03"), "junction tau03");
                q.nu01 = detail::vec2_from(e.at("nu01"), "junction nu01");
                q.nu12 = detail::vec2_from(e.at("nu12"), "junction nu12");
                q.nu23 = detail::vec2_from(e.at("nu23"), "junction nu23");
                q.nu03 = detail::vec2_from(e.at("nu03"), "junction nu03");
                q.u1 = detail::vec2_from(e.at("u1"), "junction u1");
                q.u2 = detail::vec2_from(e.at("u2"), "junction u2");
                q.u3 = detail::vec2_from(e.at("u3"), "junction u3");
                q.div1 = e.value("div1", 0.0);
                q.div2 = e.value("div2", 0.0);
                q.div3 = e.value("div3", 0.0);
                q.L = e.value("L", cfg.L);
                cfg.junctions.push_back(q);
            }
        return cfg;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("sharp config: ") + e.what());
    }
}

// ---------------- field CSV reload -------------------------------------------

// Rebuild a grid field from its CSV rows on a known domain: inside nodes come
// from the file (matched by coordinates), boundary and outside nodes from the
// domain's boundary data.
inline GridField load_field_csv(const Domain& d, const std::string& text) {
    GridField f = make_field(d);
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw ParseError("field csv: empty file");
    if (detail::trim(line) != "x,y,u1,u2,modulus,div")
        throw ParseError("field csv: expected header 'x,y,u1,u2,modulus,div'");
    std::size_t filled = 0;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (detail::trim(line).empty()) continue;
        double vals[6];
        int consumed = 0;
        std::istringstream row(line);
        std::string cell;
        while (consumed < 6 && std::getline(row, cell, ',')) {
            try {
                vals[consumed] = std::stod(cell);
            } catch (const std::exception&) {
                throw ParseError("field csv line " + std::to_string(lineno) +
                                 ": expected a real number, got '" + cell + "'");
            }
            ++consumed;
        }
        if (consumed < 4)
            throw ParseError("field csv line " + std::to_string(lineno) + ": too few columns");
        const int i = static_cast<int>(std::lround((vals[0] - d.x0) / d.h));
        const int jj = static_cast<int>(std::lround((vals[1] - d.y0) / d.h));
        if (i < 0 || i >= d.nx || jj < 0 || jj >= d.ny ||
            std::abs(d.x(i) - vals[0]) > 1e-9 * std::max(1.0, std::abs(vals[0])) + 1e-12 ||
            std::abs(d.y(jj) - vals[1]) > 1e-9 * std::max(1.0, std::abs(vals[1])) + 1e-12)
            throw ParseError("field csv line " + std::to_string(lineno) +
                             ": point off the configured grid");
        if (d.mask[d.idx(i, jj)] != MaskState::Inside)
            throw ParseError("field csv line " + std::to_string(lineno) +
                             ": point is not an inside node");
        f.u1[d.idx(i, jj)] = vals[2];
        f.u2[d.idx(i, jj)] = vals[3];
        ++filled;
    }
    std::size_t inside = 0;
    for (const MaskState m : d.mask)
        if (m == MaskState::Inside) ++inside;
    if (filled != inside)
        throw ParseError("field csv: " + std::to_string(filled) + " rows for " +
                         std::to_string(inside) + " inside nodes");
    return f;
}

// ---------------- output bundle with manifest --------------------------------

struct ManifestInfo {
    std::string command_line;
    std::string config_echo;
    std::optional<std::uint64_t> seed;
    std::string version = version_string;
};

// Buffers every artifact in memory and writes nothing until commit, so no
// output file exists on any error path before the error is reported.
class OutputBundle {
  public:
    explicit OutputBundle(ManifestInfo info)
        : info_(std::move(info)), started_(now_iso()) {}

    void add(std::string name, std::string content) {
        files_.emplace_back(std::move(name), std::move(content));
    }

    void add_json(std::string name, const nlohmann::ordered_json& j) {
        add(std::move(name), j.dump(2) + "\n");
    }

    // writes all buffered files, then the manifest listing them
    void commit(const std::filesystem::path& dir) {
        std::error_code ec;
        std::filesystem::create_directories(dir, ec);
        if (ec) throw IoError(dir.string() + ": cannot create directory: " + ec.message());
        for (const auto& [name, content] : files_) write_file(dir / name, content);

        nlohmann::ordered_json m;
        m["command"] = info_.command_line;
        m["config"] = info_.config_echo;
        if (info_.seed) m["seed"] = *info_.seed;
        m["version"] = info_.version;
        m["started"] = started_;
        m["finished"] = now_iso();
        m["files"] = nlohmann::ordered_json::array();
        for (const auto& [name, content] : files_)
            m["files"].push_back({{"name", name}, {"bytes", content.size()}});
        write_file(dir / "manifest.json", m.dump(2) + "\n");
    }

  private:
    static std::string now_iso() {
        const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
        std::tm tm{};
        gmtime_r(&t, &tm);
        char buf[32];
        std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d:%02dZ", tm.tm_year + 1900,
                      tm.tm_mon + 1, tm.tm_mday, tm.tm_hour, tm.tm_min, tm.tm_sec);
        return std::string(buf);
    }

    static void write_file(const std::filesystem::path& p, const std::string& content) {
        std::ofstream out(p, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError(p.string() + ": cannot open for writing");
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        out.close();
        if (!out) throw IoError(p.string() + ": write failed");
    }

    ManifestInfo info_;
    std::string started_;
    std::vector<std::pair<std::string, std::string>> files_;
};

inline std::string read_text_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw IoError(p.string() + ": cannot open for reading");
    std::ostringstream os;
    os << in.rdbuf();
    if (in.bad()) throw IoError(p.string() + ": read failed");
    return os.str();
}

}  // namespace tactoidlab
