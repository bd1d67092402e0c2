// Command-line front end: relaxation runs, one-dimensional limit profiles,
// wall-cost tables, astroid constructions, tactoid solutions, divergence
// bound checks, sharp-interface residual evaluation, and energy evaluation.

#include <chrono>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

#include <CLI11.hpp>

#include <tactoidlab/astroid.hpp>
#include <tactoidlab/contour.hpp>
#include <tactoidlab/io.hpp>
#include <tactoidlab/oned.hpp>
#include <tactoidlab/relax.hpp>
#include <tactoidlab/sharp.hpp>
#include <tactoidlab/tactoid.hpp>
#include <tactoidlab/wallcost.hpp>

namespace {

using namespace tactoidlab;
using nlohmann::ordered_json;

std::string join_args(int argc, char** argv) {
    std::string out;
    for (int i = 0; i < argc; ++i) {
        if (i) out += ' ';
        out += argv[i];
    }
    return out;
}

ordered_json breakdown_json(const EnergyBreakdown& e) {
    return ordered_json{{"potential", e.potential},
                        {"gradient", e.gradient},
                        {"divergence", e.divergence},
                        {"total", e.total}};
}

PotentialSpec potential_by_name(const std::string& name) {
    if (name == "csh") return PotentialSpec::csh();
    throw ParseError("potential: expected 'csh', got '" + name + "'");
}

int cmd_relax(const std::string& command, const std::string& config_path,
              const std::string& out_dir) {
    const std::string text = read_text_file(config_path);
    const SimConfig cfg = parse_sim_config(text);
    const std::string echo = echo_sim_config(cfg);

    const auto t0 = std::chrono::steady_clock::now();
    const RunRecord rec = relax(cfg);
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    const std::vector<Curve> contours = interface_contour(rec.field, 0.5);
    const EnergyBreakdown final_energy = energy_eps(rec.field, cfg.eps, cfg.L, cfg.potential);

    ManifestInfo info;
    info.command_line = command;
    info.config_echo = echo;
    if (cfg.init == InitKind::SeededRandom) info.seed = cfg.seed;
    OutputBundle bundle(info);
    bundle.add("field.csv", field_csv(rec.field));
    bundle.add("energy.csv", energy_csv(rec.energy_history));
    bundle.add("contour.csv", contour_csv(contours));
    ordered_json summary;
    summary["command"] = "relax";
    summary["config"] = echo;
    summary["steps"] = rec.steps;
    summary["converged"] = rec.converged;
    summary["final_rate"] = rec.final_rate;
    summary["energy"] = breakdown_json(final_energy);
    summary["wall_seconds"] = seconds;
    bundle.add_json("summary.json", summary);
    bundle.commit(out_dir);

    std::cout << "steps " << rec.steps << (rec.converged ? " converged" : " not-converged")
              << " energy " << format17(final_energy.total) << "\n";
    return 0;
}

int cmd_oned(const std::string& command, double a, double H, double L, double eps, int samples,
             const std::string& out_dir) {
    if (a < 0.0 || a >= 1.0) throw ParseError("a: a in [0,1) required");
    if (H <= 0.0) throw ParseError("H: H must be positive");
    if (L <= 0.0) throw ParseError("L: L must be positive");
    if (eps <= 0.0) throw ParseError("eps: eps must be positive");
    if (samples < 3) throw ParseError("samples: need at least 3");

    const PotentialSpec spec = PotentialSpec::csh();
    const OneDLimitState state = gamma_minimizer(a, H, L, spec);
    const OneDProfile profile = composite_profile(a, state, H, eps, samples, spec);
    const double e_eps = energy_eps_1d(profile, eps, L, spec);
    const bool wall = state.kind == OneDLimitState::Kind::SingleWall;

    std::cout << "structure: " << (wall ? "single_wall" : "two_interface") << "\n";
    std::cout << "m: " << format17(state.m) << "\n";
    std::cout << "energy_limit: " << format17(state.energy) << "\n";
    std::cout << "energy_eps: " << format17(e_eps) << "\n";
    if (state.tie_break) std::cout << "tie_break: both families cost the same\n";

    ManifestInfo info;
    info.command_line = command;
    info.config_echo = "a = " + format17(a) + "\nH = " + format17(H) + "\nL = " + format17(L) +
                       "\neps = " + format17(eps) + "\nsamples = " + std::to_string(samples) +
                       "\n";
    OutputBundle bundle(info);
    bundle.add("profile.csv", profile_csv(profile));
    ordered_json summary;
    summary["command"] = "oned";
    summary["a"] = a;
    summary["H"] = H;
    summary["L"] = L;
    summary["eps"] = eps;
    summary["structure"] = wall ? "single_wall" : "two_interface";
    summary["m"] = state.m;
    summary["tie_break"] = state.tie_break;
    summary["energy_limit"] = state.energy;
    summary["energy_eps"] = e_eps;
    bundle.add_json("summary.json", summary);
    bundle.commit(out_dir);
    return 0;
}

int cmd_wallcost(const std::string& command, int samples, const std::string& potential,
                 const std::string& out_dir) {
    if (samples < 2) throw ParseError("samples: need at least 2");
    const PotentialSpec spec = potential_by_name(potential);
    const WallCostTable table = build_wall_cost_table(spec, samples);
    const std::string csv = wallcost_csv(table);
    if (out_dir.empty()) {
        std::cout << csv;
        return 0;
    }
    ManifestInfo info;
    info.command_line = command;
    info.config_echo =
        "samples = " + std::to_string(samples) + "\npotential = " + potential + "\n";
    OutputBundle bundle(info);
    bundle.add("wallcost.csv", csv);
    ordered_json summary;
    summary["command"] = "wallcost";
    summary["samples"] = samples;
    summary["c0"] = table.c0;
    summary["z_star"] = table.z_star;
    bundle.add_json("summary.json", summary);
    bundle.commit(out_dir);
    return 0;
}

int cmd_astroid(const std::string& command, int k, int samples, const std::string& out_dir) {
    if (k < 1) throw ParseError("k: need k >= 1");
    if (samples < 16) throw ParseError("samples: need at least 16 per sector");
    const PotentialSpec spec = PotentialSpec::csh();
    const Curve interface = astroid_interface(k, samples);
    const double area = island_area(k);
    const double length = interface.s.back();
    const double e0_total = 0.5 * wall_cost(0.0, spec) * length;

    ManifestInfo info;
    info.command_line = command;
    info.config_echo = "k = " + std::to_string(k) + "\nsamples = " + std::to_string(samples) + "\n";
    OutputBundle bundle(info);
    bundle.add("interface.csv", curve_csv(interface));
    ordered_json summary;
    summary["command"] = "astroid";
    summary["k"] = k;
    summary["samples"] = samples;
    summary["area"] = area;
    summary["length"] = length;
    summary["e0_total"] = e0_total;
    bundle.add_json("summary.json", summary);
    bundle.commit(out_dir);

    std::cout << "area " << format17(area) << " length " << format17(length) << " e0 "
              << format17(e0_total) << "\n";
    return 0;
}

int cmd_tactoid(const std::string& command, double lambda, std::optional<double> area,
                const std::string& out_dir) {
    const PotentialSpec spec = PotentialSpec::csh();
    const TactoidSolution sol = area ? calibrate_lambda(*area, spec) : solve_tactoid(lambda, spec);
    const TactoidEnergy energy = tactoid_energy(sol, spec);
    const JunctionData junction = tactoid_junction(sol);
    const Vec2 residual = junction_residual(junction, spec);
    const double residual_norm = norm(residual);

    ManifestInfo info;
    info.command_line = command;
    info.config_echo = "lambda = " + format17(sol.lambda) + "\n";
    OutputBundle bundle(info);
    bundle.add("interface.csv", curve_csv(sol.interface));
    bundle.add("wall.csv", wall_csv(sol));
    ordered_json summary;
    summary["command"] = "tactoid";
    summary["lambda"] = sol.lambda;
    summary["lambda_eff"] = sol.lambda_eff;
    summary["theta_star"] = sol.theta_star;
    summary["l"] = sol.l;
    summary["x0"] = sol.x0;
    summary["y_top"] = sol.y_top;
    summary["area"] = sol.area;
    summary["energy_reduced"] = energy.reduced;
    summary["energy_sharp"] = energy.sharp;
    summary["energy_breakdown"] = ordered_json{{"bulk", energy.breakdown.bulk},
                                               {"perimeter", energy.breakdown.perimeter},
                                               {"wall", energy.breakdown.wall},
                                               {"total", energy.breakdown.total}};
    summary["junction"] =
        ordered_json{{"residual", ordered_json::array({residual[0], residual[1]})},
                     {"residual_norm", residual_norm}};
    bundle.add_json("summary.json", summary);
    bundle.commit(out_dir);

    std::cout << "lambda " << format17(sol.lambda) << " area " << format17(sol.area) << " energy "
              << format17(energy.reduced) << "\n";
    return 0;
}

int cmd_check_div_bound(std::optional<int> degree, double rho, double rhop, int grid, double alpha,
                        const std::string& config_path, const std::string& field_path) {
    GridField f;
    if (!field_path.empty()) {
        if (config_path.empty())
            throw ParseError("--field requires --config describing the grid");
        const SimConfig cfg = parse_sim_config(read_text_file(config_path));
        f = load_field_csv(cfg.domain, read_text_file(field_path));
    } else if (degree) {
        if (grid < 32) throw ParseError("grid: need at least 32");
        const Domain dom = Domain::disk(1.0, grid, BoundaryData::degree(*degree, alpha));
        f = sample_field(dom, [&](double x, double y) -> Vec2 {
            const double phi = std::atan2(y, x);
            const double arg = *degree * phi + alpha;
            return {std::cos(arg), std::sin(arg)};
        });
    } else {
        throw ParseError("check-div-bound: pass --degree for the analytic family or "
                         "--config/--field for a stored field");
    }
    const DivBoundReport report = div_lower_bound_check(f, rho, rhop);
    const double fourier = degree_fourier(f, 0.5 * (rho + rhop));

    ordered_json out;
    out["d"] = report.d;
    out["degree_fourier"] = fourier;
    out["lhs"] = report.lhs;
    out["rhs"] = report.rhs;
    out["applicable"] = report.applicable;
    out["satisfied"] = report.satisfied;
    if (!report.message.empty()) out["message"] = report.message;
    std::cout << out.dump(2) << "\n";
    return 0;
}

int cmd_residuals(const std::string& input_path) {
    const SharpConfig cfg = load_sharp_config(read_text_file(input_path));
    validate_config(cfg);
    const PotentialSpec spec = PotentialSpec::csh();

    auto max_abs = [](const std::vector<double>& v) {
        double m = 0.0;
        for (const double x : v) m = std::max(m, std::abs(x));
        return m;
    };

    for (std::size_t w = 0; w < cfg.walls.size(); ++w) {
        const WallData& wd = cfg.walls[w];
        const Curve& c = wd.curve;
        const std::size_t n = c.size();
        if (wd.div_left.size() != n || wd.div_right.size() != n)
            throw ParseError("wall " + std::to_string(w) + ": side divergences missing");
        std::vector<double> u1_tau(n), u_dot_nu(n), jump(n);
        for (std::size_t i = 0; i < n; ++i) {
            u1_tau[i] = dot(wd.u_left[i], c.tangent(i));
            u_dot_nu[i] = dot(wd.u_left[i], c.normal(i));
            jump[i] = wall_jump_residual(u_dot_nu[i], wd.div_left[i], wd.div_right[i], cfg.L, spec);
        }
        const std::vector<double> evolution = wall_evolution_residual(
            c.s, wd.div_left, wd.div_right, u1_tau, c.curvature, u_dot_nu, cfg.L, spec);
        std::cout << "wall " << w << " jump: " << format17(max_abs(jump)) << "\n";
        std::cout << "wall " << w << " evolution: " << format17(max_abs(evolution)) << "\n";
    }
    for (std::size_t i = 0; i < cfg.interfaces.size(); ++i) {
        const InterfaceData& fd = cfg.interfaces[i];
        const std::vector<double> r =
            interface_residual(fd.curve.s, fd.div_star, fd.u_star_tau, fd.curve.curvature,
                               cfg.lambda, cfg.L, spec);
        std::cout << "interface " << i << " stationarity: " << format17(max_abs(r)) << "\n";
    }
    for (std::size_t q = 0; q < cfg.junctions.size(); ++q) {
        const Vec2 r = junction_residual(cfg.junctions[q], spec);
        std::cout << "junction " << q << " balance: " << format17(norm(r)) << "\n";
    }
    return 0;
}

int cmd_energy(const std::string& config_path, const std::string& field_path) {
    const SimConfig cfg = parse_sim_config(read_text_file(config_path));
    const GridField f = load_field_csv(cfg.domain, read_text_file(field_path));
    const EnergyBreakdown e = energy_eps(f, cfg.eps, cfg.L, cfg.potential);
    std::cout << breakdown_json(e).dump(2) << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
#ifdef _OPENMP
    if (const char* t = std::getenv("TACTOIDLAB_THREADS")) {
        const int n = std::atoi(t);
        if (n > 0) omp_set_num_threads(n);
    }
#endif
    const std::string command = join_args(argc, argv);

    CLI::App app{"numerical laboratory for disparate-elastic-constant liquid crystal models"};
    app.require_subcommand(1);

    // relax
    auto* relax_cmd = app.add_subcommand("relax", "gradient-flow relaxation from a config file");
    std::string relax_config, relax_out = "out";
    relax_cmd->add_option("--config", relax_config, "key = value configuration file")->required();
    relax_cmd->add_option("--out", relax_out, "output directory");

    // oned
    auto* oned_cmd = app.add_subcommand("oned", "one-dimensional limit minimizer and profile");
    double oned_a = 0.0, oned_H = 0.5, oned_L = 0.5, oned_eps = 0.01;
    int oned_samples = 2001;
    std::string oned_out = "out";
    oned_cmd->add_option("--a", oned_a, "boundary second component, in [0,1)")->required();
    oned_cmd->add_option("--H", oned_H, "domain half-height")->required();
    oned_cmd->add_option("--L", oned_L, "divergence penalty")->required();
    oned_cmd->add_option("--eps", oned_eps, "interface width for the composite profile");
    oned_cmd->add_option("--samples", oned_samples, "profile sample count");
    oned_cmd->add_option("--out", oned_out, "output directory");

    // wallcost
    auto* wall_cmd = app.add_subcommand("wallcost", "reduced wall cost table");
    int wall_samples = 512;
    std::string wall_potential = "csh", wall_out;
    wall_cmd->add_option("--samples", wall_samples, "table sample count");
    wall_cmd->add_option("--potential", wall_potential, "potential name");
    wall_cmd->add_option("--out", wall_out, "output directory (stdout if omitted)");

    // astroid
    auto* astroid_cmd = app.add_subcommand("astroid", "degree -k astroid construction");
    int astroid_k = 1, astroid_samples = 512;
    std::string astroid_out = "out";
    astroid_cmd->add_option("--k", astroid_k, "symmetry index, k >= 1");
    astroid_cmd->add_option("--samples", astroid_samples, "samples per sector");
    astroid_cmd->add_option("--out", astroid_out, "output directory");

    // tactoid
    auto* tactoid_cmd = app.add_subcommand("tactoid", "reduced tactoid profile and assembly");
    double tactoid_lambda = 1.0;
    double tactoid_area_val = 0.0;
    std::string tactoid_out = "out";
    tactoid_cmd->add_option("--lambda", tactoid_lambda, "area multiplier");
    auto* area_opt = tactoid_cmd->add_option("--area", tactoid_area_val,
                                             "calibrate lambda to this island area");
    tactoid_cmd->add_option("--out", tactoid_out, "output directory");

    // check-div-bound
    auto* div_cmd = app.add_subcommand("check-div-bound", "divergence lower bound on an annulus");
    int div_degree_val = 0, div_grid = 256;
    double div_rho = 0.5, div_rhop = 1.0, div_alpha = 0.0;
    std::string div_config, div_field;
    auto* degree_opt = div_cmd->add_option("--degree", div_degree_val, "analytic family degree");
    div_cmd->add_option("--rho", div_rho, "inner radius");
    div_cmd->add_option("--rhop", div_rhop, "outer radius");
    div_cmd->add_option("--grid", div_grid, "grid resolution for the analytic family");
    div_cmd->add_option("--alpha", div_alpha, "phase of the analytic family");
    div_cmd->add_option("--config", div_config, "configuration describing a stored field's grid");
    div_cmd->add_option("--field", div_field, "stored field CSV");

    // residuals
    auto* resid_cmd = app.add_subcommand("residuals", "sharp-interface stationarity residuals");
    std::string resid_input;
    resid_cmd->add_option("--input", resid_input, "sharp-interface JSON document")->required();

    // energy
    auto* energy_cmd = app.add_subcommand("energy", "diffuse energy of a stored field");
    std::string energy_config, energy_field;
    energy_cmd->add_option("--config", energy_config, "configuration file")->required();
    energy_cmd->add_option("--field", energy_field, "stored field CSV")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (relax_cmd->parsed()) return cmd_relax(command, relax_config, relax_out);
        if (oned_cmd->parsed())
            return cmd_oned(command, oned_a, oned_H, oned_L, oned_eps, oned_samples, oned_out);
        if (wall_cmd->parsed())
            return cmd_wallcost(command, wall_samples, wall_potential, wall_out);
        if (astroid_cmd->parsed())
            return cmd_astroid(command, astroid_k, astroid_samples, astroid_out);
        if (tactoid_cmd->parsed()) {
            std::optional<double> area;
            if (area_opt->count()) area = tactoid_area_val;
            return cmd_tactoid(command, tactoid_lambda, area, tactoid_out);
        }
        if (div_cmd->parsed()) {
            std::optional<int> degree;
            if (degree_opt->count()) degree = div_degree_val;
            return cmd_check_div_bound(degree, div_rho, div_rhop, div_grid, div_alpha, div_config,
                                       div_field);
        }
        if (resid_cmd->parsed()) return cmd_residuals(resid_input);
        if (energy_cmd->parsed()) return cmd_energy(energy_config, energy_field);
        std::cerr << "no subcommand selected\n";
        return 2;
    } catch (const ParseError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const InvalidConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const IoError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    }
}
