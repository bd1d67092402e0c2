#include <catch2/catch_amalgamated.hpp>

#include <tactoidlab/io.hpp>
#include <tactoidlab/version.hpp>

#include <json.hpp>

#include <sys/wait.h>
#include <unistd.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <string>

using namespace tactoidlab;
namespace fs = std::filesystem;

namespace {

struct CliResult {
    int code = -1;
    std::string out;
    std::string err;
};

const std::string& cli_binary() {
    static const std::string bin = [] {
        const char* env = std::getenv("TACTOIDLAB_BIN");
        return env ? std::string(env) : std::string("./tactoidlab");
    }();
    return bin;
}

fs::path make_scratch() {
    static int counter = 0;
    fs::path p = fs::temp_directory_path() /
                 ("tlcli-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    fs::create_directories(p);
    return p;
}

CliResult run_cli(const std::string& args) {
    const fs::path dir = make_scratch();
    const fs::path out = dir / "stdout.txt";
    const fs::path err = dir / "stderr.txt";
    const std::string cmd =
        cli_binary() + " " + args + " >" + out.string() + " 2>" + err.string();
    const int status = std::system(cmd.c_str());
    CliResult r;
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = read_text_file(out);
    r.err = read_text_file(err);
    return r;
}

void write_file(const fs::path& p, const std::string& content) {
    std::ofstream f(p, std::ios::binary);
    f << content;
    REQUIRE(f.good());
}

// first number following the tag on the tagged line
double value_after(const std::string& text, const std::string& tag) {
    const std::size_t pos = text.find(tag);
    REQUIRE(pos != std::string::npos);
    return std::stod(text.substr(pos + tag.size()));
}

const std::string disk_cfg_text =
    "domain.shape = disk\n"
    "domain.radius = 1\n"
    "grid.n = 48\n"
    "bc.kind = degree\n"
    "bc.k = -1\n"
    "bc.alpha = 3.14159265358979312\n"
    "solver.eps = 0.05\n"
    "solver.L = 0.5\n"
    "solver.max_steps = 60\n"
    "solver.stop_tol = 1e-12\n"
    "solver.record_every = 20\n"
    "init.kind = boundary\n";

} // namespace

TEST_CASE("argument errors exit with the usage code") {
    CHECK(run_cli("").code == 2);
    CHECK(run_cli("no-such-command").code == 2);
    CHECK(run_cli("relax").code == 2);
    CHECK(run_cli("--help").code == 0);
}

TEST_CASE("relaxation runs produce a complete reproducible bundle") {
    const fs::path scratch = make_scratch();
    const fs::path cfg_path = scratch / "run.cfg";
    write_file(cfg_path, disk_cfg_text);
    const fs::path out1 = scratch / "out1";
    const fs::path out2 = scratch / "out2";

    const CliResult r1 =
        run_cli("relax --config " + cfg_path.string() + " --out " + out1.string());
    REQUIRE(r1.code == 0);
    CHECK(r1.out.find("steps 60 not-converged energy ") != std::string::npos);

    for (const char* name :
         {"field.csv", "energy.csv", "contour.csv", "summary.json", "manifest.json"})
        CHECK(fs::exists(out1 / name));

    // field rows cover exactly the interior nodes of the configured grid
    const SimConfig cfg = parse_sim_config(disk_cfg_text);
    std::size_t inside = 0;
    for (const MaskState m : cfg.domain.mask)
        if (m == MaskState::Inside) ++inside;
    const std::string field_text = read_text_file(out1 / "field.csv");
    const std::size_t rows = std::count(field_text.begin(), field_text.end(), '\n');
    CHECK(rows == inside + 1);

    // recording schedule: steps 0, 20, 40, 60
    const std::string energy_text = read_text_file(out1 / "energy.csv");
    CHECK(std::count(energy_text.begin(), energy_text.end(), '\n') == 5);

    // the degree -1 data forces a defect, so a modulus contour exists
    const std::string contour_text = read_text_file(out1 / "contour.csv");
    CHECK(std::count(contour_text.begin(), contour_text.end(), '\n') > 10);

    const auto summary = nlohmann::json::parse(read_text_file(out1 / "summary.json"));
    CHECK(summary.at("steps").get<long>() == 60);
    CHECK(summary.at("converged").get<bool>() == false);

    // manifest lists every artifact with its exact size and the full config echo
    const auto manifest = nlohmann::json::parse(read_text_file(out1 / "manifest.json"));
    CHECK(manifest.at("version").get<std::string>() == version_string);
    CHECK(manifest.at("command").get<std::string>().find("relax") != std::string::npos);
    bool saw_field = false;
    for (const auto& entry : manifest.at("files")) {
        const std::string name = entry.at("name").get<std::string>();
        CHECK(entry.at("bytes").get<std::uintmax_t>() == fs::file_size(out1 / name));
        if (name == "field.csv") saw_field = true;
    }
    CHECK(saw_field);

    // the echoed config reproduces itself bit for bit through a reparse
    const std::string echo = manifest.at("config").get<std::string>();
    CHECK(echo == summary.at("config").get<std::string>());
    CHECK(echo_sim_config(parse_sim_config(echo)) == echo);

    // identical invocations are byte-identical in every data file
    const CliResult r2 =
        run_cli("relax --config " + cfg_path.string() + " --out " + out2.string());
    REQUIRE(r2.code == 0);
    for (const char* name : {"field.csv", "energy.csv", "contour.csv"})
        CHECK(read_text_file(out1 / name) == read_text_file(out2 / name));

    // the stored field reloads to the same energy the run reported
    const CliResult re = run_cli("energy --config " + cfg_path.string() + " --field " +
                                 (out1 / "field.csv").string());
    REQUIRE(re.code == 0);
    const auto reloaded = nlohmann::json::parse(re.out);
    CHECK(reloaded.at("total").get<double>() ==
          summary.at("energy").at("total").get<double>());

    // and is recognized as a degree -1 field by the annulus check; the bound
    // itself is not asserted because this transient is still nearly
    // divergence-free
    const CliResult rd =
        run_cli("check-div-bound --config " + cfg_path.string() + " --field " +
                (out1 / "field.csv").string() + " --rho 0.55 --rhop 0.95");
    REQUIRE(rd.code == 0);
    const auto report = nlohmann::json::parse(rd.out);
    CHECK(report.at("d").get<int>() == -1);
    CHECK(report.at("applicable").get<bool>());
    CHECK(std::abs(report.at("degree_fourier").get<double>() + 1.0) < 0.05);

    // the analytic unit family of the same degree does satisfy it
    const CliResult ra = run_cli("check-div-bound --degree -1 --grid 128 --alpha 0.3");
    REQUIRE(ra.code == 0);
    const auto analytic = nlohmann::json::parse(ra.out);
    CHECK(analytic.at("d").get<int>() == -1);
    CHECK(std::abs(analytic.at("degree_fourier").get<double>() + 1.0) < 1e-5);
    CHECK(analytic.at("satisfied").get<bool>());
}

TEST_CASE("a uniform aligned run converges immediately with no contour") {
    const fs::path scratch = make_scratch();
    const fs::path cfg_path = scratch / "uniform.cfg";
    write_file(cfg_path,
               "domain.shape = rectangle\n"
               "domain.width = 1\n"
               "domain.height = 1\n"
               "grid.nx = 24\n"
               "grid.ny = 24\n"
               "bc.kind = constant\n"
               "bc.u1 = 1\n"
               "bc.u2 = 0\n"
               "solver.max_steps = 100\n"
               "init.kind = boundary\n");
    const fs::path out = scratch / "out";
    const CliResult r = run_cli("relax --config " + cfg_path.string() + " --out " + out.string());
    REQUIRE(r.code == 0);
    CHECK(r.out.find(" converged") != std::string::npos);
    CHECK(read_text_file(out / "contour.csv") == "curve,s,x,y\n");
    const auto summary = nlohmann::json::parse(read_text_file(out / "summary.json"));
    CHECK(summary.at("steps").get<long>() == 1);
    CHECK(summary.at("final_rate").get<double>() == 0.0);
}

TEST_CASE("configuration errors are reported by key and line") {
    const fs::path scratch = make_scratch();
    auto reject = [&](const std::string& text, const std::string& needle) {
        static int n = 0;
        const fs::path p = scratch / ("bad" + std::to_string(n++) + ".cfg");
        write_file(p, text);
        const CliResult r = run_cli("relax --config " + p.string() + " --out " +
                                    (scratch / "never").string());
        CHECK(r.code == 2);
        INFO("stderr: " << r.err << " expected: " << needle);
        CHECK(r.err.find(needle) != std::string::npos);
        CHECK_FALSE(fs::exists(scratch / "never"));
    };

    reject("domain.shape = rectangle\nbc.kind = oned\nbc.a = 1.2\n", "bc.a (line 3)");
    reject("domain.shape = rectangle\nbc.kind = oned\nbc.a = 1.2\n", "a in [0,1)");
    reject("bc.kind = constant\nsolver.bogus = 1\n", "unknown key 'solver.bogus' (line 2)");
    reject("bc.kind = constant\nsolver.eps = 0.05\nsolver.dt = 1.0\n",
           "dt exceeds the explicit stability bound");
    reject("bc.kind = constant\nbc.kind = constant\n", "duplicate key");
    reject("bc.kind = constant\njust words\n", "expected 'key = value'");
    reject("bc.kind = constant\ngrid.nx = twelve\n", "expected an integer");
    reject("domain.shape = disk\nbc.kind = oned\n", "oned data requires a rectangle");
    reject("bc.kind = degree\n", "degree data requires a disk");

    // the same guard straight at the library surface
    CHECK_THROWS_WITH(parse_sim_config("bc.kind = constant\nsolver.dt = 99\n"),
                      Catch::Matchers::ContainsSubstring("stability bound"));
}

TEST_CASE("missing inputs exit with the io code") {
    const fs::path scratch = make_scratch();
    CHECK(run_cli("relax --config " + (scratch / "absent.cfg").string()).code == 4);
    write_file(scratch / "ok.cfg", disk_cfg_text);
    CHECK(run_cli("energy --config " + (scratch / "ok.cfg").string() + " --field " +
                  (scratch / "absent.csv").string())
              .code == 4);
    CHECK(run_cli("residuals --input " + (scratch / "absent.json").string()).code == 4);
}

TEST_CASE("numerical failures exit with the runtime code") {
    const CliResult r = run_cli("tactoid --area -1 --out " + (make_scratch() / "x").string());
    CHECK(r.code == 3);
    CHECK(r.err.find("numerical failure") != std::string::npos);
}

TEST_CASE("limit profile command reports the minimizing structure") {
    const fs::path out = make_scratch() / "oned";
    const CliResult r = run_cli("oned --a 0.6 --H 0.5 --L 0.4 --eps 0.001 --samples 2001 --out " +
                                out.string());
    REQUIRE(r.code == 0);
    CHECK(r.out.find("structure: single_wall") != std::string::npos);
    // the minimizer locates m to about 1e-8; the test suite for the library
    // pins it tighter
    CHECK(std::abs(value_after(r.out, "m: ") - 0.9871793203123094) < 1e-7);
    CHECK(std::abs(value_after(r.out, "energy_limit: ") - 0.12529271838254055) < 1e-9);

    const std::string profile = read_text_file(out / "profile.csv");
    CHECK(profile.rfind("y,u1,u2\n", 0) == 0);
    CHECK(std::count(profile.begin(), profile.end(), '\n') == 2002);
    const auto summary = nlohmann::json::parse(read_text_file(out / "summary.json"));
    CHECK(std::abs(summary.at("m").get<double>() - 0.9871793203123094) < 1e-7);
    CHECK(summary.at("structure").get<std::string>() == "single_wall");

    CHECK(run_cli("oned --a 1.2 --H 0.5 --L 0.4").code == 2);
}

TEST_CASE("wall cost table prints to stdout or into a bundle") {
    const CliResult r = run_cli("wallcost --samples 65");
    REQUIRE(r.code == 0);
    CHECK(r.out.rfind("z,K,Kp,H\n", 0) == 0);
    CHECK(std::count(r.out.begin(), r.out.end(), '\n') == 66);
    // first row is z = 0, last row z = 1
    CHECK(std::abs(value_after(r.out, "z,K,Kp,H\n0,") - 0.5) < 1e-9);
    const std::size_t last = r.out.rfind("\n1,");
    REQUIRE(last != std::string::npos);
    CHECK(std::abs(std::stod(r.out.substr(last + 3))) < 1e-9);

    const fs::path out = make_scratch() / "wall";
    REQUIRE(run_cli("wallcost --samples 65 --out " + out.string()).code == 0);
    const auto summary = nlohmann::json::parse(read_text_file(out / "summary.json"));
    CHECK(summary.at("c0").get<double>() == 0.25);
    CHECK(std::abs(summary.at("z_star").get<double>() - 0.34768300324386914) < 1e-6);
    CHECK(fs::exists(out / "wallcost.csv"));
}

TEST_CASE("astroid command reports area, length, and limit energy") {
    const fs::path out = make_scratch() / "astroid";
    const CliResult r = run_cli("astroid --k 1 --samples 256 --out " + out.string());
    REQUIRE(r.code == 0);
    CHECK(std::abs(value_after(r.out, "area ") - 3.0 * std::numbers::pi / 8.0) < 1e-6);
    CHECK(std::abs(value_after(r.out, "e0 ") - 1.5) < 1e-3);
    const std::string curve = read_text_file(out / "interface.csv");
    CHECK(curve.rfind("s,x,y\n", 0) == 0);
    CHECK(run_cli("astroid --k 0").code == 2);
}

TEST_CASE("tactoid command reproduces the calibrated solution") {
    const fs::path out = make_scratch() / "tactoid";
    const CliResult r = run_cli("tactoid --lambda 1 --out " + out.string());
    REQUIRE(r.code == 0);
    const auto s = nlohmann::json::parse(read_text_file(out / "summary.json"));
    CHECK(std::abs(s.at("theta_star").get<double>() - 2.6478450840638885) < 1e-9);
    CHECK(std::abs(s.at("l").get<double>() - 1.0588027334981527) < 1e-8);
    CHECK(std::abs(s.at("x0").get<double>() - 1.0179504094559388) < 1e-8);
    CHECK(std::abs(s.at("y_top").get<double>() - 0.25) < 1e-7);
    CHECK(std::abs(s.at("area").get<double>() - 0.6902134493014812) < 1e-8);
    CHECK(std::abs(s.at("energy_reduced").get<double>() - 1.3804345892183953) < 1e-8);
    CHECK(std::abs(s.at("junction").at("residual_norm").get<double>() - 0.4310015042079197) <
          1e-6);
    const std::string wall = read_text_file(out / "wall.csv");
    CHECK(wall.rfind("sigma,x,y,t,psi\n", 0) == 0);

    // calibration inverts the area map back to the same multiplier
    const CliResult rc = run_cli("tactoid --area 0.6902134493014812 --out " +
                                 (make_scratch() / "cal").string());
    REQUIRE(rc.code == 0);
    CHECK(std::abs(value_after(rc.out, "lambda ") - 1.0) < 1e-6);
}

TEST_CASE("sharp residual evaluation prints per-entity maxima") {
    const double z = 0.35;
    const double c = std::sqrt(1.0 - z * z);
    const int n = 17;
    std::vector<Vec2> pts(n);
    for (int i = 0; i < n; ++i) pts[i] = {static_cast<double>(i) / (n - 1), 0.0};
    WallData w;
    w.curve = Curve::from_points(pts, false);
    w.u_left.assign(n, Vec2{c, -z});
    w.u_right.assign(n, Vec2{-c, -z});
    w.div_left.assign(n, 0.0);
    w.div_right.assign(n, 0.0);
    SharpConfig cfg;
    cfg.L = 0.5;
    cfg.walls.push_back(w);
    validate_config(cfg);

    const fs::path scratch = make_scratch();
    write_file(scratch / "sharp.json", sharp_config_json(cfg).dump(2));
    const CliResult r = run_cli("residuals --input " + (scratch / "sharp.json").string());
    REQUIRE(r.code == 0);
    const PotentialSpec spec = PotentialSpec::csh();
    const double expected = std::abs(wall_jump_residual(z, 0.0, 0.0, cfg.L, spec));
    CHECK(std::abs(value_after(r.out, "wall 0 jump: ") - expected) < 1e-12);
    CHECK(std::abs(value_after(r.out, "wall 0 evolution: ")) < 1e-15);

    // a broken normal trace is rejected as a config error
    cfg.walls[0].u_right.assign(n, Vec2{-c, z});
    write_file(scratch / "broken.json", sharp_config_json(cfg).dump(2));
    const CliResult rb = run_cli("residuals --input " + (scratch / "broken.json").string());
    CHECK(rb.code == 2);
    CHECK(rb.err.find("config error") != std::string::npos);

    write_file(scratch / "mangled.json", "{nope");
    const CliResult rm = run_cli("residuals --input " + (scratch / "mangled.json").string());
    CHECK(rm.code == 2);
    CHECK(rm.err.find("sharp config") != std::string::npos);
}
