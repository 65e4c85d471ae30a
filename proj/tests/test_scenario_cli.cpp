#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "triflex/commands.hpp"
#include "triflex/scenario_io.hpp"

using namespace triflex;
namespace fs = std::filesystem;

namespace {

Scenario parse(const std::string& text) {
    std::istringstream in(text);
    return parse_scenario(in, "test.toml");
}

std::string parse_error(const std::string& text) {
    try {
        parse(text);
    } catch (const ConfigError& e) {
        return e.what();
    }
    return "";
}

struct TempDir {
    fs::path path;
    TempDir() : path(fs::temp_directory_path() / "triflex_cli_test") {
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string file(const std::string& name, const std::string& body) const {
        std::ofstream f(path / name);
        f << body;
        return (path / name).string();
    }
};

int run_cli(const std::string& args) {
    const std::string cmd = std::string(TRIFLEX_CLI_PATH) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

}  // namespace

TEST_CASE("scenario parsing: defaults and overrides") {
    const Scenario sc = parse("");
    CHECK(sc.spec.d1 == 30.0);
    CHECK(sc.spec.d2 == 10.0);
    CHECK(sc.spec.c == 1.0);
    CHECK(sc.spec.variant == Variant::BiasedCollinear);
    CHECK(sc.dt == 0.01);
    CHECK(sc.horizon == 120.0);
    CHECK_FALSE(sc.initial.has_value());

    const Scenario full = parse(
        "variant = \"rotated-split\"  # angle-selecting controller\n"
        "d1 = 3.5\n"
        "d2 = 2\n"
        "theta_deg = 60\n"
        "c = 0.1\n"
        "dt = 0.005\n"
        "horizon = 30\n"
        "record_every = 5\n"
        "seed = 9\n"
        "spread = 12\n"
        "p1x = 1\np1y = 0\np2x = 0\np2y = 0\np3x = -1\np3y = 1\n");
    CHECK(full.spec.variant == Variant::RotatedSplit);
    CHECK(full.spec.d1 == 3.5);
    CHECK(full.spec.theta == doctest::Approx(kPi / 3.0));
    CHECK(full.seed == 9);
    REQUIRE(full.initial.has_value());
    CHECK(full.initial->p3.y == 1.0);
}

TEST_CASE("scenario parsing: diagnostics cite line numbers") {
    CHECK(parse_error("bogus_key = 1\n").find("test.toml:1") != std::string::npos);
    CHECK(parse_error("d1 = 30\nnope = 2\n").find("test.toml:2") != std::string::npos);
    CHECK(parse_error("d1 = 30\nd1 = 31\n").find("duplicate") != std::string::npos);
    CHECK(parse_error("d1 = abc\n").find("invalid number") != std::string::npos);
    CHECK(parse_error("d1\n").find("key = value") != std::string::npos);
    CHECK(parse_error("variant = unbiased\n").find("quoted") != std::string::npos);
    CHECK(parse_error("variant = \"sideways\"\n").find("unknown variant") != std::string::npos);
    CHECK(parse_error("theta = 0.1\ntheta_deg = 30\n").find("not both") != std::string::npos);
    CHECK(parse_error("p1x = 0\n").find("all six") != std::string::npos);
    CHECK(parse_error("seed = -4\n").find("non-negative") != std::string::npos);

    // Invariant violations surface as configuration errors naming the field.
    CHECK(parse_error("d1 = -3\n").find("d1") != std::string::npos);
    CHECK(parse_error("theta = 3.2\n").find("theta") != std::string::npos);
    CHECK(parse_error("dt = 0\n").find("dt") != std::string::npos);
}

TEST_CASE("figure presets") {
    CHECK(figure_scenario("collinear-stationary", 1).spec.c == 1.0);
    CHECK(figure_scenario("collinear-moving", 1).spec.c == -1.0);
    CHECK(figure_scenario("triangle", 1).spec.theta == doctest::Approx(kPi / 3.0));
    CHECK_THROWS_AS(figure_scenario("hexagon", 1), ConfigError);
}

TEST_CASE("trajectory CSV round-trips at full precision") {
    Scenario sc = figure_scenario("collinear-stationary", 3);
    sc.horizon = 1.0;
    const SimResult r = simulate(sc);
    REQUIRE(r.report.has_value());

    std::stringstream buf;
    write_trajectory_csv(buf, r.trajectory);
    std::string header;
    std::getline(buf, header);
    CHECK(header == "t,p1x,p1y,p2x,p2y,p3x,p3y,e1,e2,e3,gamma,cross,speed1,speed2,speed3");
    buf.seekg(0);

    const auto rows = read_trajectory_csv(buf);
    REQUIRE(rows.size() == r.trajectory.samples.size());
    for (size_t i = 0; i < rows.size(); ++i) {
        CHECK(rows[i][0] == r.trajectory.times[i]);
        for (int k = 0; k < 6; ++k) {
            CHECK(rows[i][static_cast<size_t>(k + 1)] ==
                  r.trajectory.samples[i][static_cast<size_t>(k)]);
        }
        CHECK(rows[i][7] == r.trajectory.derived[i].e1);
        CHECK(rows[i][10] == r.trajectory.derived[i].gamma);
        CHECK(rows[i][14] == r.trajectory.derived[i].speed3);
    }

    std::istringstream bad("wrong,header\n");
    CHECK_THROWS_AS(read_trajectory_csv(bad), ConfigError);
}

TEST_CASE("report document") {
    Scenario sc = figure_scenario("collinear-stationary", 4);
    sc.horizon = 5.0;
    const SimResult r = simulate(sc);
    REQUIRE(r.report.has_value());
    std::ostringstream out;
    write_report(out, sc, *r.report);
    const std::string text = out.str();
    CHECK(text.find("scenario.variant = biased-collinear") != std::string::npos);
    CHECK(text.find("result.classification = ") != std::string::npos);
    CHECK(text.find("result.min_link_distance = ") != std::string::npos);
}

TEST_CASE("cmd_analyze output") {
    std::ostringstream out;
    CHECK(cmd_analyze(30.0, 10.0, 0.0, 1.0, out) == exit_code::ok);
    const std::string text = out.str();
    CHECK(text.find("closed-form eigenvalues: -1, -3, -0.26666666666666") !=
          std::string::npos);
    CHECK(text.find("hurwitz: true") != std::string::npos);

    std::ostringstream neg;
    CHECK(cmd_analyze(30.0, 10.0, 0.0, -1.0, neg) == exit_code::ok);
    CHECK(neg.str().find("hurwitz: false") != std::string::npos);

    std::ostringstream tri;
    CHECK(cmd_analyze(1.0, 1.0, kPi / 2.0, 0.1, tri) == exit_code::ok);
    CHECK(tri.str().find("-2.07071") != std::string::npos);

    std::ostringstream bad;
    CHECK(cmd_analyze(-30.0, 10.0, 0.0, 1.0, bad) == exit_code::config_error);
}

TEST_CASE("cmd_sweep_theta emits one row per grid point") {
    TempDir tmp;
    std::ostringstream log;
    REQUIRE(cmd_sweep_theta(30.0, 10.0, 0.01, kPi / 36.0, tmp.path.string(), log) ==
            exit_code::ok);

    std::ifstream csv(tmp.path / "sweep_theta.csv");
    REQUIRE(csv.good());
    std::string header;
    std::getline(csv, header);
    CHECK(header == "theta,max_real_eig,hurwitz");

    int rows = 0, hurwitz_true = 0, zero_row = 0;
    std::string line;
    while (std::getline(csv, line)) {
        ++rows;
        if (line.find(",true") != std::string::npos) ++hurwitz_true;
        if (line.rfind("0,", 0) == 0) ++zero_row;
    }
    CHECK(rows == 69);  // multiples of pi/36 inside +/-0.97 pi
    CHECK(hurwitz_true == rows);
    CHECK(zero_row == 1);

    // c = 0 leaves the third direction marginal: nothing is Hurwitz.
    std::ostringstream log2;
    REQUIRE(cmd_sweep_theta(30.0, 10.0, 0.0, kPi / 36.0, tmp.path.string(), log2) ==
            exit_code::ok);
    std::ifstream csv2(tmp.path / "sweep_theta.csv");
    std::getline(csv2, header);
    while (std::getline(csv2, line)) {
        CHECK(line.find(",false") != std::string::npos);
    }

    // Negative gain: the flat-angle row is unstable.
    std::ostringstream log3;
    REQUIRE(cmd_sweep_theta(30.0, 10.0, -0.5, kPi / 36.0, tmp.path.string(), log3) ==
            exit_code::ok);
    std::ifstream csv3(tmp.path / "sweep_theta.csv");
    std::getline(csv3, header);
    bool zero_theta_unstable = false;
    while (std::getline(csv3, line)) {
        if (line.rfind("0,", 0) == 0) zero_theta_unstable = line.find(",false") != std::string::npos;
    }
    CHECK(zero_theta_unstable);

    std::ostringstream log4;
    CHECK(cmd_sweep_theta(30.0, 10.0, 0.01, -1.0, tmp.path.string(), log4) ==
          exit_code::config_error);
}

TEST_CASE("CLI process exit codes") {
    TempDir tmp;
    const std::string ok = tmp.file("ok.toml", "horizon = 1.0\n");
    const std::string bad = tmp.file("bad.toml", "d1 = -3\n");
    const std::string coincident = tmp.file(
        "coincident.toml", "p1x = 5\np1y = 5\np2x = 5\np2y = 5\np3x = 5\np3y = 5\n");

    CHECK(run_cli("--out " + tmp.path.string() + " run " + ok) == 0);
    CHECK(run_cli("--out " + tmp.path.string() + " run " + bad) == 1);
    CHECK(run_cli("--out " + tmp.path.string() + " run " + coincident) == 2);
    CHECK(run_cli("--out " + tmp.path.string() + " run /nonexistent/file.toml") == 1);
    CHECK(run_cli("--out " + tmp.path.string() + " figure hexagon") == 1);
    CHECK(run_cli("analyze --d1 30 --d2 10 --theta 0 --c 1") == 0);
    CHECK(run_cli("analyze --d1 -30 --d2 10 --theta 0 --c 1") == 1);

    // The run artifacts exist and carry the expected header.
    std::ifstream csv(tmp.path / "ok_trajectory.csv");
    REQUIRE(csv.good());
    std::string header;
    std::getline(csv, header);
    CHECK(header.rfind("t,p1x", 0) == 0);
}

TEST_CASE("fault injection makes selftest fail with the property named") {
    const std::string out_file =
        (fs::temp_directory_path() / "triflex_selftest_fault.txt").string();
    const std::string cmd = std::string(TRIFLEX_CLI_PATH) +
                            " selftest --inject-fault a3-sign > " + out_file + " 2>&1";
    const int status = std::system(cmd.c_str());
    CHECK(WEXITSTATUS(status) == 3);
    std::ifstream f(out_file);
    std::stringstream ss;
    ss << f.rdbuf();
    const std::string text = ss.str();
    CHECK(text.find("[FAIL] analysis/angle-partial-a3-positive") != std::string::npos);
    fs::remove(out_file);
}
