#include "triflex/commands.hpp"

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>

#include "triflex/analysis.hpp"
#include "triflex/scenario_io.hpp"
#include "triflex/sim.hpp"

namespace triflex {

namespace {

namespace fs = std::filesystem;

int run_scenario_to_files(const Scenario& sc, const std::string& stem,
                          const std::string& out_dir, std::ostream& log) {
    fs::create_directories(out_dir);
    const fs::path csv_path = fs::path(out_dir) / (stem + "_trajectory.csv");
    const fs::path report_path = fs::path(out_dir) / (stem + "_report.txt");

    const SimResult res = simulate(sc);

    {
        std::ofstream csv(csv_path);
        if (!csv) {
            log << "error: cannot write " << csv_path.string() << '\n';
            return exit_code::config_error;
        }
        write_trajectory_csv(csv, res.trajectory);
    }
    log << "trajectory: " << csv_path.string() << " (" << res.trajectory.samples.size()
        << " samples)\n";

    if (res.trajectory.aborted) {
        log << "error: degeneracy abort at t = " << format_double(res.trajectory.abort_time)
            << ": " << res.trajectory.abort_reason << '\n';
        return exit_code::degeneracy;
    }

    {
        std::ofstream rep(report_path);
        write_report(rep, sc, *res.report);
    }
    write_report(log, sc, *res.report);
    log << "report: " << report_path.string() << '\n';
    return exit_code::ok;
}

void print_matrix(std::ostream& out, const Matrix3& m) {
    for (int i = 0; i < 3; ++i) {
        out << "  [";
        for (int j = 0; j < 3; ++j) {
            out << (j ? ", " : " ") << std::setw(12) << m(i, j);
        }
        out << " ]\n";
    }
}

void print_eigs(std::ostream& out, const EigenTriple& eig) {
    for (const auto& v : eig) {
        out << "  " << format_double(v.real());
        if (v.imag() != 0.0) out << (v.imag() > 0 ? " + " : " - ")
                                 << format_double(std::abs(v.imag())) << "i";
        out << '\n';
    }
}

}  // namespace

int cmd_run(const std::string& scenario_path, const std::string& out_dir, std::ostream& log) {
    Scenario sc;
    try {
        sc = load_scenario(scenario_path);
    } catch (const ConfigError& e) {
        log << "configuration error: " << e.what() << '\n';
        return exit_code::config_error;
    }
    const std::string stem = fs::path(scenario_path).stem().string();
    return run_scenario_to_files(sc, stem, out_dir, log);
}

int cmd_figure(const std::string& name, std::uint64_t seed, const std::string& out_dir,
               std::ostream& log) {
    Scenario sc;
    try {
        sc = figure_scenario(name, seed);
    } catch (const ConfigError& e) {
        log << "configuration error: " << e.what() << '\n';
        return exit_code::config_error;
    }
    log << "figure " << name << ", seed " << seed << '\n';
    return run_scenario_to_files(sc, name + "_seed" + std::to_string(seed), out_dir, log);
}

int cmd_analyze(double d1, double d2, double theta, double c, std::ostream& out) {
    try {
        FormationSpec spec;
        spec.d1 = d1;
        spec.d2 = d2;
        spec.theta = theta;
        spec.c = c;
        spec.validate();

        const Matrix3 j = jacobian_rotated(d1, d2, theta, c);
        out << "jacobian (d1 = " << d1 << ", d2 = " << d2 << ", theta = " << theta
            << ", c = " << c << ")";
        if (theta == 0.0) out << " [collinear form]";
        out << ":\n";
        print_matrix(out, j);

        const StabilityReport rep = is_hurwitz(j);
        if (theta == 0.0) {
            const double a = (d1 + d2) / (d1 * d2);
            out << "closed-form eigenvalues: -1, -3, " << format_double(-2.0 * c * a) << '\n';
        }
        out << "numeric eigenvalues:\n";
        print_eigs(out, rep.eigenvalues);
        out << "max real part: " << format_double(rep.margin) << '\n';
        out << "hurwitz: " << (rep.hurwitz ? "true" : "false") << '\n';
        return exit_code::ok;
    } catch (const Error& e) {
        out << "configuration error: " << e.what() << '\n';
        return exit_code::config_error;
    }
}

int cmd_sweep_theta(double d1, double d2, double c, double step, const std::string& out_dir,
                    std::ostream& log) {
    if (!(step > 0.0) || !(d1 > 0.0) || !(d2 > 0.0)) {
        log << "configuration error: need d1, d2, step > 0\n";
        return exit_code::config_error;
    }
    fs::create_directories(out_dir);
    const fs::path csv_path = fs::path(out_dir) / "sweep_theta.csv";
    std::ofstream csv(csv_path);
    if (!csv) {
        log << "error: cannot write " << csv_path.string() << '\n';
        return exit_code::config_error;
    }

    csv << "theta,max_real_eig,hurwitz\n";
    const int kmax = static_cast<int>(std::floor(0.97 * kPi / step));
    for (int k = -kmax; k <= kmax; ++k) {
        const double theta = k * step;
        if (std::abs(theta) >= 0.97 * kPi) continue;
        const Matrix3 j = (k == 0) ? jacobian_collinear(d1, d2, c)
                                   : jacobian_rotated(d1, d2, theta, c);
        const StabilityReport rep = is_hurwitz(j);
        csv << format_double(theta) << ',' << format_double(rep.margin) << ','
            << (rep.hurwitz ? "true" : "false") << '\n';
    }
    log << "sweep: " << csv_path.string() << '\n';
    return exit_code::ok;
}

int cmd_selftest(std::ostream& out, FaultInjection fault) {
    const auto results = run_selftest(out, fault);
    for (const auto& r : results) {
        if (!r.pass) return exit_code::selftest_failure;
    }
    return exit_code::ok;
}

}  // namespace triflex
