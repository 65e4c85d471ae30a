#include "triflex/selftest.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <ostream>
#include <sstream>

#include "triflex/analysis.hpp"
#include "triflex/commands.hpp"
#include "triflex/rng.hpp"
#include "triflex/scenario_io.hpp"
#include "triflex/sim.hpp"

namespace triflex {

namespace {

struct Checker {
    std::ostream& out;
    std::vector<CheckResult> results;

    void run(const std::string& name, const std::function<std::string()>& body) {
        CheckResult r;
        r.name = name;
        try {
            r.detail = body();  // empty string = pass
            r.pass = r.detail.empty();
        } catch (const std::exception& e) {
            r.pass = false;
            r.detail = std::string("exception: ") + e.what();
        }
        out << (r.pass ? "[PASS] " : "[FAIL] ") << r.name;
        if (!r.pass) out << " -- " << r.detail;
        out << '\n';
        results.push_back(std::move(r));
    }
};

std::string fmt(double v) { return format_double(v); }

Vec2 random_dir(Rng& rng) {
    const double a = rng.uniform(0.0, 2.0 * kPi);
    return {std::cos(a), std::sin(a)};
}

FormationSpec collinear_spec(double d1, double d2, double c) {
    FormationSpec s;
    s.d1 = d1;
    s.d2 = d2;
    s.theta = 0.0;
    s.c = c;
    s.variant = Variant::BiasedCollinear;
    return s;
}

/// Exact stationary-collinear configuration along `dir`, middle agent at q.
FormationState aligned_state(const FormationSpec& spec, const Vec2& q, const Vec2& dir) {
    return {q + dir * spec.d1, q, q - dir * spec.d2};
}

/// Exact travelling-collinear configuration for the spec's gain.
FormationState travelling_state(const FormationSpec& spec, const Vec2& q, const Vec2& dir) {
    const double e_star = -2.0 * spec.c / 3.0;
    return {q + dir * (spec.d1 + e_star), q, q + dir * (spec.d2 + e_star)};
}

/// Exact rotated-target configuration: ||z1|| = d1, ||z2|| = d2,
/// rot2(theta) z1_hat = z2_hat.
FormationState triangle_state(const FormationSpec& spec, const Vec2& q, const Vec2& dir) {
    const Vec2 w2 = rot2(spec.theta).apply(dir);
    return {q + dir * spec.d1, q, q - w2 * spec.d2};
}

double control_gap(const AgentControls& a, const AgentControls& b) {
    return std::max({(a.u1 - b.u1).norm(), (a.u2 - b.u2).norm(), (a.u3 - b.u3).norm()});
}

// ---------------------------------------------------------------- geometry

void geometry_checks(Checker& ck) {
    ck.run("geometry/unit-norm", [] {
        Rng rng(101);
        double worst = 0.0;
        for (int i = 0; i < 1000; ++i) {
            const double mag = std::pow(10.0, rng.uniform(-6.0, 6.0));
            const Vec2 v = random_dir(rng) * mag;
            worst = std::max(worst, std::abs(unit(v).norm() - 1.0));
        }
        return worst <= 1e-14 ? "" : "max |norm-1| = " + fmt(worst);
    });

    ck.run("geometry/signed-angle-antisymmetry", [] {
        Rng rng(102);
        for (int i = 0; i < 1000; ++i) {
            const Vec2 u = random_dir(rng) * rng.uniform(0.1, 10.0);
            const Vec2 v = random_dir(rng) * rng.uniform(0.1, 10.0);
            const double a = signed_angle(u, v);
            if (std::abs(a) > kPi - 1e-9) continue;  // both wrap to +pi
            if (std::abs(a + signed_angle(v, u)) > 1e-12) {
                return "violated at a = " + fmt(a);
            }
        }
        return std::string{};
    });

    ck.run("geometry/cross-equals-sin-of-angle", [] {
        Rng rng(103);
        double worst = 0.0;
        for (int i = 0; i < 1000; ++i) {
            const Vec2 u = random_dir(rng) * rng.uniform(0.1, 10.0);
            const Vec2 v = random_dir(rng) * rng.uniform(0.1, 10.0);
            worst = std::max(
                worst, std::abs(cross2(unit(u), unit(v)) - std::sin(signed_angle(u, v))));
        }
        return worst <= 1e-12 ? "" : "max deviation = " + fmt(worst);
    });

    ck.run("geometry/rot2-composition", [] {
        Rng rng(104);
        double worst = 0.0;
        for (int i = 0; i < 1000; ++i) {
            const double a = rng.uniform(-10.0, 10.0);
            const double b = rng.uniform(-10.0, 10.0);
            const Rot2 lhs = rot2(a) * rot2(b);
            const Rot2 rhs = rot2(a + b);
            worst = std::max({worst, std::abs(lhs.c - rhs.c), std::abs(lhs.s - rhs.s)});
        }
        return worst <= 1e-13 ? "" : "max entry deviation = " + fmt(worst);
    });
}

// ---------------------------------------------------------------- dynamics

void dynamics_checks(Checker& ck) {
    ck.run("dynamics/centroid-unbiased", [] {
        const FormationSpec spec = collinear_spec(30.0, 10.0, 0.0);
        double worst = 0.0;
        for (std::uint64_t seed = 1; seed <= 200; ++seed) {
            const FormationState s = random_initial(seed, spec, 50.0);
            const AgentControls u = control_unbiased(s, spec);
            const Vec2 sum = u.u1 + u.u2 + u.u3;
            const double scale = u.u1.norm() + u.u2.norm() + u.u3.norm();
            worst = std::max(worst, sum.norm() / (1.0 + scale));
        }
        return worst <= 1e-15 ? "" : "residual = " + fmt(worst);
    });

    ck.run("dynamics/centroid-biased-drift", [] {
        const FormationSpec spec = collinear_spec(30.0, 10.0, 0.0);
        Rng rng(105);
        double worst = 0.0;
        for (std::uint64_t seed = 1; seed <= 200; ++seed) {
            const FormationState s = random_initial(seed, spec, 50.0);
            const double mu1 = rng.uniform(-2.0, 2.0);
            const double mu2 = rng.uniform(-2.0, 2.0);
            const AgentControls u = control_biased(s, mu1, mu2, spec);
            const RelVectors z = relative_vectors(s);
            const Vec2 want = unit(z.z1) * mu1 + unit(z.z2) * mu2;
            worst = std::max(worst, (u.u1 + u.u2 + u.u3 - want).norm());
        }
        return worst <= 1e-12 ? "" : "residual = " + fmt(worst);
    });

    ck.run("dynamics/se2-equivariance", [] {
        Rng rng(106);
        double worst = 0.0;
        for (Variant variant : {Variant::Unbiased, Variant::BiasedCollinear,
                                Variant::RotatedSplit, Variant::RotatedOneSided}) {
            FormationSpec spec = collinear_spec(30.0, 10.0, 1.0);
            spec.variant = variant;
            if (variant == Variant::RotatedSplit || variant == Variant::RotatedOneSided) {
                spec.theta = kPi / 3.0;
                spec.c = 0.5;
            }
            for (std::uint64_t seed = 1; seed <= 50; ++seed) {
                const FormationState s = random_initial(seed, spec, 40.0);
                const SE2Transform g{rot2(rng.uniform(-kPi, kPi)),
                                     {rng.uniform(-50.0, 50.0), rng.uniform(-50.0, 50.0)}};
                const AgentControls u = control_for(s, spec);
                const AgentControls ug = control_for(se2_apply(s, g), spec);
                const AgentControls want{g.R.apply(u.u1), g.R.apply(u.u2), g.R.apply(u.u3)};
                worst = std::max(worst, control_gap(ug, want));
            }
        }
        return worst <= 1e-12 ? "" : "max velocity mismatch = " + fmt(worst);
    });

    ck.run("dynamics/law-of-cosines-identity", [] {
        const FormationSpec spec = collinear_spec(30.0, 10.0, 0.0);
        double worst = 0.0;
        for (std::uint64_t seed = 1; seed <= 500; ++seed) {
            const FormationState s = random_initial(seed, spec, 60.0);
            const RelVectors z = relative_vectors(s);
            const double lhs = unit(z.z1).dot(unit(z.z2));
            const double rhs = (z.z3.norm2() - z.z1.norm2() - z.z2.norm2()) /
                               (2.0 * z.z1.norm() * z.z2.norm());
            worst = std::max(worst, std::abs(lhs - rhs));
        }
        return worst <= 1e-12 ? "" : "max deviation = " + fmt(worst);
    });

    ck.run("dynamics/mixed-field-matches-length-rates", [] {
        const FormationSpec spec = collinear_spec(30.0, 10.0, 1.0);
        Scenario sc;
        sc.spec = spec;
        sc.initial = random_initial(7, spec, 20.0);
        sc.dt = 1e-4;
        sc.horizon = 0.2;
        sc.record_every = 1;
        const SimResult res = simulate(sc);
        if (res.trajectory.aborted) return std::string("trajectory aborted");
        double worst = 0.0;
        const auto& tr = res.trajectory;
        for (size_t i = 20; i + 20 < tr.samples.size(); i += 40) {
            const RelVectors zm = relative_vectors(unpack_state(tr.samples[i - 1]));
            const RelVectors zp = relative_vectors(unpack_state(tr.samples[i + 1]));
            const RelVectors z = relative_vectors(unpack_state(tr.samples[i]));
            const double fd1 = (zp.z1.norm() - zm.z1.norm()) / (2.0 * sc.dt);
            const double fd2 = (zp.z2.norm() - zm.z2.norm()) / (2.0 * sc.dt);
            const MixedDerivative d = error_field_mixed(
                z.z1, z.z2, z.z1.norm() - spec.d1, z.z2.norm() - spec.d2, spec.c);
            worst = std::max({worst, std::abs(d.de1 - fd1), std::abs(d.de2 - fd2)});
        }
        return worst <= 1e-6 ? "" : "max |de - fd| = " + fmt(worst);
    });

    ck.run("dynamics/fields-vanish-at-equilibria", [] {
        Rng rng(107);
        double worst = 0.0;
        for (int i = 0; i < 50; ++i) {
            const Vec2 q{rng.uniform(-20.0, 20.0), rng.uniform(-20.0, 20.0)};
            const Vec2 dir = random_dir(rng);

            FormationSpec spec = collinear_spec(rng.uniform(3.0, 40.0),
                                                rng.uniform(3.0, 40.0),
                                                rng.uniform(0.2, 2.0));
            AgentControls u = control_for(aligned_state(spec, q, dir), spec);
            worst = std::max({worst, u.u1.norm(), u.u2.norm(), u.u3.norm()});

            // Travelling set: the common drift is 2c/3 along the line, so the
            // shape-space field (velocity differences) must vanish.
            FormationSpec neg = spec;
            neg.c = -spec.c;
            u = control_for(travelling_state(neg, q, dir), neg);
            worst = std::max({worst, (u.u1 - u.u2).norm(), (u.u2 - u.u3).norm()});

            FormationSpec rot = spec;
            rot.variant = Variant::RotatedSplit;
            rot.theta = rng.uniform(-2.8, 2.8);
            rot.c = rng.uniform(0.01, 0.5);
            u = control_for(triangle_state(rot, q, dir), rot);
            worst = std::max({worst, u.u1.norm(), u.u2.norm(), u.u3.norm()});
        }
        return worst <= 1e-12 ? "" : "max residual velocity = " + fmt(worst);
    });
}

// ---------------------------------------------------------------- analysis

void analysis_checks(Checker& ck, FaultInjection fault) {
    ck.run("analysis/collinear-eigenvalue-identity", [] {
        Rng rng(108);
        double worst = 0.0;
        for (int i = 0; i < 1000; ++i) {
            const double d1 = rng.uniform(0.1, 100.0);
            const double d2 = rng.uniform(0.1, 100.0);
            double c = 0.0;
            while (std::abs(c) < 1e-3) c = rng.uniform(-5.0, 5.0);
            const EigenTriple num = eig3(jacobian_collinear(d1, d2, c));
            const EigenTriple want = collinear_eigenvalues(d1, d2, c);
            for (int k = 0; k < 3; ++k) {
                worst = std::max(worst, std::abs(num[static_cast<size_t>(k)] -
                                                 want[static_cast<size_t>(k)]));
            }
        }
        return worst <= 1e-8 ? "" : "max eigenvalue deviation = " + fmt(worst);
    });

    ck.run("analysis/bias-sign-selects-stable-branch", [] {
        Rng rng(109);
        for (int i = 0; i < 50; ++i) {
            const double d1 = rng.uniform(5.0, 50.0);
            const double d2 = d1 * rng.uniform(0.1, 0.8);
            const double c = (rng.next_unit() < 0.5 ? -1.0 : 1.0) * rng.uniform(0.05, 0.5);

            // Stationary branch: only the -2ca eigenvalue can change sign,
            // so sign(c) decides Hurwitz outright.
            const double stat_max = max_real_part(eig3(jacobian_collinear(d1, d2, c)));
            if ((stat_max < 0.0) != (c > 0.0)) {
                return "stationary branch sign failed at c = " + fmt(c) +
                       ", max real part = " + fmt(stat_max);
            }

            // Travelling branch, linearized numerically: the critical
            // eigenvalue carries the sign of c, the rest stay negative.
            FormationSpec spec = collinear_spec(d1, d2, c);
            const ErrorVec at = travelling_equilibrium_errors(spec);
            const auto field = [&spec](const ErrorVec& e) {
                return error_field_collinear(e, spec);
            };
            const ErrorVec f0 = field(at);
            const double f0n = std::max({std::abs(f0.e1), std::abs(f0.e2), std::abs(f0.e3)});
            if (f0n > 1e-9) return "travelling point not an equilibrium, |f| = " + fmt(f0n);
            const double trav_max = max_real_part(eig3(numeric_error_jacobian(field, at)));
            if ((trav_max > 0.0) != (c > 0.0)) {
                return "travelling branch sign failed at c = " + fmt(c) +
                       ", max real part = " + fmt(trav_max);
            }
        }
        return std::string{};
    });

    ck.run("analysis/dominant-eigenvalue-saturates", [] {
        Rng rng(110);
        double worst = 0.0;
        for (int i = 0; i < 500; ++i) {
            const double d1 = rng.uniform(0.5, 50.0);
            const double d2 = rng.uniform(0.5, 50.0);
            const double c = rng.uniform(-5.0, 5.0);
            const double a = (d1 + d2) / (d1 * d2);
            const double dominant = max_real_part(collinear_eigenvalues(d1, d2, c));
            worst = std::max(worst, std::abs(dominant + std::min(1.0, 2.0 * c * a)));
        }
        return worst <= 1e-12 ? "" : "max deviation = " + fmt(worst);
    });

    ck.run("analysis/fd-matches-collinear-jacobian", [] {
        Rng rng(111);
        double worst = 0.0;
        for (int i = 0; i < 20; ++i) {
            const double d1 = (i == 0) ? 30.0 : rng.uniform(0.5, 60.0);
            const double d2 = (i == 0) ? 10.0 : rng.uniform(0.5, 60.0);
            const double c = (i == 0) ? 1.0 : rng.uniform(-2.0, 2.0);
            FormationSpec spec = collinear_spec(d1, d2, c);
            const Matrix3 fd = numeric_error_jacobian(
                [&spec](const ErrorVec& e) { return error_field_collinear(e, spec); },
                ErrorVec{}, 1e-6);
            const Matrix3 an = jacobian_collinear(d1, d2, c);
            for (int r = 0; r < 3; ++r)
                for (int col = 0; col < 3; ++col)
                    worst = std::max(worst, std::abs(fd(r, col) - an(r, col)));
        }
        return worst <= 1e-5 ? "" : "max entry deviation = " + fmt(worst);
    });

    ck.run("analysis/fd-matches-rotated-jacobian", [] {
        double worst = 0.0;
        for (double d1 : {30.0, 1.0, 5.0}) {
            const double d2 = (d1 == 30.0) ? 10.0 : (d1 == 1.0 ? 1.0 : 50.0);
            for (double mag : {kPi / 6.0, kPi / 3.0, 2.0 * kPi / 3.0, 5.0 * kPi / 6.0}) {
                for (double sgn : {-1.0, 1.0}) {
                    for (double c : {0.01, 0.05, 0.1}) {
                        FormationSpec spec;
                        spec.d1 = d1;
                        spec.d2 = d2;
                        spec.theta = sgn * mag;
                        spec.c = c;
                        spec.variant = Variant::RotatedSplit;
                        const Matrix3 fd = numeric_error_jacobian(
                            [&spec](const ErrorVec& e) {
                                return error_field_rotated(e, spec);
                            },
                            ErrorVec{}, 1e-6);
                        const Matrix3 an = jacobian_rotated(d1, d2, spec.theta, c);
                        for (int r = 0; r < 3; ++r)
                            for (int col = 0; col < 3; ++col)
                                worst = std::max(worst, std::abs(fd(r, col) - an(r, col)));
                    }
                }
            }
        }
        return worst <= 1e-5 ? "" : "max entry deviation = " + fmt(worst);
    });

    ck.run("analysis/rotated-jacobian-hurwitz-sweep", [] {
        for (double d1 : {30.0, 1.0, 5.0}) {
            const double d2 = (d1 == 30.0) ? 10.0 : (d1 == 1.0 ? 1.0 : 50.0);
            for (int k = -34; k <= 34; ++k) {
                const double theta = k * kPi / 36.0;
                if (std::abs(theta) >= 0.97 * kPi) continue;
                const StabilityReport rep = is_hurwitz(jacobian_rotated(d1, d2, theta, 0.01));
                if (!rep.hurwitz) {
                    return "not Hurwitz at theta = " + fmt(theta) + ", d1 = " + fmt(d1) +
                           ", margin = " + fmt(rep.margin);
                }
            }
        }
        return std::string{};
    });

    ck.run("analysis/perturbation-lemma-random", [] {
        Rng rng(112);
        int checked = 0;
        for (int i = 0; i < 1000; ++i) {
            const double p1 = rng.uniform(1.5, 4.0);
            const double p2 = rng.uniform(-1.0, 1.0);
            double b = rng.uniform(-1.0, 2.0);
            double c = rng.uniform(-1.0, 2.0);
            if (b + c <= 1e-3) {
                b = std::abs(b) + 0.1;
                c = std::abs(c) + 0.1;
            }
            for (double a : {-1e-2, -1e-3}) {
                const PerturbationCheck pc = lemma1_check(p1, p2, a, b, c);
                if (!(pc.exact_lambda3 > 0.0)) {
                    return "non-positive perturbed eigenvalue at sample " + std::to_string(i);
                }
                if (!pc.sign_agrees) {
                    return "sign disagreement at sample " + std::to_string(i);
                }
                ++checked;
            }
        }
        return checked == 2000 ? std::string{} : std::string("expected 2000 admissible samples");
    });

    ck.run("analysis/angle-partial-a3-positive", [fault] {
        for (int k = -35; k <= 35; ++k) {
            if (k == 0) continue;
            const double theta = k * kPi / 36.0;
            double a3 = partials_a(30.0, 10.0, theta, theta / 2.0).a3;
            if (fault == FaultInjection::FlipA3Sign) a3 = -a3;
            if (!(a3 > 0.0)) {
                return "a3 = " + fmt(a3) + " at theta = " + fmt(theta);
            }
        }
        return std::string{};
    });

    ck.run("analysis/rotated-jacobian-last-row-sum-negative", [] {
        for (int k = -35; k <= 35; ++k) {
            const double theta = k * kPi / 36.0;
            const Matrix3 j = jacobian_rotated(30.0, 10.0, theta, 0.01);
            if (!(j(2, 0) + j(2, 1) < 0.0)) {
                return "row sum " + fmt(j(2, 0) + j(2, 1)) + " at theta = " + fmt(theta);
            }
        }
        return std::string{};
    });
}

// --------------------------------------------------------------------- sim

void sim_checks(Checker& ck) {
    ck.run("sim/rk4-order", [] {
        const FormationSpec spec = collinear_spec(30.0, 10.0, 1.0);
        const FormationState start = random_initial(3, spec, 20.0);
        const double horizon = 2.0;  // transient window; converged states hit roundoff
        auto end_state = [&](double dt) {
            Scenario sc;
            sc.spec = spec;
            sc.initial = start;
            sc.dt = dt;
            sc.horizon = horizon;
            sc.record_every = 1 << 20;  // endpoints only
            const SimResult r = simulate(sc);
            return r.trajectory.samples.back();
        };
        const StateVec ref = end_state(0.04 / 16.0);
        auto err = [&](double dt) {
            const StateVec x = end_state(dt);
            double m = 0.0;
            for (size_t i = 0; i < x.size(); ++i) m = std::max(m, std::abs(x[i] - ref[i]));
            return m;
        };
        const double ratio = err(0.04) / err(0.02);
        return (ratio >= 8.0 && ratio <= 32.0) ? "" : "halving ratio = " + fmt(ratio);
    });

    ck.run("sim/determinism", [] {
        Scenario sc = figure_scenario("collinear-stationary", 5);
        sc.horizon = 10.0;
        const SimResult a = simulate(sc);
        const SimResult b = simulate(sc);
        if (a.trajectory.samples.size() != b.trajectory.samples.size()) {
            return std::string("sample counts differ");
        }
        for (size_t i = 0; i < a.trajectory.samples.size(); ++i) {
            if (std::memcmp(a.trajectory.samples[i].data(), b.trajectory.samples[i].data(),
                            sizeof(double) * a.trajectory.samples[i].size()) != 0) {
                return std::string("samples differ at index ") + std::to_string(i);
            }
        }
        return std::string{};
    });

    ck.run("sim/unbiased-baseline-shape-free", [] {
        FormationSpec spec = collinear_spec(30.0, 10.0, 0.0);
        spec.variant = Variant::Unbiased;
        double gamma[2];
        for (int i = 0; i < 2; ++i) {
            Scenario sc;
            sc.spec = spec;
            sc.seed = 21 + static_cast<std::uint64_t>(i);
            sc.horizon = 60.0;
            const SimResult r = simulate(sc);
            if (!r.report) return std::string("run aborted");
            if (std::abs(r.report->final_errors.e1) > 1e-6 ||
                std::abs(r.report->final_errors.e2) > 1e-6) {
                return std::string("link errors did not vanish");
            }
            gamma[i] = r.report->final_gamma;
        }
        const double span = std::abs(gamma[0] - gamma[1]);
        return span > 0.1 ? "" : "final angles too close, span = " + fmt(span);
    });

    ck.run("sim/travelling-point-escapes-for-positive-gain", [] {
        const FormationSpec spec = collinear_spec(30.0, 10.0, 1.0);
        FormationState s = travelling_state(spec, {0.0, 0.0}, {1.0, 0.0});
        s.p1 += {7e-4, 5e-4};
        s.p2 += {-3e-4, 6e-4};
        s.p3 += {2e-4, -8e-4};
        Scenario sc;
        sc.spec = spec;
        sc.initial = s;
        sc.horizon = 480.0;
        const SimResult r = simulate(sc);
        if (!r.report) return std::string("run aborted");
        if (r.report->classified.cls != EquilibriumClass::StationaryCollinear) {
            return std::string("ended as ") + equilibrium_class_name(r.report->classified.cls);
        }
        return std::string{};
    });

    ck.run("sim/collinear-start-reaches-triangle", [] {
        Scenario sc = figure_scenario("triangle", 0);
        sc.initial = collinear_initial(11, sc.spec, 20.0);
        const SimResult r = simulate(sc);
        if (!r.report) return std::string("run aborted");
        const double err_deg = std::abs(r.report->final_gamma - sc.spec.theta) * 180.0 / kPi;
        if (err_deg > 0.05) return "angle error " + fmt(err_deg) + " deg";
        if (std::abs(r.report->final_errors.e1) > 1e-5 ||
            std::abs(r.report->final_errors.e2) > 1e-5) {
            return std::string("link errors did not settle");
        }
        return std::string{};
    });

    ck.run("sim/min-link-distance-positive", [] {
        for (const auto& name : figure_names()) {
            const Scenario sc = figure_scenario(name, 1);
            const SimResult r = simulate(sc);
            if (!r.report) return name + ": run aborted";
            if (!(r.report->min_link_distance > 0.0)) {
                return name + ": min link distance " + fmt(r.report->min_link_distance);
            }
        }
        return std::string{};
    });
}

// --------------------------------------------------------------------- cli

void cli_checks(Checker& ck) {
    namespace fs = std::filesystem;

    ck.run("cli/csv-round-trip", [] {
        Scenario sc = figure_scenario("collinear-stationary", 9);
        sc.horizon = 2.0;
        const SimResult r = simulate(sc);
        std::stringstream buf;
        write_trajectory_csv(buf, r.trajectory);
        const auto rows = read_trajectory_csv(buf);
        if (rows.size() != r.trajectory.samples.size()) return std::string("row count");
        for (size_t i = 0; i < rows.size(); ++i) {
            const auto& d = r.trajectory.derived[i];
            const double want[15] = {r.trajectory.times[i],  r.trajectory.samples[i][0],
                                     r.trajectory.samples[i][1], r.trajectory.samples[i][2],
                                     r.trajectory.samples[i][3], r.trajectory.samples[i][4],
                                     r.trajectory.samples[i][5], d.e1,
                                     d.e2,                        d.e3,
                                     d.gamma,                     d.cross,
                                     d.speed1,                    d.speed2,
                                     d.speed3};
            for (int col = 0; col < 15; ++col) {
                if (rows[i][static_cast<size_t>(col)] != want[col]) {
                    return "lossy round-trip at row " + std::to_string(i) + " col " +
                           std::to_string(col);
                }
            }
        }
        return std::string{};
    });

    ck.run("cli/exit-codes", [] {
        const fs::path dir = fs::temp_directory_path() / "triflex_selftest";
        fs::create_directories(dir);
        std::ostringstream sink;

        auto write_file = [&](const char* name, const char* body) {
            std::ofstream f(dir / name);
            f << body;
            return (dir / name).string();
        };
        const std::string ok = write_file("ok.toml", "horizon = 1.0\nseed = 4\n");
        const std::string bad = write_file("bad.toml", "d1 = -3\n");
        const std::string coincident = write_file(
            "coincident.toml",
            "p1x = 5\np1y = 5\np2x = 5\np2y = 5\np3x = 5\np3y = 5\nhorizon = 1.0\n");

        std::string msg;
        if (cmd_run(ok, dir.string(), sink) != exit_code::ok) msg = "valid scenario != 0";
        if (msg.empty() && cmd_run(bad, dir.string(), sink) != exit_code::config_error) {
            msg = "negative d1 != 1";
        }
        if (msg.empty() && cmd_run(coincident, dir.string(), sink) != exit_code::degeneracy) {
            msg = "coincident start != 2";
        }
        fs::remove_all(dir);
        return msg;
    });
}

}  // namespace

std::vector<CheckResult> run_selftest(std::ostream& out, FaultInjection fault) {
    Checker ck{out, {}};
    geometry_checks(ck);
    dynamics_checks(ck);
    analysis_checks(ck, fault);
    sim_checks(ck);
    cli_checks(ck);

    int failed = 0;
    for (const auto& r : ck.results) failed += r.pass ? 0 : 1;
    out << (failed == 0 ? "selftest: all " : "selftest: FAILURES ")
        << (failed == 0 ? std::to_string(ck.results.size()) + " properties passed"
                        : std::to_string(failed) + "/" + std::to_string(ck.results.size()))
        << '\n';
    return ck.results;
}

}  // namespace triflex
