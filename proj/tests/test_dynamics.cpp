#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "triflex/dynamics.hpp"
#include "triflex/rng.hpp"
#include "triflex/sim.hpp"

using namespace triflex;

namespace {

FormationSpec spec_collinear(double d1, double d2, double c) {
    FormationSpec s;
    s.d1 = d1;
    s.d2 = d2;
    s.c = c;
    return s;
}

FormationState random_state(Rng& rng, double box) {
    const FormationSpec probe = spec_collinear(1.0, 1.0, 0.0);
    return random_initial(rng.next_u64(), probe, box);
}

double controls_gap(const AgentControls& a, const AgentControls& b) {
    return std::max({(a.u1 - b.u1).norm(), (a.u2 - b.u2).norm(), (a.u3 - b.u3).norm()});
}

double max_speed(const AgentControls& u) {
    return std::max({u.u1.norm(), u.u2.norm(), u.u3.norm()});
}

}  // namespace

TEST_CASE("relative_vectors") {
    const FormationState s{{0.0, 0.0}, {2.0, 0.0}, {3.0, 1.0}};
    const RelVectors z = relative_vectors(s);
    CHECK(z.z1.x == -2.0);
    CHECK(z.z1.y == 0.0);
    CHECK(z.z2.x == -1.0);
    CHECK(z.z2.y == -1.0);
    CHECK(z.z3.x == 3.0);
    CHECK(z.z3.y == 1.0);

    Rng rng(11);
    for (int i = 0; i < 100; ++i) {
        const RelVectors r = relative_vectors(random_state(rng, 50.0));
        CHECK((r.z1 + r.z2 + r.z3).norm() < 1e-13);
    }

    // Coincident agents are representable; only normalization rejects them.
    const FormationState same{{5.0, 5.0}, {5.0, 5.0}, {5.0, 5.0}};
    const RelVectors rz = relative_vectors(same);
    CHECK(rz.z1.norm() == 0.0);
    CHECK_THROWS_AS(control_unbiased(same, spec_collinear(1.0, 1.0, 0.0)), DegenerateVector);
}

TEST_CASE("d3_of") {
    CHECK(d3_of(spec_collinear(30.0, 10.0, 0.0)) == doctest::Approx(40.0).epsilon(1e-14));

    FormationSpec s = spec_collinear(30.0, 10.0, 0.0);
    s.theta = kPi;  // formula limit |d1 - d2|; the spec invariant excludes pi itself
    CHECK(d3_of(s) == doctest::Approx(20.0).epsilon(1e-12));

    s.theta = kPi / 3.0;
    CHECK(d3_of(s) == doctest::Approx(std::sqrt(1300.0)).epsilon(1e-14));
    CHECK(d3_of(s) == doctest::Approx(36.05551).epsilon(1e-6));
}

TEST_CASE("distance_errors") {
    const FormationSpec spec = spec_collinear(30.0, 10.0, 0.0);
    const ErrorVec e0 =
        distance_errors({{0.0, 0.0}, {30.0, 0.0}, {40.0, 0.0}}, spec);
    CHECK(std::abs(e0.e1) < 1e-13);
    CHECK(std::abs(e0.e2) < 1e-13);
    CHECK(std::abs(e0.e3) < 1e-13);

    const ErrorVec e1 =
        distance_errors({{0.0, 0.0}, {31.0, 0.0}, {40.0, 0.0}}, spec);
    CHECK(e1.e1 == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(e1.e2 == doctest::Approx(-1.0).epsilon(1e-13));
    CHECK(std::abs(e1.e3) < 1e-13);

    FormationSpec tri = spec_collinear(1.0, 1.0, 0.0);
    tri.theta = kPi / 3.0;
    const Vec2 w{1.0, 0.0};
    const Vec2 w2 = rot2(tri.theta).apply(w);
    const FormationState exact{w * 1.0, {0.0, 0.0}, -w2 * 1.0};
    const ErrorVec et = distance_errors(exact, tri);
    CHECK(std::abs(et.e1) < 1e-12);
    CHECK(std::abs(et.e2) < 1e-12);
    CHECK(std::abs(et.e3) < 1e-12);
}

TEST_CASE("errors from a state satisfy the triangle inequality") {
    Rng rng(12);
    const FormationSpec spec = spec_collinear(30.0, 10.0, 0.0);
    for (int i = 0; i < 200; ++i) {
        const ErrorVec e = distance_errors(random_state(rng, 80.0), spec);
        const double n1 = e.e1 + spec.d1;
        const double n2 = e.e2 + spec.d2;
        const double n3 = e.e3 + d3_of(spec);
        CHECK(n1 > 0.0);
        CHECK(n2 > 0.0);
        CHECK(n3 > 0.0);
        CHECK(n1 + n2 >= n3 - 1e-9);
        CHECK(n2 + n3 >= n1 - 1e-9);
        CHECK(n3 + n1 >= n2 - 1e-9);
    }
}

TEST_CASE("shape_potential and its gradient") {
    const FormationSpec spec = spec_collinear(30.0, 10.0, 0.0);
    CHECK(shape_potential({{0.0, 0.0}, {30.0, 0.0}, {40.0, 0.0}}, spec) < 1e-20);
    CHECK(shape_potential({{0.0, 0.0}, {31.0, 0.0}, {41.0, 0.0}}, spec) ==
          doctest::Approx(0.5).epsilon(1e-12));

    // Finite differences of the potential must match the negated controls
    // stacked per agent (the loop is exactly the gradient descent).
    Rng rng(13);
    for (int trial = 0; trial < 20; ++trial) {
        const FormationState s = random_state(rng, 40.0);
        const AgentControls u = control_unbiased(s, spec);
        const double h = 1e-6;
        double grad[6];
        StateVec x = pack_state(s);
        for (int k = 0; k < 6; ++k) {
            StateVec lo = x, hi = x;
            lo[static_cast<size_t>(k)] -= h;
            hi[static_cast<size_t>(k)] += h;
            grad[k] = (shape_potential(unpack_state(hi), spec) -
                       shape_potential(unpack_state(lo), spec)) /
                      (2.0 * h);
        }
        const double stacked[6] = {-u.u1.x, -u.u1.y, -u.u2.x, -u.u2.y, -u.u3.x, -u.u3.y};
        for (int k = 0; k < 6; ++k) {
            CHECK(std::abs(grad[k] - stacked[k]) < 1e-6);
        }
    }
}

TEST_CASE("control_unbiased") {
    FormationSpec spec = spec_collinear(30.0, 10.0, 0.0);
    const AgentControls zero =
        control_unbiased({{0.0, 0.0}, {30.0, 0.0}, {40.0, 0.0}}, spec);
    CHECK(max_speed(zero) < 1e-13);

    // Link 1 one unit too long pulls agent 1 toward agent 2.
    FormationSpec s2 = spec_collinear(1.0, 1.0, 0.0);
    const AgentControls u = control_unbiased({{0.0, 0.0}, {2.0, 0.0}, {2.0, 1.0}}, s2);
    CHECK(u.u1.x == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(u.u1.y == 0.0);

    Rng rng(14);
    for (int i = 0; i < 100; ++i) {
        const AgentControls c = control_unbiased(random_state(rng, 50.0), spec);
        CHECK((c.u1 + c.u2 + c.u3).norm() < 1e-12);
    }
}

TEST_CASE("control_biased") {
    const FormationSpec spec = spec_collinear(30.0, 10.0, 0.0);
    Rng rng(15);
    for (int i = 0; i < 100; ++i) {
        const FormationState s = random_state(rng, 50.0);
        CHECK(controls_gap(control_biased(s, 0.0, 0.0, spec), control_unbiased(s, spec)) ==
              0.0);
    }

    // Aligned zero-error configuration is stationary under mu1 = -mu2 = 1.
    const AgentControls ud =
        control_biased({{0.0, 0.0}, {30.0, 0.0}, {40.0, 0.0}}, 1.0, -1.0, spec);
    CHECK(max_speed(ud) < 1e-13);

    // Anti-aligned configuration with e1 = e2 = 2/3 drifts as one body
    // (gain c = -1): every agent moves at (-2/3, 0).
    const double third2 = 2.0 / 3.0;
    const FormationState uu{{30.0 + third2, 0.0}, {0.0, 0.0}, {10.0 + third2, 0.0}};
    const AgentControls mv = control_biased(uu, -1.0, 1.0, spec);
    for (const Vec2& v : {mv.u1, mv.u2, mv.u3}) {
        CHECK(v.x == doctest::Approx(-third2).epsilon(1e-13));
        CHECK(std::abs(v.y) < 1e-13);
    }
}

TEST_CASE("control_rotated") {
    FormationSpec spec = spec_collinear(30.0, 10.0, 1.0);
    spec.variant = Variant::RotatedSplit;
    spec.theta = 0.0;

    Rng rng(16);
    for (int i = 0; i < 100; ++i) {
        const FormationState s = random_state(rng, 50.0);
        CHECK(controls_gap(control_rotated(s, spec), control_biased(s, 1.0, -1.0, spec)) <
              1e-14);
    }

    // Stationary on the rotated target set.
    FormationSpec tri = spec_collinear(3.0, 2.0, 0.25);
    tri.variant = Variant::RotatedSplit;
    tri.theta = 2.0 * kPi / 5.0;
    const Vec2 w = unit({0.3, -0.8});
    const FormationState target{Vec2{1.0, 2.0} + w * tri.d1, {1.0, 2.0},
                                Vec2{1.0, 2.0} - rot2(tri.theta).apply(w) * tri.d2};
    CHECK(max_speed(control_rotated(target, tri)) < 1e-12);

    // Same target set for the one-sided form.
    tri.variant = Variant::RotatedOneSided;
    CHECK(max_speed(control_rotated(target, tri)) < 1e-12);

    // Rigid-motion equivariance of the dispatch for all variants.
    for (Variant v : {Variant::Unbiased, Variant::BiasedCollinear, Variant::RotatedSplit,
                      Variant::RotatedOneSided}) {
        FormationSpec vs = spec_collinear(30.0, 10.0, 0.7);
        vs.variant = v;
        vs.theta = (v == Variant::RotatedSplit || v == Variant::RotatedOneSided)
                       ? kPi / 3.0
                       : 0.0;
        for (int i = 0; i < 30; ++i) {
            const FormationState s = random_state(rng, 40.0);
            const SE2Transform g{rot2(rng.uniform(-kPi, kPi)),
                                 {rng.uniform(-20.0, 20.0), rng.uniform(-20.0, 20.0)}};
            const AgentControls u = control_for(s, vs);
            const AgentControls ug = control_for(se2_apply(s, g), vs);
            const AgentControls want{g.R.apply(u.u1), g.R.apply(u.u2), g.R.apply(u.u3)};
            CHECK(controls_gap(ug, want) < 1e-12);
        }
    }
}

TEST_CASE("gamma_of_e") {
    FormationSpec spec = spec_collinear(30.0, 10.0, 0.0);
    spec.theta = kPi / 3.0;
    CHECK(gamma_of_e(ErrorVec{}, spec) == doctest::Approx(kPi / 3.0).epsilon(1e-13));

    spec.theta = 0.0;
    CHECK(gamma_of_e(ErrorVec{}, spec) == 0.0);

    // Anti-aligned travelling shape expressed in error coordinates.
    const ErrorVec uu{2.0 / 3.0, 2.0 / 3.0, -20.0};
    CHECK(gamma_of_e(uu, spec) == doctest::Approx(kPi).epsilon(1e-13));

    CHECK_THROWS_AS(gamma_of_e(ErrorVec{-31.0, 0.0, 0.0}, spec), InvalidErrorVec);
}

TEST_CASE("error_field_mixed") {
    // Aligned zero-error point: everything is stationary.
    const Vec2 w{1.0, 0.0};
    const MixedDerivative at_ud = error_field_mixed(w * 30.0, w * 10.0, 0.0, 0.0, 1.0);
    CHECK(at_ud.dz1.norm() < 1e-14);
    CHECK(at_ud.dz2.norm() < 1e-14);
    CHECK(std::abs(at_ud.de1) < 1e-14);
    CHECK(std::abs(at_ud.de2) < 1e-14);

    // Anti-aligned point with e1 = e2 = -2c/3 for c = 1.
    const double e = -2.0 / 3.0;
    const MixedDerivative at_uu =
        error_field_mixed(w * (30.0 + e), -w * (10.0 + e), e, e, 1.0);
    CHECK(at_uu.dz1.norm() < 1e-13);
    CHECK(at_uu.dz2.norm() < 1e-13);
    CHECK(std::abs(at_uu.de1) < 1e-13);
    CHECK(std::abs(at_uu.de2) < 1e-13);

    // Chain rule: the error rates are the radial components of the link rates.
    Rng rng(17);
    for (int i = 0; i < 100; ++i) {
        const FormationState s = random_state(rng, 50.0);
        const RelVectors z = relative_vectors(s);
        const double e1 = z.z1.norm() - 30.0;
        const double e2 = z.z2.norm() - 10.0;
        const double c = rng.uniform(-2.0, 2.0);
        const MixedDerivative d = error_field_mixed(z.z1, z.z2, e1, e2, c);
        CHECK(std::abs(d.de1 - unit(z.z1).dot(d.dz1)) < 1e-12);
        CHECK(std::abs(d.de2 - unit(z.z2).dot(d.dz2)) < 1e-12);
    }
}

TEST_CASE("error_field_collinear") {
    FormationSpec spec = spec_collinear(30.0, 10.0, 0.5);
    const ErrorVec zero = error_field_collinear(ErrorVec{}, spec);
    CHECK(std::abs(zero.e1) < 1e-14);
    CHECK(std::abs(zero.e2) < 1e-14);
    CHECK(std::abs(zero.e3) < 1e-14);

    spec.c = -1.0;
    const ErrorVec at_uu = error_field_collinear({2.0 / 3.0, 2.0 / 3.0, -20.0}, spec);
    CHECK(std::abs(at_uu.e1) < 1e-13);
    CHECK(std::abs(at_uu.e2) < 1e-13);
    CHECK(std::abs(at_uu.e3) < 1e-13);

    CHECK_THROWS_AS(error_field_collinear({-31.0, 0.0, 0.0}, spec), InvalidErrorVec);

    // Against the mixed-coordinates loop evaluated on an actual state,
    // with the third-side rate taken from the unit-vector inner products.
    Rng rng(18);
    spec.c = 1.0;
    for (int i = 0; i < 200; ++i) {
        const FormationState s = random_state(rng, 60.0);
        const RelVectors z = relative_vectors(s);
        const ErrorVec e = distance_errors(s, spec);
        const MixedDerivative m = error_field_mixed(z.z1, z.z2, e.e1, e.e2, spec.c);
        const double de3 =
            unit(z.z3).dot(unit(z.z1)) * e.e1 + unit(z.z3).dot(unit(z.z2)) * e.e2;
        const ErrorVec f = error_field_collinear(e, spec);
        CHECK(std::abs(f.e1 - m.de1) < 1e-10);
        CHECK(std::abs(f.e2 - m.de2) < 1e-10);
        CHECK(std::abs(f.e3 - de3) < 1e-10);
    }
}

TEST_CASE("error_field_rotated") {
    FormationSpec spec = spec_collinear(30.0, 10.0, 0.1);
    spec.variant = Variant::RotatedSplit;

    for (double theta : {-2.0, -0.5, 0.5, 2.0}) {
        spec.theta = theta;
        const ErrorVec zero = error_field_rotated(ErrorVec{}, spec);
        CHECK(std::abs(zero.e1) < 1e-14);
        CHECK(std::abs(zero.e2) < 1e-14);
        CHECK(std::abs(zero.e3) < 1e-14);
    }

    // theta -> 0 with sign(0) = +1 reduces to the collinear field. Error
    // vectors are drawn from realizable shapes (lengths plus an angle), so
    // the law-of-cosines quotient stays inside [-1, 1].
    Rng rng(19);
    for (int i = 0; i < 100; ++i) {
        FormationSpec flat = spec;
        flat.theta = 0.0;
        const double n1 = rng.uniform(20.0, 40.0);
        const double n2 = rng.uniform(5.0, 15.0);
        const double g = rng.uniform(0.1, kPi - 0.1);
        const double n3 = std::sqrt(n1 * n1 + n2 * n2 + 2.0 * n1 * n2 * std::cos(g));
        const ErrorVec e{n1 - flat.d1, n2 - flat.d2, n3 - d3_of(flat)};

        const ErrorVec a = error_field_rotated(e, flat);
        const ErrorVec b = error_field_collinear(e, flat);
        CHECK(std::abs(a.e1 - b.e1) < 1e-13);
        CHECK(std::abs(a.e2 - b.e2) < 1e-13);
        CHECK(std::abs(a.e3 - b.e3) < 1e-13);

        flat.theta = 1e-8;
        const ErrorVec c = error_field_rotated(e, flat);
        CHECK(std::abs(c.e1 - b.e1) < 1e-9);
        CHECK(std::abs(c.e2 - b.e2) < 1e-9);
        CHECK(std::abs(c.e3 - b.e3) < 1e-9);
    }
}
