#include "triflex/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

namespace triflex {

namespace {

using cd = std::complex<double>;

bool eig_less(const cd& a, const cd& b) {
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
}

void sort_triple(EigenTriple& t) { std::sort(t.begin(), t.end(), eig_less); }

/// Monic cubic x^3 + a2 x^2 + a1 x + a0 evaluated at a complex point.
cd cubic_eval(double a2, double a1, double a0, const cd& x) {
    return ((x + a2) * x + a1) * x + a0;
}

cd cubic_deriv(double a2, double a1, const cd& x) {
    return (3.0 * x + 2.0 * a2) * x + a1;
}

cd polish_root(double a2, double a1, double a0, cd x) {
    for (int it = 0; it < 3; ++it) {
        const cd f = cubic_eval(a2, a1, a0, x);
        const cd df = cubic_deriv(a2, a1, x);
        if (std::abs(df) < 1e-300) break;
        const cd step = f / df;
        x -= step;
        if (std::abs(step) < 1e-15 * (1.0 + std::abs(x))) break;
    }
    return x;
}

/// Roots of the monic quadratic x^2 + b x + c, stable form.
std::pair<cd, cd> solve_quadratic(double b, double c) {
    const double disc = b * b - 4.0 * c;
    if (disc >= 0.0) {
        const double s = std::sqrt(disc);
        const double q = -0.5 * (b + (b >= 0.0 ? s : -s));
        const double x1 = q;
        const double x2 = (q != 0.0) ? c / q : 0.0;
        return {cd{x1}, cd{x2}};
    }
    const double im = 0.5 * std::sqrt(-disc);
    return {cd{-0.5 * b, im}, cd{-0.5 * b, -im}};
}

/// Roots of the monic cubic x^3 + a2 x^2 + a1 x + a0 over the complexes.
EigenTriple solve_cubic(double a2, double a1, double a0) {
    if (a0 == 0.0) {
        // Exact zero root (singular matrix); keep it exact so marginal
        // stability verdicts are deterministic.
        const auto [x1, x2] = solve_quadratic(a2, a1);
        EigenTriple r{cd{0.0}, x1, x2};
        return r;
    }

    // Depress with x = y - a2/3.
    const double shift = a2 / 3.0;
    const double p = a1 - a2 * a2 / 3.0;
    const double q = 2.0 * a2 * a2 * a2 / 27.0 - a2 * a1 / 3.0 + a0;

    EigenTriple roots;
    if (p == 0.0 && q == 0.0) {
        roots = {cd{-shift}, cd{-shift}, cd{-shift}};
        return roots;
    }

    const double disc = 0.25 * q * q + p * p * p / 27.0;
    if (disc > 0.0) {
        // One real root, one conjugate pair. Pick the cube root whose terms
        // add constructively, recover the partner from u v = -p/3.
        const double sq = std::sqrt(disc);
        const double t = (q <= 0.0) ? (-0.5 * q + sq) : (-0.5 * q - sq);
        const double u = std::cbrt(t);
        const double v = (u != 0.0) ? -p / (3.0 * u) : 0.0;
        const double y1 = u + v;
        const double re = -0.5 * y1;
        const double im = 0.5 * std::sqrt(3.0) * std::abs(u - v);
        roots = {cd{y1 - shift}, cd{re - shift, im}, cd{re - shift, -im}};
    } else {
        // Three real roots, trigonometric form.
        const double r = std::sqrt(-p / 3.0);
        double cphi = (r > 0.0) ? std::clamp(-0.5 * q / (r * r * r), -1.0, 1.0) : 1.0;
        const double phi = std::acos(cphi);
        for (int k = 0; k < 3; ++k) {
            roots[static_cast<size_t>(k)] =
                cd{2.0 * r * std::cos((phi - 2.0 * kPi * k) / 3.0) - shift};
        }
    }

    for (auto& x : roots) x = polish_root(a2, a1, a0, x);

    // Restore exact conjugacy if polishing produced a genuine complex pair.
    for (int i = 0; i < 3; ++i) {
        for (int j = i + 1; j < 3; ++j) {
            auto &xi = roots[static_cast<size_t>(i)], &xj = roots[static_cast<size_t>(j)];
            if (std::abs(xi.imag()) > 1e-14 &&
                std::abs(xi - std::conj(xj)) < 1e-8 * (1.0 + std::abs(xi))) {
                const cd w = 0.5 * (xi + std::conj(xj));
                xi = w;
                xj = std::conj(w);
            }
        }
    }
    return roots;
}

}  // namespace

double Matrix3::frobenius() const {
    double s = 0.0;
    for (const auto& row : m)
        for (double v : row) s += v * v;
    return std::sqrt(s);
}

double Matrix3::det() const {
    return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
           m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
           m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
}

double Matrix3::trace() const { return m[0][0] + m[1][1] + m[2][2]; }

double max_real_part(const EigenTriple& eig) {
    double r = eig[0].real();
    for (const auto& v : eig) r = std::max(r, v.real());
    return r;
}

const char* equilibrium_class_name(EquilibriumClass cls) {
    switch (cls) {
        case EquilibriumClass::StationaryCollinear: return "stationary-collinear";
        case EquilibriumClass::TravellingCollinear: return "travelling-collinear";
        case EquilibriumClass::Triangle: return "triangle";
        case EquilibriumClass::NotEquilibrium: return "not-equilibrium";
    }
    return "?";
}

Matrix3 jacobian_collinear(double d1, double d2, double c) {
    if (!(d1 > 0.0 && d2 > 0.0)) {
        throw PreconditionViolated("jacobian_collinear requires d1, d2 > 0");
    }
    const double a = (d1 + d2) / (d1 * d2);
    Matrix3 j;
    j.m[0][0] = -2.0 - c * a;
    j.m[0][1] = 1.0 - c * a;
    j.m[0][2] = c * a;
    j.m[1][0] = 1.0 - c * a;
    j.m[1][1] = -2.0 - c * a;
    j.m[1][2] = c * a;
    j.m[2][0] = -1.0;
    j.m[2][1] = -1.0;
    j.m[2][2] = 0.0;
    return j;
}

EigenTriple collinear_eigenvalues(double d1, double d2, double c) {
    if (!(d1 > 0.0 && d2 > 0.0)) {
        throw PreconditionViolated("collinear_eigenvalues requires d1, d2 > 0");
    }
    const double a = (d1 + d2) / (d1 * d2);
    EigenTriple t{cd{-1.0}, cd{-3.0}, cd{-2.0 * c * a}};
    sort_triple(t);
    return t;
}

LinkAnglePartials partials_a(double d1, double d2, double theta, double alpha) {
    if (!(d1 > 0.0 && d2 > 0.0)) {
        throw PreconditionViolated("partials_a requires d1, d2 > 0");
    }
    if (!(theta > -kPi && theta < kPi)) {
        throw PreconditionViolated("partials_a requires theta in (-pi, pi)");
    }

    double ratio;
    if (theta == 0.0) {
        if (alpha == 0.0) {
            ratio = 0.5;  // alpha = theta/2 limit: sin(theta/2)/sin(theta) -> 1/2
        } else {
            throw SingularAngle("partials_a: theta = 0 has no limit form for alpha = " +
                                std::to_string(alpha));
        }
    } else if (std::abs(theta) < 1e-6 && std::abs(alpha - theta / 2.0) <= 1e-12) {
        ratio = 1.0 / (2.0 * std::cos(theta / 2.0));
    } else {
        ratio = std::sin(theta - alpha) / std::sin(theta);
    }

    const double ct = std::cos(theta);
    const double d3 = std::sqrt(d1 * d1 + d2 * d2 + 2.0 * d1 * d2 * ct);
    LinkAnglePartials a;
    a.a1 = -ratio * (d1 + d2 * ct) / (d1 * d2);
    a.a2 = -ratio * (d2 + d1 * ct) / (d1 * d2);
    a.a3 = ratio * d3 / (d1 * d2);
    return a;
}

Matrix3 jacobian_rotated(double d1, double d2, double theta, double c) {
    if (theta == 0.0) {
        // The unsigned-angle chain rule is non-smooth at collinearity; the
        // collinear Jacobian is the exact linearization there.
        return jacobian_collinear(d1, d2, c);
    }
    const LinkAnglePartials a = partials_a(d1, d2, theta, theta / 2.0);
    const double ct = std::cos(theta);
    const double d3 = std::sqrt(d1 * d1 + d2 * d2 + 2.0 * d1 * d2 * ct);
    Matrix3 j;
    j.m[0][0] = -2.0 + c * a.a1;
    j.m[0][1] = ct + c * a.a2;
    j.m[0][2] = c * a.a3;
    j.m[1][0] = ct + c * a.a1;
    j.m[1][1] = -2.0 + c * a.a2;
    j.m[1][2] = c * a.a3;
    j.m[2][0] = -(d1 + d2 * ct) / d3;
    j.m[2][1] = -(d2 + d1 * ct) / d3;
    j.m[2][2] = 0.0;
    return j;
}

EigenTriple eig3(const Matrix3& m) {
    // Characteristic polynomial: lambda^3 - tr lambda^2 + s lambda - det,
    // s = sum of principal 2x2 minors. Solve on a scaled copy for
    // conditioning, then unscale.
    double scale = 0.0;
    for (const auto& row : m.m)
        for (double v : row) scale = std::max(scale, std::abs(v));
    if (scale == 0.0) return {cd{0.0}, cd{0.0}, cd{0.0}};

    Matrix3 ms = m;
    for (auto& row : ms.m)
        for (double& v : row) v /= scale;

    const double tr = ms.trace();
    const double s = (ms.m[0][0] * ms.m[1][1] - ms.m[0][1] * ms.m[1][0]) +
                     (ms.m[0][0] * ms.m[2][2] - ms.m[0][2] * ms.m[2][0]) +
                     (ms.m[1][1] * ms.m[2][2] - ms.m[1][2] * ms.m[2][1]);
    const double dt = ms.det();

    EigenTriple roots = solve_cubic(-tr, s, -dt);
    for (auto& r : roots) r *= scale;
    sort_triple(roots);
    return roots;
}

StabilityReport is_hurwitz(const Matrix3& m, double margin) {
    StabilityReport rep;
    rep.jacobian = m;
    rep.eigenvalues = eig3(m);
    rep.margin = max_real_part(rep.eigenvalues);
    rep.hurwitz = rep.margin < -margin;
    return rep;
}

Matrix3 lemma1_matrix(double p1, double p2, double a, double b, double c) {
    if (!(p1 > 0.0 && p1 > p2 && p1 * p1 > p2 * p2)) {
        throw PreconditionViolated(
            "lemma1_matrix requires p1 > 0, p1 > p2 and p1^2 > p2^2");
    }
    Matrix3 m;
    m.m[0][0] = p1;
    m.m[0][1] = p2;
    m.m[0][2] = a;
    m.m[1][0] = p2;
    m.m[1][1] = p1;
    m.m[1][2] = a;
    m.m[2][0] = b;
    m.m[2][1] = c;
    m.m[2][2] = 0.0;
    return m;
}

PerturbationCheck lemma1_check(double p1, double p2, double a, double b, double c) {
    const Matrix3 m = lemma1_matrix(p1, p2, a, b, c);
    const double bound = 0.1 * std::min(1.0, p1 * p1 - p2 * p2) / (std::abs(b) + std::abs(c) + 1.0);
    if (!(std::abs(a) <= bound)) {
        throw PreconditionViolated("lemma1_check: |a| outside the smallness regime");
    }

    PerturbationCheck out;
    out.approx_lambda3 = a * (b + c) * (p2 - p1) / (p1 * p1 - p2 * p2);

    const EigenTriple eig = eig3(m);
    const cd* best = &eig[0];
    for (const auto& v : eig) {
        if (std::abs(v) < std::abs(*best)) best = &v;
    }
    out.exact_lambda3 = best->real();

    if (out.approx_lambda3 == 0.0) {
        out.sign_agrees = std::abs(out.exact_lambda3) < 1e-9;
    } else {
        out.sign_agrees = (out.approx_lambda3 > 0.0) == (out.exact_lambda3 > 0.0) &&
                          out.exact_lambda3 != 0.0;
    }
    return out;
}

Matrix2 zdyn_coefficient_matrix(double e_star, double n1, double n2, double c) {
    Matrix2 m;
    m.m[0][0] = -(2.0 * e_star - c) / n1;
    m.m[0][1] = (e_star + c) / n2;
    m.m[1][0] = (e_star + c) / n1;
    m.m[1][1] = -(2.0 * e_star - c) / n2;
    return m;
}

EquilibriumReport classify_equilibrium(const FormationState& s, const FormationSpec& spec,
                                       double tol) {
    const RelVectors z = relative_vectors(s);
    const Vec2 z1h = unit(z.z1);
    const Vec2 z2h = unit(z.z2);
    const ErrorVec e = distance_errors(s, spec);
    const AgentControls u = control_for(s, spec);

    EquilibriumReport rep;
    const double e_star = 0.5 * (e.e1 + e.e2);
    rep.cond1_res = (2.0 + z1h.dot(z2h)) * (e.e2 - e.e1);
    rep.zeq_res = (z2h - z1h).norm() * std::abs(3.0 * e_star + 2.0 * spec.c);
    rep.field_norm = std::sqrt((u.u1 - u.u2).norm2() + (u.u2 - u.u3).norm2());

    if (!(rep.field_norm < tol)) {
        rep.cls = EquilibriumClass::NotEquilibrium;
        return rep;
    }

    const bool errors_zero = std::abs(e.e1) < tol && std::abs(e.e2) < tol;
    if (errors_zero && (z1h - z2h).norm() < tol) {
        rep.cls = EquilibriumClass::StationaryCollinear;
    } else if (std::abs(e.e1 + 2.0 * spec.c / 3.0) < tol &&
               std::abs(e.e2 + 2.0 * spec.c / 3.0) < tol && (z1h + z2h).norm() < tol) {
        rep.cls = EquilibriumClass::TravellingCollinear;
    } else if (errors_zero && (rot2(spec.theta).apply(z1h) - z2h).norm() < tol) {
        rep.cls = EquilibriumClass::Triangle;
    } else {
        rep.cls = EquilibriumClass::NotEquilibrium;
    }
    return rep;
}

Matrix3 numeric_error_jacobian(const std::function<ErrorVec(const ErrorVec&)>& field,
                               const ErrorVec& at, double h) {
    Matrix3 j;
    for (int col = 0; col < 3; ++col) {
        ErrorVec lo = at, hi = at;
        double* lo_k = (col == 0) ? &lo.e1 : (col == 1) ? &lo.e2 : &lo.e3;
        double* hi_k = (col == 0) ? &hi.e1 : (col == 1) ? &hi.e2 : &hi.e3;
        *lo_k -= h;
        *hi_k += h;
        const ErrorVec flo = field(lo);
        const ErrorVec fhi = field(hi);
        j.m[0][col] = (fhi.e1 - flo.e1) / (2.0 * h);
        j.m[1][col] = (fhi.e2 - flo.e2) / (2.0 * h);
        j.m[2][col] = (fhi.e3 - flo.e3) / (2.0 * h);
    }
    return j;
}

ErrorVec travelling_equilibrium_errors(const FormationSpec& spec) {
    const double e12 = -2.0 * spec.c / 3.0;
    return {e12, e12, std::abs(spec.d1 - spec.d2) - d3_of(spec)};
}

}  // namespace triflex
