#include "triflex/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace triflex {

namespace {

double checked_link_norm(const ErrorVec& e, double d, int k) {
    const double n = (k == 1 ? e.e1 : k == 2 ? e.e2 : e.e3) + d;
    if (!(n > 0.0)) {
        throw InvalidErrorVec("error vector implies non-positive length for link " +
                              std::to_string(k) + ": " + std::to_string(n));
    }
    return n;
}

}  // namespace

const char* variant_name(Variant v) {
    switch (v) {
        case Variant::Unbiased: return "unbiased";
        case Variant::BiasedCollinear: return "biased-collinear";
        case Variant::RotatedSplit: return "rotated-split";
        case Variant::RotatedOneSided: return "rotated-one-sided";
    }
    return "?";
}

void FormationSpec::validate() const {
    if (!(std::isfinite(d1) && d1 > 0.0)) {
        throw ConfigError("d1 must be finite and strictly positive, got " + std::to_string(d1));
    }
    if (!(std::isfinite(d2) && d2 > 0.0)) {
        throw ConfigError("d2 must be finite and strictly positive, got " + std::to_string(d2));
    }
    if (!(std::isfinite(theta) && theta > -kPi && theta < kPi)) {
        throw ConfigError("theta must lie strictly inside (-pi, pi), got " +
                          std::to_string(theta));
    }
    if (!std::isfinite(c)) {
        throw ConfigError("bias gain c must be finite");
    }
}

RelVectors relative_vectors(const FormationState& s) {
    return {s.p1 - s.p2, s.p2 - s.p3, s.p3 - s.p1};
}

double d3_of(const FormationSpec& spec) {
    // Link 1 points at agent 2 and link 2 leaves it, so the interior angle
    // of the triangle is pi - theta and the cosine term enters with +.
    return std::sqrt(spec.d1 * spec.d1 + spec.d2 * spec.d2 +
                     2.0 * spec.d1 * spec.d2 * std::cos(spec.theta));
}

ErrorVec distance_errors(const FormationState& s, const FormationSpec& spec) {
    const RelVectors z = relative_vectors(s);
    return {z.z1.norm() - spec.d1, z.z2.norm() - spec.d2, z.z3.norm() - d3_of(spec)};
}

double shape_potential(const FormationState& s, const FormationSpec& spec) {
    const RelVectors z = relative_vectors(s);
    const double e1 = z.z1.norm() - spec.d1;
    const double e2 = z.z2.norm() - spec.d2;
    return 0.5 * (e1 * e1 + e2 * e2);
}

AgentControls control_unbiased(const FormationState& s, const FormationSpec& spec) {
    const RelVectors z = relative_vectors(s);
    const Vec2 z1h = unit(z.z1);
    const Vec2 z2h = unit(z.z2);
    const double e1 = z.z1.norm() - spec.d1;
    const double e2 = z.z2.norm() - spec.d2;
    return {-(z1h * e1), z1h * e1 - z2h * e2, z2h * e2};
}

AgentControls control_biased(const FormationState& s, double mu1, double mu2,
                             const FormationSpec& spec) {
    AgentControls u = control_unbiased(s, spec);
    const RelVectors z = relative_vectors(s);
    u.u2 += unit(z.z1) * mu1 + unit(z.z2) * mu2;
    return u;
}

AgentControls control_rotated(const FormationState& s, const FormationSpec& spec) {
    AgentControls u = control_unbiased(s, spec);
    const RelVectors z = relative_vectors(s);
    const Vec2 z1h = unit(z.z1);
    const Vec2 z2h = unit(z.z2);
    if (spec.variant == Variant::RotatedOneSided) {
        u.u2 += rot2(spec.theta).apply(z1h) - z2h;
    } else {
        const Rot2 half = rot2(spec.theta / 2.0);
        u.u2 += spec.c * (half.apply(z1h) - half.apply_transposed(z2h));
    }
    return u;
}

AgentControls control_for(const FormationState& s, const FormationSpec& spec) {
    switch (spec.variant) {
        case Variant::Unbiased: return control_unbiased(s, spec);
        case Variant::BiasedCollinear: return control_biased(s, spec.c, -spec.c, spec);
        case Variant::RotatedSplit:
        case Variant::RotatedOneSided: return control_rotated(s, spec);
    }
    throw PreconditionViolated("unknown controller variant");
}

double gamma_of_e(const ErrorVec& e, const FormationSpec& spec) {
    const double n1 = checked_link_norm(e, spec.d1, 1);
    const double n2 = checked_link_norm(e, spec.d2, 2);
    const double n3 = checked_link_norm(e, d3_of(spec), 3);
    const double q = (n3 * n3 - n1 * n1 - n2 * n2) / (2.0 * n1 * n2);
    return std::acos(std::clamp(q, -1.0, 1.0));
}

MixedDerivative error_field_mixed(const Vec2& z1, const Vec2& z2, double e1, double e2,
                                  double c) {
    const Vec2 z1h = unit(z1);
    const Vec2 z2h = unit(z2);
    const double zz = z1h.dot(z2h);
    MixedDerivative d;
    d.dz1 = z1h * (-2.0 * e1 - c) + z2h * (e2 + c);
    d.dz2 = z2h * (-2.0 * e2 - c) + z1h * (e1 + c);
    d.de1 = -2.0 * e1 + zz * e2 - c + c * zz;
    d.de2 = -2.0 * e2 + zz * e1 - c + c * zz;
    return d;
}

ErrorVec error_field_collinear(const ErrorVec& e, const FormationSpec& spec) {
    const double n1 = checked_link_norm(e, spec.d1, 1);
    const double n2 = checked_link_norm(e, spec.d2, 2);
    const double n3 = checked_link_norm(e, d3_of(spec), 3);
    const double c = spec.c;

    // cos of the inter-link angle, and the two third-side inner products,
    // all by the law of cosines on the current lengths.
    const double f = (n3 * n3 - n1 * n1 - n2 * n2) / (2.0 * n1 * n2);
    const double g31 = (n2 * n2 - n1 * n1 - n3 * n3) / (2.0 * n1 * n3);
    const double g32 = (n1 * n1 - n2 * n2 - n3 * n3) / (2.0 * n2 * n3);

    return {-2.0 * e.e1 - c + (e.e2 + c) * f,
            -2.0 * e.e2 - c + (e.e1 + c) * f,
            e.e1 * g31 + e.e2 * g32};
}

ErrorVec error_field_rotated(const ErrorVec& e, const FormationSpec& spec) {
    const double n1 = checked_link_norm(e, spec.d1, 1);
    const double n2 = checked_link_norm(e, spec.d2, 2);
    const double n3 = checked_link_norm(e, d3_of(spec), 3);
    const double c = spec.c;
    const double half = spec.theta / 2.0;

    const double cosg = std::clamp((n3 * n3 - n1 * n1 - n2 * n2) / (2.0 * n1 * n2), -1.0, 1.0);
    const double gamma_s = (spec.theta < 0.0 ? -1.0 : 1.0) * std::acos(cosg);
    const double bias = -c * std::cos(half) + c * std::cos(gamma_s - half);

    const double g31 = (n2 * n2 - n1 * n1 - n3 * n3) / (2.0 * n1 * n3);
    const double g32 = (n1 * n1 - n2 * n2 - n3 * n3) / (2.0 * n2 * n3);

    return {-2.0 * e.e1 + cosg * e.e2 + bias,
            -2.0 * e.e2 + cosg * e.e1 + bias,
            e.e1 * g31 + e.e2 * g32};
}

}  // namespace triflex
