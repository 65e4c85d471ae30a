#pragma once

#include "triflex/geometry.hpp"

namespace triflex {

/// Controller selection for the two-link formation.
///
///   Unbiased         plain gradient descent on the two link potentials;
///                    the inter-link angle is left free.
///   BiasedCollinear  constant range offsets +c / -c injected on the two
///                    links of agent 2; drives the team to a line.
///   RotatedSplit     agent 2 applies half-angle rotations R(theta/2) and
///                    R(theta/2)^T with gain c; selects the inter-link
///                    angle theta. Reduces to BiasedCollinear at theta = 0.
///   RotatedOneSided  one-sided form with the full rotation R(theta) and
///                    implicit gain 1.
enum class Variant { Unbiased, BiasedCollinear, RotatedSplit, RotatedOneSided };

const char* variant_name(Variant v);

/// Desired shape parameters shared by every controller.
struct FormationSpec {
    double d1{1.0};              ///< desired length of link 1-2, > 0
    double d2{1.0};              ///< desired length of link 2-3, > 0
    double theta{0.0};           ///< desired inter-link angle, radians in (-pi, pi)
    double c{0.0};               ///< bias gain (collinear) / rotation gain
    Variant variant{Variant::BiasedCollinear};

    /// Throws ConfigError on non-finite or out-of-range parameters.
    void validate() const;
};

/// Agent positions in the global frame.
struct FormationState {
    Vec2 p1, p2, p3;
};

/// Relative position vectors. z1 + z2 + z3 = 0 by construction.
struct RelVectors {
    Vec2 z1;  ///< p1 - p2
    Vec2 z2;  ///< p2 - p3
    Vec2 z3;  ///< p3 - p1
};

/// Link distance errors e_k = ||z_k|| - d_k, including the uncontrolled
/// third side (d3 from d3_of).
struct ErrorVec {
    double e1{0.0}, e2{0.0}, e3{0.0};
};

/// Velocity commands for the three agents.
struct AgentControls {
    Vec2 u1, u2, u3;
};

/// Time derivative of (z1, z2, e1, e2) under the biased collinear loop.
struct MixedDerivative {
    Vec2 dz1, dz2;
    double de1{0.0}, de2{0.0};
};

RelVectors relative_vectors(const FormationState& s);

/// Length of the third side at the target shape:
/// sqrt(d1^2 + d2^2 + 2 d1 d2 cos(theta)). Equals d1 + d2 at theta = 0.
double d3_of(const FormationSpec& spec);

/// (e1, e2, e3) for the given state; links 1 and 2 must be non-degenerate.
ErrorVec distance_errors(const FormationState& s, const FormationSpec& spec);

/// Sum over the two controlled links of 0.5 (||z_k|| - d_k)^2.
double shape_potential(const FormationState& s, const FormationSpec& spec);

/// Gradient-descent controls:
///   u1 = -z1_hat e1,  u2 = z1_hat e1 - z2_hat e2,  u3 = z2_hat e2.
AgentControls control_unbiased(const FormationState& s, const FormationSpec& spec);

/// Same loop with constant range offsets mu1, mu2 folded into agent 2:
///   u2 += mu1 z1_hat + mu2 z2_hat.
AgentControls control_biased(const FormationState& s, double mu1, double mu2,
                             const FormationSpec& spec);

/// Angle-selecting controls. RotatedSplit:
///   u2 = z1_hat e1 - z2_hat e2 + c (R(theta/2) z1_hat - R(theta/2)^T z2_hat)
/// RotatedOneSided:
///   u2 = z1_hat e1 - z2_hat e2 + R(theta) z1_hat - z2_hat
/// u1, u3 as in control_unbiased.
AgentControls control_rotated(const FormationState& s, const FormationSpec& spec);

/// Dispatch on spec.variant (BiasedCollinear uses mu1 = c, mu2 = -c).
AgentControls control_for(const FormationState& s, const FormationSpec& spec);

/// Inter-link angle recovered from error coordinates via the law of
/// cosines, in [0, pi]. The arccos argument is clamped to [-1, 1]: roundoff
/// can push the quotient to 1 +/- 1e-16 at collinear shapes where it is
/// exactly +/-1 analytically. Throws InvalidErrorVec when e_k + d_k <= 0.
double gamma_of_e(const ErrorVec& e, const FormationSpec& spec);

/// Closed-loop derivative of (z1, z2, e1, e2) under the biased collinear
/// controller with mu1 = -mu2 = c.
MixedDerivative error_field_mixed(const Vec2& z1, const Vec2& z2, double e1, double e2,
                                  double c);

/// Self-contained error dynamics of the collinear-bias loop, written with
/// the law-of-cosines quotients so that only (e1, e2, e3) appear.
ErrorVec error_field_collinear(const ErrorVec& e, const FormationSpec& spec);

/// Self-contained error dynamics of the rotated (angle-selecting) loop.
/// The inner products of unit link vectors carry the sign of the inter-link
/// angle, which error coordinates lose; the branch is pinned to
/// gamma_s = sign(theta) * gamma_of_e(e) (sign(0) = +1), matching the
/// target equilibrium. Position-space simulation remains the ground truth.
ErrorVec error_field_rotated(const ErrorVec& e, const FormationSpec& spec);

}  // namespace triflex
