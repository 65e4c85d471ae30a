#pragma once

#include <array>
#include <complex>
#include <functional>

#include "triflex/dynamics.hpp"

namespace triflex {

/// Dense 3x3 real matrix (Jacobians, perturbation lemma inputs).
struct Matrix3 {
    double m[3][3]{};

    double& operator()(int i, int j) { return m[i][j]; }
    double operator()(int i, int j) const { return m[i][j]; }

    static Matrix3 diag(double a, double b, double c) {
        Matrix3 r;
        r.m[0][0] = a;
        r.m[1][1] = b;
        r.m[2][2] = c;
        return r;
    }

    double frobenius() const;
    double det() const;
    double trace() const;
};

/// 2x2 real matrix (constant-norm link dynamics coefficients).
struct Matrix2 {
    double m[2][2]{};
    double operator()(int i, int j) const { return m[i][j]; }
};

/// The three eigenvalues of a real 3x3 matrix, sorted by (real, imag).
/// Complex values occur in conjugate pairs.
using EigenTriple = std::array<std::complex<double>, 3>;

double max_real_part(const EigenTriple& eig);

/// Hurwitz verdict for a linearization point.
struct StabilityReport {
    Matrix3 jacobian;
    EigenTriple eigenvalues;
    bool hurwitz{false};
    double margin{0.0};  ///< most-positive real part among the eigenvalues
    FormationSpec params;
};

enum class EquilibriumClass {
    StationaryCollinear,  ///< zero errors, aligned links, middle agent between the others
    TravellingCollinear,  ///< errors -2c/3, anti-aligned links, common drift velocity
    Triangle,             ///< zero errors, rotated link alignment R(theta) z1_hat = z2_hat
    NotEquilibrium
};

const char* equilibrium_class_name(EquilibriumClass cls);

/// Classification result with the residuals used for the verdict.
struct EquilibriumReport {
    EquilibriumClass cls{EquilibriumClass::NotEquilibrium};
    double cond1_res{0.0};   ///< (2 + z1_hat . z2_hat) (e2 - e1)
    double zeq_res{0.0};     ///< ||(z2_hat - z1_hat)|| |3 e* + 2c|, e* = (e1+e2)/2
    double field_norm{0.0};  ///< norm of (u1 - u2, u2 - u3), the shape-space velocity
};

/// Linearization of the collinear-bias error system at the zero-error
/// equilibrium:
///   [ -2-ca  1-ca  ca ]
///   [  1-ca -2-ca  ca ],   a = (d1 + d2) / (d1 d2).
///   [   -1    -1    0 ]
Matrix3 jacobian_collinear(double d1, double d2, double c);

/// Closed-form eigenvalues {-1, -3, -2ca} of jacobian_collinear.
EigenTriple collinear_eigenvalues(double d1, double d2, double c);

/// Partial derivatives of cos(gamma(e) - alpha) at the target shape.
struct LinkAnglePartials {
    double a1{0.0}, a2{0.0}, a3{0.0};
};

/// a1 = -(sin(theta-alpha)/sin theta) (d1 + d2 cos theta)/(d1 d2), and the
/// analogous a2, a3. Supported limit forms near theta = 0: alpha = theta/2
/// (ratio 1/(2 cos(theta/2))) and alpha = 0 (ratio 1). theta = 0 exactly is
/// outside the domain unless alpha = theta/2; otherwise throws SingularAngle.
LinkAnglePartials partials_a(double d1, double d2, double theta, double alpha);

/// Linearization of the rotated error system at the target shape
/// (alpha = theta/2). theta = 0 delegates to jacobian_collinear: the
/// unsigned-angle chain rule is non-smooth at collinearity and the
/// collinear Jacobian is exact there.
Matrix3 jacobian_rotated(double d1, double d2, double theta, double c);

/// Eigenvalues of a real 3x3 matrix via the characteristic cubic
/// (trigonometric / Cardano forms) with Newton polishing. Each returned
/// root r satisfies |det(m - r I)| < 1e-8 (1 + ||m||^3).
EigenTriple eig3(const Matrix3& m);

/// hurwitz = (max real part of eig3(m) < -margin).
StabilityReport is_hurwitz(const Matrix3& m, double margin = 0.0);

/// [[p1, p2, a], [p2, p1, a], [b, c, 0]]. Requires p1 > 0, p1 > p2 and
/// p1^2 > p2^2; throws PreconditionViolated otherwise.
Matrix3 lemma1_matrix(double p1, double p2, double a, double b, double c);

/// First-order estimate of the near-zero eigenvalue of lemma1_matrix under
/// a small perturbation a, against the exact numeric value.
struct PerturbationCheck {
    double approx_lambda3{0.0};  ///< a (b + c)(p2 - p1) / (p1^2 - p2^2)
    double exact_lambda3{0.0};   ///< eigenvalue of the matrix closest to 0
    bool sign_agrees{false};
};

/// Requires the lemma1_matrix preconditions plus the smallness regime
/// |a| <= 0.1 min(1, p1^2 - p2^2) / (|b| + |c| + 1).
PerturbationCheck lemma1_check(double p1, double p2, double a, double b, double c);

/// Coefficient matrix of the constant-norm link dynamics
///   [[-(2e*-c)/n1, (e*+c)/n2], [(e*+c)/n1, -(2e*-c)/n2]];
/// its Kronecker product with I2 drives (z1, z2) when the errors are
/// frozen at e*. Off-diagonal entries share a sign whenever e* + c != 0,
/// so the matrix is never skew-symmetric.
Matrix2 zdyn_coefficient_matrix(double e_star, double n1, double n2, double c);

/// Classifies a state against the three known equilibrium sets of the
/// active controller variant, at tolerance tol (length units).
EquilibriumReport classify_equilibrium(const FormationState& s, const FormationSpec& spec,
                                       double tol = 1e-6);

/// Central-difference Jacobian of an error-space field. Used where no
/// closed form is printed (the travelling-collinear linearization).
Matrix3 numeric_error_jacobian(const std::function<ErrorVec(const ErrorVec&)>& field,
                               const ErrorVec& at, double h = 1e-6);

/// Error coordinates of the travelling-collinear equilibrium for the given
/// spec (theta = 0 conventions): e1 = e2 = -2c/3, e3 = -2 min(d1, d2).
ErrorVec travelling_equilibrium_errors(const FormationSpec& spec);

}  // namespace triflex
