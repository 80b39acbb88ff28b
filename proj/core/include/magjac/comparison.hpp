#ifndef MAGJAC_COMPARISON_HPP
#define MAGJAC_COMPARISON_HPP

#include <string>
#include <vector>

#include "magjac/models.hpp"
#include "magjac/rootscan.hpp"

namespace magjac {

/// phi_omega(t): the 4th-order factor of the model-curve determinant.
/// Real-analytic continuation across omega < 0 via hyperbolic functions;
/// phi_0(t) = t^4. For every omega, t = 0 is a zero of multiplicity exactly 4.
double phi(double omega, double t);

/// psi_omega(t): sin(sqrt(omega) t) for omega > 0, t at omega = 0,
/// sinh(sqrt(-omega) t) for omega < 0 (same zero set as the analytic
/// continuation, kept real).
double psi(double omega, double t);

/// Roots of tan(y) = y in (0, y_max], one per branch interval
/// (k pi, k pi + pi/2), k >= 1, refined by bisection to 1e-12.
std::vector<double> tan_equal_roots(double y_max);

/// Closed-form zero count (with multiplicity) of phi_{omega_b} psi_{omega_c}^{n-3}
/// on (0, T].
long Z_T(double omega_b, double omega_c, double T, int n);

/// Two-sided curvature/Q bounds entering the conjugate-point bracket.
/// The c-entries are meaningful only when n > 3 and default to zero.
struct ComparisonBounds {
    int n = 3;            // ambient dimension (chart dim + 1)
    double u0bar = 0.0;   // charge of the extremal family
    double cb = 0.0, Cb = 0.0;  // curvature bounds on the b-line
    double cc = 0.0, Cc = 0.0;  // curvature bounds on the c-space
    double kb = 0.0, Kb = 0.0;  // Q-form bounds on the b-line
    double kc = 0.0, Kc = 0.0;  // Q-form bounds on the c-space
    bool empirical = false;     // set when obtained by sampling rather than closed form

    double omega_b_lower() const { return cb + kb * u0bar * u0bar; }
    double omega_c_lower() const { return cc + kc * u0bar * u0bar; }
    double omega_b_upper() const { return Cb + Kb * u0bar * u0bar; }
    double omega_c_upper() const { return Cc + Kc * u0bar * u0bar; }
};

/// Closed-form constants for catalog models with a parallel field; a generic
/// uniform base falls back to randomized sampling with a 1% safety margin
/// (lower constants rounded down, upper rounded up) and sets `empirical`.
/// Throws ScopeError when the field is not declared parallel.
ComparisonBounds model_constants(const Model& model, double u0bar, int samples = 2000,
                                 unsigned seed = 20240817);

struct IntervalCheck {
    std::string description;
    bool applicable = false;
    bool satisfied = true;  // vacuously true when not applicable
    double bound_time = 0.0;
    int required_count = 0;
};

struct ComparisonVerdict {
    long lower = 0, upper = 0;
    int observed = 0;
    bool pass = false;
    std::vector<IntervalCheck> corollary;  // the eight interval assertions
    ComparisonBounds bounds;
};

/// Evaluate the two-sided bracket and the interval assertions against a
/// conjugate report taken on the same horizon and charge.
ComparisonVerdict check_comparison(const ConjugateReport& report, const ComparisonBounds& bounds);

} // namespace magjac

#endif
