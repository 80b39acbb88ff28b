#ifndef MAGJAC_CHART_HPP
#define MAGJAC_CHART_HPP

#include <functional>

#include "magjac/linalg.hpp"

namespace magjac {

enum class DerivativeMode { Analytic, FiniteDifference };

/// A Riemannian metric and a closed magnetic 2-form given in a single chart,
/// together with a local potential for the 2-form. Immutable after
/// construction; all evaluations are pure functions of the chart point.
struct ChartedBase {
    int dim = 0;  // m >= 2

    std::function<Mat(const Vec&)> metric;         // g_ij, symmetric positive definite
    std::function<Mat(const Vec&)> magnetic_form;  // Omega_ij, antisymmetric, closed
    std::function<Vec(const Vec&)> potential;      // theta_i with d(theta) = Omega
    std::function<bool(const Vec&)> in_domain;     // optional chart-domain predicate

    DerivativeMode derivative_mode = DerivativeMode::Analytic;
    double fd_step = 1e-5;

    // First/second partials; required in Analytic mode, ignored otherwise.
    std::function<Mat(const Vec&, int)> metric_d;        // d_k g
    std::function<Mat(const Vec&, int, int)> metric_dd;  // d_k d_l g
    std::function<Mat(const Vec&, int)> magnetic_d;
    std::function<Mat(const Vec&, int, int)> magnetic_dd;

    /// The field is declared parallel (nabla J = 0 identically). Set by the
    /// model catalog; enables the analytic zero branch of the (c,a)/(a,a)
    /// curvature blocks and the closed-form comparison constants.
    bool uniform_field = false;

    Mat g(const Vec& x) const { return metric(x); }
    /// Metric with a positive-definiteness check; throws DegenerateMetricError.
    Mat g_checked(const Vec& x) const;
    Mat g_inv(const Vec& x) const;
    Mat omega(const Vec& x) const { return magnetic_form(x); }
    Vec theta(const Vec& x) const { return potential(x); }
    bool inside(const Vec& x) const { return !in_domain || in_domain(x); }

    Mat dg(const Vec& x, int k) const;
    Mat ddg(const Vec& x, int k, int l) const;
    Mat domega(const Vec& x, int k) const;
    Mat ddomega(const Vec& x, int k, int l) const;
};

} // namespace magjac

#endif
