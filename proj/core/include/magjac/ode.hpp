#ifndef MAGJAC_ODE_HPP
#define MAGJAC_ODE_HPP

#include <array>
#include <functional>
#include <limits>

#include "magjac/linalg.hpp"

namespace magjac {

using OdeRhs = std::function<void(double t, const Vec& y, Vec& dydt)>;

struct OdeOptions {
    double rtol = 1e-10;
    double atol = 1e-12;
    double h_init = 0.0;  // 0 = choose automatically
    double h_max = 0.0;   // 0 = whole interval
    long max_steps = 20'000'000;
    /// Applied to the state after each accepted step (e.g. frame re-orthonormalization).
    /// Returns true if the state was modified.
    std::function<bool(double t, Vec& y)> post_step;
};

/// One accepted step with the DOP853 6th-order interpolation coefficients.
struct DenseSegment {
    double t0 = 0.0, t1 = 0.0;
    std::array<Vec, 8> rc;
    Vec eval(double t) const;
};

/// Result of an adaptive integration with dense output.
/// Supports backward integration (t_end < t_begin); times() is monotone in
/// the direction of integration.
class OdeSolution {
public:
    double t_begin() const { return times_.front(); }
    double t_end() const { return times_.back(); }
    const std::vector<double>& times() const { return times_; }
    const std::vector<Vec>& states() const { return states_; }
    const Vec& final_state() const { return states_.back(); }

    /// Dense evaluation anywhere in [t_begin, t_end] (interpolation order 6).
    Vec at(double t) const;

    long accepted = 0, rejected = 0, rhs_evals = 0;

private:
    friend OdeSolution integrate_dop853(const OdeRhs&, Vec, double, double, const OdeOptions&);
    std::vector<double> times_;
    std::vector<Vec> states_;
    std::vector<DenseSegment> segments_;
};

/// Adaptive Dormand-Prince 8(5,3) integrator with stored dense output.
/// Throws StepFailureError on step-size underflow or step budget exhaustion.
OdeSolution integrate_dop853(const OdeRhs& f, Vec y0, double t0, double t1,
                             const OdeOptions& opt = {});

/// Single classical RK4 step (used for short auxiliary transports).
Vec rk4_step(const OdeRhs& f, double t, const Vec& y, double h);

} // namespace magjac

#endif
