#ifndef MAGJAC_FLOW_HPP
#define MAGJAC_FLOW_HPP

#include "magjac/ode.hpp"
#include "magjac/rootscan.hpp"
#include "magjac/splitting.hpp"

namespace magjac {

/// Reduced extremal state layout: y = [x (m), p (m), z], with the charge u0
/// carried as a constant parameter. The fiber coordinate z integrates
/// zdot = -theta(xdot) and only feeds the conjugate-point oracle and exports.
Vec extremal_rhs(const ChartedBase& base, double u0, const Vec& y);

/// An integrated extremal over [t_min, t_max] (t_min <= 0 <= t_max) with
/// dense output and an h-conservation log.
class ExtremalTrajectory {
public:
    const ChartedBase* base = nullptr;
    double u0 = 0.0;
    double t_min = 0.0, t_max = 0.0;
    OdeSolution fwd, bwd;  // forward from 0, backward from 0 (may be empty)

    std::vector<double> h_log_t;  // accepted nodes
    std::vector<double> h_log;    // h - 1/2 at those nodes
    double h_drift = 0.0;         // max |h - 1/2|

    Vec state_at(double t) const;
    Vec x_at(double t) const;
    Vec p_at(double t) const;
    double z_at(double t) const;
    CotangentPoint point_at(double t) const;
    double h_at(double t) const;
};

/// Integrate the extremal through lam over [t_from, t_to] (either side of 0).
/// `tol` is the conservation target; the integrator runs tighter internally.
/// Throws ChartExitError if the trajectory leaves the chart domain.
ExtremalTrajectory integrate_extremal_range(const ChartedBase& base, const CotangentPoint& lam,
                                            double t_from, double t_to, double tol = 1e-10);

inline ExtremalTrajectory integrate_extremal(const ChartedBase& base, const CotangentPoint& lam,
                                             double T, double tol = 1e-10) {
    return integrate_extremal_range(base, lam, 0.0, T, tol);
}

struct OracleOptions {
    double tol = 1e-10;          // integration accuracy target
    int samples_per_unit = 120;  // determinant sampling density
    int min_samples = 400;
    double fd_eta = 5e-6;        // relative step of the variational linearization
    ScanOptions scan;
};

/// Brute-force conjugate-point detector: integrates n-1 vertical variations
/// of the extremal, projects their (x, z)-positions modulo the velocity and
/// scans the resulting determinant for rank drops. Independent of every
/// curvature formula in this library.
struct OracleRun {
    ConjugateReport report;
    std::vector<double> t_grid;
    std::vector<double> det;  // column-normalized projected determinant
};

OracleRun oracle_conjugate_scan(const ChartedBase& base, const CotangentPoint& lam, double T,
                                const OracleOptions& opt = {});

ConjugateReport oracle_conjugate_times(const ChartedBase& base, const CotangentPoint& lam, double T,
                                       const OracleOptions& opt = {});

/// Linearization of extremal_rhs at (y, u0) in the direction (delta, du0),
/// by central differencing of the full field (the oracle's variational rate).
Vec variational_rate(const ChartedBase& base, double u0, const Vec& y, const Vec& delta, double du0,
                     double eta_rel = 5e-6);

/// Integrate one linearized variation along the extremal: state layout
/// [x, p, z, dx, dp, dz] with du0 carried as a constant. Exposed for the
/// superposition/linearity checks of the variational flow.
OdeSolution integrate_variation(const ChartedBase& base, const CotangentPoint& lam, double T,
                                const Vec& dp0, double du0, double tol = 1e-10);

} // namespace magjac

#endif
