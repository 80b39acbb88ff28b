#ifndef MAGJAC_TRANSPORT_HPP
#define MAGJAC_TRANSPORT_HPP

#include "magjac/flow.hpp"

namespace magjac {

/// Transported orthonormal c-basis at one time along an extremal.
struct TransportState {
    double t = 0.0;
    std::vector<Vec> w;  // m-2 horizontal representatives along gamma(t)
};

/// Covariant rate of the canonical transport on horizontal representatives:
///   D_t w = -(u0/2) J w - A(lam, w) / (2 |Jp^h|) * Jp^h.
/// Returns the chart-coordinate rate dw/dt (covariant rate plus the
/// Christoffel correction from the moving base point).
Vec transport_rate(const PointData& pd, const Vec& w);

/// Transport a single vector from time t0 to time t1 along the trajectory
/// (RK4 on the dense output; exact in the preserved inner products up to
/// integration error).
Vec transport_vector(const ExtremalTrajectory& traj, double t0, Vec w0, double t1,
                     int substeps_per_unit = 400);

/// Transport the c-basis of split_at along the whole trajectory, sampled on
/// the given time grid, with projection stabilization at every grid node
/// (components along p^h and Jp^h are projected out and the basis is
/// re-orthonormalized in fixed order).
std::vector<TransportState> transport_basis(const ChartedBase& base, const ExtremalTrajectory& traj,
                                            const std::vector<double>& grid,
                                            int substeps_per_node = 8);

/// Convenience overload: uniform grid over [0, traj.t_max].
std::vector<TransportState> transport_basis(const ChartedBase& base, const ExtremalTrajectory& traj,
                                            int nodes = 1024);

} // namespace magjac

#endif
