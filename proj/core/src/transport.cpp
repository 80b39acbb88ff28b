#include "magjac/transport.hpp"

#include <algorithm>
#include <cmath>

#include "magjac/errors.hpp"

namespace magjac {

Vec transport_rate(const PointData& pd, const Vec& w) {
    const auto& jet = pd.jet;
    const int m = jet.dim;
    double A = A_form(pd, w);
    Vec cov = -0.5 * pd.u0 * (jet.J * w) - A / (2.0 * pd.jnorm) * pd.Jph;
    Vec rate = cov;
    for (int i = 0; i < m; ++i) {
        double s = 0;
        for (int j = 0; j < m; ++j)
            for (int k = 0; k < m; ++k) s += jet.gamma(i, j, k) * pd.ph[j] * w[k];
        rate[i] -= s;
    }
    return rate;
}

Vec transport_vector(const ExtremalTrajectory& traj, double t0, Vec w0, double t1,
                     int substeps_per_unit) {
    if (t0 == t1) return w0;
    const ChartedBase& base = *traj.base;
    int nsub = std::max(2, int(std::ceil(std::abs(t1 - t0) * substeps_per_unit)));
    double h = (t1 - t0) / nsub;
    auto rhs = [&](double t, const Vec& w, Vec& dw) {
        PointData pd = point_data(base, traj.point_at(t));
        dw = transport_rate(pd, w);
    };
    Vec w = std::move(w0);
    for (int i = 0; i < nsub; ++i) w = rk4_step(rhs, t0 + i * h, w, h);
    return w;
}

namespace {

void stabilize(const PointData& pd, std::vector<Vec>& w) {
    const Vec ph_unit = pd.ph / pd.jet.norm(pd.ph);
    const Vec b = pd.Jph / pd.jnorm;
    for (std::size_t k = 0; k < w.size(); ++k) {
        w[k] -= pd.inner(w[k], ph_unit) * ph_unit;
        w[k] -= pd.inner(w[k], b) * b;
        for (std::size_t j = 0; j < k; ++j) w[k] -= pd.inner(w[k], w[j]) * w[j];
        double nrm = pd.jet.norm(w[k]);
        if (nrm < 1e-8) throw Error("transport basis degenerated during stabilization");
        w[k] /= nrm;
    }
}

} // namespace

std::vector<TransportState> transport_basis(const ChartedBase& base, const ExtremalTrajectory& traj,
                                            const std::vector<double>& grid, int substeps_per_node) {
    std::vector<TransportState> out(grid.size());
    CanonicalSplitting sp0 = split_at(base, traj.point_at(0.0));
    const int c = int(sp0.c_basis.size());

    // locate the first grid index at or after t = 0 (the basis is seeded there)
    int i0 = 0;
    while (i0 + 1 < int(grid.size()) && grid[i0] < 0.0) ++i0;

    auto rhs_all = [&](double t, const Vec& y, Vec& dy) {
        const int m = base.dim;
        PointData pd = point_data(base, traj.point_at(t));
        dy.resize(y.size());
        for (int k = 0; k < c; ++k) dy.segment(k * m, m) = transport_rate(pd, y.segment(k * m, m));
    };

    auto pack = [&](const std::vector<Vec>& w) {
        Vec y(c * base.dim);
        for (int k = 0; k < c; ++k) y.segment(k * base.dim, base.dim) = w[k];
        return y;
    };
    auto unpack = [&](const Vec& y) {
        std::vector<Vec> w(c);
        for (int k = 0; k < c; ++k) w[k] = y.segment(k * base.dim, base.dim);
        return w;
    };

    auto march = [&](int from, int to, int step) {
        std::vector<Vec> w = sp0.c_basis;
        {
            // seed may not sit exactly at t = 0
            if (grid[from] != 0.0 && c > 0)
                for (int k = 0; k < c; ++k) w[k] = transport_vector(traj, 0.0, w[k], grid[from]);
            PointData pd = point_data(base, traj.point_at(grid[from]));
            if (c > 0) stabilize(pd, w);
            out[from] = {grid[from], w};
        }
        for (int i = from; i != to; i += step) {
            int j = i + step;
            if (c > 0) {
                Vec y = pack(w);
                double h = (grid[j] - grid[i]) / substeps_per_node;
                for (int s = 0; s < substeps_per_node; ++s)
                    y = rk4_step(rhs_all, grid[i] + s * h, y, h);
                w = unpack(y);
                PointData pd = point_data(base, traj.point_at(grid[j]));
                stabilize(pd, w);
            }
            out[j] = {grid[j], w};
        }
    };

    march(i0, int(grid.size()) - 1, +1);
    if (i0 > 0) march(i0, 0, -1);
    return out;
}

std::vector<TransportState> transport_basis(const ChartedBase& base, const ExtremalTrajectory& traj,
                                            int nodes) {
    std::vector<double> grid(nodes + 1);
    for (int i = 0; i <= nodes; ++i) grid[i] = traj.t_max * double(i) / nodes;
    return transport_basis(base, traj, grid);
}

} // namespace magjac
