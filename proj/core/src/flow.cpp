#include "magjac/flow.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <sstream>

#include "magjac/errors.hpp"

namespace magjac {

Vec extremal_rhs(const ChartedBase& base, double u0, const Vec& y) {
    const int m = base.dim;
    const Vec x = y.head(m);
    const Vec p = y.segment(m, m);

    const Mat G = base.g_inv(x);
    const Vec ph = G * p;
    const Mat Om = base.omega(x);

    Vec dy(2 * m + 1);
    dy.head(m) = ph;
    for (int j = 0; j < m; ++j)
        dy[m + j] = 0.5 * ph.dot(base.dg(x, j) * ph);
    dy.segment(m, m) -= u0 * (Om.transpose() * ph);
    dy[2 * m] = -base.theta(x).dot(ph);
    return dy;
}

namespace {

Vec pack_state(const CotangentPoint& lam, int m) {
    Vec y(2 * m + 1);
    y.head(m) = lam.x;
    y.segment(m, m) = lam.p;
    y[2 * m] = 0.0;
    return y;
}

double h_of(const ChartedBase& base, const Vec& y) {
    const int m = base.dim;
    const Vec x = y.head(m);
    const Vec p = y.segment(m, m);
    return 0.5 * p.dot(base.g_inv(x) * p);
}

OdeSolution run_leg(const ChartedBase& base, double u0, const Vec& y0, double t_to, double rtol,
                    double atol) {
    OdeOptions opt;
    opt.rtol = rtol;
    opt.atol = atol;
    opt.post_step = [&base](double t, Vec& y) {
        if (!base.inside(y.head(base.dim))) {
            std::ostringstream msg;
            msg << "trajectory left the chart domain at t = " << t;
            throw ChartExitError(msg.str());
        }
        return false;
    };
    return integrate_dop853([&base, u0](double, const Vec& y, Vec& dy) { dy = extremal_rhs(base, u0, y); },
                            y0, 0.0, t_to, opt);
}

} // namespace

Vec ExtremalTrajectory::state_at(double t) const {
    if (t >= 0.0) return fwd.at(t);
    return bwd.at(t);
}

Vec ExtremalTrajectory::x_at(double t) const { return state_at(t).head(base->dim); }
Vec ExtremalTrajectory::p_at(double t) const { return state_at(t).segment(base->dim, base->dim); }
double ExtremalTrajectory::z_at(double t) const { return state_at(t)[2 * base->dim]; }

CotangentPoint ExtremalTrajectory::point_at(double t) const {
    Vec y = state_at(t);
    return CotangentPoint{y.head(base->dim), y.segment(base->dim, base->dim), u0};
}

double ExtremalTrajectory::h_at(double t) const { return h_of(*base, state_at(t)); }

ExtremalTrajectory integrate_extremal_range(const ChartedBase& base, const CotangentPoint& lam,
                                      double t_from, double t_to, double tol) {
    if (t_from > 0 || t_to < 0 || t_from == t_to)
        throw ConfigError("integrate_extremal_range: need t_from <= 0 <= t_to with t_from < t_to");

    const int m = base.dim;
    const double rtol = std::max(1e-13, tol * 1e-2);
    const double atol = rtol * 0.1;
    Vec y0 = pack_state(lam, m);

    ExtremalTrajectory traj;
    traj.base = &base;
    traj.u0 = lam.u0;
    traj.t_min = t_from;
    traj.t_max = t_to;
    if (t_to > 0) traj.fwd = run_leg(base, lam.u0, y0, t_to, rtol, atol);
    if (t_from < 0) traj.bwd = run_leg(base, lam.u0, y0, t_from, rtol, atol);

    auto log_leg = [&](const OdeSolution& sol) {
        for (std::size_t i = 0; i < sol.times().size(); ++i) {
            double dh = h_of(base, sol.states()[i]) - 0.5;
            traj.h_log_t.push_back(sol.times()[i]);
            traj.h_log.push_back(dh);
            traj.h_drift = std::max(traj.h_drift, std::abs(dh));
        }
    };
    if (t_from < 0) log_leg(traj.bwd);
    if (t_to > 0) log_leg(traj.fwd);
    return traj;
}

OracleRun oracle_conjugate_scan(const ChartedBase& base, const CotangentPoint& lam, double T,
                                const OracleOptions& opt) {
    if (T <= 0) throw ConfigError("oracle: horizon T must be positive");
    const int m = base.dim;
    const int n = m + 1;       // ambient dimension (x, z)
    const int nvar = n - 1;    // = m vertical variations
    const int blk = 2 * m + 1; // state block size

    // Initial vertical variations: m-1 momentum covectors orthogonal to p in
    // the cometric, plus the pure charge variation.
    const Mat G0 = base.g_inv(lam.x);
    std::vector<Vec> dp_seeds;
    {
        std::vector<Vec> frame = {lam.p};  // g-inverse-orthonormalized, |p|_{g^-1} = 1
        for (int k = 0; k < m && int(dp_seeds.size()) < m - 1; ++k) {
            Vec w = Vec::Zero(m);
            w[k] = 1.0;
            for (const Vec& f : frame) w -= (w.dot(G0 * f)) * f;
            double nrm = std::sqrt(std::max(0.0, w.dot(G0 * w)));
            if (nrm < 1e-8) continue;
            w /= nrm;
            frame.push_back(w);
            dp_seeds.push_back(w);
        }
        if (int(dp_seeds.size()) != m - 1)
            throw Error("oracle: failed to build momentum variations");
    }
    std::vector<double> du0(nvar, 0.0);
    du0[nvar - 1] = 1.0;

    Vec y0 = Vec::Zero(blk * (1 + nvar));
    y0.head(blk) = pack_state(lam, m);
    for (int j = 0; j + 1 < nvar; ++j) y0.segment(blk * (1 + j) + m, m) = dp_seeds[j];

    const double eta_rel = opt.fd_eta;
    auto rhs = [&](double, const Vec& y, Vec& dy) {
        dy.resize(y.size());
        const Vec yb = y.head(blk);
        dy.head(blk) = extremal_rhs(base, lam.u0, yb);
        for (int j = 0; j < nvar; ++j)
            dy.segment(blk * (1 + j), blk) =
                variational_rate(base, lam.u0, yb, y.segment(blk * (1 + j), blk), du0[j], eta_rel);
    };

    OdeOptions iopt;
    iopt.rtol = opt.tol;
    iopt.atol = opt.tol * 1e-2;
    iopt.post_step = [&](double t, Vec& y) {
        if (!base.inside(y.head(m))) {
            std::ostringstream msg;
            msg << "trajectory left the chart domain at t = " << t;
            throw ChartExitError(msg.str());
        }
        return false;
    };
    OdeSolution sol = integrate_dop853(rhs, y0, 0.0, T, iopt);

    // Projected endpoint determinant: position columns (dx, dz) of each
    // variation against the normalized velocity (Euclidean chart metric).
    auto columns_at = [&](double t, Mat& cols, Vec& vel) {
        Vec y = sol.at(t);
        const Vec yb = y.head(blk);
        Vec f0 = extremal_rhs(base, lam.u0, yb);
        vel = Vec(n);
        vel.head(m) = f0.head(m);
        vel[m] = f0[2 * m];
        cols.resize(n, nvar);
        for (int j = 0; j < nvar; ++j) {
            cols.col(j).head(m) = y.segment(blk * (1 + j), m);
            cols(m, j) = y[blk * (1 + j) + 2 * m];
        }
    };

    // Fixed per-column scales over the scan window. Individual position
    // columns can vanish exactly at a conjugate time, so normalizing by the
    // instantaneous column norm would destroy both the determinant's zero and
    // the small singular values carrying the multiplicity.
    const int nsamp = std::max(opt.min_samples, int(std::ceil(T * opt.samples_per_unit)));
    Vec col_scale = Vec::Constant(nvar, 1e-30);
    for (int i = 0; i <= nsamp; ++i) {
        Mat cols;
        Vec vel;
        columns_at(T * double(i) / nsamp, cols, vel);
        for (int j = 0; j < nvar; ++j) col_scale[j] = std::max(col_scale[j], cols.col(j).norm());
    }

    // A variation that never moves the (x, z)-endpoint is a flow-invariant
    // degeneracy (e.g. the charge direction when J_q p = 0 identically); it
    // carries no conjugate-point information and is removed from the pencil,
    // together with the ambient directions nothing ever reaches.
    std::vector<int> kept;
    for (int j = 0; j < nvar; ++j)
        if (col_scale[j] > 1e-12 * std::max(1.0, col_scale.maxCoeff())) kept.push_back(j);
    const int nkept = int(kept.size());
    Mat reach = Mat::Identity(n, n);
    int reach_dim = n;
    if (nkept < nvar) {
        Mat samples(n, (nsamp + 1) * (nkept + 1));
        for (int i = 0; i <= nsamp; ++i) {
            Mat cols;
            Vec vel;
            columns_at(T * double(i) / nsamp, cols, vel);
            for (int q = 0; q < nkept; ++q)
                samples.col(i * (nkept + 1) + q) = cols.col(kept[q]) / col_scale[kept[q]];
            samples.col(i * (nkept + 1) + nkept) = vel / std::max(vel.norm(), 1e-30);
        }
        Eigen::JacobiSVD<Mat> svd(samples, Eigen::ComputeThinU);
        reach_dim = 0;
        for (int i = 0; i < svd.singularValues().size(); ++i)
            if (svd.singularValues()[i] > 1e-10 * svd.singularValues()[0]) ++reach_dim;
        reach = svd.matrixU().leftCols(reach_dim);
        if (reach_dim != nkept + 1)
            throw Error("oracle: degenerate variations do not close up against the reachable space");
    }

    auto det_normalized = [&](double t) {
        Mat cols;
        Vec vel;
        columns_at(t, cols, vel);
        Mat M(n, nkept + 1);
        for (int q = 0; q < nkept; ++q) M.col(q) = cols.col(kept[q]) / col_scale[kept[q]];
        M.col(nkept) = vel / std::max(vel.norm(), 1e-30);
        if (nkept == nvar) return M.determinant();
        return Mat(reach.transpose() * M).determinant();
    };

    auto multiplicity_at = [&](double t) {
        Mat cols;
        Vec vel;
        columns_at(t, cols, vel);
        vel.normalize();
        Mat P = Mat::Identity(n, n) - vel * vel.transpose();
        Mat M(n, nkept);
        for (int q = 0; q < nkept; ++q) M.col(q) = P * cols.col(kept[q]) / col_scale[kept[q]];
        Eigen::JacobiSVD<Mat> svd(M);
        const auto& sv = svd.singularValues();
        double smax = sv.size() ? sv[0] : 0.0;
        int nullity = 0;
        for (int i = 0; i < sv.size(); ++i)
            if (sv[i] < opt.scan.sv_rel_threshold * smax) ++nullity;
        return nullity;
    };

    OracleRun run;
    run.t_grid.resize(nsamp + 1);
    run.det.resize(nsamp + 1);
    for (int i = 0; i <= nsamp; ++i) {
        run.t_grid[i] = T * double(i) / nsamp;
        run.det[i] = det_normalized(run.t_grid[i]);
    }

    run.report.T = T;
    run.report.method = "oracle";
    run.report.events = scan_determinant_roots(det_normalized, multiplicity_at, run.t_grid, opt.scan);
    return run;
}

ConjugateReport oracle_conjugate_times(const ChartedBase& base, const CotangentPoint& lam, double T,
                                       const OracleOptions& opt) {
    return oracle_conjugate_scan(base, lam, T, opt).report;
}

Vec variational_rate(const ChartedBase& base, double u0, const Vec& y, const Vec& delta, double du0,
                     double eta_rel) {
    double mag = std::max(delta.lpNorm<Eigen::Infinity>(), std::abs(du0));
    if (mag == 0.0) return Vec::Zero(y.size());
    double eta = eta_rel * (1.0 + y.lpNorm<Eigen::Infinity>()) / mag;
    Vec fp = extremal_rhs(base, u0 + eta * du0, y + eta * delta);
    Vec fm = extremal_rhs(base, u0 - eta * du0, y - eta * delta);
    return (fp - fm) / (2.0 * eta);
}

OdeSolution integrate_variation(const ChartedBase& base, const CotangentPoint& lam, double T,
                                const Vec& dp0, double du0, double tol) {
    const int m = base.dim;
    const int blk = 2 * m + 1;
    Vec y0 = Vec::Zero(2 * blk);
    y0.head(blk) = pack_state(lam, m);
    y0.segment(blk + m, m) = dp0;

    auto rhs = [&](double, const Vec& y, Vec& dy) {
        dy.resize(2 * blk);
        dy.head(blk) = extremal_rhs(base, lam.u0, y.head(blk));
        dy.tail(blk) = variational_rate(base, lam.u0, y.head(blk), y.tail(blk), du0);
    };
    OdeOptions iopt;
    iopt.rtol = tol;
    iopt.atol = tol * 1e-2;
    return integrate_dop853(rhs, y0, 0.0, T, iopt);
}

} // namespace magjac
