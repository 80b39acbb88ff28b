#include "magjac/jacobi.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <sstream>

#include "magjac/errors.hpp"

namespace magjac {

namespace {

Mat sigma_matrix(int N) {
    Mat S = Mat::Zero(2 * N, 2 * N);
    S.topRightCorner(N, N) = Mat::Identity(N, N);
    S.bottomLeftCorner(N, N) = -Mat::Identity(N, N);
    return S;
}

// Structural equations for the frame matrix [E | F]:
//   E_a' = E_b,  E_b' = F_b,  E_c' = F_c,
//   F_a' = -E_c R(a,c) - E_a rho_aa,
//   F_b' = -E_c R(b,c) - E_b rho_bb - F_a,
//   F_c' = -E_c Rcc - E_b R(c,b) - E_a R(c,a).
void frame_rhs(const Eigen::Ref<const Mat>& EF, const StructuralBlocks& blk, int N, int c,
               Eigen::Ref<Mat> dEF) {
    auto E = EF.leftCols(N);
    auto F = EF.rightCols(N);
    auto dE = dEF.leftCols(N);
    auto dF = dEF.rightCols(N);

    dE.col(0) = E.col(1);
    dE.col(1) = F.col(1);
    if (c > 0) dE.rightCols(c) = F.rightCols(c);

    Vec Ec_rho_ca = Vec::Zero(2 * N), Ec_rho_cb = Vec::Zero(2 * N);
    for (int k = 0; k < c; ++k) {
        Ec_rho_ca += blk.rho_ca[k] * E.col(2 + k);
        Ec_rho_cb += blk.rho_cb[k] * E.col(2 + k);
    }
    dF.col(0) = -Ec_rho_ca - blk.rho_aa * E.col(0);
    dF.col(1) = -Ec_rho_cb - blk.rho_bb * E.col(1) - F.col(0);
    for (int k = 0; k < c; ++k) {
        Vec col = -blk.rho_cb[k] * E.col(1) - blk.rho_ca[k] * E.col(0);
        for (int j = 0; j < c; ++j) col -= blk.Rcc(j, k) * E.col(2 + j);
        dF.col(2 + k) = col;
    }
}

// Natural cubic spline on a uniform grid.
class CubicSpline {
public:
    void build(double t0, double dt, std::vector<double> y) {
        t0_ = t0;
        dt_ = dt;
        y_ = std::move(y);
        const int n = int(y_.size()) - 1;
        m_.assign(n + 1, 0.0);
        if (n < 2) return;
        std::vector<double> diag(n - 1, 4.0), rhs(n - 1);
        for (int i = 1; i < n; ++i) rhs[i - 1] = 6.0 * (y_[i - 1] - 2.0 * y_[i] + y_[i + 1]) / (dt * dt);
        for (int i = 1; i < n - 1; ++i) {
            double w = 1.0 / diag[i - 1];
            diag[i] -= w;
            rhs[i] -= w * rhs[i - 1];
        }
        m_[n - 1] = rhs[n - 2] / diag[n - 2];
        for (int i = n - 2; i >= 1; --i) m_[i] = (rhs[i - 1] - m_[i + 1]) / diag[i - 1];
    }

    double eval(double t) const {
        const int n = int(y_.size()) - 1;
        double u = (t - t0_) / dt_;
        int i = std::min(std::max(int(std::floor(u)), 0), n - 1);
        double s = u - i;
        double a = 1.0 - s;
        return y_[i] * a + y_[i + 1] * s +
               dt_ * dt_ / 6.0 * (m_[i] * (a * a * a - a) + m_[i + 1] * (s * s * s - s));
    }

private:
    double t0_ = 0.0, dt_ = 1.0;
    std::vector<double> y_;
    std::vector<double> m_;
};

} // namespace

Mat FrameSolution::EF_at(double t) const {
    Vec y = sol.at(t);
    return Eigen::Map<const Mat>(y.data() + ef_offset, 2 * N, 2 * N);
}

Mat FrameSolution::E_at(double t) const { return EF_at(t).leftCols(N); }
Mat FrameSolution::F_at(double t) const { return EF_at(t).rightCols(N); }

double FrameSolution::det_at(double t) const {
    Mat M(2 * N, 2 * N);
    M.leftCols(N) = E_at(t);
    M.rightCols(N) = E0;
    return M.determinant();
}

double FrameSolution::det_normalized_at(double t) const {
    Mat M(2 * N, 2 * N);
    M.leftCols(N) = E_at(t);
    M.rightCols(N) = E0;
    double scale = 1.0;
    for (int j = 0; j < 2 * N; ++j) scale *= std::max(M.col(j).norm(), 1e-30);
    return M.determinant() / scale;
}

int FrameSolution::intersection_dim_at(double t, double sv_rel_threshold) const {
    Mat M(2 * N, 2 * N);
    M.leftCols(N) = E_at(t);
    M.rightCols(N) = E0;
    for (int j = 0; j < 2 * N; ++j) {
        double nrm = M.col(j).norm();
        if (nrm > 1e-30) M.col(j) /= nrm;
    }
    Eigen::JacobiSVD<Mat> svd(M);
    const auto& sv = svd.singularValues();
    double smax = sv.size() ? sv[0] : 0.0;
    int nullity = 0;
    for (int i = 0; i < sv.size(); ++i)
        if (sv[i] < sv_rel_threshold * smax) ++nullity;
    return nullity;
}

double FrameSolution::darboux_drift() const {
    Mat S = sigma_matrix(N);
    double worst = 0.0;
    for (const Vec& y : sol.states()) {
        Eigen::Map<const Mat> EF(y.data() + ef_offset, 2 * N, 2 * N);
        Mat G = EF.transpose() * S * EF;
        worst = std::max(worst, (G - S).cwiseAbs().maxCoeff());
    }
    return worst;
}

FrameSolution structural_integrate(const BlockSource& blocks, int N, double T, const OdeOptions& opt) {
    if (N < 2) throw ConfigError("structural_integrate: need N = n-1 >= 2");
    const int c = N - 2;
    auto rhs = [&, N, c](double t, const Vec& y, Vec& dy) {
        dy.resize(y.size());
        Eigen::Map<const Mat> EF(y.data(), 2 * N, 2 * N);
        Eigen::Map<Mat> dEF(dy.data(), 2 * N, 2 * N);
        frame_rhs(EF, blocks(t), N, c, dEF);
    };
    Mat EF0 = Mat::Identity(2 * N, 2 * N);
    Vec y0 = Eigen::Map<const Vec>(EF0.data(), 4 * N * N);

    FrameSolution fr;
    fr.N = N;
    fr.cdim = c;
    fr.sol = integrate_dop853(rhs, y0, 0.0, T, opt);
    fr.E0 = EF0.leftCols(N);
    return fr;
}

ConjugateReport conjugate_from_frames(const FrameSolution& frames, double T, const ScanOptions& scan,
                                      int samples_per_unit, int min_samples) {
    const int nsamp = std::max(min_samples, int(std::ceil(T * samples_per_unit)));
    std::vector<double> grid(nsamp + 1);
    for (int i = 0; i <= nsamp; ++i) grid[i] = T * double(i) / nsamp;

    ConjugateReport rep;
    rep.T = T;
    rep.method = "frames";
    rep.events = scan_determinant_roots(
        [&](double t) { return frames.det_normalized_at(t); },
        [&](double t) { return frames.intersection_dim_at(t, scan.sv_rel_threshold); }, grid, scan);
    return rep;
}

namespace {

struct BlockSeries {
    bool active = false;      // only used for a non-uniform field
    CubicSpline rho_aa;
    std::vector<CubicSpline> rho_ca;  // per c-basis column
};

// Precompute the stencil-derived blocks rho_aa(t) and rho_ca_k(t) on a padded
// uniform grid along the extremal, then spline them for the main integration.
BlockSeries build_block_series(const ChartedBase& base, const CotangentPoint& lam, double T,
                               const JacobiOptions& opt) {
    BlockSeries out;
    out.active = true;

    const int m = base.dim;
    const int c = m - 2;
    const int s1 = opt.stride_d1;
    const int s4 = opt.stride_d4 + (opt.stride_d4 % 2);  // the half-stride check needs an even stride
    const int pad_nodes = 3 * s4 + 2;

    const int body = std::max(1, int(std::ceil(T / opt.grid_dt)));
    const double dt = T / body;
    const double pad = pad_nodes * dt;

    ExtremalTrajectory traj = integrate_extremal_range(base, lam, -pad, T + pad, opt.tol);
    const int K = body + 2 * pad_nodes;
    std::vector<double> grid(K + 1);
    for (int i = 0; i <= K; ++i) grid[i] = -pad + i * dt;

    std::vector<TransportState> w;
    if (c > 0) w = transport_basis(base, traj, grid);

    std::vector<PointData> pdv(K + 1);
    std::vector<double> inv(K + 1), s_bb(K + 1), s_cbV1(K + 1);
    std::vector<Vec> V1v(K + 1);
    for (int i = 0; i <= K; ++i) {
        pdv[i] = point_data(base, traj.point_at(grid[i]));
        inv[i] = 1.0 / pdv[i].jnorm;
        s_bb[i] = Rbb_value(pdv[i]);
        if (c > 0) {
            V1v[i] = V1_vector(pdv[i]);
            s_cbV1[i] = Rcb_value(pdv[i], V1v[i]);
        }
    }
    // per-column series of A(lam, w_k)/|Jp| for the transported second derivative
    std::vector<std::vector<double>> Aw(c, std::vector<double>(K + 1));
    for (int k = 0; k < c; ++k)
        for (int i = 0; i <= K; ++i) Aw[k][i] = A_form(pdv[i], w[i].w[k]) * inv[i];

    auto d1_series = [&](const std::vector<double>& f, int i) {
        double v[5] = {f[i - 2 * s1], f[i - s1], f[i], f[i + s1], f[i + 2 * s1]};
        return stencil_d1_5(v, s1 * dt);
    };
    auto d2_series = [&](const std::vector<double>& f, int i) {
        double v[5] = {f[i - 2 * s1], f[i - s1], f[i], f[i + s1], f[i + 2 * s1]};
        return stencil_d2_5(v, s1 * dt);
    };
    auto d4_checked = [&](const std::vector<double>& f, int i) {
        // half-stride stencil is reported, the full-stride one checks it
        double fine[7], coarse[7];
        for (int k = -3; k <= 3; ++k) fine[k + 3] = f[i + k * (s4 / 2)];
        for (int k = -3; k <= 3; ++k) coarse[k + 3] = f[i + k * s4];
        double a = stencil_d4_7(fine, (s4 / 2) * dt);
        double b = stencil_d4_7(coarse, s4 * dt);
        if (std::abs(a - b) > std::max(opt.stencil.richardson_rel * std::abs(a), opt.stencil.richardson_abs)) {
            std::ostringstream msg;
            msg << "fourth flow derivative failed its step-doubling check at t = " << grid[i] << " (" << a
                << " vs " << b << "); refine grid_dt or stride_d4";
            throw StencilAccuracyError(msg.str());
        }
        return a;
    };

    const int lo = pad_nodes - 2, hi = K - (pad_nodes - 2);  // stencils fit strictly inside
    std::vector<double> raa(hi - lo + 1);
    std::vector<std::vector<double>> rca(c, std::vector<double>(hi - lo + 1));
    for (int i = lo; i <= hi; ++i) {
        const PointData& pd = pdv[i];
        auto [d1, d2] = invJnorm_derivs(pd);
        const double jn = pd.jnorm;
        double val = jn * (d1 * d1_series(s_bb, i) + d2 * s_bb[i] + d4_checked(inv, i));
        if (c > 0) {
            // (c,a) entries on the transported basis
            for (int k = 0; k < c; ++k) {
                double td2 = d2_series(Aw[k], i);
                rca[k][i - lo] = jn * td2 - Rcc_bilinear(pd, w[i].w[k], V1v[i]) + jn * d1 * Rcb_value(pd, w[i].w[k]);
            }
            // rho_ca applied to V1 needs V1 itself transported off the node
            double fV1[5];
            fV1[2] = A_form(pd, V1v[i]) * inv[i];
            for (int k : {-2, -1, 1, 2}) {
                Vec tw = transport_vector(traj, grid[i], V1v[i], grid[i] + k * s1 * dt);
                fV1[k + 2] = A_form(pdv[i + k * s1], tw) * inv[i + k * s1];
            }
            double rho_ca_V1 = jn * stencil_d2_5(fV1, s1 * dt) - Rcc_bilinear(pd, V1v[i], V1v[i]) +
                               jn * d1 * s_cbV1[i];
            val += d1_series(s_cbV1, i) + rho_ca_V1 - jn * d1 * s_cbV1[i];
        }
        raa[i - lo] = val;
    }

    out.rho_aa.build(grid[lo], dt, raa);
    out.rho_ca.resize(c);
    for (int k = 0; k < c; ++k) out.rho_ca[k].build(grid[lo], dt, rca[k]);
    return out;
}

} // namespace

JacobiRun jacobi_conjugate_scan(const ChartedBase& base, const CotangentPoint& lam, double T,
                                const JacobiOptions& opt) {
    if (T <= 0) throw ConfigError("jacobi: horizon T must be positive");
    const int m = base.dim;
    const int N = m;  // n - 1
    const int c = m - 2;

    CanonicalSplitting sp0 = split_at(base, lam);
    std::vector<Vec> w0 = sp0.c_basis;
    if (opt.c_rotation.size() > 0) {
        if (opt.c_rotation.rows() != c || opt.c_rotation.cols() != c)
            throw ConfigError("jacobi: c_rotation must be (m-2) x (m-2)");
        std::vector<Vec> rotated(c, Vec::Zero(m));
        for (int k = 0; k < c; ++k)
            for (int j = 0; j < c; ++j) rotated[k] += opt.c_rotation(j, k) * w0[j];
        w0 = rotated;
    }

    BlockSeries series;
    if (!base.uniform_field) series = build_block_series(base, lam, T, opt);

    // Joint state: [x (m), p (m), W (c*m), EF (4N^2)].
    const int off_w = 2 * m;
    const int off_ef = off_w + c * m;
    const int dim = off_ef + 4 * N * N;

    auto rhs = [&](double t, const Vec& y, Vec& dy) {
        dy.resize(dim);
        CotangentPoint cur{y.head(m), y.segment(m, m), lam.u0};
        PointData pd = point_data(base, cur);

        dy.head(m) = pd.ph;
        for (int j = 0; j < m; ++j) dy[m + j] = 0.5 * pd.ph.dot(pd.jet.dg[j] * pd.ph);
        dy.segment(m, m) -= lam.u0 * (pd.jet.g * pd.Jph);

        StructuralBlocks blk;
        blk.rho_bb = Rbb_value(pd);
        blk.rho_cb = Vec::Zero(c);
        blk.rho_ca = Vec::Zero(c);
        blk.Rcc = Mat::Zero(c, c);
        std::vector<Vec> w(c);
        for (int k = 0; k < c; ++k) {
            w[k] = y.segment(off_w + k * m, m);
            dy.segment(off_w + k * m, m) = transport_rate(pd, w[k]);
            blk.rho_cb[k] = Rcb_value(pd, w[k]);
        }
        for (int j = 0; j < c; ++j) {
            blk.Rcc(j, j) = Rcc_quadratic(pd, w[j]);
            for (int k = j + 1; k < c; ++k) {
                double b = Rcc_bilinear(pd, w[j], w[k]);
                blk.Rcc(j, k) = b;
                blk.Rcc(k, j) = b;
            }
        }
        if (series.active) {
            blk.rho_aa = series.rho_aa.eval(t);
            for (int k = 0; k < c; ++k) blk.rho_ca[k] = series.rho_ca[k].eval(t);
        }

        Eigen::Map<const Mat> EF(y.data() + off_ef, 2 * N, 2 * N);
        Eigen::Map<Mat> dEF(dy.data() + off_ef, 2 * N, 2 * N);
        frame_rhs(EF, blk, N, c, dEF);
    };

    Vec y0 = Vec::Zero(dim);
    y0.head(m) = lam.x;
    y0.segment(m, m) = lam.p;
    for (int k = 0; k < c; ++k) y0.segment(off_w + k * m, m) = w0[k];
    {
        Mat EF0 = Mat::Identity(2 * N, 2 * N);
        y0.segment(off_ef, 4 * N * N) = Eigen::Map<const Vec>(EF0.data(), 4 * N * N);
    }

    OdeOptions iopt;
    iopt.rtol = std::max(1e-13, opt.tol * 1e-2);
    iopt.atol = iopt.rtol * 0.1;
    iopt.post_step = [&](double t, Vec& y) {
        if (!base.inside(y.head(m))) {
            std::ostringstream msg;
            msg << "trajectory left the chart domain at t = " << t;
            throw ChartExitError(msg.str());
        }
        if (c == 0) return false;
        CotangentPoint cur{y.head(m), y.segment(m, m), lam.u0};
        PointData pd = point_data(base, cur);
        const Vec ph_unit = pd.ph / pd.jet.norm(pd.ph);
        const Vec b = pd.Jph / pd.jnorm;
        std::vector<Vec> w(c);
        for (int k = 0; k < c; ++k) {
            w[k] = y.segment(off_w + k * m, m);
            w[k] -= pd.inner(w[k], ph_unit) * ph_unit;
            w[k] -= pd.inner(w[k], b) * b;
            for (int j = 0; j < k; ++j) w[k] -= pd.inner(w[k], w[j]) * w[j];
            w[k] /= pd.jet.norm(w[k]);
            y.segment(off_w + k * m, m) = w[k];
        }
        return true;
    };

    JacobiRun run;
    run.frames.N = N;
    run.frames.cdim = c;
    run.frames.E0 = Mat::Identity(2 * N, 2 * N).leftCols(N);
    run.frames.ef_offset = off_ef;
    run.frames.sol = integrate_dop853(rhs, y0, 0.0, T, iopt);

    // h-conservation bookkeeping over the joint nodes
    for (const Vec& y : run.frames.sol.states()) {
        double dh = 0.5 * y.segment(m, m).dot(base.g_inv(y.head(m)) * y.segment(m, m)) - 0.5;
        run.h_drift = std::max(run.h_drift, std::abs(dh));
    }

    const int nsamp = std::max(opt.min_samples, int(std::ceil(T * opt.samples_per_unit)));
    run.t_grid.resize(nsamp + 1);
    run.det.resize(nsamp + 1);
    for (int i = 0; i <= nsamp; ++i) {
        run.t_grid[i] = T * double(i) / nsamp;
        run.det[i] = run.frames.det_normalized_at(run.t_grid[i]);
    }

    run.report.T = T;
    run.report.method = "jacobi";
    run.report.events = scan_determinant_roots(
        [&](double t) { return run.frames.det_normalized_at(t); },
        [&](double t) { return run.frames.intersection_dim_at(t, opt.scan.sv_rel_threshold); },
        run.t_grid, opt.scan);
    return run;
}

ConjugateReport jacobi_conjugate_times(const ChartedBase& base, const CotangentPoint& lam, double T,
                                       const JacobiOptions& opt) {
    return jacobi_conjugate_scan(base, lam, T, opt).report;
}

} // namespace magjac
