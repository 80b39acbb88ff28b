#include "magjac/curvature.hpp"

#include <cmath>
#include <sstream>

#include "magjac/errors.hpp"
#include "magjac/transport.hpp"

namespace magjac {

double stencil_d1_5(const double* f, double dt) {
    return (-f[4] + 8.0 * f[3] - 8.0 * f[1] + f[0]) / (12.0 * dt);
}

double stencil_d2_5(const double* f, double dt) {
    return (-f[4] + 16.0 * f[3] - 30.0 * f[2] + 16.0 * f[1] - f[0]) / (12.0 * dt * dt);
}

double stencil_d4_7(const double* f, double dt) {
    return (-f[6] + 12.0 * f[5] - 39.0 * f[4] + 56.0 * f[3] - 39.0 * f[2] + 12.0 * f[1] - f[0]) /
           (6.0 * std::pow(dt, 4));
}

double Rcc_quadratic(const PointData& pd, const Vec& v) {
    const auto& jet = pd.jet;
    const Vec Jv = jet.J * v;
    const double A = A_form(pd, v);
    return pd.inner(jet.curvature_op(pd.ph, v, pd.ph), v) + pd.u0 * pd.inner(v, jet.nablaJ_apply(pd.ph, v)) +
           0.25 * pd.u0 * pd.u0 * pd.inner(Jv, Jv) - 0.25 * A * A;
}

double Rcc_bilinear(const PointData& pd, const Vec& v, const Vec& w) {
    return 0.5 * (Rcc_quadratic(pd, v + w) - Rcc_quadratic(pd, v) - Rcc_quadratic(pd, w));
}

double Rcb_value(const PointData& pd, const Vec& v) {
    const auto& jet = pd.jet;
    const double jn = pd.jnorm;
    const Vec J2p = jet.J * pd.Jph;
    const Vec nJpp = jet.nablaJ_apply(pd.ph, pd.ph);
    const Vec n2Jppp = jet.nabla2J_apply(pd.ph, pd.ph, pd.ph);
    const Vec nJmix = jet.nablaJ_apply(pd.Jph, pd.ph) + jet.nablaJ_apply(pd.ph, pd.Jph);
    const double gJn = pd.inner(pd.Jph, nJpp);

    return pd.inner(jet.curvature_op(pd.ph, pd.Jph, pd.ph), v) / jn - 3.0 * pd.inner(v, n2Jppp) / jn +
           4.0 * pd.u0 * pd.inner(v, nJmix) / jn + pd.u0 * pd.u0 * pd.inner(jet.J * v, J2p) / jn +
           8.0 * gJn * pd.inner(v, nJpp) / std::pow(jn, 3) -
           4.0 * pd.u0 * gJn * pd.inner(v, J2p) / std::pow(jn, 3);
}

double Rbb_value(const PointData& pd) {
    const auto& jet = pd.jet;
    const double jn = pd.jnorm, jn2 = jn * jn;
    const Vec J2p = jet.J * pd.Jph;
    const Vec nJpp = jet.nablaJ_apply(pd.ph, pd.ph);
    const Vec n2Jppp = jet.nabla2J_apply(pd.ph, pd.ph, pd.ph);
    const double gJn = pd.inner(pd.Jph, nJpp);

    return pd.inner(jet.curvature_op(pd.Jph, pd.ph, pd.Jph), pd.ph) / jn2 -
           10.0 * gJn * gJn / (jn2 * jn2) + 6.0 * pd.inner(nJpp, nJpp) / jn2 +
           3.0 * pd.inner(pd.Jph, n2Jppp) / jn2 -
           2.0 * pd.u0 * pd.inner(pd.Jph, jet.nablaJ_apply(pd.ph, pd.Jph)) / jn2 -
           3.0 * pd.u0 * pd.inner(pd.Jph, jet.nablaJ_apply(pd.Jph, pd.ph)) / jn2 -
           6.0 * pd.u0 * pd.inner(J2p, nJpp) / jn2 + pd.u0 * pd.u0 * pd.inner(J2p, J2p) / jn2;
}

double Rcc_quadratic_uniform(const PointData& pd, const Vec& v) {
    const auto& jet = pd.jet;
    const Vec Jv = jet.J * v;
    const Vec J2p = jet.J * pd.Jph;
    const double q = pd.inner(v, J2p);
    return pd.inner(jet.curvature_op(pd.ph, v, pd.ph), v) +
           0.25 * pd.u0 * pd.u0 * (pd.inner(Jv, Jv) - q * q / (pd.jnorm * pd.jnorm));
}

double Rcb_value_uniform(const PointData& pd, const Vec& v) {
    const auto& jet = pd.jet;
    const Vec J2p = jet.J * pd.Jph;
    return (pd.inner(jet.curvature_op(pd.ph, pd.Jph, pd.ph), v) +
            pd.u0 * pd.u0 * pd.inner(jet.J * v, J2p)) /
           pd.jnorm;
}

double Rbb_value_uniform(const PointData& pd) {
    const auto& jet = pd.jet;
    const Vec J2p = jet.J * pd.Jph;
    return (pd.inner(jet.curvature_op(pd.Jph, pd.ph, pd.Jph), pd.ph) +
            pd.u0 * pd.u0 * pd.inner(J2p, J2p)) /
           (pd.jnorm * pd.jnorm);
}

double Rcc_quadratic_kahler(const PointData& pd, const Vec& v) {
    return pd.inner(pd.jet.curvature_op(pd.ph, v, pd.ph), v) + 0.25 * pd.u0 * pd.u0 * pd.inner(v, v);
}

double Rcb_value_kahler(const PointData& pd, const Vec& v) {
    return pd.inner(pd.jet.curvature_op(pd.ph, pd.Jph, pd.ph), v);
}

double Rbb_value_kahler(const PointData& pd) {
    return pd.inner(pd.jet.curvature_op(pd.ph, pd.Jph, pd.ph), pd.Jph) + pd.u0 * pd.u0;
}

Mat Rcc_matrix(const ChartedBase& base, const CotangentPoint& lam) {
    PointData pd = point_data(base, lam);
    CanonicalSplitting sp = split_from(pd);
    const int c = int(sp.c_basis.size());
    Mat R(c, c);
    for (int j = 0; j < c; ++j) {
        R(j, j) = Rcc_quadratic(pd, sp.c_basis[j]);
        for (int k = j + 1; k < c; ++k) {
            double b = Rcc_bilinear(pd, sp.c_basis[j], sp.c_basis[k]);
            R(j, k) = b;
            R(k, j) = b;
        }
    }
    return R;
}

Vec Rcb_covector(const ChartedBase& base, const CotangentPoint& lam) {
    PointData pd = point_data(base, lam);
    CanonicalSplitting sp = split_from(pd);
    Vec out(sp.c_basis.size());
    for (std::size_t k = 0; k < sp.c_basis.size(); ++k) out[k] = Rcb_value(pd, sp.c_basis[k]);
    return out;
}

double Rbb_scalar(const ChartedBase& base, const CotangentPoint& lam) {
    return Rbb_value(point_data(base, lam));
}

FlowContext make_flow_context(const ChartedBase& base, const CotangentPoint& lam, double dt, double tol) {
    FlowContext ctx;
    ctx.dt = dt;
    double w = 3.5 * dt;
    ctx.traj = integrate_extremal_range(base, lam, -w, w, tol);
    ctx.center = 0.0;
    return ctx;
}

namespace {

struct WindowData {
    std::vector<PointData> node;  // 13 nodes at center + k*dt/2, k = -6..6
    double dt;                    // base stencil step; nodes are at half spacing
    const PointData& half(int k) const { return node[k + 6]; }   // offset k*dt/2
    const PointData& whole(int k) const { return node[2 * k + 6]; }  // offset k*dt
};

WindowData window_data(const ChartedBase& base, const FlowContext& ctx) {
    WindowData wd;
    wd.dt = ctx.dt;
    wd.node.reserve(13);
    for (int k = -6; k <= 6; ++k)
        wd.node.push_back(point_data(base, ctx.traj.point_at(ctx.center + 0.5 * k * ctx.dt)));
    return wd;
}

// Fourth flow derivative of 1 / |Jp^h|: the half-step stencil is reported,
// the full-step stencil drives the consistency check.
double inv_jnorm_d4(const WindowData& wd, const StencilSettings& st) {
    double fine[7], coarse[7];
    for (int k = -3; k <= 3; ++k) fine[k + 3] = 1.0 / wd.half(k).jnorm;
    for (int k = -3; k <= 3; ++k) coarse[k + 3] = 1.0 / wd.whole(k).jnorm;
    double vf = stencil_d4_7(fine, 0.5 * wd.dt);
    double vc = stencil_d4_7(coarse, wd.dt);
    if (std::abs(vf - vc) > std::max(st.richardson_rel * std::abs(vf), st.richardson_abs)) {
        std::ostringstream msg;
        msg << "fourth flow derivative of 1/|Jp| failed its step-doubling check: " << vf << " vs "
            << vc << " at dt = " << wd.dt;
        throw StencilAccuracyError(msg.str());
    }
    return vf;
}

// Second flow derivative of tau -> A(lam(tau), K^tau v) / |Jp(tau)|, the
// transported second derivative entering the (c,a) block.
double transported_A_over_jn_d2(const ChartedBase& base, const FlowContext& ctx, const WindowData& wd,
                                const Vec& v) {
    (void)base;
    double f[5];
    f[2] = A_form(wd.whole(0), v) / wd.whole(0).jnorm;
    for (int k : {-2, -1, 1, 2}) {
        Vec w = transport_vector(ctx.traj, ctx.center, v, ctx.center + k * ctx.dt);
        f[k + 2] = A_form(wd.whole(k), w) / wd.whole(k).jnorm;
    }
    return stencil_d2_5(f, ctx.dt);
}

} // namespace

std::pair<Vec, double> Rca_Raa(const ChartedBase& base, const CotangentPoint& lam,
                               const FlowContext* ctx, const StencilSettings& st) {
    PointData pd = point_data(base, lam);
    CanonicalSplitting sp = split_from(pd);
    const int c = int(sp.c_basis.size());

    if (base.uniform_field) return {Vec::Zero(c), 0.0};

    if (!ctx)
        throw ConfigError("Rca_Raa: a FlowContext is required for a non-uniform field");

    WindowData wd = window_data(base, *ctx);
    auto [d1, d2] = invJnorm_derivs(pd);
    const double jn = pd.jnorm;

    Vec V1 = V1_vector(pd);

    auto rho_ca_of = [&](const Vec& v) {
        double td2 = transported_A_over_jn_d2(base, *ctx, wd, v);
        return jn * td2 - Rcc_bilinear(pd, v, V1) + jn * d1 * Rcb_value(pd, v);
    };

    Vec rho_ca(c);
    for (int k = 0; k < c; ++k) rho_ca[k] = rho_ca_of(sp.c_basis[k]);

    // 5-point flow-derivative series of the pointwise scalars rho_bb and
    // rho_cb(V1) along the window.
    double s_bb[5], s_cbV1[5];
    for (int k = -2; k <= 2; ++k) {
        const PointData& q = wd.whole(k);
        s_bb[k + 2] = Rbb_value(q);
        if (c > 0)
            s_cbV1[k + 2] = Rcb_value(q, V1_vector(q));
        else
            s_cbV1[k + 2] = 0.0;
    }
    double d_bb = stencil_d1_5(s_bb, ctx->dt);
    double rho_aa = jn * d1 * d_bb + jn * d2 * s_bb[2] + jn * inv_jnorm_d4(wd, st);
    if (c > 0) {
        double d_cbV1 = stencil_d1_5(s_cbV1, ctx->dt);
        rho_aa += d_cbV1 + rho_ca_of(V1) - jn * d1 * s_cbV1[2];
    }
    return {rho_ca, rho_aa};
}

CurvatureMaps curvature_maps(const ChartedBase& base, const CotangentPoint& lam, const FlowContext* ctx) {
    PointData pd = point_data(base, lam);
    CurvatureMaps maps;
    maps.basis = split_from(pd);
    const int c = int(maps.basis.c_basis.size());
    const int n1 = pd.jet.dim;  // n - 1

    maps.rho_bb = Rbb_value(pd);
    maps.rho_cb = Vec(c);
    maps.Rcc = Mat(c, c);
    for (int j = 0; j < c; ++j) {
        maps.rho_cb[j] = Rcb_value(pd, maps.basis.c_basis[j]);
        maps.Rcc(j, j) = Rcc_quadratic(pd, maps.basis.c_basis[j]);
        for (int k = j + 1; k < c; ++k) {
            double b = Rcc_bilinear(pd, maps.basis.c_basis[j], maps.basis.c_basis[k]);
            maps.Rcc(j, k) = b;
            maps.Rcc(k, j) = b;
        }
    }
    std::tie(maps.rho_ca, maps.rho_aa) = Rca_Raa(base, lam, ctx);

    maps.big = Mat::Zero(n1, n1);
    maps.big(0, 0) = maps.rho_aa;
    maps.big(1, 1) = maps.rho_bb;
    for (int k = 0; k < c; ++k) {
        maps.big(0, 2 + k) = maps.rho_ca[k];
        maps.big(2 + k, 0) = maps.rho_ca[k];
        maps.big(1, 2 + k) = maps.rho_cb[k];
        maps.big(2 + k, 1) = maps.rho_cb[k];
        for (int j = 0; j < c; ++j) maps.big(2 + j, 2 + k) = maps.Rcc(j, k);
    }
    return maps;
}

Mat big_matrix(const ChartedBase& base, const CotangentPoint& lam, const FlowContext* ctx) {
    return curvature_maps(base, lam, ctx).big;
}

std::pair<double, double> Q_forms(const ChartedBase& base, const CotangentPoint& lam, double vb,
                                  const Vec& vc) {
    PointData pd = point_data(base, lam);
    CanonicalSplitting sp = split_from(pd);
    if (vc.size() != int(sp.c_basis.size()))
        throw ConfigError("Q_forms: vc must have m-2 components in the c-basis");

    auto qtilde = [&](const Vec& vh) {
        Vec Jv = pd.jet.J * vh;
        double cross = pd.inner(Jv, pd.Jph);
        return pd.inner(Jv, Jv) - cross * cross / (pd.jnorm * pd.jnorm);
    };

    Vec vch = Vec::Zero(pd.jet.dim);
    for (int k = 0; k < vc.size(); ++k) vch += vc[k] * sp.c_basis[k];
    Vec vh = vb * sp.b_dir + vch;

    double Qt = qtilde(vh);
    double Q = Qt - 0.75 * qtilde(vch);
    return {Qt, Q};
}

} // namespace magjac
