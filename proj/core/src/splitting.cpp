#include "magjac/splitting.hpp"

#include <cmath>
#include <sstream>

#include "magjac/errors.hpp"

namespace magjac {

double level_residual(const ChartedBase& base, const Vec& x, const Vec& p) {
    return p.dot(base.g_inv(x) * p) - 1.0;
}

CotangentPoint cotangent_point(const ChartedBase& base, Vec x, Vec p, double u0) {
    double res = level_residual(base, x, p);
    if (std::abs(res) > 1e-12) {
        std::ostringstream msg;
        msg << "momentum is off the level h = 1/2 by " << res << "; rescale with momentum_on_level";
        throw ConfigError(msg.str());
    }
    return CotangentPoint{std::move(x), std::move(p), u0};
}

Vec momentum_on_level(const ChartedBase& base, const Vec& x, const Vec& p) {
    double q = p.dot(base.g_inv(x) * p);
    if (q <= 0) throw ConfigError("cannot normalize a zero momentum covector");
    return p / std::sqrt(q);
}

PointData point_data(const ChartedBase& base, const CotangentPoint& lam, bool require_regular) {
    PointData pd;
    pd.jet = geometry_jet(base, lam.x);
    pd.u0 = lam.u0;
    pd.p = lam.p;
    pd.ph = pd.jet.g_inv * lam.p;
    pd.Jph = pd.jet.J * pd.ph;
    pd.jnorm = pd.jet.norm(pd.Jph);
    if (require_regular && pd.jnorm < kRegularityTol) {
        std::ostringstream msg;
        msg << "not D-regular: J_q p = 0 (|J p^h| = " << pd.jnorm << ")";
        throw NotRegularError(msg.str());
    }
    return pd;
}

CanonicalSplitting split_from(const PointData& pd) {
    const int m = pd.jet.dim;
    CanonicalSplitting sp;
    sp.ph = pd.ph;
    sp.Jph = pd.Jph;
    sp.jnorm = pd.jnorm;
    sp.b_dir = pd.Jph / pd.jnorm;

    // Gram-Schmidt seeded by the chart axes in index order; near-dependent
    // seeds are skipped at threshold 1e-6 to keep the basis deterministic.
    std::vector<Vec> frame = {sp.ph, sp.b_dir};
    for (int k = 0; k < m && int(sp.c_basis.size()) < m - 2; ++k) {
        Vec w = Vec::Zero(m);
        w[k] = 1.0;
        for (const Vec& f : frame) w -= pd.jet.inner(w, f) * f;
        double nrm = pd.jet.norm(w);
        if (nrm < 1e-6) continue;
        w /= nrm;
        frame.push_back(w);
        sp.c_basis.push_back(w);
    }
    if (int(sp.c_basis.size()) != m - 2)
        throw Error("split_at: could not complete the c-basis from chart axes");
    return sp;
}

CanonicalSplitting split_at(const ChartedBase& base, const CotangentPoint& lam) {
    return split_from(point_data(base, lam));
}

double A_form(const PointData& pd, const Vec& v) {
    const Vec nJpp = pd.jet.nablaJ_apply(pd.ph, pd.ph);
    const Vec J2p = pd.jet.J * pd.Jph;
    return (2.0 * pd.inner(v, nJpp) - pd.u0 * pd.inner(v, J2p)) / pd.jnorm;
}

double A1_form(const PointData& pd, const Vec& v) {
    const auto& jet = pd.jet;
    const Vec J2p = jet.J * pd.Jph;
    const Vec J3p = jet.J * J2p;
    const Vec n2Jppp = jet.nabla2J_apply(pd.ph, pd.ph, pd.ph);
    const Vec nJ_Jp_p = jet.nablaJ_apply(pd.Jph, pd.ph);
    const Vec nJ_p_Jp = jet.nablaJ_apply(pd.ph, pd.Jph);
    const Vec b = pd.Jph / pd.jnorm;

    Vec core = 2.0 * n2Jppp - 3.0 * pd.u0 * nJ_Jp_p - 2.0 * pd.u0 * nJ_p_Jp + 0.5 * pd.u0 * pd.u0 * J3p;
    return pd.inner(v, core) / pd.jnorm - A_form(pd, v) * A_form(pd, b);
}

std::pair<double, double> invJnorm_derivs(const PointData& pd) {
    const auto& jet = pd.jet;
    const double jn = pd.jnorm;
    const Vec nJpp = jet.nablaJ_apply(pd.ph, pd.ph);
    const Vec J2p = jet.J * pd.Jph;
    const double gJn = pd.inner(pd.Jph, nJpp);

    double d1 = -gJn / (jn * jn * jn);

    const Vec n2Jppp = jet.nabla2J_apply(pd.ph, pd.ph, pd.ph);
    const Vec nJ_Jp_p = jet.nablaJ_apply(pd.Jph, pd.ph);
    const Vec nJ_p_Jp = jet.nablaJ_apply(pd.ph, pd.Jph);
    double d2 = 3.0 * gJn * gJn / std::pow(jn, 5) - pd.inner(nJpp, nJpp) / std::pow(jn, 3) -
                pd.inner(pd.Jph, n2Jppp) / std::pow(jn, 3) +
                pd.u0 / std::pow(jn, 3) *
                    (pd.inner(J2p, nJpp) + pd.inner(pd.Jph, nJ_Jp_p) + pd.inner(pd.Jph, nJ_p_Jp));
    return {d1, d2};
}

Vec V1_vector(const PointData& pd) {
    const auto& jet = pd.jet;
    const double jn = pd.jnorm;
    const Vec nJpp = jet.nablaJ_apply(pd.ph, pd.ph);
    const Vec J2p = jet.J * pd.Jph;
    return -2.0 / jn * nJpp + pd.u0 / jn * J2p + pd.u0 * jn * pd.ph +
           2.0 * pd.inner(nJpp, pd.Jph) / (jn * jn * jn) * pd.Jph;
}

double beta_form(const PointData& pd, const Vec& v) {
    auto [d1, d2] = invJnorm_derivs(pd);
    (void)d2;
    return -A1_form(pd, v) / pd.jnorm - d1 * A_form(pd, v);
}

double A_form(const ChartedBase& base, const CotangentPoint& lam, const Vec& v) {
    return A_form(point_data(base, lam), v);
}
double A1_form(const ChartedBase& base, const CotangentPoint& lam, const Vec& v) {
    return A1_form(point_data(base, lam), v);
}
std::pair<double, double> invJnorm_derivs(const ChartedBase& base, const CotangentPoint& lam) {
    return invJnorm_derivs(point_data(base, lam));
}
Vec V1_vector(const ChartedBase& base, const CotangentPoint& lam) {
    return V1_vector(point_data(base, lam));
}
double beta_form(const ChartedBase& base, const CotangentPoint& lam, const Vec& v) {
    return beta_form(point_data(base, lam), v);
}

} // namespace magjac
