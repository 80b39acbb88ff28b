#ifndef MAGJAC_TESTS_SUPPORT_HPP
#define MAGJAC_TESTS_SUPPORT_HPP

#include <random>

#include "magjac/models.hpp"
#include "magjac/splitting.hpp"

namespace magjac::testing {

inline CotangentPoint default_point(const Model& m, double u0) {
    return CotangentPoint{m.traits.default_x,
                          momentum_on_level(m.base, m.traits.default_x, m.traits.default_p), u0};
}

inline Vec random_chart_point(const ModelTraits& tr, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    Vec x(tr.dim);
    for (int i = 0; i < tr.dim; ++i)
        x[i] = tr.sample_lo[i] + unif(rng) * (tr.sample_hi[i] - tr.sample_lo[i]);
    return x;
}

inline CotangentPoint random_point(const Model& m, double u0, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    Vec x = random_chart_point(m.traits, rng);
    Vec praw(m.traits.dim);
    for (int i = 0; i < m.traits.dim; ++i) praw[i] = gauss(rng);
    return CotangentPoint{x, momentum_on_level(m.base, x, praw), u0};
}

inline Vec random_c_vector(const PointData& pd, const CanonicalSplitting& sp, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    Vec v = Vec::Zero(pd.jet.dim);
    for (const Vec& w : sp.c_basis) v += gauss(rng) * w;
    double nrm = pd.jet.norm(v);
    return (nrm > 1e-12) ? Vec(v / nrm) : sp.c_basis.front();
}

// Flat R^4 with a constant field of two different strengths on the two
// invariant planes. Parallel, but J^2 is not a scalar, so the c-blocks are
// anisotropic; good for exercising basis covariance and V1.
inline Model make_flat4d_axial(double B1, double B2) {
    Model m;
    Mat Om = Mat::Zero(4, 4);
    Om(0, 1) = B1;
    Om(1, 0) = -B1;
    Om(2, 3) = B2;
    Om(3, 2) = -B2;
    m.base.dim = 4;
    m.base.metric = [](const Vec&) { return Mat::Identity(4, 4); };
    m.base.magnetic_form = [Om](const Vec&) { return Om; };
    m.base.potential = [B1, B2](const Vec& x) {
        Vec th(4);
        th << -0.5 * B1 * x[1], 0.5 * B1 * x[0], -0.5 * B2 * x[3], 0.5 * B2 * x[2];
        return th;
    };
    m.base.metric_d = [](const Vec&, int) { return Mat::Zero(4, 4); };
    m.base.metric_dd = [](const Vec&, int, int) { return Mat::Zero(4, 4); };
    m.base.magnetic_d = [](const Vec&, int) { return Mat::Zero(4, 4); };
    m.base.magnetic_dd = [](const Vec&, int, int) { return Mat::Zero(4, 4); };
    m.base.uniform_field = true;

    m.traits.name = "flat4d_axial";
    m.traits.dim = 4;
    m.traits.uniform_field = true;
    m.traits.const_curvature = 0.0;  // J^2 is not scalar: no closed-form Q constants
    m.traits.default_x = Vec::Zero(4);
    m.traits.default_p = (Vec(4) << 0.8, 0, 0.6, 0).finished();
    m.traits.sample_lo = Vec::Constant(4, -1.0);
    m.traits.sample_hi = Vec::Constant(4, 1.0);
    return m;
}

// Flat R^4 with a closed but non-parallel field: (1 + eps x1) dx1^dx2 + C dx3^dx4.
// The only catalog-independent model with a nontrivial (c,a) block.
inline Model make_flat4d_nonuniform(double eps, double C) {
    Model m;
    m.base.dim = 4;
    m.base.metric = [](const Vec&) { return Mat::Identity(4, 4); };
    m.base.magnetic_form = [eps, C](const Vec& x) {
        Mat om = Mat::Zero(4, 4);
        om(0, 1) = 1.0 + eps * x[0];
        om(1, 0) = -om(0, 1);
        om(2, 3) = C;
        om(3, 2) = -C;
        return om;
    };
    m.base.potential = [eps, C](const Vec& x) {
        Vec th(4);
        th << 0.0, x[0] + 0.5 * eps * x[0] * x[0], 0.0, C * x[2];
        return th;
    };
    m.base.metric_d = [](const Vec&, int) { return Mat::Zero(4, 4); };
    m.base.metric_dd = [](const Vec&, int, int) { return Mat::Zero(4, 4); };
    m.base.magnetic_d = [eps](const Vec&, int k) {
        Mat d = Mat::Zero(4, 4);
        if (k == 0) {
            d(0, 1) = eps;
            d(1, 0) = -eps;
        }
        return d;
    };
    m.base.magnetic_dd = [](const Vec&, int, int) { return Mat::Zero(4, 4); };
    m.base.uniform_field = false;

    m.traits.name = "flat4d_nonuniform";
    m.traits.dim = 4;
    m.traits.uniform_field = false;
    m.traits.default_x = Vec::Zero(4);
    m.traits.default_p = (Vec(4) << 0, 0.8, 0, 0.6).finished();
    m.traits.sample_lo = Vec::Constant(4, -0.4);
    m.traits.sample_hi = Vec::Constant(4, 0.4);
    return m;
}

} // namespace magjac::testing

#endif
