#ifndef MAGJAC_GEOMETRY_HPP
#define MAGJAC_GEOMETRY_HPP

#include "magjac/chart.hpp"
#include "magjac/linalg.hpp"

namespace magjac {

/// All pointwise differential-geometric data of a ChartedBase at one chart
/// point: metric, Christoffel symbols, curvature, the Lorentz-force tensor J
/// and its first two covariant derivatives.
///
/// Index conventions:
///   gamma(k,i,j)        = Gamma^k_{ij}
///   riemann(l,k,a,b)    = R^l_{kab}, the coordinate curvature of
///                         R(d_a, d_b) d_k = R^l_{kab} d_l
///   J(i,j)              = J^i_j with g(JX, Y) = Omega(X, Y)
///   nablaJ(i,j,k)       : (nabla J)(X; Y)^i = nablaJ(i,j,k) X^j Y^k,
///                         i.e. the covariant derivative of J along the last slot
///   nabla2J(i,j,k,l)    : (nabla^2 J)(X; Y, Z)^i = nabla2J(i,j,k,l) X^j Y^k Z^l
struct GeometryJet {
    int dim = 0;
    Vec x;
    Mat g, g_inv;
    std::vector<Mat> dg;  // dg[k] = d_k g
    Tensor3 gamma;
    Tensor4 riemann;
    Mat J;
    Tensor3 nablaJ;
    Tensor4 nabla2J;

    double inner(const Vec& v, const Vec& w) const { return v.dot(g * w); }
    double norm(const Vec& v) const { return std::sqrt(std::max(0.0, inner(v, v))); }

    /// (nabla_Y J)(X)
    Vec nablaJ_apply(const Vec& X, const Vec& Y) const;
    /// (nabla_Z nabla J)(X; Y)
    Vec nabla2J_apply(const Vec& X, const Vec& Y, const Vec& Z) const;

    /// Curvature operator R(X,Y)Z with the sign fixed so that
    /// g(R(X,Y)X, Y) > 0 on the round sphere (sec below returns +1 there).
    Vec curvature_op(const Vec& X, const Vec& Y, const Vec& Z) const;
    /// Normalized sectional curvature of the plane spanned by X, Y.
    double sec(const Vec& X, const Vec& Y) const;
};

GeometryJet geometry_jet(const ChartedBase& base, const Vec& x);

/// Gamma^k_{ij}; throws DegenerateMetricError when the metric fails its
/// positive-definiteness check at x.
Tensor3 christoffel(const ChartedBase& base, const Vec& x);

/// Coordinate curvature R^l_{kab} (one index raised); see GeometryJet for the
/// evaluator with the fixed sign convention.
Tensor4 riemann(const ChartedBase& base, const Vec& x);

/// J with g(JX, Y) = Omega(X, Y); antisymmetric w.r.t. g.
Mat J_at(const ChartedBase& base, const Vec& x);

Tensor3 nabla_J(const ChartedBase& base, const Vec& x);
Tensor4 nabla2_J(const ChartedBase& base, const Vec& x);

/// max_{i<j<k} |(dOmega)_{ijk}| by central differences (closedness defect).
double closedness_defect(const ChartedBase& base, const Vec& x, double eta = 1e-5);
/// max_{i<j} |(d theta - Omega)_{ij}| by central differences.
double potential_defect(const ChartedBase& base, const Vec& x, double eta = 1e-5);
/// max |nabla g| with finite-difference metric derivatives against the
/// analytic-path Christoffel symbols (metric-compatibility check).
double metric_compat_defect(const ChartedBase& base, const Vec& x, double eta = 1e-5);

} // namespace magjac

#endif
