#ifndef MAGJAC_CURVATURE_HPP
#define MAGJAC_CURVATURE_HPP

#include "magjac/flow.hpp"
#include "magjac/splitting.hpp"

namespace magjac {

/// All curvature blocks at a point, expressed in the canonical frame
/// (a, b, c_1..c_{m-2}) built by split_at. The big matrix is symmetric with
/// an identically zero (a,b) entry; the c-blocks are written in the stored
/// c-basis and are only defined up to a constant orthogonal change of that
/// basis.
struct CurvatureMaps {
    double rho_aa = 0.0;
    double rho_bb = 0.0;
    Vec rho_cb;  // size m-2
    Vec rho_ca;  // size m-2
    Mat Rcc;     // (m-2) x (m-2), symmetric
    CanonicalSplitting basis;
    Mat big;     // (n-1) x (n-1) in the order (a, b, c...)
};

/// Quadratic form of the (c,c) map at v (general field).
double Rcc_quadratic(const PointData& pd, const Vec& v);
/// Symmetric bilinear form obtained from Rcc_quadratic by polarization.
double Rcc_bilinear(const PointData& pd, const Vec& v, const Vec& w);
/// Matrix of the (c,c) map in the c-basis of split_at.
Mat Rcc_matrix(const ChartedBase& base, const CotangentPoint& lam);

/// Value of the (c,b) covector at v (general field).
double Rcb_value(const PointData& pd, const Vec& v);
/// Components of the (c,b) covector on the c-basis of split_at.
Vec Rcb_covector(const ChartedBase& base, const CotangentPoint& lam);

/// The (b,b) scalar (general field).
double Rbb_value(const PointData& pd);
double Rbb_scalar(const ChartedBase& base, const CotangentPoint& lam);

// Specializations used for cross-validation: closed forms valid when
// nabla J = 0, and additionally J^2 = -Id for the *_kahler variants.
double Rcc_quadratic_uniform(const PointData& pd, const Vec& v);
double Rcb_value_uniform(const PointData& pd, const Vec& v);
double Rbb_value_uniform(const PointData& pd);
double Rcc_quadratic_kahler(const PointData& pd, const Vec& v);
double Rcb_value_kahler(const PointData& pd, const Vec& v);
double Rbb_value_kahler(const PointData& pd);

/// A short integrated window of the extremal through a point, for the
/// flow-derivative stencils of the (c,a) and (a,a) blocks.
struct FlowContext {
    ExtremalTrajectory traj;  // covers [-(6*dt + margin), +(6*dt + margin)] around t = 0
    double dt = 0.05;         // base stencil step
    double center = 0.0;      // stencils are taken about this trajectory time
};

FlowContext make_flow_context(const ChartedBase& base, const CotangentPoint& lam, double dt = 0.05,
                              double tol = 1e-12);

struct StencilSettings {
    double richardson_rel = 1e-3;  // allowed relative disagreement of the step-doubling check
    double richardson_abs = 1e-4;
};

/// The (c,a) covector and (a,a) scalar. For a declared uniform field the
/// analytic branch returns exact zeros and ctx may be null. Otherwise ctx is
/// required and the blocks are assembled from flow-derivative stencils along
/// the supplied window; a failed Richardson step-doubling check raises
/// StencilAccuracyError instead of returning degraded values.
std::pair<Vec, double> Rca_Raa(const ChartedBase& base, const CotangentPoint& lam,
                               const FlowContext* ctx, const StencilSettings& st = {});

/// Assemble every block and the big symmetric matrix.
CurvatureMaps curvature_maps(const ChartedBase& base, const CotangentPoint& lam,
                             const FlowContext* ctx = nullptr);
Mat big_matrix(const ChartedBase& base, const CotangentPoint& lam, const FlowContext* ctx = nullptr);

/// The two comparison quadratic forms at v = vb * E_b + sum vc_k c_k,
/// returned as (Qtilde, Q).
std::pair<double, double> Q_forms(const ChartedBase& base, const CotangentPoint& lam, double vb,
                                  const Vec& vc);

// Central stencil derivatives on 2k+1 equally spaced samples (order-4 accurate).
double stencil_d1_5(const double* f, double dt);  // f[-2..2]
double stencil_d2_5(const double* f, double dt);  // f[-2..2]
double stencil_d4_7(const double* f, double dt);  // f[-3..3]

} // namespace magjac

#endif
