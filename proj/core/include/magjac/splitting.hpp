#ifndef MAGJAC_SPLITTING_HPP
#define MAGJAC_SPLITTING_HPP

#include <vector>

#include "magjac/chart.hpp"
#include "magjac/geometry.hpp"

namespace magjac {

/// Reduced extremal state: chart point, momentum covector on the level
/// h = 1/2, and the symmetry charge u0.
struct CotangentPoint {
    Vec x;
    Vec p;
    double u0 = 0.0;
};

/// Level-set residual 2h - 1 = g^{ij} p_i p_j - 1 at the point.
double level_residual(const ChartedBase& base, const Vec& x, const Vec& p);

/// Validating constructor; |g^{ij} p_i p_j - 1| must not exceed 1e-12.
CotangentPoint cotangent_point(const ChartedBase& base, Vec x, Vec p, double u0);

/// Rescale a nonzero covector onto the level h = 1/2.
Vec momentum_on_level(const ChartedBase& base, const Vec& x, const Vec& p);

/// Pointwise data shared by the splitting and curvature formulas.
struct PointData {
    GeometryJet jet;
    double u0 = 0.0;
    Vec p;     // covector components
    Vec ph;    // raised momentum
    Vec Jph;
    double jnorm = 0.0;  // |J p^h|_g

    double inner(const Vec& v, const Vec& w) const { return jet.inner(v, w); }
};

/// Regularity threshold: |J p^h| below this is treated as the degenerate locus.
inline constexpr double kRegularityTol = 1e-9;

/// Assemble PointData; throws NotRegularError when |J p^h| < kRegularityTol
/// unless require_regular is false.
PointData point_data(const ChartedBase& base, const CotangentPoint& lam, bool require_regular = true);

/// The orthogonal frame attached to a regular point: p^h, the J p^h direction,
/// and a deterministic g-orthonormal basis of span{p^h, J p^h}^perp.
struct CanonicalSplitting {
    Vec ph;
    Vec Jph;
    double jnorm = 0.0;
    Vec b_dir;                // J p^h / |J p^h|
    std::vector<Vec> c_basis; // m - 2 vectors; empty when dim == 2
};

CanonicalSplitting split_at(const ChartedBase& base, const CotangentPoint& lam);
CanonicalSplitting split_from(const PointData& pd);

/// Linear functional A(lam, v) of a vertical vector represented by v = v^h.
double A_form(const PointData& pd, const Vec& v);
double A_form(const ChartedBase& base, const CotangentPoint& lam, const Vec& v);

/// First transport derivative of A, as a closed-form functional.
double A1_form(const PointData& pd, const Vec& v);
double A1_form(const ChartedBase& base, const CotangentPoint& lam, const Vec& v);

/// First and second flow derivatives of t -> 1/|J p^h| along the extremal,
/// in closed form.
std::pair<double, double> invJnorm_derivs(const PointData& pd);
std::pair<double, double> invJnorm_derivs(const ChartedBase& base, const CotangentPoint& lam);

/// Horizontal representative of the distinguished vector V1 in the c-subspace.
Vec V1_vector(const PointData& pd);
Vec V1_vector(const ChartedBase& base, const CotangentPoint& lam);

/// beta(v) = -A1(v)/|Jp^h| - d1 * A(v), with d1 the first derivative from
/// invJnorm_derivs.
double beta_form(const PointData& pd, const Vec& v);
double beta_form(const ChartedBase& base, const CotangentPoint& lam, const Vec& v);

} // namespace magjac

#endif
