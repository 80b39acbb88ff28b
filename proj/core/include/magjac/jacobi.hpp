#ifndef MAGJAC_JACOBI_HPP
#define MAGJAC_JACOBI_HPP

#include "magjac/curvature.hpp"
#include "magjac/transport.hpp"

namespace magjac {

/// Coefficient blocks of the structural equations at one time, written in the
/// canonical frame order (a, b, c_1..c_{n-3}).
struct StructuralBlocks {
    double rho_aa = 0.0;
    double rho_bb = 0.0;
    Vec rho_cb;  // n-3
    Vec rho_ca;  // n-3
    Mat Rcc;     // (n-3) x (n-3)
};

using BlockSource = std::function<StructuralBlocks(double)>;

/// Integrated moving frame [E(t) | F(t)] in W = R^{2N}, N = n-1, with the
/// symplectic form u^T Sigma v, Sigma = [[0, I], [-I, 0]]. The initial frame
/// is the standard symplectic basis E(0) = [I; 0], F(0) = [0; I].
class FrameSolution {
public:
    int N = 0;
    int cdim = 0;
    OdeSolution sol;    // integrated state containing [E | F] flattened column-major
    int ef_offset = 0;  // offset of the frame block inside the state vector
    Mat E0;

    Mat EF_at(double t) const;
    Mat E_at(double t) const;
    Mat F_at(double t) const;

    /// det [E(t) | E(0)] (raw, not normalized).
    double det_at(double t) const;
    /// Column-normalized determinant, O(1) scale, same zero set.
    double det_normalized_at(double t) const;
    /// dim(span E(t) cap span E(0)) from the singular values of the
    /// column-normalized pencil.
    int intersection_dim_at(double t, double sv_rel_threshold = 1e-7) const;

    /// max over accepted nodes of |[E F]^T Sigma [E F] - Sigma|.
    double darboux_drift() const;
};

/// Integrate the structural equations against an arbitrary block source
/// (e.g. constant blocks for the model curves).
FrameSolution structural_integrate(const BlockSource& blocks, int N, double T,
                                   const OdeOptions& opt = {});

/// Conjugate times on (0, T] from frame determinant roots, multiplicities
/// from the frame intersection dimension.
ConjugateReport conjugate_from_frames(const FrameSolution& frames, double T,
                                      const ScanOptions& scan = {},
                                      int samples_per_unit = 60, int min_samples = 600);

struct JacobiOptions {
    double tol = 1e-10;         // integration accuracy target
    double grid_dt = 0.005;     // series grid for the stencil-derived blocks (non-uniform branch)
    int stride_d1 = 4;          // series stride for first/second flow derivatives
    int stride_d4 = 12;         // series stride for the fourth flow derivative
    int samples_per_unit = 60;  // d(t) sampling density
    int min_samples = 600;
    ScanOptions scan;
    StencilSettings stencil;
    /// Replace the initial c-basis with c_basis * U (orthogonal U) before
    /// integrating; used by the frame-covariance checks.
    Mat c_rotation;
};

struct JacobiRun {
    ConjugateReport report;
    std::vector<double> t_grid;
    std::vector<double> det;  // normalized d(t) samples
    FrameSolution frames;
    double h_drift = 0.0;
};

/// End-to-end intrinsic path: integrate the extremal, transport the c-basis,
/// evaluate the curvature blocks in the transported frame, integrate the
/// structural equations and detect conjugate times.
JacobiRun jacobi_conjugate_scan(const ChartedBase& base, const CotangentPoint& lam, double T,
                                const JacobiOptions& opt = {});
ConjugateReport jacobi_conjugate_times(const ChartedBase& base, const CotangentPoint& lam, double T,
                                       const JacobiOptions& opt = {});

} // namespace magjac

#endif
