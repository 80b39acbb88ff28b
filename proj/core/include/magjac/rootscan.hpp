#ifndef MAGJAC_ROOTSCAN_HPP
#define MAGJAC_ROOTSCAN_HPP

#include <functional>
#include <string>
#include <vector>

namespace magjac {

struct ConjugateEvent {
    double t = 0.0;
    int multiplicity = 1;
};

struct ConjugateReport {
    std::vector<ConjugateEvent> events;  // ordered by time, on (0, T]
    double T = 0.0;
    std::string method;
    int count() const {
        int c = 0;
        for (const auto& e : events) c += e.multiplicity;
        return c;
    }
};

struct ScanOptions {
    double root_tol_t = 1e-9;       // refinement tolerance in t
    double sv_rel_threshold = 1e-7; // singular values below this times the largest count as zero
    double touch_gate = 1e-12;      // |normalized det| gate for sign-preserving (even-order) roots
    double t_guard = 1e-8;          // candidates at or below this time are discarded
    double merge_tol = 1e-7;        // events closer than this merge into one
};

/// Locate zeros of a scalar determinant-like function on a sample grid.
/// `det` must be scale-normalized (O(1)); `multiplicity_at` resolves the
/// kernel dimension at a refined root (return values < 1 reject a touch
/// candidate; sign-change roots are kept with multiplicity at least 1).
/// Throws RootBracketError if a sign change cannot be refined.
std::vector<ConjugateEvent> scan_determinant_roots(const std::function<double(double)>& det,
                                                   const std::function<int(double)>& multiplicity_at,
                                                   const std::vector<double>& grid,
                                                   const ScanOptions& opt = {});

} // namespace magjac

#endif
