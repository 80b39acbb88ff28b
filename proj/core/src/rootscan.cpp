#include "magjac/rootscan.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "magjac/errors.hpp"

namespace magjac {

namespace {

double bisect(const std::function<double(double)>& f, double a, double b, double fa, double fb,
              double tol) {
    if (fa == 0.0) return a;
    if (fb == 0.0) return b;
    if (fa * fb > 0) {
        std::ostringstream msg;
        msg << "no sign change on [" << a << ", " << b << "] (f = " << fa << ", " << fb << ")";
        throw RootBracketError(msg.str());
    }
    for (int it = 0; it < 200 && (b - a) > tol; ++it) {
        double m = 0.5 * (a + b);
        double fm = f(m);
        if (fm == 0.0) return m;
        if (fa * fm < 0) {
            b = m;
            fb = fm;
        } else {
            a = m;
            fa = fm;
        }
    }
    return 0.5 * (a + b);
}

// Golden-section minimization of |f| on [a, b].
double minimize_abs(const std::function<double(double)>& f, double a, double b, double tol) {
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double c = b - gr * (b - a), d = a + gr * (b - a);
    double fc = std::abs(f(c)), fd = std::abs(f(d));
    while (b - a > tol) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - gr * (b - a);
            fc = std::abs(f(c));
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + gr * (b - a);
            fd = std::abs(f(d));
        }
    }
    return 0.5 * (a + b);
}

} // namespace

std::vector<ConjugateEvent> scan_determinant_roots(const std::function<double(double)>& det,
                                                   const std::function<int(double)>& multiplicity_at,
                                                   const std::vector<double>& grid,
                                                   const ScanOptions& opt) {
    std::vector<ConjugateEvent> events;
    const int n = int(grid.size());
    if (n < 3) return events;

    std::vector<double> f(n);
    for (int i = 0; i < n; ++i) f[i] = det(grid[i]);

    auto push_event = [&](double t, int mult) {
        if (t <= opt.t_guard) return;
        for (auto& e : events) {
            if (std::abs(e.t - t) < opt.merge_tol) {
                e.multiplicity = std::max(e.multiplicity, mult);
                return;
            }
        }
        events.push_back({t, mult});
    };

    for (int i = 0; i + 1 < n; ++i) {
        if (f[i] == 0.0 && grid[i] <= opt.t_guard) continue;
        bool change = (f[i] == 0.0) || (f[i + 1] == 0.0) || (f[i] * f[i + 1] < 0);
        if (change) {
            double t = bisect(det, grid[i], grid[i + 1], f[i], f[i + 1], opt.root_tol_t);
            int mult = std::max(1, multiplicity_at(t));
            push_event(t, mult);
            continue;
        }
        // sign-preserving candidate: interior local minimum of |f|
        if (i >= 1 && std::abs(f[i]) < std::abs(f[i - 1]) && std::abs(f[i]) <= std::abs(f[i + 1]) &&
            f[i - 1] * f[i + 1] > 0) {
            double tm = minimize_abs(det, grid[i - 1], grid[i + 1], opt.root_tol_t);
            if (std::abs(det(tm)) < opt.touch_gate) {
                int mult = multiplicity_at(tm);
                if (mult >= 1) push_event(tm, mult);
            }
        }
    }

    std::sort(events.begin(), events.end(), [](const auto& a, const auto& b) { return a.t < b.t; });
    return events;
}

} // namespace magjac
