#include "magjac/comparison.hpp"

#include <cmath>
#include <random>

#include "magjac/curvature.hpp"
#include "magjac/errors.hpp"
#include "magjac/splitting.hpp"

namespace magjac {

double phi(double omega, double t) {
    if (omega == 0.0) return t * t * t * t;
    if (omega > 0.0) {
        double a = std::sqrt(omega);
        return 0.5 * a * t * std::sin(a * t) + std::cos(a * t) - 1.0;
    }
    double b = std::sqrt(-omega);
    return -0.5 * b * t * std::sinh(b * t) + std::cosh(b * t) - 1.0;
}

double psi(double omega, double t) {
    if (omega == 0.0) return t;
    if (omega > 0.0) return std::sin(std::sqrt(omega) * t);
    return std::sinh(std::sqrt(-omega) * t);
}

std::vector<double> tan_equal_roots(double y_max) {
    std::vector<double> roots;
    for (int k = 1;; ++k) {
        double lo = k * M_PI;
        if (lo >= y_max) break;
        double hi = lo + M_PI / 2.0;
        // f(y) = y - k pi - atan(y) is strictly increasing with a sign change
        // across the branch, so plain bisection isolates the root.
        auto f = [k](double y) { return y - k * M_PI - std::atan(y); };
        double a = lo, b = hi;
        for (int it = 0; it < 200 && (b - a) > 1e-12; ++it) {
            double mid = 0.5 * (a + b);
            if (f(mid) < 0)
                a = mid;
            else
                b = mid;
        }
        double y = 0.5 * (a + b);
        if (y > y_max * (1.0 + 1e-13) + 1e-13) break;
        roots.push_back(y);
    }
    return roots;
}

namespace {

long eps_floor(double x) {
    if (x <= 0) return 0;
    return long(std::floor(x * (1.0 + 1e-13) + 1e-13));
}

} // namespace

long Z_T(double omega_b, double omega_c, double T, int n) {
    if (T <= 0 || n < 3) throw ConfigError("Z_T: need T > 0 and n >= 3");
    long zb = 0, zc = 0;
    if (omega_b > 0) {
        double sb = std::sqrt(omega_b);
        zb = eps_floor(T * sb / (2.0 * M_PI)) + long(tan_equal_roots(sb * T / 2.0).size());
    }
    if (omega_c > 0 && n > 3) zc = (n - 3) * eps_floor(T * std::sqrt(omega_c) / M_PI);
    return zb + zc;
}

ComparisonBounds model_constants(const Model& model, double u0bar, int samples, unsigned seed) {
    if (!model.traits.uniform_field)
        throw ScopeError("comparison requires nabla J = 0 (uniform field)");

    ComparisonBounds b;
    b.n = model.traits.dim + 1;
    b.u0bar = u0bar;

    if (model.traits.J2_scalar && model.traits.const_curvature) {
        // J^2 = -B^2 Id and constant curvature K give exact constants:
        // the curvature form is K |v|^2 on both factors and the Q form is
        // B^2 |v_b|^2 + (B^2/4) |v_c|^2.
        double K = *model.traits.const_curvature;
        double B2 = (*model.traits.J2_scalar) * (*model.traits.J2_scalar);
        b.cb = b.Cb = K;
        b.kb = b.Kb = B2;
        if (b.n > 3) {
            b.cc = b.Cc = K;
            b.kc = b.Kc = B2 / 4.0;
        }
        return b;
    }

    // Empirical fallback: sample the two quadratic forms on random regular
    // points. The margin only widens the bracket (lower constants rounded
    // down, upper rounded up).
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const auto& tr = model.traits;
    const int m = tr.dim;

    double cb = 1e300, Cb = -1e300, cc = 1e300, Cc = -1e300;
    double kb = 1e300, Kb = -1e300, kc = 1e300, Kc = -1e300;

    for (int s = 0; s < samples; ++s) {
        Vec x(m);
        for (int i = 0; i < m; ++i) x[i] = tr.sample_lo[i] + unif(rng) * (tr.sample_hi[i] - tr.sample_lo[i]);
        Vec praw(m);
        for (int i = 0; i < m; ++i) praw[i] = gauss(rng);
        Vec p = momentum_on_level(model.base, x, praw);
        PointData pd = point_data(model.base, CotangentPoint{x, p, u0bar});
        CanonicalSplitting sp = split_from(pd);

        auto qtilde = [&](const Vec& vh) {
            Vec Jv = pd.jet.J * vh;
            double cr = pd.inner(Jv, pd.Jph);
            return pd.inner(Jv, Jv) - cr * cr / (pd.jnorm * pd.jnorm);
        };
        auto curv = [&](const Vec& vh) { return pd.inner(pd.jet.curvature_op(pd.ph, vh, pd.ph), vh); };

        double sb = curv(sp.b_dir), qb = qtilde(sp.b_dir);
        cb = std::min(cb, sb);
        Cb = std::max(Cb, sb);
        kb = std::min(kb, qb);
        Kb = std::max(Kb, qb);
        if (m > 2) {
            Vec vc = Vec::Zero(m);
            for (const Vec& w : sp.c_basis) vc += gauss(rng) * w;
            double nrm = pd.jet.norm(vc);
            if (nrm < 1e-12) continue;
            vc /= nrm;
            double sc = curv(vc), qc = qtilde(vc) / 4.0;  // Q = Qtilde/4 on the c-space
            cc = std::min(cc, sc);
            Cc = std::max(Cc, sc);
            kc = std::min(kc, qc);
            Kc = std::max(Kc, qc);
        }
    }

    auto widen_lo = [](double v) { return v - 0.01 * std::abs(v) - 1e-12; };
    auto widen_hi = [](double v) { return v + 0.01 * std::abs(v) + 1e-12; };
    b.cb = widen_lo(cb);
    b.Cb = widen_hi(Cb);
    b.kb = widen_lo(kb);
    b.Kb = widen_hi(Kb);
    if (m > 2) {
        b.cc = widen_lo(cc);
        b.Cc = widen_hi(Cc);
        b.kc = widen_lo(kc);
        b.Kc = widen_hi(Kc);
    }
    b.empirical = true;
    return b;
}

namespace {

int count_up_to(const ConjugateReport& r, double tmax) {
    int c = 0;
    for (const auto& e : r.events)
        if (e.t <= tmax + 1e-9) c += e.multiplicity;
    return c;
}

bool none_before(const ConjugateReport& r, double t_open) {
    for (const auto& e : r.events)
        if (e.t < t_open - 1e-9) return false;
    return true;
}

} // namespace

ComparisonVerdict check_comparison(const ConjugateReport& report, const ComparisonBounds& bounds) {
    ComparisonVerdict v;
    v.bounds = bounds;
    const int n = bounds.n;
    const double T = report.T;

    double wbl = bounds.omega_b_lower(), wcl = bounds.omega_c_lower();
    double wbu = bounds.omega_b_upper(), wcu = bounds.omega_c_upper();

    v.lower = Z_T(wbl, wcl, T, n);
    v.upper = Z_T(wbu, wcu, T, n);
    v.observed = report.count();
    v.pass = (v.lower <= v.observed) && (v.observed <= v.upper);

    auto add = [&](std::string desc, bool applicable, bool satisfied, double bt, int rc) {
        v.corollary.push_back({std::move(desc), applicable, applicable ? satisfied : true, bt, rc});
    };

    // Interval assertions driven by the upper constants: conjugate-free windows.
    {
        bool a1 = wbu > 0 && wcu > 0;
        double t1 = a1 ? std::min(2.0 * M_PI / std::sqrt(wbu), M_PI / std::sqrt(wcu)) : 0.0;
        add("no conjugate points before min(2pi/sqrt(wb_up), pi/sqrt(wc_up))", a1,
            a1 && none_before(report, t1), t1, 0);

        bool a2 = wbu > 0 && wcu <= 0;
        double t2 = a2 ? 2.0 * M_PI / std::sqrt(wbu) : 0.0;
        add("no conjugate points before 2pi/sqrt(wb_up)", a2, a2 && none_before(report, t2), t2, 0);

        bool a3 = wbu <= 0 && wcu > 0;
        double t3 = a3 ? M_PI / std::sqrt(wcu) : 0.0;
        add("no conjugate points before pi/sqrt(wc_up)", a3, a3 && none_before(report, t3), t3, 0);

        bool a4 = wbu <= 0 && wcu <= 0;
        add("no conjugate points at all", a4, a4 && report.events.empty(), T, 0);
    }

    // Assertions driven by the lower constants: forced conjugate points.
    {
        bool a5 = wbl > 4.0 * wcl && wcl > 0;
        double t5 = a5 ? 2.0 * M_PI / std::sqrt(wbl) : 0.0;
        bool s5 = a5 && t5 <= T && count_up_to(report, t5) >= 1;
        add("at least one conjugate point by 2pi/sqrt(wb_lo)", a5 && t5 <= T, s5, t5, 1);

        bool equal_case = std::abs(wbl - 4.0 * wcl) <= 1e-9 * std::max(1.0, std::abs(wbl));
        bool a6 = wcl >= 0.25 * wbl && wbl > 0;
        int need6 = a6 ? ((equal_case && n >= 3) ? n - 2 : n - 3) : 0;
        double t6 = a6 ? M_PI / std::sqrt(wcl > 0 ? wcl : wbl / 4.0) : 0.0;
        bool s6 = a6 && t6 <= T && count_up_to(report, t6) >= need6;
        add("at least n-3 (n-2 on the diagonal case) conjugate points by pi/sqrt(wc_lo)", a6 && t6 <= T,
            s6, t6, need6);

        bool a7 = wbl > 0 && wcl <= 0;
        double t7 = a7 ? 2.0 * M_PI / std::sqrt(wbl) : 0.0;
        bool s7 = a7 && t7 <= T && count_up_to(report, t7) >= 1;
        add("at least one conjugate point by 2pi/sqrt(wb_lo)", a7 && t7 <= T, s7, t7, 1);

        bool a8 = wbl <= 0 && wcl > 0;
        double t8 = a8 ? M_PI / std::sqrt(wcl) : 0.0;
        bool s8 = a8 && t8 <= T && count_up_to(report, t8) >= n - 3;
        add("at least n-3 conjugate points by pi/sqrt(wc_lo)", a8 && t8 <= T, s8, t8, n - 3);
    }

    for (const auto& c : v.corollary) v.pass = v.pass && c.satisfied;
    return v;
}

} // namespace magjac
