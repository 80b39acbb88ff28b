#include <doctest.h>

#include <cmath>
#include <random>

#include "magjac/comparison.hpp"
#include "magjac/errors.hpp"
#include "magjac/flow.hpp"
#include "support.hpp"

using namespace magjac;
using magjac::testing::default_point;
using magjac::testing::make_flat4d_axial;

namespace {

// Independent zero counter for the unit tests: bracket-and-bisect each factor
// on a fine grid; both factors have only simple zeros away from t = 0.
long count_zeros(const std::function<double(double)>& f, double T) {
    const double dt = 0.003;
    long count = 0;
    double tp = dt, fp = f(dt);
    for (double t = 2 * dt; t <= T + dt; t += dt) {
        double tc = std::min(t, T);
        double fc = f(tc);
        if (fp * fc < 0 || fc == 0.0) {
            double a = tp, b = tc, fa = fp;
            for (int it = 0; it < 80 && b - a > 1e-12; ++it) {
                double mid = 0.5 * (a + b), fm = f(mid);
                if (fa * fm <= 0)
                    b = mid;
                else {
                    a = mid;
                    fa = fm;
                }
            }
            if (0.5 * (a + b) <= T * (1 + 1e-13)) ++count;
        }
        tp = tc;
        fp = fc;
        if (tc >= T) break;
    }
    return count;
}

long direct_count(double wb, double wc, double T, int n) {
    long zb = count_zeros([wb](double t) { return phi(wb, t); }, T);
    long zc = (n > 3) ? count_zeros([wc](double t) { return psi(wc, t); }, T) : 0;
    return zb + (n - 3) * zc;
}

} // namespace

TEST_CASE("phi and psi: pinned special values") {
    CHECK(phi(0.0, 1.3) == doctest::Approx(std::pow(1.3, 4)).epsilon(1e-15));
    CHECK(std::abs(phi(1.0, 2.0 * M_PI)) < 1e-14);
    CHECK(std::abs(psi(1.0, M_PI)) < 1e-14);
    CHECK(psi(0.0, 0.37) == doctest::Approx(0.37));
    // hyperbolic continuation stays real and root-free for t > 0
    for (double t : {0.5, 2.0, 7.0}) {
        CHECK(phi(-1.3, t) < 0.0);
        CHECK(psi(-2.0, t) > 0.0);
    }
}

TEST_CASE("phi: fourth-order zero at t = 0 for every omega") {
    for (double w : {-2.0, -0.5, 0.4, 1.0, 3.5}) {
        double r1 = phi(w, 0.02) / std::pow(0.02, 4);
        double r2 = phi(w, 0.01) / std::pow(0.01, 4);
        CHECK(std::abs(r1) > 1e-4);                       // not higher order
        CHECK(std::abs(r1 - r2) < 0.05 * std::abs(r2));   // not lower order
        CHECK(std::abs(phi(w, 0.01)) < 1e-6);             // vanishes fast
    }
}

TEST_CASE("tan roots: one per branch, refined to 1e-12") {
    auto roots = tan_equal_roots(30.0);
    REQUIRE(roots.size() == 9);  // branches k = 1..9 fit below 30
    for (std::size_t k = 0; k < roots.size(); ++k) {
        double y = roots[k];
        CHECK(y > (k + 1) * M_PI);
        CHECK(y < (k + 1) * M_PI + M_PI / 2);
        CHECK(std::abs(std::tan(y) - y) < 1e-8);
    }
    CHECK(roots[0] == doctest::Approx(4.493409457909064).epsilon(1e-12));
}

TEST_CASE("Z_T: pinned cases") {
    CHECK(Z_T(-1.0, -2.0, 15.0, 5) == 0);
    CHECK(Z_T(0.0, 0.0, 15.0, 5) == 0);
    CHECK(Z_T(1.0, -1.0, 2.0 * M_PI, 3) == 1);
    CHECK(Z_T(-1.0, 1.0, M_PI, 5) == 2);
    // flat plane benchmark: one loop root plus one tangency root by T = 10
    CHECK(Z_T(1.0, 0.0, 10.0, 3) == 2);
    // complex-structure benchmark: 1 + 2 at the shared time 2 pi
    CHECK(Z_T(1.0, 0.25, 7.0, 5) == 3);
}

TEST_CASE("Z_T: closed form equals direct root counting") {
    std::mt19937_64 rng(61);
    std::uniform_real_distribution<double> uw(-4.0, 4.0), uT(0.2, 20.0);
    std::uniform_int_distribution<int> un(3, 6);
    for (int trial = 0; trial < 150; ++trial) {
        double wb = uw(rng), wc = uw(rng), T = uT(rng);
        int n = un(rng);
        CAPTURE(wb);
        CAPTURE(wc);
        CAPTURE(T);
        CAPTURE(n);
        CHECK(Z_T(wb, wc, T, n) == direct_count(wb, wc, T, n));
    }
}

TEST_CASE("Z_T: monotone in both frequencies and the horizon") {
    const int G = 9;
    auto wv = [&](int i) { return -3.0 + 6.0 * i / (G - 1); };
    auto tv = [&](int i) { return 1.0 + 18.0 * i / (G - 1); };
    for (int i = 0; i < G; ++i)
        for (int j = 0; j < G; ++j)
            for (int k = 0; k < G; ++k) {
                long z = Z_T(wv(i), wv(j), tv(k), 6);
                if (i + 1 < G) CHECK(Z_T(wv(i + 1), wv(j), tv(k), 6) >= z);
                if (j + 1 < G) CHECK(Z_T(wv(i), wv(j + 1), tv(k), 6) >= z);
                if (k + 1 < G) CHECK(Z_T(wv(i), wv(j), tv(k + 1), 6) >= z);
            }
}

TEST_CASE("model constants: closed forms for the catalog") {
    {
        ComparisonBounds b = model_constants(make_model("flat4d_kahler"), 1.0);
        CHECK(!b.empirical);
        CHECK(b.cb == 0.0);
        CHECK(b.Cb == 0.0);
        CHECK(b.kb == doctest::Approx(1.0));
        CHECK(b.Kb == doctest::Approx(1.0));
        CHECK(b.kc == doctest::Approx(0.25));
        CHECK(b.Kc == doctest::Approx(0.25));
    }
    {
        ComparisonBounds b = model_constants(make_model("sphere2d", {{"B", 2.0}}), 0.5);
        CHECK(b.cb == doctest::Approx(1.0));
        CHECK(b.kb == doctest::Approx(4.0));
        CHECK(b.n == 3);
    }
    {
        ComparisonBounds b = model_constants(make_model("flat2d"), 1.0);
        CHECK(b.cb == 0.0);
        CHECK(b.kb == doctest::Approx(1.0));
    }
    {
        ComparisonBounds b = model_constants(make_model("hyperbolic2d"), 2.0);
        CHECK(b.cb == doctest::Approx(-1.0));
        CHECK(b.omega_b_lower() == doctest::Approx(3.0));
    }
    CHECK_THROWS_AS(model_constants(make_model("flat2d_varfield"), 1.0), ScopeError);
}

TEST_CASE("model constants: empirical fallback is flagged and brackets the truth") {
    // two invariant planes of different strengths: Q genuinely varies, the
    // closed-form branch does not apply
    Model ax = make_flat4d_axial(1.0, 2.0);
    ComparisonBounds b = model_constants(ax, 1.0, 500);
    CHECK(b.empirical);
    CHECK(b.kb < b.Kb);
    CHECK(b.kb > 0.0);
    // Qtilde on the b-line lies in [B1^2, B2^2]-ish territory; the sampled
    // bounds must straddle values seen on fresh samples
    std::mt19937_64 rng(62);
    for (int trial = 0; trial < 50; ++trial) {
        CotangentPoint lam = magjac::testing::random_point(ax, 1.0, rng);
        PointData pd = point_data(ax.base, lam);
        CanonicalSplitting sp = split_from(pd);
        Vec Jb = pd.jet.J * sp.b_dir;
        double cr = pd.inner(Jb, pd.Jph);
        double q = pd.inner(Jb, Jb) - cr * cr / (pd.jnorm * pd.jnorm);
        CHECK(q >= b.kb - 1e-9);
        CHECK(q <= b.Kb + 1e-9);
    }
}

TEST_CASE("check_comparison: tight bracket on the plane benchmark") {
    Model m = make_model("flat2d");
    ConjugateReport rep = oracle_conjugate_times(m.base, default_point(m, 1.0), 10.0);
    ComparisonVerdict v = check_comparison(rep, model_constants(m, 1.0));
    CHECK(v.lower == 2);
    CHECK(v.upper == 2);
    CHECK(v.observed == 2);
    CHECK(v.pass);
}

TEST_CASE("check_comparison: complex structure is tight with count 3") {
    Model m = make_model("flat4d_kahler");
    ConjugateReport rep = oracle_conjugate_times(m.base, default_point(m, 1.0), 7.0);
    ComparisonVerdict v = check_comparison(rep, model_constants(m, 1.0));
    CHECK(v.lower == 3);
    CHECK(v.upper == 3);
    CHECK(v.observed == 3);
    CHECK(v.pass);
    // the diagonal case of the interval corollary forces n-2 = 3 points by 2 pi
    bool found = false;
    for (const auto& c : v.corollary)
        if (c.applicable && c.required_count == 3) {
            found = true;
            CHECK(c.satisfied);
            CHECK(c.bound_time == doctest::Approx(2.0 * M_PI));
        }
    CHECK(found);
}

TEST_CASE("check_comparison: subcritical hyperbolic charge, empty report") {
    Model m = make_model("hyperbolic2d");
    ConjugateReport rep = oracle_conjugate_times(m.base, default_point(m, 1.0), 20.0);
    ComparisonVerdict v = check_comparison(rep, model_constants(m, 1.0));
    CHECK(v.lower == 0);
    CHECK(v.upper == 0);
    CHECK(v.observed == 0);
    CHECK(v.pass);
    // omega upper bounds are exactly zero: the no-conjugate-points assertion applies
    bool all_clear = false;
    for (const auto& c : v.corollary)
        if (c.applicable && c.description == "no conjugate points at all") {
            all_clear = true;
            CHECK(c.satisfied);
        }
    CHECK(all_clear);
}

TEST_CASE("check_comparison: supercritical hyperbolic charge") {
    Model m = make_model("hyperbolic2d");
    ConjugateReport rep = oracle_conjugate_times(m.base, default_point(m, 2.0), 10.0);
    ComparisonVerdict v = check_comparison(rep, model_constants(m, 2.0));
    CHECK(v.pass);
    CHECK(v.lower == v.observed);  // constants are exact for a space form
    CHECK(v.observed >= 2);
}

TEST_CASE("check_comparison: empirical axial bounds bracket the observed count") {
    Model ax = make_flat4d_axial(1.0, 2.0);
    CotangentPoint lam = default_point(ax, 1.0);
    ConjugateReport rep = oracle_conjugate_times(ax.base, lam, 8.0);
    ComparisonVerdict v = check_comparison(rep, model_constants(ax, 1.0, 800));
    CHECK(v.lower <= v.observed);
    CHECK(v.observed <= v.upper);
    CHECK(v.pass);
}
