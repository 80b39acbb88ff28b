#include <doctest.h>

#include <cmath>
#include <random>

#include "magjac/errors.hpp"
#include "magjac/flow.hpp"
#include "support.hpp"

using namespace magjac;
using magjac::testing::default_point;

namespace {
constexpr double kTwoPi = 6.283185307179586;
constexpr double kTanRoot2 = 8.986818915818128;  // 2 y* with tan(y*) = y*
} // namespace

TEST_CASE("extremal flow: unit circle with period 2pi") {
    Model m = make_model("flat2d");
    CotangentPoint lam = default_point(m, 1.0);
    ExtremalTrajectory traj = integrate_extremal(m.base, lam, kTwoPi, 1e-10);
    CHECK(traj.x_at(kTwoPi).norm() < 1e-8);
    // x(t) = (sin t, cos t - 1) for p = (1, 0), u0 = B = 1
    Vec xq = traj.x_at(M_PI / 2);
    CHECK(xq[0] == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(xq[1] == doctest::Approx(-1.0).epsilon(1e-9));
    // z accumulates the (negated) potential integral: pi after one loop
    CHECK(traj.z_at(kTwoPi) == doctest::Approx(M_PI).epsilon(1e-9));
}

TEST_CASE("extremal flow: zero field runs straight with constant momentum") {
    Model m = make_model("flat2d", {{"B", 0.0}});
    CotangentPoint lam = default_point(m, 1.0);
    ExtremalTrajectory traj = integrate_extremal(m.base, lam, 5.0, 1e-10);
    CHECK((traj.x_at(5.0) - 5.0 * lam.p).cwiseAbs().maxCoeff() < 1e-11);
    CHECK((traj.p_at(5.0) - lam.p).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("extremal flow: energy conservation on the sphere") {
    Model m = make_model("sphere2d");
    CotangentPoint lam = default_point(m, 1.0);
    ExtremalTrajectory t20 = integrate_extremal(m.base, lam, 20.0, 1e-10);
    CHECK(t20.h_drift < 1e-10);
    ExtremalTrajectory t10pi = integrate_extremal(m.base, lam, 10.0 * M_PI, 1e-10);
    CHECK(t10pi.h_drift < 1e-10);
    // unit speed along the curve
    for (double t : {1.0, 7.0, 19.0}) {
        CotangentPoint cur = t10pi.point_at(t);
        Vec ph = m.base.g_inv(cur.x) * cur.p;
        CHECK(std::abs(ph.dot(m.base.g(cur.x) * ph) - 1.0) < 1e-10);
    }
}

TEST_CASE("extremal flow: chart exit is reported") {
    // an almost-free geodesic from near the pole runs into the excluded cap
    Model m = make_model("sphere2d", {{"B", 0.01}});
    Vec x0 = (Vec(2) << 0.5, 0.0).finished();
    Vec p0 = momentum_on_level(m.base, x0, (Vec(2) << -1.0, 0.0).finished());
    CHECK_THROWS_AS(integrate_extremal(m.base, CotangentPoint{x0, p0, 1.0}, 3.0, 1e-10),
                    ChartExitError);
}

TEST_CASE("oracle: plane benchmark times") {
    Model m = make_model("flat2d");
    ConjugateReport rep = oracle_conjugate_times(m.base, default_point(m, 1.0), 10.0);
    REQUIRE(rep.events.size() == 2);
    CHECK(rep.events[0].t == doctest::Approx(kTwoPi).epsilon(1e-8));
    CHECK(rep.events[1].t == doctest::Approx(kTanRoot2).epsilon(1e-8));
    CHECK(rep.events[0].multiplicity == 1);
    CHECK(rep.events[1].multiplicity == 1);
}

TEST_CASE("oracle: complex structure gives one triple point by T = 7") {
    Model m = make_model("flat4d_kahler");
    ConjugateReport rep = oracle_conjugate_times(m.base, default_point(m, 1.0), 7.0);
    REQUIRE(rep.events.size() == 1);
    CHECK(rep.events[0].t == doctest::Approx(kTwoPi).epsilon(1e-8));
    CHECK(rep.events[0].multiplicity == 3);
}

TEST_CASE("oracle: zero field has no conjugate points") {
    Model m = make_model("flat2d", {{"B", 0.0}});
    ConjugateReport rep = oracle_conjugate_times(m.base, default_point(m, 1.0), 12.0);
    CHECK(rep.events.empty());
}

TEST_CASE("oracle: hyperbolic threshold and supercritical charge") {
    Model m = make_model("hyperbolic2d");
    CHECK(oracle_conjugate_times(m.base, default_point(m, 1.0), 20.0).events.empty());
    ConjugateReport rep = oracle_conjugate_times(m.base, default_point(m, 2.0), 5.0);
    REQUIRE(!rep.events.empty());
    CHECK(rep.events[0].t == doctest::Approx(2.0 * M_PI / std::sqrt(3.0)).epsilon(1e-7));
}

TEST_CASE("variational flow: superposition and scaling") {
    Model m = make_model("sphere2d");
    CotangentPoint lam = default_point(m, 1.0);
    Vec d1 = (Vec(2) << 0.0, 0.3).finished();
    Vec d2 = (Vec(2) << 0.0, -0.1).finished();

    OdeSolution s1 = integrate_variation(m.base, lam, 6.0, d1, 0.0);
    OdeSolution s2 = integrate_variation(m.base, lam, 6.0, d2, 1.0);
    OdeSolution s12 = integrate_variation(m.base, lam, 6.0, d1 + d2, 1.0);
    OdeSolution s1x2 = integrate_variation(m.base, lam, 6.0, 2.0 * d1, 0.0);

    const int blk = 5;
    for (double t : {1.0, 3.5, 6.0}) {
        Vec v1 = s1.at(t).tail(blk);
        Vec v2 = s2.at(t).tail(blk);
        Vec v12 = s12.at(t).tail(blk);
        Vec v1x2 = s1x2.at(t).tail(blk);
        CHECK((v12 - v1 - v2).cwiseAbs().maxCoeff() < 1e-9 * (1.0 + v12.cwiseAbs().maxCoeff()));
        CHECK((v1x2 - 2.0 * v1).cwiseAbs().maxCoeff() < 1e-9 * (1.0 + v1x2.cwiseAbs().maxCoeff()));
    }
}

TEST_CASE("oracle: roots stable under tolerance refinement") {
    Model m = make_model("flat2d_varfield");
    CotangentPoint lam = default_point(m, 1.0);
    OracleOptions loose, tight;
    loose.tol = 1e-10;
    tight.tol = 1e-11;
    ConjugateReport a = oracle_conjugate_times(m.base, lam, 10.0, loose);
    ConjugateReport b = oracle_conjugate_times(m.base, lam, 10.0, tight);
    REQUIRE(a.events.size() == b.events.size());
    for (std::size_t i = 0; i < a.events.size(); ++i)
        CHECK(std::abs(a.events[i].t - b.events[i].t) < 1e-6);
}

TEST_CASE("oracle: charge reversal leaves parallel-field times unchanged") {
    for (const char* name : {"sphere2d", "flat4d_kahler"}) {
        Model m = make_model(name);
        ConjugateReport plus = oracle_conjugate_times(m.base, default_point(m, 1.0), 8.0);
        ConjugateReport minus = oracle_conjugate_times(m.base, default_point(m, -1.0), 8.0);
        REQUIRE(plus.events.size() == minus.events.size());
        for (std::size_t i = 0; i < plus.events.size(); ++i) {
            CHECK(std::abs(plus.events[i].t - minus.events[i].t) < 1e-7);
            CHECK(plus.events[i].multiplicity == minus.events[i].multiplicity);
        }
    }
}

TEST_CASE("oracle: flipping the Lorentz force breaks the gradient-field times") {
    // with a field gradient the conjugate times are charge-orientation
    // sensitive; a sign flip of the force must move them
    Model m = make_model("flat2d_varfield");
    Model flipped = make_model("flat2d_varfield");
    auto om = flipped.base.magnetic_form;
    auto th = flipped.base.potential;
    auto omd = flipped.base.magnetic_d;
    flipped.base.magnetic_form = [om](const Vec& x) { return Mat(-om(x)); };
    flipped.base.potential = [th](const Vec& x) { return Vec(-th(x)); };
    flipped.base.magnetic_d = [omd](const Vec& x, int k) { return Mat(-omd(x, k)); };
    flipped.base.magnetic_dd = flipped.base.magnetic_dd;

    CotangentPoint lam = default_point(m, 1.0);
    ConjugateReport straight = oracle_conjugate_times(m.base, lam, 8.0);
    ConjugateReport mirrored = oracle_conjugate_times(flipped.base, lam, 8.0);
    REQUIRE(!straight.events.empty());
    bool differs = straight.events.size() != mirrored.events.size();
    if (!differs)
        for (std::size_t i = 0; i < straight.events.size(); ++i)
            differs = differs || std::abs(straight.events[i].t - mirrored.events[i].t) > 1e-3;
    CHECK(differs);
}

TEST_CASE("trajectory accessors and the conservation log") {
    Model m = make_model("hyperbolic2d");
    CotangentPoint lam = default_point(m, 2.0);
    ExtremalTrajectory traj = integrate_extremal_range(m.base, lam, -2.0, 5.0, 1e-10);
    CHECK(traj.t_min == -2.0);
    CHECK(traj.t_max == 5.0);
    CHECK(traj.h_log.size() == traj.h_log_t.size());
    CHECK(traj.h_drift < 1e-11);
    CHECK((traj.x_at(0.0) - lam.x).cwiseAbs().maxCoeff() < 1e-14);
    CHECK(std::abs(traj.h_at(-1.5) - 0.5) < 1e-11);
}
