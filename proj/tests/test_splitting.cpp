#include <doctest.h>

#include <cmath>
#include <random>

#include "magjac/curvature.hpp"
#include "magjac/errors.hpp"
#include "magjac/flow.hpp"
#include "magjac/splitting.hpp"
#include "magjac/transport.hpp"
#include "support.hpp"

using namespace magjac;
using magjac::testing::default_point;
using magjac::testing::make_flat4d_axial;
using magjac::testing::random_c_vector;
using magjac::testing::random_point;

namespace {

// Hand-evaluated reference values for B(x, y) = 1 + x at the origin with
// p = (1, 0), |Jp| = 1:
//   nabla J(p; p) = (0, 1) = Jp, so
//   A(v)  = 2 g(v, Jp) - u0 g(v, J^2 p),
//   d1    = -g(Jp, nabla J(p;p)) = -1,
//   d2    = 3 g^2(Jp, nJpp) - |nJpp|^2 - g(Jp, n2Jppp) + u0*(0) = 3 - 1 - 0 = 2,
//   A1(b) = g(b, -3 u0 nabla J(Jp; p) + u0^2/2 J^3 p) - A(b)^2
//         = -u0^2/2 - 4 u0^2   at u0 = 1: -4.5  (nabla J(Jp;p) = -p, J^3 p = -Jp).
Model varfield_unit() { return make_model("flat2d_varfield", {{"B0", 1.0}, {"B1", 1.0}}); }

} // namespace

TEST_CASE("split_at: plane with unit field") {
    Model m = make_model("flat2d");
    CotangentPoint lam = cotangent_point(m.base, Vec::Zero(2), (Vec(2) << 1, 0).finished(), 1.0);
    CanonicalSplitting sp = split_at(m.base, lam);
    CHECK(sp.ph.isApprox((Vec(2) << 1, 0).finished(), 1e-14));
    CHECK(sp.jnorm == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(sp.b_dir.isApprox((Vec(2) << 0, 1).finished(), 1e-14));
    CHECK(sp.c_basis.empty());
}

TEST_CASE("split_at: complex structure on R^4 gives the axis c-basis") {
    Model m = make_model("flat4d_kahler");
    CotangentPoint lam = cotangent_point(m.base, Vec::Zero(4), (Vec(4) << 1, 0, 0, 0).finished(), 1.0);
    CanonicalSplitting sp = split_at(m.base, lam);
    CHECK(sp.jnorm == doctest::Approx(1.0).epsilon(1e-14));
    REQUIRE(sp.c_basis.size() == 2);
    CHECK(sp.c_basis[0].isApprox((Vec(4) << 0, 0, 1, 0).finished(), 1e-12));
    CHECK(sp.c_basis[1].isApprox((Vec(4) << 0, 0, 0, 1).finished(), 1e-12));
}

TEST_CASE("split_at: zero field is not D-regular") {
    Model m = make_model("flat2d", {{"B", 0.0}});
    CotangentPoint lam = cotangent_point(m.base, Vec::Zero(2), (Vec(2) << 1, 0).finished(), 1.0);
    CHECK_THROWS_AS(split_at(m.base, lam), NotRegularError);
}

TEST_CASE("split_at: frame is g-orthonormal and deterministic") {
    std::mt19937_64 rng(31);
    for (const auto& name : model_names()) {
        Model m = make_model(name);
        if (!m.traits.uniform_field && name != "flat2d_varfield") continue;
        for (int trial = 0; trial < 5; ++trial) {
            CotangentPoint lam = random_point(m, 0.7, rng);
            PointData pd = point_data(m.base, lam);
            CanonicalSplitting a = split_from(pd);
            CanonicalSplitting b = split_from(pd);
            std::vector<Vec> frame = {a.ph, a.b_dir};
            frame.insert(frame.end(), a.c_basis.begin(), a.c_basis.end());
            for (std::size_t i = 0; i < frame.size(); ++i)
                for (std::size_t j = 0; j < frame.size(); ++j) {
                    double expect = (i == j) ? 1.0 : 0.0;
                    CHECK(std::abs(pd.inner(frame[i], frame[j]) - expect) < 1e-12);
                }
            for (std::size_t k = 0; k < a.c_basis.size(); ++k)
                CHECK((a.c_basis[k] - b.c_basis[k]).cwiseAbs().maxCoeff() == 0.0);
        }
    }
}

TEST_CASE("cotangent_point enforces the energy level") {
    Model m = make_model("flat2d");
    CHECK_THROWS_AS(cotangent_point(m.base, Vec::Zero(2), (Vec(2) << 2, 0).finished(), 1.0), ConfigError);
    Vec p = momentum_on_level(m.base, Vec::Zero(2), (Vec(2) << 2, 0).finished());
    CHECK(p.isApprox((Vec(2) << 1, 0).finished(), 1e-14));
}

TEST_CASE("A form: parallel-field closed form at random points") {
    std::mt19937_64 rng(32);
    std::normal_distribution<double> gauss(0, 1);
    for (const char* name : {"flat2d", "sphere2d", "hyperbolic2d", "flat4d_kahler"}) {
        Model m = make_model(name);
        for (int trial = 0; trial < 20; ++trial) {
            CotangentPoint lam = random_point(m, 0.5 + trial * 0.1, rng);
            PointData pd = point_data(m.base, lam);
            Vec v(m.traits.dim);
            for (int i = 0; i < v.size(); ++i) v[i] = gauss(rng);
            double expect = -lam.u0 / pd.jnorm * pd.inner(v, pd.jet.J * pd.Jph);
            CHECK(std::abs(A_form(pd, v) - expect) < 1e-10);
        }
    }
}

TEST_CASE("A form: vanishes on the c-space of a complex structure") {
    std::mt19937_64 rng(33);
    Model m = make_model("flat4d_kahler");
    for (int trial = 0; trial < 10; ++trial) {
        CotangentPoint lam = random_point(m, 1.0, rng);
        PointData pd = point_data(m.base, lam);
        Vec v = random_c_vector(pd, split_from(pd), rng);
        CHECK(std::abs(A_form(pd, v)) < 1e-13);
    }
}

TEST_CASE("A form: hand value for the linear-strength field") {
    Model m = varfield_unit();
    CotangentPoint lam = cotangent_point(m.base, Vec::Zero(2), (Vec(2) << 1, 0).finished(), 1.0);
    PointData pd = point_data(m.base, lam);
    CanonicalSplitting sp = split_from(pd);
    CHECK(A_form(pd, sp.b_dir) == doctest::Approx(2.0).epsilon(1e-13));
}

TEST_CASE("A1 form: parallel-field closed form and complex-structure zero") {
    std::mt19937_64 rng(34);
    Model ax = make_flat4d_axial(1.0, 2.0);
    for (int trial = 0; trial < 20; ++trial) {
        CotangentPoint lam = random_point(ax, 0.8 + 0.05 * trial, rng);
        PointData pd = point_data(ax.base, lam);
        Vec v = random_c_vector(pd, split_from(pd), rng);
        Vec J3p = pd.jet.J * (pd.jet.J * pd.Jph);
        double expect = lam.u0 * lam.u0 / (2.0 * pd.jnorm) * pd.inner(v, J3p);
        CHECK(std::abs(A1_form(pd, v) - expect) < 1e-10);
    }
    Model kah = make_model("flat4d_kahler");
    for (int trial = 0; trial < 10; ++trial) {
        CotangentPoint lam = random_point(kah, 1.0, rng);
        PointData pd = point_data(kah.base, lam);
        Vec v = random_c_vector(pd, split_from(pd), rng);
        CHECK(std::abs(A1_form(pd, v)) < 1e-12);
    }
}

TEST_CASE("A1 form: hand value for the linear-strength field") {
    Model m = varfield_unit();
    CotangentPoint lam = cotangent_point(m.base, Vec::Zero(2), (Vec(2) << 1, 0).finished(), 1.0);
    PointData pd = point_data(m.base, lam);
    CanonicalSplitting sp = split_from(pd);
    CHECK(A1_form(pd, sp.b_dir) == doctest::Approx(-4.5).epsilon(1e-12));
}

TEST_CASE("A1 form matches the transported flow derivative of A") {
    // d/dt A(lam(t), K^t v) at t = 0 against the closed form, on the
    // non-parallel field where every term is active.
    Model m = varfield_unit();
    CotangentPoint lam = cotangent_point(m.base, Vec::Zero(2), (Vec(2) << 1, 0).finished(), 1.0);
    ExtremalTrajectory traj = integrate_extremal_range(m.base, lam, -0.1, 0.1, 1e-12);
    PointData pd0 = point_data(m.base, lam);
    Vec v = split_from(pd0).b_dir;

    const double dt = 0.02;
    double f[5];
    for (int k = -2; k <= 2; ++k) {
        Vec w = transport_vector(traj, 0.0, v, k * dt);
        f[k + 2] = A_form(point_data(m.base, traj.point_at(k * dt)), w);
    }
    double fd = stencil_d1_5(f, dt);
    CHECK(std::abs(fd - A1_form(pd0, v)) < 1e-5);
}

TEST_CASE("invJnorm derivatives: parallel fields give exact zeros") {
    std::mt19937_64 rng(35);
    for (const char* name : {"flat2d", "sphere2d", "hyperbolic2d", "flat4d_kahler"}) {
        Model m = make_model(name);
        CotangentPoint lam = random_point(m, 1.3, rng);
        auto [d1, d2] = invJnorm_derivs(m.base, lam);
        CHECK(std::abs(d1) < 1e-12);
        CHECK(std::abs(d2) < 1e-11);
    }
}

TEST_CASE("invJnorm derivatives: hand values for the linear-strength field") {
    Model m = varfield_unit();
    {
        CotangentPoint lam = cotangent_point(m.base, Vec::Zero(2), (Vec(2) << 1, 0).finished(), 0.4);
        auto [d1, d2] = invJnorm_derivs(m.base, lam);
        CHECK(d1 == doctest::Approx(-1.0).epsilon(1e-13));
        CHECK(d2 == doctest::Approx(2.0).epsilon(1e-12));
    }
    {
        CotangentPoint lam = cotangent_point(m.base, Vec::Zero(2), (Vec(2) << 0, 1).finished(), 0.4);
        auto [d1, d2] = invJnorm_derivs(m.base, lam);
        CHECK(std::abs(d1) < 1e-13);
        (void)d2;
    }
}

TEST_CASE("invJnorm derivatives match flow finite differences") {
    Model m = varfield_unit();
    CotangentPoint lam = cotangent_point(m.base, Vec::Zero(2), (Vec(2) << 1, 0).finished(), 1.0);
    ExtremalTrajectory traj = integrate_extremal_range(m.base, lam, -0.1, 0.1, 1e-12);
    const double dt = 0.02;
    double f[5];
    for (int k = -2; k <= 2; ++k)
        f[k + 2] = 1.0 / point_data(m.base, traj.point_at(k * dt)).jnorm;
    auto [d1, d2] = invJnorm_derivs(m.base, lam);
    CHECK(std::abs(stencil_d1_5(f, dt) - d1) < 1e-5);
    CHECK(std::abs(stencil_d2_5(f, dt) - d2) < 1e-5);
}

TEST_CASE("V1 vector: parallel closed form, complex-structure cancellation") {
    std::mt19937_64 rng(36);
    Model ax = make_flat4d_axial(1.0, 2.0);
    for (int trial = 0; trial < 10; ++trial) {
        CotangentPoint lam = random_point(ax, 1.1, rng);
        PointData pd = point_data(ax.base, lam);
        Vec J2p = pd.jet.J * pd.Jph;
        Vec expect = lam.u0 / pd.jnorm * J2p + lam.u0 * pd.jnorm * pd.ph;
        CHECK((V1_vector(pd) - expect).cwiseAbs().maxCoeff() < 1e-11);
        // V1 lies in the c-space
        CHECK(std::abs(pd.inner(V1_vector(pd), pd.ph)) < 1e-11);
        CHECK(std::abs(pd.inner(V1_vector(pd), pd.Jph)) < 1e-11);
    }
    Model kah = make_model("flat4d_kahler");
    CotangentPoint lam = default_point(kah, 1.0);
    CHECK(V1_vector(kah.base, lam).cwiseAbs().maxCoeff() < 1e-13);
    // m = 2 forces V1 = 0 through the projection identity
    Model var = varfield_unit();
    CotangentPoint lamv = cotangent_point(var.base, Vec::Zero(2), (Vec(2) << 1, 0).finished(), 1.0);
    CHECK(V1_vector(var.base, lamv).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("beta: parallel shortcut, complex-structure zero, hand value") {
    std::mt19937_64 rng(37);
    Model ax = make_flat4d_axial(0.7, 1.9);
    for (int trial = 0; trial < 10; ++trial) {
        CotangentPoint lam = random_point(ax, 1.4, rng);
        PointData pd = point_data(ax.base, lam);
        Vec v = random_c_vector(pd, split_from(pd), rng);
        CHECK(std::abs(beta_form(pd, v) + A1_form(pd, v) / pd.jnorm) < 1e-12);
    }
    Model kah = make_model("flat4d_kahler");
    CotangentPoint lamk = default_point(kah, 1.0);
    PointData pdk = point_data(kah.base, lamk);
    Vec vk = split_from(pdk).c_basis[0];
    CHECK(std::abs(beta_form(pdk, vk)) < 1e-12);

    Model var = varfield_unit();
    CotangentPoint lam = cotangent_point(var.base, Vec::Zero(2), (Vec(2) << 1, 0).finished(), 1.0);
    PointData pd = point_data(var.base, lam);
    CHECK(beta_form(pd, split_from(pd).b_dir) == doctest::Approx(6.5).epsilon(1e-12));
}

TEST_CASE("beta matches the flow derivative of -A/|Jp|") {
    Model m = varfield_unit();
    CotangentPoint lam = cotangent_point(m.base, Vec::Zero(2), (Vec(2) << 1, 0).finished(), 1.0);
    ExtremalTrajectory traj = integrate_extremal_range(m.base, lam, -0.1, 0.1, 1e-12);
    PointData pd0 = point_data(m.base, lam);
    Vec v = split_from(pd0).b_dir;
    const double dt = 0.01;
    double f[5];
    for (int k = -2; k <= 2; ++k) {
        PointData pd = point_data(m.base, traj.point_at(k * dt));
        Vec w = transport_vector(traj, 0.0, v, k * dt);
        f[k + 2] = A_form(pd, w) / pd.jnorm;
    }
    CHECK(std::abs(-stencil_d1_5(f, dt) - beta_form(pd0, v)) < 1e-5);
}

TEST_CASE("all splitting functionals are linear in the vertical slot") {
    std::mt19937_64 rng(38);
    std::normal_distribution<double> gauss(0, 1);
    Model models[] = {varfield_unit(), make_flat4d_axial(1.0, 2.0)};
    for (const Model& m : models) {
        for (int trial = 0; trial < 10; ++trial) {
            CotangentPoint lam = random_point(m, 0.9, rng);
            PointData pd = point_data(m.base, lam);
            const int d = m.traits.dim;
            Vec v(d), w(d);
            for (int i = 0; i < d; ++i) {
                v[i] = gauss(rng);
                w[i] = gauss(rng);
            }
            double a = gauss(rng);
            auto check_linear = [&](auto&& f) {
                double lhs = f(Vec(a * v + w));
                double rhs = a * f(v) + f(w);
                CHECK(std::abs(lhs - rhs) < 1e-10 * (1.0 + std::abs(lhs)));
            };
            check_linear([&](const Vec& u) { return A_form(pd, u); });
            check_linear([&](const Vec& u) { return A1_form(pd, u); });
            check_linear([&](const Vec& u) { return beta_form(pd, u); });
        }
    }
}
