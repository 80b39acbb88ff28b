#include <benchmark/benchmark.h>

#include "magjac/curvature.hpp"
#include "magjac/flow.hpp"
#include "magjac/jacobi.hpp"
#include "magjac/models.hpp"

namespace {

using namespace magjac;

CotangentPoint default_point(const Model& m, double u0) {
    return CotangentPoint{m.traits.default_x,
                          momentum_on_level(m.base, m.traits.default_x, m.traits.default_p), u0};
}

void BM_GeometryJet(benchmark::State& state) {
    Model m = make_model("sphere2d");
    Vec x = m.traits.default_x;
    for (auto _ : state) {
        GeometryJet jet = geometry_jet(m.base, x);
        benchmark::DoNotOptimize(jet.riemann);
    }
}
BENCHMARK(BM_GeometryJet);

void BM_CurvatureMaps(benchmark::State& state) {
    Model m = make_model("flat4d_kahler");
    CotangentPoint lam = default_point(m, 1.0);
    for (auto _ : state) {
        CurvatureMaps maps = curvature_maps(m.base, lam, nullptr);
        benchmark::DoNotOptimize(maps.big);
    }
}
BENCHMARK(BM_CurvatureMaps);

void BM_ExtremalIntegration(benchmark::State& state) {
    Model m = make_model("sphere2d");
    CotangentPoint lam = default_point(m, 1.0);
    const double T = double(state.range(0));
    for (auto _ : state) {
        ExtremalTrajectory traj = integrate_extremal(m.base, lam, T, 1e-10);
        benchmark::DoNotOptimize(traj.h_drift);
    }
}
BENCHMARK(BM_ExtremalIntegration)->Arg(5)->Arg(20);

void BM_OracleConjugate(benchmark::State& state) {
    Model m = make_model("flat2d");
    CotangentPoint lam = default_point(m, 1.0);
    for (auto _ : state) {
        ConjugateReport rep = oracle_conjugate_times(m.base, lam, 10.0);
        benchmark::DoNotOptimize(rep.events);
    }
}
BENCHMARK(BM_OracleConjugate);

void BM_JacobiConjugate(benchmark::State& state) {
    Model m = make_model("flat4d_kahler");
    CotangentPoint lam = default_point(m, 1.0);
    for (auto _ : state) {
        ConjugateReport rep = jacobi_conjugate_times(m.base, lam, 10.0);
        benchmark::DoNotOptimize(rep.events);
    }
}
BENCHMARK(BM_JacobiConjugate);

} // namespace

BENCHMARK_MAIN();
