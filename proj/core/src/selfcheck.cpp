#include "magjac/selfcheck.hpp"

#include <chrono>
#include <cmath>
#include <ostream>
#include <random>
#include <sstream>

#include "magjac/comparison.hpp"
#include "magjac/curvature.hpp"
#include "magjac/errors.hpp"
#include "magjac/jacobi.hpp"
#include "magjac/models.hpp"

namespace magjac {

namespace {

constexpr double kTwoPi = 6.283185307179586;
constexpr double kTanRoot2 = 8.986818915818128;  // 2 y*, tan(y*) = y*, y* in (pi, 3pi/2)

struct Scenario {
    std::string label;
    Model model;
    CotangentPoint lam;
    double T = 20.0;
};

std::vector<Scenario> acceptance_scenarios() {
    std::vector<Scenario> s;
    auto add = [&s](const std::string& label, Model m, double u0, double T) {
        Vec x = m.traits.default_x;
        Vec p = momentum_on_level(m.base, x, m.traits.default_p);
        CotangentPoint lam{x, p, u0};
        s.push_back({label, std::move(m), std::move(lam), T});
    };
    add("flat2d B=1 u0=1", make_model("flat2d", {{"B", 1.0}}), 1.0, 20.0);
    add("sphere2d K=1 B=1 u0=1", make_model("sphere2d", {{"B", 1.0}}), 1.0, 20.0);
    add("hyperbolic2d B=1 u0=1", make_model("hyperbolic2d", {{"B", 1.0}}), 1.0, 20.0);
    add("hyperbolic2d B=1 u0=2", make_model("hyperbolic2d", {{"B", 1.0}}), 2.0, 20.0);
    add("flat4d_kahler u0=1", make_model("flat4d_kahler", {{"B", 1.0}}), 1.0, 20.0);
    add("flat2d_varfield B=1+x/2 u0=1", make_model("flat2d_varfield", {{"B0", 1.0}, {"B1", 0.5}}), 1.0,
        20.0);
    return s;
}

struct ScenarioRun {
    Scenario sc;
    ConjugateReport oracle;
    ConjugateReport jacobi;
};

CotangentPoint random_point(const Model& m, double u0, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const auto& tr = m.traits;
    Vec x(tr.dim);
    for (int i = 0; i < tr.dim; ++i)
        x[i] = tr.sample_lo[i] + unif(rng) * (tr.sample_hi[i] - tr.sample_lo[i]);
    Vec praw(tr.dim);
    for (int i = 0; i < tr.dim; ++i) praw[i] = gauss(rng);
    return CotangentPoint{x, momentum_on_level(m.base, x, praw), u0};
}

Vec random_c_vector(const PointData& pd, const CanonicalSplitting& sp, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    Vec v = Vec::Zero(pd.jet.dim);
    for (const Vec& w : sp.c_basis) v += gauss(rng) * w;
    double nrm = pd.jet.norm(v);
    return (nrm > 1e-12) ? Vec(v / nrm) : sp.c_basis.front();
}

// Direct zero counter for phi_wb * psi_wc^{n-3} on (0, T]: bracket every
// simple zero of each factor on a fine grid and refine by bisection. The
// count with multiplicity is #zeros(phi) + (n-3) * #zeros(psi) because both
// factors have only simple zeros on (0, infinity).
long count_factor_zeros(const std::function<double(double)>& f, double T) {
    const double dt = 0.004;
    long count = 0;
    double prev_t = 1e-9, prev_f = f(prev_t);
    for (double t = dt; t <= T * (1.0 + 1e-13) + dt; t += dt) {
        double tc = std::min(t, T);
        double fc = f(tc);
        if (prev_f == 0.0) prev_f = 1e-300;
        if (fc == 0.0) fc = -prev_f * 1e-300;  // nudge exact zeros into a crossing
        if (prev_f * fc < 0) {
            double a = prev_t, b = tc, fa = prev_f;
            for (int it = 0; it < 80 && b - a > 1e-12; ++it) {
                double mid = 0.5 * (a + b), fm = f(mid);
                if (fa * fm <= 0) {
                    b = mid;
                } else {
                    a = mid;
                    fa = fm;
                }
            }
            double root = 0.5 * (a + b);
            if (root > 1e-9 && root <= T * (1.0 + 1e-13) + 1e-13) ++count;
        }
        prev_t = tc;
        prev_f = fc;
        if (tc >= T) break;
    }
    return count;
}

long direct_model_zero_count(double wb, double wc, double T, int n) {
    long zb = count_factor_zeros([wb](double t) { return phi(wb, t); }, T);
    long zc = (n > 3) ? count_factor_zeros([wc](double t) { return psi(wc, t); }, T) : 0;
    return zb + (n - 3) * zc;
}

std::string report_to_string(const ConjugateReport& r) {
    std::ostringstream os;
    os << "[";
    for (std::size_t i = 0; i < r.events.size(); ++i) {
        os << r.events[i].t << " (x" << r.events[i].multiplicity << ")";
        if (i + 1 < r.events.size()) os << ", ";
    }
    os << "]";
    return os.str();
}

} // namespace

std::vector<CheckResult> run_acceptance(std::ostream* progress) {
    std::vector<CheckResult> results;
    std::vector<ScenarioRun> runs;

    auto finish = [&](CheckResult r) {
        if (progress)
            (*progress) << (r.pass ? "PASS" : "FAIL") << "  criterion " << r.id << "  " << r.name
                        << (r.detail.empty() ? "" : "  -- " + r.detail) << "\n"
                        << std::flush;
        results.push_back(std::move(r));
    };
    auto timed = [&](int id, const std::string& name, const std::function<std::pair<bool, std::string>()>& fn) {
        CheckResult r;
        r.id = id;
        r.name = name;
        auto t0 = std::chrono::steady_clock::now();
        try {
            auto [ok, detail] = fn();
            r.pass = ok;
            r.detail = detail;
        } catch (const std::exception& e) {
            r.pass = false;
            r.detail = std::string("exception: ") + e.what();
        }
        r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        finish(std::move(r));
    };

    // 1. oracle vs intrinsic-Jacobi agreement on the scenario battery
    timed(1, "oracle-formula agreement on the scenario battery", [&]() -> std::pair<bool, std::string> {
        auto t0 = std::chrono::steady_clock::now();
        bool ok = true;
        std::ostringstream detail;
        for (const Scenario& sc : acceptance_scenarios()) {
            ScenarioRun run;
            run.sc = sc;
            run.oracle = oracle_conjugate_times(sc.model.base, sc.lam, sc.T);
            run.jacobi = jacobi_conjugate_times(sc.model.base, sc.lam, sc.T);
            bool match = run.oracle.events.size() == run.jacobi.events.size();
            double worst_dt = 0.0;
            if (match) {
                for (std::size_t i = 0; i < run.oracle.events.size(); ++i) {
                    worst_dt = std::max(worst_dt, std::abs(run.oracle.events[i].t - run.jacobi.events[i].t));
                    match = match && (run.oracle.events[i].multiplicity == run.jacobi.events[i].multiplicity);
                }
                match = match && worst_dt < 1e-5;
            }
            if (!match) {
                ok = false;
                detail << sc.label << ": oracle " << report_to_string(run.oracle) << " vs jacobi "
                       << report_to_string(run.jacobi) << "; ";
            } else {
                detail << sc.label << ": " << run.oracle.count() << " conjugate points, max dt "
                       << worst_dt << "; ";
            }
            runs.push_back(std::move(run));
        }
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        detail << "runtime " << secs << " s";
        if (secs >= 30.0) ok = false;
        return {ok, detail.str()};
    });

    auto run_for = [&](const std::string& label) -> const ScenarioRun* {
        for (const auto& r : runs)
            if (r.sc.label.find(label) != std::string::npos) return &r;
        return nullptr;
    };
    auto filter = [](const ConjugateReport& r, double T) {
        ConjugateReport out = r;
        out.T = T;
        out.events.clear();
        for (const auto& e : r.events)
            if (e.t <= T + 1e-9) out.events.push_back(e);
        return out;
    };

    // 2. Heisenberg benchmark values
    timed(2, "flat2d benchmark times {2pi, 2y*} on (0,10]", [&]() -> std::pair<bool, std::string> {
        const ScenarioRun* run = run_for("flat2d B=1");
        if (!run) return {false, "scenario battery missing"};
        bool ok = true;
        std::ostringstream detail;
        for (const ConjugateReport* rep : {&run->oracle, &run->jacobi}) {
            ConjugateReport r = filter(*rep, 10.0);
            bool good = r.events.size() == 2 && std::abs(r.events[0].t - kTwoPi) < 1e-5 &&
                        std::abs(r.events[1].t - kTanRoot2) < 1e-5 && r.events[0].multiplicity == 1 &&
                        r.events[1].multiplicity == 1;
            if (!good) ok = false;
            detail << rep->method << " " << report_to_string(r) << "; ";
        }
        return {ok, detail.str()};
    });

    // 3. Kahler multiplicity
    timed(3, "flat4d_kahler conjugate time 2pi with multiplicity 3", [&]() -> std::pair<bool, std::string> {
        const ScenarioRun* run = run_for("flat4d_kahler");
        if (!run) return {false, "scenario battery missing"};
        bool ok = true;
        std::ostringstream detail;
        for (const ConjugateReport* rep : {&run->oracle, &run->jacobi}) {
            ConjugateReport r = filter(*rep, 7.0);
            bool good = r.events.size() == 1 && std::abs(r.events[0].t - kTwoPi) < 1e-5 &&
                        r.events[0].multiplicity == 3;
            if (!good) ok = false;
            detail << rep->method << " " << report_to_string(r) << "; ";
        }
        return {ok, detail.str()};
    });

    // 4. uniform-field vanishing of the (c,a) and (a,a) blocks
    timed(4, "uniform fields: (c,a) and (a,a) blocks vanish", [&]() -> std::pair<bool, std::string> {
        std::mt19937_64 rng(91);
        double worst_general = 0.0;
        bool exact_ok = true;
        std::vector<Model> models;
        models.push_back(make_model("flat2d"));
        models.push_back(make_model("sphere2d"));
        models.push_back(make_model("hyperbolic2d"));
        models.push_back(make_model("flat4d_kahler"));
        models.push_back(make_model("flat4d_kahler", {{"B", 2.0}}));
        for (const Model& m : models) {
            for (int trial = 0; trial < 3; ++trial) {
                CotangentPoint lam = random_point(m, 1.0 + trial * 0.5, rng);
                auto [ca0, aa0] = Rca_Raa(m.base, lam, nullptr);
                exact_ok = exact_ok && aa0 == 0.0 && (ca0.size() == 0 || ca0.cwiseAbs().maxCoeff() == 0.0);
                ChartedBase forced = m.base;  // route the same field through the stencil branch
                forced.uniform_field = false;
                FlowContext ctx = make_flow_context(forced, lam);
                auto [ca, aa] = Rca_Raa(forced, lam, &ctx);
                worst_general = std::max(worst_general, std::abs(aa));
                if (ca.size() > 0) worst_general = std::max(worst_general, ca.cwiseAbs().maxCoeff());
            }
        }
        std::ostringstream detail;
        detail << "general-branch max |value| = " << worst_general << ", analytic branch exact zeros: "
               << (exact_ok ? "yes" : "no");
        return {exact_ok && worst_general < 1e-4, detail.str()};
    });

    // 5. specialization chain: Kahler = uniform = general
    timed(5, "specialization consistency at 100 random points", [&]() -> std::pair<bool, std::string> {
        std::mt19937_64 rng(92);
        double worst = 0.0;
        std::vector<Model> unif = {make_model("flat2d"), make_model("sphere2d"), make_model("hyperbolic2d"),
                                   make_model("flat4d_kahler"), make_model("flat4d_kahler", {{"B", 2.0}})};
        for (const Model& m : unif) {
            for (int trial = 0; trial < 100; ++trial) {
                CotangentPoint lam = random_point(m, 0.5 + 2.0 * trial / 100.0, rng);
                PointData pd = point_data(m.base, lam);
                worst = std::max(worst, std::abs(Rbb_value(pd) - Rbb_value_uniform(pd)));
                if (m.traits.dim > 2) {
                    CanonicalSplitting sp = split_from(pd);
                    Vec v = random_c_vector(pd, sp, rng);
                    worst = std::max(worst, std::abs(Rcc_quadratic(pd, v) - Rcc_quadratic_uniform(pd, v)));
                    worst = std::max(worst, std::abs(Rcb_value(pd, v) - Rcb_value_uniform(pd, v)));
                }
            }
        }
        std::vector<Model> kahler = {make_model("flat2d"), make_model("flat4d_kahler")};
        for (const Model& m : kahler) {
            for (int trial = 0; trial < 100; ++trial) {
                CotangentPoint lam = random_point(m, 0.5 + 2.0 * trial / 100.0, rng);
                PointData pd = point_data(m.base, lam);
                worst = std::max(worst, std::abs(Rbb_value(pd) - Rbb_value_kahler(pd)));
                if (m.traits.dim > 2) {
                    CanonicalSplitting sp = split_from(pd);
                    Vec v = random_c_vector(pd, sp, rng);
                    worst = std::max(worst, std::abs(Rcc_quadratic(pd, v) - Rcc_quadratic_kahler(pd, v)));
                    worst = std::max(worst, std::abs(Rcb_value(pd, v) - Rcb_value_kahler(pd, v)));
                }
            }
        }
        std::ostringstream detail;
        detail << "max |difference| = " << worst;
        return {worst < 1e-10, detail.str()};
    });

    // 6. identity between the big curvature and the Q form
    timed(6, "big-curvature / Q-form identity at 100 random points", [&]() -> std::pair<bool, std::string> {
        std::mt19937_64 rng(93);
        std::normal_distribution<double> gauss(0.0, 1.0);
        double worst = 0.0;
        std::vector<Model> unif = {make_model("flat2d"), make_model("sphere2d"), make_model("hyperbolic2d"),
                                   make_model("flat4d_kahler"), make_model("flat4d_kahler", {{"B", 2.0}})};
        for (const Model& m : unif) {
            for (int trial = 0; trial < 100; ++trial) {
                CotangentPoint lam = random_point(m, 0.3 + 1.7 * trial / 100.0, rng);
                CurvatureMaps maps = curvature_maps(m.base, lam, nullptr);
                const int c = int(maps.basis.c_basis.size());
                Vec coords(2 + c);
                for (int i = 0; i < coords.size(); ++i) coords[i] = gauss(rng);
                // v^h of the (a,b,c) coordinates drops the a-component
                Vec vh = coords[1] * maps.basis.b_dir;
                Vec vc(c);
                for (int k = 0; k < c; ++k) {
                    vh += coords[2 + k] * maps.basis.c_basis[k];
                    vc[k] = coords[2 + k];
                }
                Vec img = maps.big * coords;
                double lhs = 0.0;
                for (int i = 1; i < coords.size(); ++i) lhs += img[i] * coords[i];
                PointData pd = point_data(m.base, lam);
                double rhs = pd.inner(pd.jet.curvature_op(pd.ph, vh, pd.ph), vh) +
                             lam.u0 * lam.u0 * Q_forms(m.base, lam, coords[1], vc).second;
                worst = std::max(worst, std::abs(lhs - rhs));
            }
        }
        std::ostringstream detail;
        detail << "max |difference| = " << worst;
        return {worst < 1e-10, detail.str()};
    });

    // 7. Z_T closed form vs direct zero counting, and monotonicity
    timed(7, "Z_T exactness (500 random tuples) and monotonicity (20^3 grid)",
          [&]() -> std::pair<bool, std::string> {
              std::mt19937_64 rng(94);
              std::uniform_real_distribution<double> uw(-4.0, 4.0), uT(0.1, 20.0);
              std::uniform_int_distribution<int> un(3, 6);
              long mismatches = 0;
              for (int trial = 0; trial < 500; ++trial) {
                  double wb = uw(rng), wc = uw(rng), T = uT(rng);
                  int n = un(rng);
                  if (Z_T(wb, wc, T, n) != direct_model_zero_count(wb, wc, T, n)) ++mismatches;
              }
              long violations = 0;
              const int G = 20;
              auto wval = [&](int i) { return -4.0 + 8.0 * i / (G - 1); };
              auto tval = [&](int i) { return 0.5 + 19.0 * i / (G - 1); };
              for (int i = 0; i < G; ++i)
                  for (int j = 0; j < G; ++j)
                      for (int k = 0; k < G; ++k) {
                          long z = Z_T(wval(i), wval(j), tval(k), 5);
                          if (i + 1 < G && Z_T(wval(i + 1), wval(j), tval(k), 5) < z) ++violations;
                          if (j + 1 < G && Z_T(wval(i), wval(j + 1), tval(k), 5) < z) ++violations;
                          if (k + 1 < G && Z_T(wval(i), wval(j), tval(k + 1), 5) < z) ++violations;
                      }
              std::ostringstream detail;
              detail << mismatches << " count mismatches, " << violations << " monotonicity violations";
              return {mismatches == 0 && violations == 0, detail.str()};
          });

    // 8. comparison-theorem bracket on the uniform scenarios
    timed(8, "comparison bracket on uniform scenarios (tight for flat2d, flat4d_kahler)",
          [&]() -> std::pair<bool, std::string> {
              bool ok = true;
              std::ostringstream detail;
              for (const auto& run : runs) {
                  if (!run.sc.model.traits.uniform_field) continue;
                  ComparisonBounds bounds = model_constants(run.sc.model, run.sc.lam.u0);
                  ComparisonVerdict v = check_comparison(run.oracle, bounds);
                  bool tight_required = run.sc.label.find("flat2d B=1") != std::string::npos ||
                                        run.sc.label.find("flat4d_kahler") != std::string::npos;
                  bool good = v.pass && (!tight_required || (v.lower == v.observed && v.observed == v.upper));
                  if (!good) ok = false;
                  detail << run.sc.label << ": " << v.lower << " <= " << v.observed << " <= " << v.upper
                         << (v.pass ? " ok" : " VIOLATED") << "; ";
              }
              return {ok, detail.str()};
          });

    // 9. structural integrity: conservation, Darboux drift, model-curve determinant
    timed(9, "h-conservation, Darboux drift, constant-block determinant shape",
          [&]() -> std::pair<bool, std::string> {
              const double T = 4.0 * M_PI;
              Model sph = make_model("sphere2d");
              CotangentPoint lam{sph.traits.default_x,
                                 momentum_on_level(sph.base, sph.traits.default_x, sph.traits.default_p), 1.0};
              ExtremalTrajectory traj = integrate_extremal(sph.base, lam, T, 1e-10);

              Model kah = make_model("flat4d_kahler");
              CotangentPoint lamk{kah.traits.default_x,
                                  momentum_on_level(kah.base, kah.traits.default_x, kah.traits.default_p),
                                  1.0};
              JacobiOptions jopt;
              jopt.tol = 1e-10;
              JacobiRun jr = jacobi_conjugate_scan(kah.base, lamk, T, jopt);
              double darboux = jr.frames.darboux_drift();

              // constant blocks: raw determinant against phi * psi^{n-3}
              const double wb = 1.3, wc = 0.49;
              const int n = 5;
              StructuralBlocks blk;
              blk.rho_bb = wb;
              blk.rho_cb = Vec::Zero(n - 3);
              blk.rho_ca = Vec::Zero(n - 3);
              blk.Rcc = wc * Mat::Identity(n - 3, n - 3);
              OdeOptions oopt;
              oopt.rtol = 1e-12;
              oopt.atol = 1e-13;
              FrameSolution fr = structural_integrate([&](double) { return blk; }, n - 1, 12.0, oopt);
              double dot = 0, nd = 0, nm = 0;
              for (int i = 1; i <= 2000; ++i) {
                  double t = 12.0 * i / 2000.0;
                  double dv = fr.det_at(t);
                  double mv = phi(wb, t) * std::pow(psi(wc, t), n - 3);
                  dot += dv * mv;
                  nd += dv * dv;
                  nm += mv * mv;
              }
              double corr = std::abs(dot) / std::sqrt(nd * nm);

              std::ostringstream detail;
              detail << "h drift " << traj.h_drift << ", Darboux drift " << darboux
                     << ", determinant correlation 1-" << (1.0 - corr);
              bool ok = traj.h_drift < 1e-10 && darboux < 1e-8 && corr > 1.0 - 1e-8;
              return {ok, detail.str()};
          });

    // 10. frame covariance under rotations of the initial c-basis
    timed(10, "conjugate data invariant under c-basis rotation", [&]() -> std::pair<bool, std::string> {
        Model kah = make_model("flat4d_kahler");
        CotangentPoint lam{kah.traits.default_x,
                           momentum_on_level(kah.base, kah.traits.default_x, kah.traits.default_p), 1.0};
        std::mt19937_64 rng(95);
        std::normal_distribution<double> gauss(0.0, 1.0);
        Mat A(2, 2);
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) A(i, j) = gauss(rng);
        Eigen::HouseholderQR<Mat> qr(A);
        Mat U = qr.householderQ();

        // pointwise conjugation of the (c,c) block
        PointData pd = point_data(kah.base, lam);
        CanonicalSplitting sp = split_from(pd);
        Mat R0(2, 2), Rrot(2, 2);
        std::vector<Vec> wrot(2, Vec::Zero(4));
        for (int k = 0; k < 2; ++k)
            for (int j = 0; j < 2; ++j) wrot[k] += U(j, k) * sp.c_basis[j];
        for (int j = 0; j < 2; ++j)
            for (int k = 0; k < 2; ++k) {
                R0(j, k) = Rcc_bilinear(pd, sp.c_basis[j], sp.c_basis[k]);
                Rrot(j, k) = Rcc_bilinear(pd, wrot[j], wrot[k]);
            }
        double conj_defect = (Rrot - U.transpose() * R0 * U).cwiseAbs().maxCoeff();

        JacobiOptions plain, rotated;
        rotated.c_rotation = U;
        ConjugateReport r0 = jacobi_conjugate_times(kah.base, lam, 15.0, plain);
        ConjugateReport r1 = jacobi_conjugate_times(kah.base, lam, 15.0, rotated);
        bool match = r0.events.size() == r1.events.size();
        double worst_dt = 0.0;
        if (match)
            for (std::size_t i = 0; i < r0.events.size(); ++i) {
                worst_dt = std::max(worst_dt, std::abs(r0.events[i].t - r1.events[i].t));
                match = match && r0.events[i].multiplicity == r1.events[i].multiplicity;
            }
        std::ostringstream detail;
        detail << "Rcc conjugation defect " << conj_defect << ", max time shift " << worst_dt;
        return {match && worst_dt < 1e-7 && conj_defect < 1e-10, detail.str()};
    });

    return results;
}

bool all_passed(const std::vector<CheckResult>& results) {
    for (const auto& r : results)
        if (!r.pass) return false;
    return true;
}

} // namespace magjac
