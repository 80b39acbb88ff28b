#include "magjac/ode.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "magjac/errors.hpp"

namespace magjac {

namespace {

// Dormand-Prince 8(5,3) coefficients (Hairer, Norsett & Wanner, "Solving
// Ordinary Differential Equations I", fig. DOP853), with the stage-free
// 6th-order interpolation variant.
constexpr double c2 = 0.05260015195876773187856;
constexpr double c3 = 0.07890022793815159781784;
constexpr double c4 = 0.11835034190722739672676;
constexpr double c5 = 0.28164965809277260327324;
constexpr double c6 = 0.33333333333333333333333;
constexpr double c7 = 0.25;
constexpr double c8 = 0.30769230769230769230769;
constexpr double c9 = 0.65128205128205128205128;
constexpr double c10 = 0.6;
constexpr double c11 = 0.85714285714285714285714;

constexpr double b1 = 0.05429373411656876223805;
constexpr double b6 = 4.45031289275240888144114;
constexpr double b7 = 1.89151789931450038304282;
constexpr double b8 = -5.80120396001058478146721;
constexpr double b9 = 0.31116436695781989440892;
constexpr double b10 = -0.15216094966251607855618;
constexpr double b11 = 0.20136540080403034837478;
constexpr double b12 = 0.04471061572777259051769;

constexpr double bhh1 = 0.24409448818897637795276;
constexpr double bhh2 = 0.73384668828161185734136;
constexpr double bhh3 = 0.02205882352941176470588;

constexpr double er1 = 0.01312004499419488073250;
constexpr double er6 = -1.22515644637620444072057;
constexpr double er7 = -0.49575894965725019152141;
constexpr double er8 = 1.66437718245498653696153;
constexpr double er9 = -0.35032884874997368168865;
constexpr double er10 = 0.33417911871301747902973;
constexpr double er11 = 0.08192320648511571246571;
constexpr double er12 = -0.02235530786388629525884;

constexpr double a21 = 0.05260015195876773187856;
constexpr double a31 = 0.01972505698453789945446;
constexpr double a32 = 0.05917517095361369836338;
constexpr double a41 = 0.02958758547680684918169;
constexpr double a43 = 0.08876275643042054754507;
constexpr double a51 = 0.24136513415926668550237;
constexpr double a53 = -0.88454947932828608534486;
constexpr double a54 = 0.92483400326179200311574;
constexpr double a61 = 0.03703703703703703703704;
constexpr double a64 = 0.17082860872947387127960;
constexpr double a65 = 0.12546768756682242501669;
constexpr double a71 = 0.037109375;
constexpr double a74 = 0.17025221101954403931498;
constexpr double a75 = 0.06021653898045596068502;
constexpr double a76 = -0.017578125;
constexpr double a81 = 0.03709200011850479271088;
constexpr double a84 = 0.17038392571223999381021;
constexpr double a85 = 0.10726203044637328465181;
constexpr double a86 = -0.01531943774862440175279;
constexpr double a87 = 0.00827378916381402288758;
constexpr double a91 = 0.62411095871607571711443;
constexpr double a94 = -3.36089262944694129406857;
constexpr double a95 = -0.86821934684172600681819;
constexpr double a96 = 27.5920996994467083049416;
constexpr double a97 = 20.1540675504778934086187;
constexpr double a98 = -43.4898841810699588477366;
constexpr double a101 = 0.47766253643826436589043;
constexpr double a104 = -2.48811461997166764192642;
constexpr double a105 = -0.59029082683684299637145;
constexpr double a106 = 21.2300514481811942347289;
constexpr double a107 = 15.2792336328824235832597;
constexpr double a108 = -33.2882109689848629194453;
constexpr double a109 = -0.02033120170850862613582;
constexpr double a111 = -0.93714243008598732571704;
constexpr double a114 = 5.18637242884406370830024;
constexpr double a115 = 1.09143734899672957818500;
constexpr double a116 = -8.14978701074692612513997;
constexpr double a117 = -18.5200656599969598641566;
constexpr double a118 = 22.7394870993505042818970;
constexpr double a119 = 2.49360555267965238987089;
constexpr double a1110 = -3.04676447189821950038237;
constexpr double a121 = 2.27331014751653820792360;
constexpr double a124 = -10.5344954667372501984067;
constexpr double a125 = -2.00087205822486249909676;
constexpr double a126 = -17.9589318631187989172766;
constexpr double a127 = 27.9488845294199600508500;
constexpr double a128 = -2.85899827713502369474066;
constexpr double a129 = -8.87285693353062954433549;
constexpr double a1210 = 12.3605671757943030647266;
constexpr double a1211 = 0.64339274601576353035597;

constexpr double d41 = -5.40685903845352664250302;
constexpr double d46 = 367.268892700041893590281;
constexpr double d47 = 154.609958204083905482676;
constexpr double d48 = -505.920283865412564024766;
constexpr double d49 = 15.5975154819608130688200;
constexpr double d410 = -26.1936204184402805956691;
constexpr double d411 = -0.74003512364122230844721;
constexpr double d412 = 1.11776539319431476294221;
constexpr double d413 = -0.33333333333333333333333;
constexpr double d51 = 6.51987095363079615048119;
constexpr double d56 = -1066.34956011730205278592;
constexpr double d57 = -351.864047514639508625601;
constexpr double d58 = 1363.51955696662884408368;
constexpr double d59 = -112.727669432657582669864;
constexpr double d510 = 159.796191868560289612921;
constexpr double d511 = -2.13865100308788816220259;
constexpr double d512 = -3.75569172113289760348584;
constexpr double d513 = 7.0;
constexpr double d61 = 10.4698004763293477204238;
constexpr double d66 = -1380.01473607038123167155;
constexpr double d67 = -531.219827862514074379012;
constexpr double d68 = 1866.98964341870892451324;
constexpr double d69 = -53.3302605020547902574560;
constexpr double d610 = 82.4147560258671369782481;
constexpr double d611 = 7.38443654502992069572676;
constexpr double d612 = 0.41729908012587751149843;
constexpr double d613 = -3.11111111111111111111111;
constexpr double d71 = -16.6338582677165354330709;
constexpr double d76 = 4516.16568914956011730205;
constexpr double d77 = 1393.85185384057776465219;
constexpr double d78 = -5687.52042419481539670071;
constexpr double d79 = 473.965563750151263163661;
constexpr double d710 = -661.810776942355889724311;
constexpr double d711 = -18.0180473354013232598119;

constexpr double kSafe = 0.9;
constexpr double kFacMin = 0.333;  // min shrink factor denominator
constexpr double kFacMax = 6.0;    // max growth factor

bool all_finite(const Vec& v) { return v.allFinite(); }

double initial_step(const OdeRhs& f, double t0, const Vec& y0, const Vec& f0, double dir,
                    double rtol, double atol, double h_cap) {
    const int n = int(y0.size());
    double dnf = 0, dny = 0;
    for (int i = 0; i < n; ++i) {
        double sk = atol + rtol * std::abs(y0[i]);
        double a = f0[i] / sk, b = y0[i] / sk;
        dnf += a * a;
        dny += b * b;
    }
    double h = (dnf <= 1e-10 || dny <= 1e-10) ? 1e-6 : std::sqrt(dny / dnf) * 0.01;
    h = std::min(h, h_cap);

    Vec y1 = y0 + (dir * h) * f0;
    Vec f1(n);
    f(t0 + dir * h, y1, f1);
    double der2 = 0;
    for (int i = 0; i < n; ++i) {
        double sk = atol + rtol * std::abs(y0[i]);
        double a = (f1[i] - f0[i]) / sk;
        der2 += a * a;
    }
    der2 = std::sqrt(der2) / h;
    double der12 = std::max(der2, std::sqrt(dnf));
    double h1 = (der12 <= 1e-15) ? std::max(1e-6, h * 1e-3) : std::pow(0.01 / der12, 1.0 / 8.0);
    return std::min({100.0 * h, h1, h_cap});
}

} // namespace

Vec DenseSegment::eval(double t) const {
    double s = (t - t0) / (t1 - t0);
    double s1 = 1.0 - s;
    return rc[0] + s * (rc[1] + s1 * (rc[2] + s * (rc[3] + s1 * (rc[4] + s * (rc[5] + s1 * (rc[6] + s * rc[7]))))));
}

Vec OdeSolution::at(double t) const {
    if (segments_.empty()) return states_.front();
    const bool fwd = times_.back() >= times_.front();
    double lo = fwd ? times_.front() : times_.back();
    double hi = fwd ? times_.back() : times_.front();
    const double slack = 1e-9 * (1.0 + std::abs(hi - lo));
    if (t < lo - slack || t > hi + slack)
        throw Error("dense output queried outside the integrated interval");
    // binary search over segments (sorted in integration direction)
    int a = 0, b = int(segments_.size()) - 1;
    while (a < b) {
        int m = (a + b) / 2;
        bool after = fwd ? (t > segments_[m].t1) : (t < segments_[m].t1);
        if (after) a = m + 1; else b = m;
    }
    return segments_[a].eval(t);
}

Vec rk4_step(const OdeRhs& f, double t, const Vec& y, double h) {
    Vec k1(y.size()), k2(y.size()), k3(y.size()), k4(y.size());
    f(t, y, k1);
    f(t + 0.5 * h, y + 0.5 * h * k1, k2);
    f(t + 0.5 * h, y + 0.5 * h * k2, k3);
    f(t + h, y + h * k3, k4);
    return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

OdeSolution integrate_dop853(const OdeRhs& f, Vec y0, double t0, double t1, const OdeOptions& opt) {
    OdeSolution out;
    const int n = int(y0.size());
    const double dir = (t1 >= t0) ? 1.0 : -1.0;
    const double span = std::abs(t1 - t0);
    const double h_cap = (opt.h_max > 0) ? opt.h_max : std::max(span, 1e-30);

    out.times_.push_back(t0);
    out.states_.push_back(y0);
    if (span == 0.0) return out;

    Vec y = y0;
    Vec k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), k8(n), k9(n), k10(n), kc11(n), kc12(n);
    Vec ytmp(n), ynew(n), fnew(n), w(n);

    double t = t0;
    f(t, y, k1);
    out.rhs_evals++;
    double h = (opt.h_init > 0) ? std::min(opt.h_init, h_cap)
                                : initial_step(f, t, y, k1, dir, opt.rtol, opt.atol, h_cap);
    out.rhs_evals++;

    long steps = 0;
    while (dir * (t1 - t) > 0) {
        if (++steps > opt.max_steps)
            throw StepFailureError("integrator exceeded the step budget");
        if (h < 1e-14 * (1.0 + std::abs(t))) {
            std::ostringstream msg;
            msg << "step size underflow at t = " << t;
            throw StepFailureError(msg.str());
        }
        h = std::min(h, h_cap);
        bool last = false;
        if (dir * (t + dir * h - t1) > 0) {
            h = std::abs(t1 - t);
            last = true;
        }
        const double hs = dir * h;

        ytmp = y + hs * (a21 * k1);
        f(t + c2 * hs, ytmp, k2);
        ytmp = y + hs * (a31 * k1 + a32 * k2);
        f(t + c3 * hs, ytmp, k3);
        ytmp = y + hs * (a41 * k1 + a43 * k3);
        f(t + c4 * hs, ytmp, k4);
        ytmp = y + hs * (a51 * k1 + a53 * k3 + a54 * k4);
        f(t + c5 * hs, ytmp, k5);
        ytmp = y + hs * (a61 * k1 + a64 * k4 + a65 * k5);
        f(t + c6 * hs, ytmp, k6);
        ytmp = y + hs * (a71 * k1 + a74 * k4 + a75 * k5 + a76 * k6);
        f(t + c7 * hs, ytmp, k7);
        ytmp = y + hs * (a81 * k1 + a84 * k4 + a85 * k5 + a86 * k6 + a87 * k7);
        f(t + c8 * hs, ytmp, k8);
        ytmp = y + hs * (a91 * k1 + a94 * k4 + a95 * k5 + a96 * k6 + a97 * k7 + a98 * k8);
        f(t + c9 * hs, ytmp, k9);
        ytmp = y + hs * (a101 * k1 + a104 * k4 + a105 * k5 + a106 * k6 + a107 * k7 + a108 * k8 + a109 * k9);
        f(t + c10 * hs, ytmp, k10);
        ytmp = y + hs * (a111 * k1 + a114 * k4 + a115 * k5 + a116 * k6 + a117 * k7 + a118 * k8 + a119 * k9 + a1110 * k10);
        f(t + c11 * hs, ytmp, kc11);
        ytmp = y + hs * (a121 * k1 + a124 * k4 + a125 * k5 + a126 * k6 + a127 * k7 + a128 * k8 + a129 * k9 + a1210 * k10 + a1211 * kc11);
        f(t + hs, ytmp, kc12);
        out.rhs_evals += 11;

        w = b1 * k1 + b6 * k6 + b7 * k7 + b8 * k8 + b9 * k9 + b10 * k10 + b11 * kc11 + b12 * kc12;
        ynew = y + hs * w;

        // embedded error estimates (order 5 and order 3)
        double err = 0, err2 = 0;
        for (int i = 0; i < n; ++i) {
            double sk = opt.atol + opt.rtol * std::max(std::abs(y[i]), std::abs(ynew[i]));
            double e3 = w[i] - bhh1 * k1[i] - bhh2 * k9[i] - bhh3 * kc12[i];
            double e5 = er1 * k1[i] + er6 * k6[i] + er7 * k7[i] + er8 * k8[i] + er9 * k9[i] +
                        er10 * k10[i] + er11 * kc11[i] + er12 * kc12[i];
            double q3 = e3 / sk, q5 = e5 / sk;
            err2 += q3 * q3;
            err += q5 * q5;
        }
        double deno = err + 0.01 * err2;
        if (deno <= 0) deno = 1.0;
        err = std::abs(hs) * err / std::sqrt(deno * n);

        double fac = std::pow(std::max(err, 1e-32), 1.0 / 8.0) / kSafe;
        fac = std::max(1.0 / kFacMax, std::min(1.0 / kFacMin, fac));

        if (err > 1.0 || !all_finite(ynew)) {
            if (!all_finite(ynew)) fac = 1.0 / kFacMin;
            h /= fac;
            out.rejected++;
            continue;
        }

        f(t + hs, ynew, fnew);
        out.rhs_evals++;

        DenseSegment seg;
        seg.t0 = t;
        seg.t1 = t + hs;
        Vec ydiff = ynew - y;
        Vec bspl = hs * k1 - ydiff;
        seg.rc[0] = y;
        seg.rc[1] = ydiff;
        seg.rc[2] = bspl;
        seg.rc[3] = ydiff - hs * fnew - bspl;
        seg.rc[4] = hs * (d41 * k1 + d46 * k6 + d47 * k7 + d48 * k8 + d49 * k9 + d410 * k10 + d411 * kc11 + d412 * kc12 + d413 * fnew);
        seg.rc[5] = hs * (d51 * k1 + d56 * k6 + d57 * k7 + d58 * k8 + d59 * k9 + d510 * k10 + d511 * kc11 + d512 * kc12 + d513 * fnew);
        seg.rc[6] = hs * (d61 * k1 + d66 * k6 + d67 * k7 + d68 * k8 + d69 * k9 + d610 * k10 + d611 * kc11 + d612 * kc12 + d613 * fnew);
        seg.rc[7] = hs * (d71 * k1 + d76 * k6 + d77 * k7 + d78 * k8 + d79 * k9 + d710 * k10 + d711 * kc11);
        out.segments_.push_back(std::move(seg));

        t += hs;
        y = ynew;
        k1 = fnew;
        if (opt.post_step && opt.post_step(t, y)) {
            f(t, y, k1);  // state was adjusted, refresh the FSAL derivative
            out.rhs_evals++;
        }
        out.times_.push_back(t);
        out.states_.push_back(y);
        out.accepted++;

        if (!last) h /= fac;
    }
    return out;
}

} // namespace magjac
