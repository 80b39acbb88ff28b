#include "magjac/chart.hpp"

#include <Eigen/Cholesky>
#include <sstream>

#include "magjac/errors.hpp"

namespace magjac {

namespace {

// Central difference of a matrix-valued function, step eta.
Mat central_d(const std::function<Mat(const Vec&)>& f, const Vec& x, int k, double eta) {
    Vec xp = x, xm = x;
    xp[k] += eta;
    xm[k] -= eta;
    return (f(xp) - f(xm)) / (2.0 * eta);
}

// Central second difference at step eta.
Mat central_dd(const std::function<Mat(const Vec&)>& f, const Vec& x, int k, int l, double eta) {
    if (k == l) {
        Vec xp = x, xm = x;
        xp[k] += eta;
        xm[k] -= eta;
        return (f(xp) - 2.0 * f(x) + f(xm)) / (eta * eta);
    }
    Vec xpp = x, xpm = x, xmp = x, xmm = x;
    xpp[k] += eta; xpp[l] += eta;
    xpm[k] += eta; xpm[l] -= eta;
    xmp[k] -= eta; xmp[l] += eta;
    xmm[k] -= eta; xmm[l] -= eta;
    return (f(xpp) - f(xpm) - f(xmp) + f(xmm)) / (4.0 * eta * eta);
}

// Richardson-extrapolated second difference: O(eta^4).
Mat richardson_dd(const std::function<Mat(const Vec&)>& f, const Vec& x, int k, int l, double eta) {
    Mat coarse = central_dd(f, x, k, l, eta);
    Mat fine = central_dd(f, x, k, l, eta / 2.0);
    return (4.0 * fine - coarse) / 3.0;
}

} // namespace

Mat ChartedBase::g_checked(const Vec& x) const {
    Mat G = metric(x);
    Eigen::LLT<Mat> llt(G);
    if (llt.info() != Eigen::Success) {
        std::ostringstream msg;
        msg << "metric is not positive definite at x = [" << x.transpose() << "]";
        throw DegenerateMetricError(msg.str());
    }
    return G;
}

Mat ChartedBase::g_inv(const Vec& x) const {
    Mat G = g_checked(x);
    return G.llt().solve(Mat::Identity(dim, dim));
}

Mat ChartedBase::dg(const Vec& x, int k) const {
    if (derivative_mode == DerivativeMode::Analytic) {
        if (!metric_d) throw ConfigError("analytic derivative mode requires metric_d");
        return metric_d(x, k);
    }
    return central_d(metric, x, k, fd_step);
}

Mat ChartedBase::ddg(const Vec& x, int k, int l) const {
    if (derivative_mode == DerivativeMode::Analytic) {
        if (!metric_dd) throw ConfigError("analytic derivative mode requires metric_dd");
        return metric_dd(x, k, l);
    }
    return richardson_dd(metric, x, k, l, fd_step);
}

Mat ChartedBase::domega(const Vec& x, int k) const {
    if (derivative_mode == DerivativeMode::Analytic) {
        if (!magnetic_d) throw ConfigError("analytic derivative mode requires magnetic_d");
        return magnetic_d(x, k);
    }
    return central_d(magnetic_form, x, k, fd_step);
}

Mat ChartedBase::ddomega(const Vec& x, int k, int l) const {
    if (derivative_mode == DerivativeMode::Analytic) {
        if (!magnetic_dd) throw ConfigError("analytic derivative mode requires magnetic_dd");
        return magnetic_dd(x, k, l);
    }
    return richardson_dd(magnetic_form, x, k, l, fd_step);
}

} // namespace magjac
