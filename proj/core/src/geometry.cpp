#include "magjac/geometry.hpp"

#include <cmath>

#include "magjac/errors.hpp"

namespace magjac {

namespace {

// d_k g^{-1} = -g^{-1} (d_k g) g^{-1}
Mat d_ginv(const Mat& ginv, const Mat& dgk) { return -ginv * dgk * ginv; }

} // namespace

Vec GeometryJet::nablaJ_apply(const Vec& X, const Vec& Y) const {
    Vec out = Vec::Zero(dim);
    for (int i = 0; i < dim; ++i) {
        double s = 0;
        for (int j = 0; j < dim; ++j)
            for (int k = 0; k < dim; ++k) s += nablaJ(i, j, k) * X[j] * Y[k];
        out[i] = s;
    }
    return out;
}

Vec GeometryJet::nabla2J_apply(const Vec& X, const Vec& Y, const Vec& Z) const {
    Vec out = Vec::Zero(dim);
    for (int i = 0; i < dim; ++i) {
        double s = 0;
        for (int j = 0; j < dim; ++j)
            for (int k = 0; k < dim; ++k)
                for (int l = 0; l < dim; ++l) s += nabla2J(i, j, k, l) * X[j] * Y[k] * Z[l];
        out[i] = s;
    }
    return out;
}

Vec GeometryJet::curvature_op(const Vec& X, const Vec& Y, const Vec& Z) const {
    // [R(X,Y)Z]^l = -R^l_{kab} Z^k X^a Y^b; the minus relative to the raw
    // coordinate array realizes the convention stated in the header.
    Vec out = Vec::Zero(dim);
    for (int l = 0; l < dim; ++l) {
        double s = 0;
        for (int k = 0; k < dim; ++k)
            for (int a = 0; a < dim; ++a)
                for (int b = 0; b < dim; ++b) s -= riemann(l, k, a, b) * Z[k] * X[a] * Y[b];
        out[l] = s;
    }
    return out;
}

double GeometryJet::sec(const Vec& X, const Vec& Y) const {
    double area2 = inner(X, X) * inner(Y, Y) - inner(X, Y) * inner(X, Y);
    if (area2 <= 0) throw Error("sec: degenerate plane");
    return inner(curvature_op(X, Y, X), Y) / area2;
}

GeometryJet geometry_jet(const ChartedBase& base, const Vec& x) {
    const int m = base.dim;
    GeometryJet jet;
    jet.dim = m;
    jet.x = x;
    jet.g = base.g_checked(x);
    jet.g_inv = jet.g.llt().solve(Mat::Identity(m, m));

    jet.dg.resize(m);
    std::vector<Mat> ddg(m * m);
    for (int k = 0; k < m; ++k) jet.dg[k] = base.dg(x, k);
    for (int k = 0; k < m; ++k)
        for (int l = k; l < m; ++l) {
            Mat v = base.ddg(x, k, l);
            ddg[k * m + l] = v;
            ddg[l * m + k] = v;
        }

    // Gamma^k_{ij} = 1/2 g^{kl} (d_i g_{lj} + d_j g_{li} - d_l g_{ij})
    jet.gamma = Tensor3(m, m, m);
    for (int k = 0; k < m; ++k)
        for (int i = 0; i < m; ++i)
            for (int j = i; j < m; ++j) {
                double s = 0;
                for (int l = 0; l < m; ++l)
                    s += jet.g_inv(k, l) * (jet.dg[i](l, j) + jet.dg[j](l, i) - jet.dg[l](i, j));
                jet.gamma(k, i, j) = 0.5 * s;
                jet.gamma(k, j, i) = 0.5 * s;
            }

    // d_m Gamma^k_{ij}
    std::vector<Mat> dginv(m);
    for (int k = 0; k < m; ++k) dginv[k] = d_ginv(jet.g_inv, jet.dg[k]);
    Tensor4 dgamma(m, m, m, m);  // (k,i,j,mu) = d_mu Gamma^k_{ij}
    for (int mu = 0; mu < m; ++mu)
        for (int k = 0; k < m; ++k)
            for (int i = 0; i < m; ++i)
                for (int j = i; j < m; ++j) {
                    double s = 0;
                    for (int l = 0; l < m; ++l) {
                        s += dginv[mu](k, l) * (jet.dg[i](l, j) + jet.dg[j](l, i) - jet.dg[l](i, j));
                        s += jet.g_inv(k, l) * (ddg[mu * m + i](l, j) + ddg[mu * m + j](l, i) - ddg[mu * m + l](i, j));
                    }
                    dgamma(k, i, j, mu) = 0.5 * s;
                    dgamma(k, j, i, mu) = 0.5 * s;
                }

    // R^l_{kab} = d_a Gamma^l_{bk} - d_b Gamma^l_{ak}
    //           + Gamma^l_{am} Gamma^m_{bk} - Gamma^l_{bm} Gamma^m_{ak}
    jet.riemann = Tensor4(m, m, m, m);
    for (int l = 0; l < m; ++l)
        for (int k = 0; k < m; ++k)
            for (int a = 0; a < m; ++a)
                for (int b = 0; b < m; ++b) {
                    double s = dgamma(l, b, k, a) - dgamma(l, a, k, b);
                    for (int mu = 0; mu < m; ++mu)
                        s += jet.gamma(l, a, mu) * jet.gamma(mu, b, k) - jet.gamma(l, b, mu) * jet.gamma(mu, a, k);
                    jet.riemann(l, k, a, b) = s;
                }

    // J^i_j = g^{ik} Omega_{jk}  (i.e. J = g^{-1} Omega^T)
    Mat Om = base.omega(x);
    jet.J = jet.g_inv * Om.transpose();

    // dJ[k] = d_k (g^{-1} Omega^T)
    std::vector<Mat> dOm(m), dJ(m);
    for (int k = 0; k < m; ++k) {
        dOm[k] = base.domega(x, k);
        dJ[k] = dginv[k] * Om.transpose() + jet.g_inv * dOm[k].transpose();
    }

    // (nabla J)^i_{j;k} = d_k J^i_j + Gamma^i_{km} J^m_j - Gamma^m_{kj} J^i_m
    jet.nablaJ = Tensor3(m, m, m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
            for (int k = 0; k < m; ++k) {
                double s = dJ[k](i, j);
                for (int mu = 0; mu < m; ++mu)
                    s += jet.gamma(i, k, mu) * jet.J(mu, j) - jet.gamma(mu, k, j) * jet.J(i, mu);
                jet.nablaJ(i, j, k) = s;
            }

    // d_l (nabla J)^i_{j;k}, then the covariant correction terms
    // second partials of J:
    //   dd J = d(g^{-1}) dOm^T + dd(g^{-1}) Om^T + g^{-1} ddOm^T + d(g^{-1}) dOm^T
    auto ddJ = [&](int k, int l) -> Mat {
        Mat ddginv = -dginv[l] * jet.dg[k] * jet.g_inv - jet.g_inv * ddg[l * m + k] * jet.g_inv -
                     jet.g_inv * jet.dg[k] * dginv[l];
        return ddginv * Om.transpose() + dginv[k] * dOm[l].transpose() + dginv[l] * dOm[k].transpose() +
               jet.g_inv * base.ddomega(x, k, l).transpose();
    };

    jet.nabla2J = Tensor4(m, m, m, m);
    for (int l = 0; l < m; ++l) {
        // plain partial d_l of the nablaJ components
        Tensor3 dnJ(m, m, m);
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j)
                for (int k = 0; k < m; ++k) {
                    double s = ddJ(k, l)(i, j);
                    for (int mu = 0; mu < m; ++mu) {
                        s += dgamma(i, k, mu, l) * jet.J(mu, j) + jet.gamma(i, k, mu) * dJ[l](mu, j);
                        s -= dgamma(mu, k, j, l) * jet.J(i, mu) + jet.gamma(mu, k, j) * dJ[l](i, mu);
                    }
                    dnJ(i, j, k) = s;
                }
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j)
                for (int k = 0; k < m; ++k) {
                    double s = dnJ(i, j, k);
                    for (int mu = 0; mu < m; ++mu) {
                        s += jet.gamma(i, l, mu) * jet.nablaJ(mu, j, k);
                        s -= jet.gamma(mu, l, j) * jet.nablaJ(i, mu, k);
                        s -= jet.gamma(mu, l, k) * jet.nablaJ(i, j, mu);
                    }
                    jet.nabla2J(i, j, k, l) = s;
                }
    }
    return jet;
}

Tensor3 christoffel(const ChartedBase& base, const Vec& x) { return geometry_jet(base, x).gamma; }

Tensor4 riemann(const ChartedBase& base, const Vec& x) { return geometry_jet(base, x).riemann; }

Mat J_at(const ChartedBase& base, const Vec& x) {
    Mat ginv = base.g_inv(x);
    return ginv * base.omega(x).transpose();
}

Tensor3 nabla_J(const ChartedBase& base, const Vec& x) { return geometry_jet(base, x).nablaJ; }

Tensor4 nabla2_J(const ChartedBase& base, const Vec& x) { return geometry_jet(base, x).nabla2J; }

double closedness_defect(const ChartedBase& base, const Vec& x, double eta) {
    const int m = base.dim;
    std::vector<Mat> dOm(m);
    for (int k = 0; k < m; ++k) {
        Vec xp = x, xm = x;
        xp[k] += eta;
        xm[k] -= eta;
        dOm[k] = (base.omega(xp) - base.omega(xm)) / (2.0 * eta);
    }
    double worst = 0;
    for (int i = 0; i < m; ++i)
        for (int j = i + 1; j < m; ++j)
            for (int k = j + 1; k < m; ++k)
                worst = std::max(worst, std::abs(dOm[i](j, k) + dOm[j](k, i) + dOm[k](i, j)));
    return worst;
}

double potential_defect(const ChartedBase& base, const Vec& x, double eta) {
    const int m = base.dim;
    Mat dtheta = Mat::Zero(m, m);
    for (int k = 0; k < m; ++k) {
        Vec xp = x, xm = x;
        xp[k] += eta;
        xm[k] -= eta;
        Vec d = (base.theta(xp) - base.theta(xm)) / (2.0 * eta);
        for (int j = 0; j < m; ++j) dtheta(k, j) = d[j];
    }
    Mat Om = base.omega(x);
    double worst = 0;
    for (int i = 0; i < m; ++i)
        for (int j = i + 1; j < m; ++j)
            worst = std::max(worst, std::abs(dtheta(i, j) - dtheta(j, i) - Om(i, j)));
    return worst;
}

double metric_compat_defect(const ChartedBase& base, const Vec& x, double eta) {
    const int m = base.dim;
    Tensor3 gamma = christoffel(base, x);
    double worst = 0;
    for (int k = 0; k < m; ++k) {
        Vec xp = x, xm = x;
        xp[k] += eta;
        xm[k] -= eta;
        Mat dgk = (base.g(xp) - base.g(xm)) / (2.0 * eta);
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) {
                double s = dgk(i, j);
                for (int l = 0; l < m; ++l)
                    s -= gamma(l, k, i) * base.g(x)(l, j) + gamma(l, k, j) * base.g(x)(i, l);
                worst = std::max(worst, std::abs(s));
            }
    }
    return worst;
}

} // namespace magjac
