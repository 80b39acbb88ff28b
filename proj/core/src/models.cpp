#include "magjac/models.hpp"

#include <cmath>

#include "magjac/errors.hpp"

namespace magjac {

namespace {

double take(std::map<std::string, double>& params, const std::string& key, double fallback) {
    auto it = params.find(key);
    if (it == params.end()) return fallback;
    double v = it->second;
    params.erase(it);
    return v;
}

void reject_leftovers(const std::map<std::string, double>& params, const std::string& name) {
    if (!params.empty())
        throw ConfigError("unknown parameter '" + params.begin()->first + "' for model " + name);
}

Mat zero2() { return Mat::Zero(2, 2); }

// Rotation generator in one coordinate plane pair: R e1 = e2, R e2 = -e1.
Mat rot_block(int dim, int i, int j) {
    Mat r = Mat::Zero(dim, dim);
    r(j, i) = 1.0;
    r(i, j) = -1.0;
    return r;
}

Model make_flat2d(std::map<std::string, double> params, DerivativeMode mode) {
    double B = take(params, "B", 1.0);
    reject_leftovers(params, "flat2d");

    Model m;
    m.base.dim = 2;
    m.base.metric = [](const Vec&) { return Mat::Identity(2, 2); };
    m.base.magnetic_form = [B](const Vec&) {
        Mat om = zero2();
        om(0, 1) = B;
        om(1, 0) = -B;
        return om;
    };
    m.base.potential = [B](const Vec& x) {
        Vec th(2);
        th << -0.5 * B * x[1], 0.5 * B * x[0];
        return th;
    };
    m.base.metric_d = [](const Vec&, int) { return zero2(); };
    m.base.metric_dd = [](const Vec&, int, int) { return zero2(); };
    m.base.magnetic_d = [](const Vec&, int) { return zero2(); };
    m.base.magnetic_dd = [](const Vec&, int, int) { return zero2(); };
    m.base.derivative_mode = mode;
    m.base.uniform_field = true;

    m.traits.name = "flat2d";
    m.traits.params = {{"B", B}};
    m.traits.dim = 2;
    m.traits.uniform_field = true;
    m.traits.J2_scalar = std::abs(B);
    m.traits.const_curvature = 0.0;
    m.traits.default_x = Vec::Zero(2);
    m.traits.default_p = (Vec(2) << 1, 0).finished();
    m.traits.sample_lo = (Vec(2) << -1, -1).finished();
    m.traits.sample_hi = (Vec(2) << 1, 1).finished();
    return m;
}

Model make_sphere2d(std::map<std::string, double> params, DerivativeMode mode) {
    double B = take(params, "B", 1.0);
    double R = take(params, "radius", 1.0);
    reject_leftovers(params, "sphere2d");
    if (R <= 0) throw ConfigError("sphere2d: radius must be positive");
    double R2 = R * R;

    Model m;
    m.base.dim = 2;
    // chart (theta, phi), metric R^2 (d theta^2 + sin^2 theta d phi^2)
    m.base.metric = [R2](const Vec& x) {
        Mat g = Mat::Zero(2, 2);
        double s = std::sin(x[0]);
        g(0, 0) = R2;
        g(1, 1) = R2 * s * s;
        return g;
    };
    m.base.magnetic_form = [B, R2](const Vec& x) {
        Mat om = zero2();
        om(0, 1) = B * R2 * std::sin(x[0]);
        om(1, 0) = -om(0, 1);
        return om;
    };
    m.base.potential = [B, R2](const Vec& x) {
        Vec th(2);
        th << 0.0, -B * R2 * std::cos(x[0]);
        return th;
    };
    m.base.metric_d = [R2](const Vec& x, int k) {
        Mat d = zero2();
        if (k == 0) d(1, 1) = R2 * std::sin(2.0 * x[0]);
        return d;
    };
    m.base.metric_dd = [R2](const Vec& x, int k, int l) {
        Mat d = zero2();
        if (k == 0 && l == 0) d(1, 1) = 2.0 * R2 * std::cos(2.0 * x[0]);
        return d;
    };
    m.base.magnetic_d = [B, R2](const Vec& x, int k) {
        Mat d = zero2();
        if (k == 0) {
            d(0, 1) = B * R2 * std::cos(x[0]);
            d(1, 0) = -d(0, 1);
        }
        return d;
    };
    m.base.magnetic_dd = [B, R2](const Vec& x, int k, int l) {
        Mat d = zero2();
        if (k == 0 && l == 0) {
            d(0, 1) = -B * R2 * std::sin(x[0]);
            d(1, 0) = -d(0, 1);
        }
        return d;
    };
    m.base.in_domain = [](const Vec& x) { return x[0] > 0.02 && x[0] < M_PI - 0.02; };
    m.base.derivative_mode = mode;
    m.base.uniform_field = true;  // the area form is parallel

    m.traits.name = "sphere2d";
    m.traits.params = {{"B", B}, {"radius", R}};
    m.traits.dim = 2;
    m.traits.uniform_field = true;
    m.traits.J2_scalar = std::abs(B);
    m.traits.const_curvature = 1.0 / R2;
    m.traits.default_x = (Vec(2) << M_PI / 2, 0).finished();
    m.traits.default_p = (Vec(2) << 1, 0).finished();
    m.traits.sample_lo = (Vec(2) << 0.6, -1).finished();
    m.traits.sample_hi = (Vec(2) << M_PI - 0.6, 1).finished();
    return m;
}

Model make_hyperbolic2d(std::map<std::string, double> params, DerivativeMode mode) {
    double B = take(params, "B", 1.0);
    reject_leftovers(params, "hyperbolic2d");

    Model m;
    m.base.dim = 2;
    // upper half-plane, metric (dx^2 + dy^2)/y^2
    m.base.metric = [](const Vec& x) { return Mat::Identity(2, 2) / (x[1] * x[1]); };
    m.base.magnetic_form = [B](const Vec& x) {
        Mat om = zero2();
        om(0, 1) = B / (x[1] * x[1]);
        om(1, 0) = -om(0, 1);
        return om;
    };
    m.base.potential = [B](const Vec& x) {
        Vec th(2);
        th << B / x[1], 0.0;
        return th;
    };
    m.base.metric_d = [](const Vec& x, int k) {
        Mat d = zero2();
        if (k == 1) d = -2.0 * Mat::Identity(2, 2) / std::pow(x[1], 3);
        return d;
    };
    m.base.metric_dd = [](const Vec& x, int k, int l) {
        Mat d = zero2();
        if (k == 1 && l == 1) d = 6.0 * Mat::Identity(2, 2) / std::pow(x[1], 4);
        return d;
    };
    m.base.magnetic_d = [B](const Vec& x, int k) {
        Mat d = zero2();
        if (k == 1) {
            d(0, 1) = -2.0 * B / std::pow(x[1], 3);
            d(1, 0) = -d(0, 1);
        }
        return d;
    };
    m.base.magnetic_dd = [B](const Vec& x, int k, int l) {
        Mat d = zero2();
        if (k == 1 && l == 1) {
            d(0, 1) = 6.0 * B / std::pow(x[1], 4);
            d(1, 0) = -d(0, 1);
        }
        return d;
    };
    m.base.in_domain = [](const Vec& x) { return x[1] > 1e-4; };
    m.base.derivative_mode = mode;
    m.base.uniform_field = true;

    m.traits.name = "hyperbolic2d";
    m.traits.params = {{"B", B}};
    m.traits.dim = 2;
    m.traits.uniform_field = true;
    m.traits.J2_scalar = std::abs(B);
    m.traits.const_curvature = -1.0;
    m.traits.default_x = (Vec(2) << 0, 1).finished();
    m.traits.default_p = (Vec(2) << -1, 0).finished();
    m.traits.sample_lo = (Vec(2) << -1, 0.5).finished();
    m.traits.sample_hi = (Vec(2) << 1, 2.0).finished();
    return m;
}

Model make_flat4d_kahler(std::map<std::string, double> params, DerivativeMode mode) {
    double B = take(params, "B", 1.0);
    reject_leftovers(params, "flat4d_kahler");

    Mat J = B * (rot_block(4, 0, 1) + rot_block(4, 2, 3));
    Mat Om = J.transpose();  // Omega_ij = g(J e_i, e_j) = J_ji for the identity metric

    Model m;
    m.base.dim = 4;
    m.base.metric = [](const Vec&) { return Mat::Identity(4, 4); };
    m.base.magnetic_form = [Om](const Vec&) { return Om; };
    m.base.potential = [B](const Vec& x) {
        Vec th(4);
        th << -0.5 * B * x[1], 0.5 * B * x[0], -0.5 * B * x[3], 0.5 * B * x[2];
        return th;
    };
    auto z4 = [](const Vec&, int) { return Mat::Zero(4, 4); };
    auto zz4 = [](const Vec&, int, int) { return Mat::Zero(4, 4); };
    m.base.metric_d = z4;
    m.base.metric_dd = zz4;
    m.base.magnetic_d = z4;
    m.base.magnetic_dd = zz4;
    m.base.derivative_mode = mode;
    m.base.uniform_field = true;

    m.traits.name = "flat4d_kahler";
    m.traits.params = {{"B", B}};
    m.traits.dim = 4;
    m.traits.uniform_field = true;
    m.traits.J2_scalar = std::abs(B);
    m.traits.const_curvature = 0.0;
    m.traits.default_x = Vec::Zero(4);
    m.traits.default_p = (Vec(4) << 1, 0, 0, 0).finished();
    m.traits.sample_lo = Vec::Constant(4, -1.0);
    m.traits.sample_hi = Vec::Constant(4, 1.0);
    return m;
}

Model make_flat2d_varfield(std::map<std::string, double> params, DerivativeMode mode) {
    double B0 = take(params, "B0", 1.0);
    double B1 = take(params, "B1", 0.5);
    reject_leftovers(params, "flat2d_varfield");

    Model m;
    m.base.dim = 2;
    m.base.metric = [](const Vec&) { return Mat::Identity(2, 2); };
    m.base.magnetic_form = [B0, B1](const Vec& x) {
        Mat om = zero2();
        om(0, 1) = B0 + B1 * x[0];
        om(1, 0) = -om(0, 1);
        return om;
    };
    m.base.potential = [B0, B1](const Vec& x) {
        Vec th(2);
        th << 0.0, B0 * x[0] + 0.5 * B1 * x[0] * x[0];
        return th;
    };
    m.base.metric_d = [](const Vec&, int) { return zero2(); };
    m.base.metric_dd = [](const Vec&, int, int) { return zero2(); };
    m.base.magnetic_d = [B1](const Vec&, int k) {
        Mat d = zero2();
        if (k == 0) {
            d(0, 1) = B1;
            d(1, 0) = -B1;
        }
        return d;
    };
    m.base.magnetic_dd = [](const Vec&, int, int) { return zero2(); };
    m.base.derivative_mode = mode;
    m.base.uniform_field = (B1 == 0.0);

    m.traits.name = "flat2d_varfield";
    m.traits.params = {{"B0", B0}, {"B1", B1}};
    m.traits.dim = 2;
    m.traits.uniform_field = (B1 == 0.0);
    if (B1 == 0.0) m.traits.J2_scalar = std::abs(B0);
    m.traits.const_curvature = 0.0;
    m.traits.default_x = Vec::Zero(2);
    // Launch across the gradient: the conserved canonical momentum then traps
    // the orbit in the strong-field half, clear of the degenerate locus B = 0.
    m.traits.default_p = (Vec(2) << 0, 1).finished();
    m.traits.sample_lo = (Vec(2) << -0.5, -0.5).finished();
    m.traits.sample_hi = (Vec(2) << 0.5, 0.5).finished();
    return m;
}

} // namespace

Model make_model(const std::string& name, const std::map<std::string, double>& params, DerivativeMode mode) {
    if (name == "flat2d") return make_flat2d(params, mode);
    if (name == "sphere2d") return make_sphere2d(params, mode);
    if (name == "hyperbolic2d") return make_hyperbolic2d(params, mode);
    if (name == "flat4d_kahler") return make_flat4d_kahler(params, mode);
    if (name == "flat2d_varfield") return make_flat2d_varfield(params, mode);
    std::string known;
    for (const auto& n : model_names()) known += (known.empty() ? "" : ", ") + n;
    throw ConfigError("unknown model '" + name + "' (known: " + known + ")");
}

const std::vector<std::string>& model_names() {
    static const std::vector<std::string> names = {"flat2d", "sphere2d", "hyperbolic2d",
                                                   "flat4d_kahler", "flat2d_varfield"};
    return names;
}

std::string model_help(const std::string& name) {
    if (name == "flat2d") return "Euclidean plane, constant field strength B (default 1)";
    if (name == "sphere2d") return "round sphere of given radius (default 1), field B times the area form";
    if (name == "hyperbolic2d") return "hyperbolic half-plane (curvature -1), field B times the area form";
    if (name == "flat4d_kahler") return "Euclidean 4-space with the standard complex structure scaled by B (default 1)";
    if (name == "flat2d_varfield") return "Euclidean plane with field B(x,y) = B0 + B1*x (defaults 1, 0.5)";
    return "";
}

} // namespace magjac
