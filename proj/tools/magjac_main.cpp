// magjac command-line front end: batch scenario runner emitting JSON reports
// and CSV time series. Exit codes: 0 ok, 2 bad configuration, 3 non-regular
// point, 4 conjugate-method disagreement, 5 scope violation.

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>

#include "magjac/comparison.hpp"
#include "magjac/curvature.hpp"
#include "magjac/errors.hpp"
#include "magjac/geometry.hpp"
#include "magjac/jacobi.hpp"
#include "magjac/models.hpp"
#include "magjac/report.hpp"
#include "magjac/selfcheck.hpp"

namespace {

using magjac::Json;
using magjac::Vec;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitRegularity = 3;
constexpr int kExitDisagreement = 4;
constexpr int kExitScope = 5;

struct ScenarioConfig {
    std::string model_name;
    std::map<std::string, double> params;
    std::optional<std::vector<double>> x, p;
    double u0 = 1.0;
    double T = 10.0;
    double tol = 1e-10;
    double stencil_dt = 0.05;
    double grid_dt = 0.005;
    double agree_tol = 1e-4;
    std::string out_path;  // "-" = stdout
    std::string csv_path;
};

struct CliArgs {
    std::string config_path;
    std::string model_name;
    std::vector<double> params_B;  // individual flags collected below
    std::map<std::string, double> params;
    std::string x_str, p_str;
    std::optional<double> u0, T, tol, agree_tol;
    std::string out_path, csv_path;
};

std::vector<double> parse_vector(const std::string& s) {
    std::vector<double> v;
    std::string cur;
    for (char c : s) {
        if (c == ',') {
            v.push_back(std::stod(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (!cur.empty()) v.push_back(std::stod(cur));
    return v;
}

ScenarioConfig load_config(const CliArgs& args) {
    ScenarioConfig cfg;
    if (!args.config_path.empty()) {
        std::ifstream in(args.config_path);
        if (!in) throw magjac::ConfigError("cannot open config file: " + args.config_path);
        nlohmann::json j;
        try {
            in >> j;
        } catch (const std::exception& e) {
            throw magjac::ConfigError(std::string("config parse error: ") + e.what());
        }
        if (j.contains("model")) {
            const auto& m = j["model"];
            if (m.contains("name")) cfg.model_name = m["name"].get<std::string>();
            if (m.contains("params"))
                for (auto it = m["params"].begin(); it != m["params"].end(); ++it)
                    cfg.params[it.key()] = it.value().get<double>();
        }
        if (j.contains("x")) cfg.x = j["x"].get<std::vector<double>>();
        if (j.contains("p")) cfg.p = j["p"].get<std::vector<double>>();
        if (j.contains("u0")) cfg.u0 = j["u0"].get<double>();
        if (j.contains("T")) cfg.T = j["T"].get<double>();
        if (j.contains("integrator") && j["integrator"].contains("tol"))
            cfg.tol = j["integrator"]["tol"].get<double>();
        if (j.contains("stencil")) {
            const auto& s = j["stencil"];
            if (s.contains("dt")) cfg.stencil_dt = s["dt"].get<double>();
            if (s.contains("grid_dt")) cfg.grid_dt = s["grid_dt"].get<double>();
        }
        if (j.contains("agree_tol")) cfg.agree_tol = j["agree_tol"].get<double>();
        if (j.contains("output")) {
            const auto& o = j["output"];
            if (o.contains("report")) cfg.out_path = o["report"].get<std::string>();
            if (o.contains("csv")) cfg.csv_path = o["csv"].get<std::string>();
        }
    }
    if (!args.model_name.empty()) cfg.model_name = args.model_name;
    for (const auto& [k, v] : args.params) cfg.params[k] = v;
    if (!args.x_str.empty()) cfg.x = parse_vector(args.x_str);
    if (!args.p_str.empty()) cfg.p = parse_vector(args.p_str);
    if (args.u0) cfg.u0 = *args.u0;
    if (args.T) cfg.T = *args.T;
    if (args.tol) cfg.tol = *args.tol;
    if (args.agree_tol) cfg.agree_tol = *args.agree_tol;
    if (!args.out_path.empty()) cfg.out_path = args.out_path;
    if (!args.csv_path.empty()) cfg.csv_path = args.csv_path;

    if (cfg.model_name.empty()) throw magjac::ConfigError("no model name given (use --model or a config file)");
    if (cfg.T <= 0) throw magjac::ConfigError("horizon T must be positive");
    return cfg;
}

struct Loaded {
    magjac::Model model;
    magjac::CotangentPoint lam;
    ScenarioConfig cfg;
};

Loaded instantiate(const ScenarioConfig& cfg) {
    Loaded L{magjac::make_model(cfg.model_name, cfg.params), {}, cfg};
    const int m = L.model.traits.dim;
    Vec x = L.model.traits.default_x;
    Vec p = L.model.traits.default_p;
    if (cfg.x) {
        if (int(cfg.x->size()) != m) throw magjac::ConfigError("x has wrong dimension for the model");
        x = Eigen::Map<const Vec>(cfg.x->data(), m);
    }
    if (cfg.p) {
        if (int(cfg.p->size()) != m) throw magjac::ConfigError("p has wrong dimension for the model");
        p = Eigen::Map<const Vec>(cfg.p->data(), m);
    }
    double res = magjac::level_residual(L.model.base, x, p);
    Vec pn = magjac::momentum_on_level(L.model.base, x, p);
    if (std::abs(res) > 1e-12)
        std::cerr << "warning: momentum renormalized onto the level h = 1/2 (residual " << res << ")\n";
    L.lam = magjac::CotangentPoint{x, pn, cfg.u0};
    return L;
}

void emit(const ScenarioConfig& cfg, const Json& j) {
    std::string text = j.dump();
    if (cfg.out_path.empty() || cfg.out_path == "-")
        std::cout << text;
    else
        magjac::write_text_file(cfg.out_path, text);
}

Json model_json(const Loaded& L) {
    Json m = Json::object();
    m.set("name", Json::string(L.model.traits.name));
    Json pj = Json::object();
    for (const auto& [k, v] : L.model.traits.params) pj.set(k, Json::number(v));
    m.set("params", std::move(pj));
    m.set("uniform_field", Json::boolean(L.model.traits.uniform_field));
    return m;
}

int run_curvature(const ScenarioConfig& cfg) {
    Loaded L = instantiate(cfg);
    const auto& base = L.model.base;

    std::optional<magjac::FlowContext> ctx;
    const magjac::FlowContext* ctx_ptr = nullptr;
    if (!base.uniform_field) {
        ctx = magjac::make_flow_context(base, L.lam, cfg.stencil_dt);
        ctx_ptr = &*ctx;
    }
    magjac::CurvatureMaps maps = magjac::curvature_maps(base, L.lam, ctx_ptr);

    Json j = Json::object();
    j.set("model", model_json(L));
    j.set("x", Json::of(L.lam.x));
    j.set("p", Json::of(L.lam.p));
    j.set("u0", Json::number(L.lam.u0));
    j.set("regular", Json::boolean(true));
    j.set("jnorm", Json::number(maps.basis.jnorm));
    {
        Json f = Json::object();
        f.set("ph", Json::of(maps.basis.ph));
        f.set("b_dir", Json::of(maps.basis.b_dir));
        Json cb = Json::array();
        for (const Vec& w : maps.basis.c_basis) cb.push(Json::of(w));
        f.set("c_basis", std::move(cb));
        j.set("frame", std::move(f));
    }
    {
        Json b = Json::object();
        b.set("rho_aa", Json::number(maps.rho_aa));
        b.set("rho_bb", Json::number(maps.rho_bb));
        b.set("rho_cb", Json::of(maps.rho_cb));
        b.set("rho_ca", Json::of(maps.rho_ca));
        b.set("Rcc", Json::of(maps.Rcc));
        j.set("blocks", std::move(b));
    }
    if (maps.Rcc.rows() > 0) {
        Eigen::SelfAdjointEigenSolver<magjac::Mat> es(maps.Rcc);
        j.set("rcc_eigenvalues", Json::of(Vec(es.eigenvalues())));
    } else {
        j.set("rcc_eigenvalues", Json::array());
    }
    j.set("big_matrix", Json::of(maps.big));
    {
        Json d = Json::object();
        d.set("closedness_defect", Json::number(magjac::closedness_defect(base, L.lam.x)));
        d.set("potential_defect", Json::number(magjac::potential_defect(base, L.lam.x)));
        d.set("level_residual", Json::number(magjac::level_residual(base, L.lam.x, L.lam.p)));
        j.set("diagnostics", std::move(d));
    }
    emit(cfg, j);
    return kExitOk;
}

int run_flow(const ScenarioConfig& cfg) {
    Loaded L = instantiate(cfg);
    magjac::ExtremalTrajectory traj = magjac::integrate_extremal(L.model.base, L.lam, cfg.T, cfg.tol);

    if (!cfg.csv_path.empty()) {
        const int m = L.model.base.dim;
        const int nsamp = std::max(400, int(std::ceil(cfg.T * 100)));
        std::vector<std::string> header = {"t"};
        for (int i = 0; i < m; ++i) header.push_back("x" + std::to_string(i));
        for (int i = 0; i < m; ++i) header.push_back("p" + std::to_string(i));
        header.push_back("z");
        header.push_back("h");
        std::vector<std::vector<double>> cols(header.size(), std::vector<double>(nsamp + 1));
        for (int i = 0; i <= nsamp; ++i) {
            double t = cfg.T * double(i) / nsamp;
            Vec y = traj.state_at(t);
            cols[0][i] = t;
            for (int k = 0; k < m; ++k) cols[1 + k][i] = y[k];
            for (int k = 0; k < m; ++k) cols[1 + m + k][i] = y[m + k];
            cols[1 + 2 * m][i] = y[2 * m];
            cols[2 + 2 * m][i] = traj.h_at(t);
        }
        magjac::write_csv(cfg.csv_path, header, cols);
    }

    Json j = Json::object();
    j.set("model", model_json(L));
    j.set("T", Json::number(cfg.T));
    j.set("u0", Json::number(L.lam.u0));
    j.set("h_drift", Json::number(traj.h_drift));
    j.set("x_final", Json::of(traj.x_at(cfg.T)));
    j.set("p_final", Json::of(traj.p_at(cfg.T)));
    j.set("z_final", Json::number(traj.z_at(cfg.T)));
    if (!cfg.csv_path.empty()) j.set("csv", Json::string(cfg.csv_path));
    emit(cfg, j);
    return kExitOk;
}

int run_conjugate(const ScenarioConfig& cfg) {
    Loaded L = instantiate(cfg);
    const auto& base = L.model.base;

    magjac::OracleOptions oopt;
    oopt.tol = cfg.tol;
    magjac::OracleRun orun = magjac::oracle_conjugate_scan(base, L.lam, cfg.T, oopt);

    magjac::JacobiOptions jopt;
    jopt.tol = cfg.tol;
    jopt.grid_dt = cfg.grid_dt;
    magjac::JacobiRun jrun = magjac::jacobi_conjugate_scan(base, L.lam, cfg.T, jopt);

    double worst_dt = 0.0;
    bool agree = orun.report.events.size() == jrun.report.events.size();
    if (agree) {
        for (std::size_t i = 0; i < orun.report.events.size(); ++i) {
            worst_dt = std::max(worst_dt, std::abs(orun.report.events[i].t - jrun.report.events[i].t));
            agree = agree &&
                    orun.report.events[i].multiplicity == jrun.report.events[i].multiplicity;
        }
        agree = agree && worst_dt <= cfg.agree_tol;
    }

    if (!cfg.csv_path.empty()) {
        std::vector<std::vector<double>> cols(3);
        cols[0] = orun.t_grid;
        cols[1].resize(orun.t_grid.size());
        for (std::size_t i = 0; i < orun.t_grid.size(); ++i)
            cols[1][i] = jrun.frames.det_normalized_at(orun.t_grid[i]);
        cols[2] = orun.det;
        magjac::write_csv(cfg.csv_path, {"t", "d", "D"}, cols);
    }

    Json j = Json::object();
    j.set("model", model_json(L));
    j.set("T", Json::number(cfg.T));
    j.set("u0", Json::number(L.lam.u0));
    j.set("jacobi", Json::of(jrun.report));
    j.set("oracle", Json::of(orun.report));
    j.set("max_time_discrepancy", Json::number(worst_dt));
    j.set("methods_agree", Json::boolean(agree));
    j.set("agree_tol", Json::number(cfg.agree_tol));
    if (!cfg.csv_path.empty()) j.set("csv", Json::string(cfg.csv_path));
    emit(cfg, j);

    if (!agree) {
        std::cerr << "conjugate-point methods disagree beyond " << cfg.agree_tol << "\n";
        return kExitDisagreement;
    }
    return kExitOk;
}

int run_comparison(const ScenarioConfig& cfg) {
    Loaded L = instantiate(cfg);
    if (!L.model.traits.uniform_field) {
        std::cerr << "comparison requires nabla J = 0\n";
        return kExitScope;
    }
    magjac::ComparisonBounds bounds = magjac::model_constants(L.model, L.lam.u0);
    magjac::ConjugateReport report = magjac::oracle_conjugate_times(L.model.base, L.lam, cfg.T);
    magjac::ComparisonVerdict verdict = magjac::check_comparison(report, bounds);

    Json j = Json::of(verdict);
    j.set("model", model_json(L));
    j.set("T", Json::number(cfg.T));
    j.set("count_method", Json::string("oracle"));
    j.set("report", Json::of(report));
    emit(cfg, j);
    return kExitOk;
}

int run_list_models() {
    for (const auto& name : magjac::model_names())
        std::cout << name << "  -  " << magjac::model_help(name) << "\n";
    return kExitOk;
}

int run_selftest() {
    auto results = magjac::run_acceptance(&std::cout);
    return magjac::all_passed(results) ? kExitOk : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"curvature maps and conjugate points of magnetic geodesic flows"};
    app.require_subcommand(1);

    CliArgs args;
    auto add_common = [&args](CLI::App* sub, bool with_T) {
        sub->add_option("--config", args.config_path, "scenario config JSON");
        sub->add_option("--model", args.model_name, "catalog model name");
        auto addp = [&args, sub](const std::string& key) {
            sub->add_option_function<double>(
                "--" + key, [&args, key](double v) { args.params[key] = v; }, "model parameter " + key);
        };
        addp("B");
        addp("B0");
        addp("B1");
        addp("radius");
        sub->add_option("--x", args.x_str, "chart point, comma separated");
        sub->add_option("--p", args.p_str, "momentum covector, comma separated");
        sub->add_option_function<double>("--u0", [&args](double v) { args.u0 = v; }, "symmetry charge");
        if (with_T) sub->add_option_function<double>("--T", [&args](double v) { args.T = v; }, "horizon");
        sub->add_option_function<double>("--tol", [&args](double v) { args.tol = v; }, "integrator tolerance");
        sub->add_option("--out", args.out_path, "report JSON path (default stdout)");
        sub->add_option("--csv", args.csv_path, "time-series CSV path");
    };

    auto* c_curv = app.add_subcommand("curvature", "curvature maps at a point");
    add_common(c_curv, false);
    auto* c_flow = app.add_subcommand("flow", "integrate the extremal and export it");
    add_common(c_flow, true);
    auto* c_conj = app.add_subcommand("conjugate", "conjugate points by both methods");
    add_common(c_conj, true);
    c_conj->add_option_function<double>(
        "--agree-tol", [&args](double v) { args.agree_tol = v; }, "method disagreement threshold");
    auto* c_comp = app.add_subcommand("comparison", "conjugate-count bracket verdict");
    add_common(c_comp, true);
    auto* c_list = app.add_subcommand("list-models", "print the model catalog");
    auto* c_self = app.add_subcommand("selftest", "run the acceptance suite");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    try {
        if (c_list->parsed()) return run_list_models();
        if (c_self->parsed()) return run_selftest();
        ScenarioConfig cfg = load_config(args);
        if (c_curv->parsed()) return run_curvature(cfg);
        if (c_flow->parsed()) return run_flow(cfg);
        if (c_conj->parsed()) return run_conjugate(cfg);
        if (c_comp->parsed()) return run_comparison(cfg);
    } catch (const magjac::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const magjac::NotRegularError& e) {
        std::cerr << e.what() << "\n";
        return kExitRegularity;
    } catch (const magjac::ScopeError& e) {
        std::cerr << e.what() << "\n";
        return kExitScope;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return kExitConfig;
}
