// Command-line front end: every capability of the library as a subcommand,
// emitting CSV/JSON artifacts under --out for scripted reproduction.

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "ctpe/advantage.hpp"
#include "ctpe/covariance.hpp"
#include "ctpe/harness.hpp"
#include "ctpe/metrics.hpp"
#include "ctpe/population.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

namespace {

struct CommonOpts {
    std::string config_path;
    std::vector<std::string> sets;
    std::string out_dir = ".";
    bool verbose = false;
    bool allow_flags = false;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("--config", opts.config_path, "JSON config file (merged over defaults)");
    cmd->add_option("--set", opts.sets, "Override a config key, e.g. --set discretization.beta=0.5")
        ->take_all();
    cmd->add_option("--out", opts.out_dir, "Output directory (default: current)");
    cmd->add_flag("-v,--verbose", opts.verbose, "Chatty progress on stdout");
    cmd->add_flag("--allow-flags", opts.allow_flags, "Exit 0 even when rows carry flags");
}

void deep_merge(json& dst, const json& src) {
    if (!dst.is_object() || !src.is_object()) {
        dst = src;
        return;
    }
    for (auto it = src.begin(); it != src.end(); ++it) {
        if (dst.contains(it.key()) && dst[it.key()].is_object() && it.value().is_object())
            deep_merge(dst[it.key()], it.value());
        else
            dst[it.key()] = it.value();
    }
}

json parse_scalar(const std::string& text) {
    try {
        return json::parse(text);
    } catch (const json::parse_error&) {
        return json(text); // bare words are strings
    }
}

void apply_set(json& doc, const std::string& assignment) {
    const std::size_t eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0)
        throw std::invalid_argument("config: --set expects key.path=value, got '" + assignment +
                                    "'");
    const std::string path = assignment.substr(0, eq);
    const std::string value = assignment.substr(eq + 1);
    json* cur = &doc;
    std::size_t start = 0;
    for (;;) {
        const std::size_t dot = path.find('.', start);
        const std::string key = path.substr(start, dot == std::string::npos ? dot : dot - start);
        if (key.empty()) throw std::invalid_argument("config: empty key segment in '" + path + "'");
        if (dot == std::string::npos) {
            (*cur)[key] = parse_scalar(value);
            return;
        }
        if (!cur->contains(key) || !(*cur)[key].is_object()) (*cur)[key] = json::object();
        cur = &(*cur)[key];
        start = dot + 1;
    }
}

json load_config_doc(const std::string& defaults_text, const CommonOpts& opts) {
    json doc = json::parse(defaults_text);
    if (!opts.config_path.empty()) {
        std::ifstream in(opts.config_path);
        if (!in) throw std::invalid_argument("config: cannot open '" + opts.config_path + "'");
        json file;
        try {
            in >> file;
        } catch (const json::parse_error& e) {
            throw std::invalid_argument(std::string("config: not valid JSON: ") + e.what());
        }
        deep_merge(doc, file);
    }
    for (const std::string& s : opts.sets) apply_set(doc, s);
    return doc;
}

void reject_unknown(const json& obj, const char* where,
                    std::initializer_list<const char*> allowed) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool known = false;
        for (const char* key : allowed)
            if (it.key() == key) {
                known = true;
                break;
            }
        if (!known)
            throw std::invalid_argument("config: unknown key '" + it.key() + "' in " +
                                        std::string(where));
    }
}

void write_file(const fs::path& path, const std::string& content, bool verbose) {
    fs::create_directories(path.parent_path().empty() ? fs::path(".") : path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << content;
    if (verbose) std::cout << "wrote " << path.string() << "\n";
}

fs::path out_path(const CommonOpts& opts, const char* name) {
    fs::create_directories(opts.out_dir);
    return fs::path(opts.out_dir) / name;
}

json coeffs_json(const ctpe::CoeffMap& coeffs) {
    json arr = json::array();
    for (const auto& [alpha, c] : coeffs) arr.push_back(json::array({alpha, c}));
    return arr;
}

int exit_for_flags(const std::vector<ctpe::ResultRow>& rows, const CommonOpts& opts) {
    if (opts.allow_flags) return 0;
    for (const ctpe::ResultRow& r : rows)
        if (r.flag != 0) return 1;
    return 0;
}

// ---------------------------------------------------------------- simulate

int run_simulate(const CommonOpts& opts, bool keep_inner) {
    const json doc = load_config_doc(R"({"reward": {"coeffs": [[[1], 0.5]]}})", opts);
    ctpe::ExperimentConfig cfg = ctpe::ExperimentConfig::from_json_text(doc.dump());
    cfg.validate();
    const ctpe::DiffusionModel model = ctpe::build_model(cfg);
    const ctpe::RewardSpec reward = ctpe::build_reward(cfg);
    const ctpe::Trajectory traj = ctpe::simulate_trajectory(
        model, reward, cfg.Ts[0], cfg.etas[0], cfg.substeps, cfg.seed_base, keep_inner);
    write_file(out_path(opts, "trajectory.csv"), traj.to_csv(), opts.verbose);
    if (keep_inner) write_file(out_path(opts, "inner.csv"), traj.inner_to_csv(), opts.verbose);
    if (opts.verbose)
        std::cout << "simulated " << traj.num_observations() << " observations of " << model.name
                  << "\n";
    return 0;
}

// ---------------------------------------------------------------- estimate

int run_estimate(const CommonOpts& opts) {
    const json doc = load_config_doc(R"({"reward": {"coeffs": [[[1], 0.5]]}})", opts);
    ctpe::ExperimentConfig cfg = ctpe::ExperimentConfig::from_json_text(doc.dump());
    cfg.validate();
    if (cfg.model_kind != "torus-brownian")
        throw std::invalid_argument("estimate: oracle-backed errors need the torus-brownian model");

    const ctpe::DiffusionModel model = ctpe::build_model(cfg);
    const ctpe::RewardSpec reward = ctpe::build_reward(cfg);
    const ctpe::FourierBasis basis = ctpe::FourierBasis::build(cfg.d, cfg.ns[0]);
    const ctpe::DiscretizationScheme scheme =
        ctpe::DiscretizationScheme::build(cfg.nus[0], cfg.etas[0], cfg.beta);
    const ctpe::Trajectory traj = ctpe::simulate_trajectory(model, reward, cfg.Ts[0], cfg.etas[0],
                                                            cfg.substeps, cfg.seed_base);

    ordered_json out;
    int flag = 0;
    try {
        const ctpe::LstdEstimate est =
            ctpe::lstd_estimate(traj, basis, scheme, cfg.policy, cfg.ridge_lambda);
        const ctpe::CoeffMap cstar =
            ctpe::true_value_coeffs(model.spectrum, cfg.reward_coeffs, cfg.beta);
        const ctpe::CoeffMap cbar =
            ctpe::discretized_fixed_point_coeffs(scheme, model.spectrum, cfg.reward_coeffs);
        const ctpe::ErrorReport rep = ctpe::measure_errors(est.theta_hat, basis, cbar, cstar);
        out["estimate"] = ordered_json::parse(est.to_json());
        out["errors"] = {{"l2", rep.l2_err},     {"h1", rep.h1_err},
                         {"h2", rep.h2_err},     {"approx_h1", rep.approx_h1},
                         {"stat_h1", rep.stat_h1}};
        flag = est.flagged ? 1 : 0;
    } catch (const ctpe::SolveError& e) {
        out["error"] = e.what();
        out["cond"] = e.condition;
        flag = 2;
    }
    out["flag"] = flag;
    write_file(out_path(opts, "estimate.json"), out.dump(2) + "\n", opts.verbose);
    return flag != 0 && !opts.allow_flags ? 1 : 0;
}

// ---------------------------------------------------------------- sweeps

int run_sweep_rate(const CommonOpts& opts) {
    const json doc = load_config_doc(
        R"({"reward": {"coeffs": [[[1], 0.5]]},
            "discretization": {"nus": [2], "etas": [0.05]},
            "basis": {"ns": [2]},
            "trajectory": {"Ts": [64, 128, 256], "num_seeds": 50}})",
        opts);
    const ctpe::ExperimentConfig cfg = ctpe::ExperimentConfig::from_json_text(doc.dump());
    const std::vector<ctpe::ResultRow> rows = ctpe::run_experiment(cfg);
    write_file(out_path(opts, "rows.csv"), ctpe::rows_to_csv(rows), opts.verbose);

    const ctpe::GroupFit fit = ctpe::aggregate_and_fit(
        rows, [](const ctpe::ResultRow& r) { return r.T; },
        [](const ctpe::ResultRow& r) { return r.stat_h1; });
    ordered_json summary;
    summary["axis"] = "T";
    summary["response"] = "stat_h1";
    summary["slope"] = fit.fit.slope;
    summary["intercept"] = fit.fit.intercept;
    summary["r2"] = fit.fit.r2;
    summary["groups"] = json::array();
    for (const ctpe::GroupStat& g : fit.groups)
        summary["groups"].push_back({{"T", g.key}, {"rms", g.rms}, {"count", g.count}});
    write_file(out_path(opts, "summary.json"), summary.dump(2) + "\n", opts.verbose);
    if (opts.verbose) std::cout << "rate slope " << fit.fit.slope << "\n";
    return exit_for_flags(rows, opts);
}

int run_sweep_discretization(const CommonOpts& opts) {
    const json doc = load_config_doc(
        R"({"reward": {"coeffs": [[[1], 1.0]]},
            "discretization": {"nus": [2], "etas": [0.08, 0.04, 0.02, 0.01]}})",
        opts);
    // Population-only sweep: no trajectories, so the unit reward bound does
    // not apply; validate just the pieces in play.
    const ctpe::ExperimentConfig cfg = ctpe::ExperimentConfig::from_json_text(doc.dump());
    if (cfg.model_kind != "torus-brownian")
        throw std::invalid_argument("sweep-discretization: needs the torus-brownian spectrum");
    if (!(cfg.beta > 0.0)) throw std::invalid_argument("sweep-discretization: beta must be > 0");
    if (cfg.nus.empty() || cfg.etas.empty())
        throw std::invalid_argument("sweep-discretization: empty grid");

    const ctpe::DiffusionModel model = ctpe::DiffusionModel::torus_brownian(cfg.d, cfg.sigma);
    const ctpe::CoeffMap cstar =
        ctpe::true_value_coeffs(model.spectrum, cfg.reward_coeffs, cfg.beta);

    std::ostringstream csv;
    csv << "nu,eta,h1_err\n";
    ordered_json summary;
    summary["axis"] = "eta";
    summary["response"] = "population_h1_err";
    summary["sweeps"] = json::array();
    for (int nu : cfg.nus) {
        std::vector<double> etas_used, errs;
        for (double eta : cfg.etas) {
            const ctpe::DiscretizationScheme scheme =
                ctpe::DiscretizationScheme::build(nu, eta, cfg.beta);
            const ctpe::CoeffMap cbar =
                ctpe::discretized_fixed_point_coeffs(scheme, model.spectrum, cfg.reward_coeffs);
            const double err = ctpe::sobolev_norm(ctpe::coeff_diff(cbar, cstar), 1);
            csv << nu << ',' << ctpe::format_g17(eta) << ',' << ctpe::format_g17(err) << '\n';
            etas_used.push_back(eta);
            errs.push_back(err);
        }
        const ctpe::FitResult fit = ctpe::fit_rate(etas_used, errs);
        ordered_json entry;
        entry["nu"] = nu;
        entry["slope"] = fit.slope;
        entry["r2"] = fit.r2;
        summary["sweeps"].push_back(entry);
        if (cfg.nus.size() == 1) {
            summary["slope"] = fit.slope;
            summary["r2"] = fit.r2;
        }
        if (opts.verbose) std::cout << "nu=" << nu << " slope " << fit.slope << "\n";
    }
    write_file(out_path(opts, "discretization.csv"), csv.str(), opts.verbose);
    write_file(out_path(opts, "summary.json"), summary.dump(2) + "\n", opts.verbose);
    return 0;
}

// ---------------------------------------------------------------- metrics

int run_trace_growth(const CommonOpts& opts) {
    const json doc = load_config_doc(R"({"basis": {"ns": [1, 2, 4, 8, 16, 32, 64]}})", opts);
    const ctpe::ExperimentConfig cfg = ctpe::ExperimentConfig::from_json_text(doc.dump());
    if (cfg.d < 1) throw std::invalid_argument("trace-growth: d must be >= 1");
    std::ostringstream csv;
    csv << "n,m,trace\n";
    for (int n : cfg.ns) {
        const ctpe::FourierBasis basis = ctpe::FourierBasis::build(cfg.d, n, 200000);
        csv << n << ',' << basis.m() << ',' << ctpe::format_g17(ctpe::trace_ratio(basis)) << '\n';
    }
    write_file(out_path(opts, "trace.csv"), csv.str(), opts.verbose);
    return 0;
}

// ---------------------------------------------------------------- diagnostics

int run_diagnose_covariance(const CommonOpts& opts) {
    json doc = load_config_doc(
        R"({"reward": {"coeffs": [[[1], 0.5]]},
            "discretization": {"nus": [2], "etas": [0.05]},
            "basis": {"ns": [1]},
            "trajectory": {"Ts": [750], "substeps": 16},
            "diagnostics": {"K_max": 20, "window_obs": 1}})",
        opts);
    int K_max = 20, window_obs = 1;
    if (doc.contains("diagnostics")) {
        reject_unknown(doc["diagnostics"], "diagnostics", {"K_max", "window_obs"});
        K_max = doc["diagnostics"].value("K_max", K_max);
        window_obs = doc["diagnostics"].value("window_obs", window_obs);
        doc.erase("diagnostics");
    }
    ctpe::ExperimentConfig cfg = ctpe::ExperimentConfig::from_json_text(doc.dump());
    cfg.validate();
    if (cfg.substeps < 16)
        throw std::invalid_argument("diagnose-covariance: substeps >= 16 required (quadrature "
                                    "bias must stay below statistical noise)");
    if (K_max < 2) throw std::invalid_argument("diagnose-covariance: K_max must be >= 2");
    if (cfg.model_kind != "torus-brownian")
        throw std::invalid_argument("diagnose-covariance: needs the torus-brownian spectrum");

    const ctpe::DiffusionModel model = ctpe::build_model(cfg);
    const ctpe::RewardSpec reward = ctpe::build_reward(cfg);
    const ctpe::FourierBasis basis = ctpe::FourierBasis::build(cfg.d, std::max(cfg.ns[0], 1));
    const ctpe::DiscretizationScheme scheme =
        ctpe::DiscretizationScheme::build(cfg.nus[0], cfg.etas[0], cfg.beta);
    const ctpe::Trajectory traj = ctpe::simulate_trajectory(
        model, reward, cfg.Ts[0], cfg.etas[0], cfg.substeps, cfg.seed_base, true);

    // Test pair: f = the first oscillating feature, g = the constant 1.
    Eigen::VectorXd theta_f = Eigen::VectorXd::Zero(basis.m());
    theta_f[1] = 1.0;
    Eigen::VectorXd theta_g = Eigen::VectorXd::Zero(basis.m());
    theta_g[0] = 1.0;
    const ctpe::FunctionInSpan f{theta_f, &basis};
    const ctpe::FunctionInSpan g{theta_g, &basis};

    ctpe::CovarianceDiagnostics diag =
        ctpe::estimate_sigma_mkv(traj, f, g, scheme, K_max, window_obs);
    diag.f_desc = "feature[1]";
    diag.g_desc = "constant";
    const Eigen::VectorXd theta_bar =
        ctpe::population_theta_bar(basis, scheme, model.spectrum, cfg.reward_coeffs);
    const auto [proxy, proxy_se] =
        ctpe::martingale_variance_proxy(traj, theta_bar, basis, scheme);
    diag.martingale_proxy = proxy;

    std::ostringstream csv;
    csv << "k,mu_hat,stderr\n";
    for (int k = 0; k <= diag.K_max; ++k)
        csv << k << ',' << ctpe::format_g17(diag.mu[static_cast<std::size_t>(k)].value) << ','
            << ctpe::format_g17(diag.mu[static_cast<std::size_t>(k)].se) << '\n';
    write_file(out_path(opts, "mu.csv"), csv.str(), opts.verbose);

    ordered_json summary;
    summary["sigma_mkv"] = diag.sigma_mkv_sq >= 0.0 ? std::sqrt(diag.sigma_mkv_sq)
                                                    : -std::sqrt(-diag.sigma_mkv_sq);
    summary["sigma_mkv_sq"] = diag.sigma_mkv_sq;
    summary["K_max"] = diag.K_max;
    summary["stable"] = diag.stable;
    summary["martingale_proxy"] = diag.martingale_proxy;
    summary["martingale_proxy_se"] = proxy_se;
    summary["f"] = diag.f_desc;
    summary["g"] = diag.g_desc;
    write_file(out_path(opts, "summary.json"), summary.dump(2) + "\n", opts.verbose);
    return 0;
}

// ---------------------------------------------------------------- advantage

int run_advantage_demo(const CommonOpts& opts) {
    json doc = load_config_doc(
        R"({"reward": {"coeffs": [[[1], 0.5]]},
            "discretization": {"nus": [2], "etas": [0.05]},
            "basis": {"ns": [2]},
            "advantage": {"box": [-1.0, 1.0], "grid_x": 32, "grid_a": 9}})",
        opts);
    double box_lo = -1.0, box_hi = 1.0;
    int grid_x = 32, grid_a = 9;
    if (doc.contains("advantage")) {
        reject_unknown(doc["advantage"], "advantage", {"box", "grid_x", "grid_a"});
        if (doc["advantage"].contains("box")) {
            const json& b = doc["advantage"]["box"];
            if (!b.is_array() || b.size() != 2)
                throw std::invalid_argument("advantage.box must be [lo, hi]");
            box_lo = b[0].get<double>();
            box_hi = b[1].get<double>();
        }
        grid_x = doc["advantage"].value("grid_x", grid_x);
        grid_a = doc["advantage"].value("grid_a", grid_a);
        doc.erase("advantage");
    }
    const ctpe::ExperimentConfig cfg = ctpe::ExperimentConfig::from_json_text(doc.dump());
    if (cfg.d != 1) throw std::invalid_argument("advantage-demo: the demo grid is 1-dimensional");
    if (!(box_lo < box_hi)) throw std::invalid_argument("advantage-demo: empty action box");
    if (grid_x < 2 || grid_a < 2) throw std::invalid_argument("advantage-demo: grid too small");
    if (cfg.model_kind != "torus-brownian")
        throw std::invalid_argument("advantage-demo: needs the torus-brownian spectrum");

    const ctpe::DiffusionModel model = ctpe::DiffusionModel::torus_brownian(cfg.d, cfg.sigma);
    const ctpe::FourierBasis basis = ctpe::FourierBasis::build(cfg.d, cfg.ns[0]);
    const ctpe::DiscretizationScheme scheme =
        ctpe::DiscretizationScheme::build(cfg.nus[0], cfg.etas[0], cfg.beta);
    const Eigen::VectorXd theta =
        ctpe::population_theta_bar(basis, scheme, model.spectrum, cfg.reward_coeffs);

    ctpe::ControlAffinePolicy policy;
    policy.lo = Eigen::VectorXd::Constant(1, box_lo);
    policy.hi = Eigen::VectorXd::Constant(1, box_hi);
    const double mid = 0.5 * (box_lo + box_hi);
    policy.mean_action = [mid](const Eigen::VectorXd&) {
        return Eigen::VectorXd::Constant(1, mid).eval();
    };
    policy.base_drift = [](const Eigen::VectorXd&) { return Eigen::VectorXd::Zero(1).eval(); };
    const ctpe::AdvantageEstimate est{ctpe::FunctionInSpan{theta, &basis}, policy};

    std::ostringstream csv;
    csv << "x,a,q_hat\n";
    Eigen::VectorXd x(1), a(1);
    for (int i = 0; i < grid_x; ++i) {
        x[0] = static_cast<double>(i) / grid_x;
        for (int jj = 0; jj < grid_a; ++jj) {
            a[0] = box_lo + (box_hi - box_lo) * static_cast<double>(jj) / (grid_a - 1);
            csv << ctpe::format_g17(x[0]) << ',' << ctpe::format_g17(a[0]) << ','
                << ctpe::format_g17(ctpe::advantage(est, x, a)) << '\n';
        }
    }
    write_file(out_path(opts, "advantage.csv"), csv.str(), opts.verbose);
    return 0;
}

// ---------------------------------------------------------------- oracle

int run_oracle(const CommonOpts& opts) {
    const json doc = load_config_doc(R"({"reward": {"coeffs": [[[1], 0.5]]}})", opts);
    const ctpe::ExperimentConfig cfg = ctpe::ExperimentConfig::from_json_text(doc.dump());
    if (cfg.model_kind != "torus-brownian")
        throw std::invalid_argument("oracle: closed forms need the torus-brownian spectrum");
    if (!(cfg.beta > 0.0)) throw std::invalid_argument("oracle: beta must be > 0");

    const ctpe::DiffusionModel model = ctpe::DiffusionModel::torus_brownian(cfg.d, cfg.sigma);
    const ctpe::FourierBasis basis = ctpe::FourierBasis::build(cfg.d, cfg.ns[0]);
    const ctpe::DiscretizationScheme scheme =
        ctpe::DiscretizationScheme::build(cfg.nus[0], cfg.etas[0], cfg.beta);
    const ctpe::ValueOracle oracle =
        ctpe::ValueOracle::build(basis, scheme, model.spectrum, cfg.reward_coeffs);

    ordered_json out;
    out["c_star"] = coeffs_json(oracle.true_coeffs);
    out["c_bar"] = coeffs_json(oracle.discretized_coeffs);
    out["theta_bar"] =
        std::vector<double>(oracle.theta_bar.data(), oracle.theta_bar.data() + oracle.theta_bar.size());
    out["basis"] = {{"d", basis.d()}, {"n", basis.n()}, {"m", basis.m()}};
    out["scheme"] = ordered_json::parse(scheme.to_json());
    write_file(out_path(opts, "oracle.json"), out.dump(2) + "\n", opts.verbose);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"ctpe: LSTD policy evaluation for diffusions on the torus"};
    app.require_subcommand(1);

    CommonOpts opts;
    bool keep_inner = false;
    int which = 0;

    CLI::App* c_sim = app.add_subcommand("simulate", "Sample one trajectory to CSV");
    c_sim->add_flag("--inner", keep_inner, "Also write the substep-resolution path");
    add_common(c_sim, opts);
    c_sim->callback([&] { which = 1; });

    CLI::App* c_est = app.add_subcommand("estimate", "One LSTD fit with an error report");
    add_common(c_est, opts);
    c_est->callback([&] { which = 2; });

    CLI::App* c_rate = app.add_subcommand("sweep-rate", "T-sweep of the statistical error");
    add_common(c_rate, opts);
    c_rate->callback([&] { which = 3; });

    CLI::App* c_disc = app.add_subcommand("sweep-discretization",
                                          "eta-sweep of the population fixed-point error");
    add_common(c_disc, opts);
    c_disc->callback([&] { which = 4; });

    CLI::App* c_trace = app.add_subcommand("trace-growth", "Tr(H1^-1 H0) versus basis size");
    add_common(c_trace, opts);
    c_trace->callback([&] { which = 5; });

    CLI::App* c_cov = app.add_subcommand("diagnose-covariance",
                                         "mu_k / sigma_Mkv / martingale-proxy diagnostics");
    add_common(c_cov, opts);
    c_cov->callback([&] { which = 6; });

    CLI::App* c_adv = app.add_subcommand("advantage-demo", "q_hat grid for plotting");
    add_common(c_adv, opts);
    c_adv->callback([&] { which = 7; });

    CLI::App* c_oracle = app.add_subcommand("oracle", "Dump c*, c_bar, theta_bar");
    add_common(c_oracle, opts);
    c_oracle->callback([&] { which = 8; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        switch (which) {
            case 1: return run_simulate(opts, keep_inner);
            case 2: return run_estimate(opts);
            case 3: return run_sweep_rate(opts);
            case 4: return run_sweep_discretization(opts);
            case 5: return run_trace_growth(opts);
            case 6: return run_diagnose_covariance(opts);
            case 7: return run_advantage_demo(opts);
            case 8: return run_oracle(opts);
        }
    } catch (const std::invalid_argument& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
