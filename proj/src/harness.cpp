#include "ctpe/harness.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <map>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "ctpe/population.hpp"

namespace ctpe {

using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

std::string format_g17(double v) {
    if (v == 0.0) v = 0.0; // normalize negative zero
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

int worker_limit() {
    const char* env = std::getenv("CTPE_WORKERS");
    if (!env) return 1;
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || v < 1) return 1;
    return static_cast<int>(std::min(v, 256L));
}

namespace {

void check_keys(const json& obj, const char* where, std::initializer_list<const char*> allowed) {
    if (!obj.is_object())
        throw std::invalid_argument(std::string("config: ") + where + " must be an object");
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool known = false;
        for (const char* key : allowed)
            if (it.key() == key) {
                known = true;
                break;
            }
        if (!known)
            throw std::invalid_argument("config: unknown key '" + it.key() + "' in " + where);
    }
}

CoeffMap parse_coeffs(const json& arr) {
    if (!arr.is_array())
        throw std::invalid_argument("config: reward.coeffs must be an array of [alpha, value]");
    CoeffMap out;
    for (const json& entry : arr) {
        if (!entry.is_array() || entry.size() != 2 || !entry[0].is_array() ||
            !entry[1].is_number())
            throw std::invalid_argument("config: each reward coefficient is [[ints...], number]");
        MultiIndex alpha;
        for (const json& v : entry[0]) {
            if (!v.is_number_integer())
                throw std::invalid_argument("config: multi-index entries must be integers");
            alpha.push_back(v.get<int>());
        }
        out[alpha] = entry[1].get<double>();
    }
    return out;
}

json coeffs_to_json(const CoeffMap& coeffs) {
    json arr = json::array();
    for (const auto& [alpha, c] : coeffs) arr.push_back(json::array({alpha, c}));
    return arr;
}

} // namespace

ExperimentConfig ExperimentConfig::from_json_text(const std::string& text) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(std::string("config: not valid JSON: ") + e.what());
    }
    check_keys(root, "the top level",
               {"model", "reward", "discretization", "basis", "trajectory", "solver", "output"});

    ExperimentConfig c;
    if (root.contains("model")) {
        const json& mj = root["model"];
        check_keys(mj, "model", {"kind", "d", "sigma", "potential_amp", "rho_hat", "rate"});
        c.model_kind = mj.value("kind", c.model_kind);
        c.d = mj.value("d", c.d);
        c.sigma = mj.value("sigma", c.sigma);
        c.potential_amp = mj.value("potential_amp", c.potential_amp);
        c.rho_hat = mj.value("rho_hat", c.rho_hat);
        c.ou_rate = mj.value("rate", c.ou_rate);
    }
    if (root.contains("reward")) {
        const json& rj = root["reward"];
        check_keys(rj, "reward", {"coeffs", "eps_noise"});
        if (rj.contains("coeffs")) c.reward_coeffs = parse_coeffs(rj["coeffs"]);
        c.eps_noise = rj.value("eps_noise", c.eps_noise);
    }
    if (root.contains("discretization")) {
        const json& dj = root["discretization"];
        check_keys(dj, "discretization", {"nus", "etas", "beta", "admissibility_c0"});
        if (dj.contains("nus")) c.nus = dj["nus"].get<std::vector<int>>();
        if (dj.contains("etas")) c.etas = dj["etas"].get<std::vector<double>>();
        c.beta = dj.value("beta", c.beta);
        c.admissibility_c0 = dj.value("admissibility_c0", c.admissibility_c0);
    }
    if (root.contains("basis")) {
        const json& bj = root["basis"];
        check_keys(bj, "basis", {"ns"});
        if (bj.contains("ns")) c.ns = bj["ns"].get<std::vector<int>>();
    }
    if (root.contains("trajectory")) {
        const json& tj = root["trajectory"];
        check_keys(tj, "trajectory", {"Ts", "seed_base", "num_seeds", "substeps"});
        if (tj.contains("Ts")) c.Ts = tj["Ts"].get<std::vector<double>>();
        c.seed_base = tj.value("seed_base", c.seed_base);
        c.num_seeds = tj.value("num_seeds", c.num_seeds);
        c.substeps = tj.value("substeps", c.substeps);
    }
    if (root.contains("solver")) {
        const json& sj = root["solver"];
        check_keys(sj, "solver", {"policy", "ridge_lambda"});
        if (sj.contains("policy")) {
            const std::string p = sj["policy"].get<std::string>();
            if (p == "strict")
                c.policy = SolvePolicy::Strict;
            else if (p == "ridge")
                c.policy = SolvePolicy::Ridge;
            else
                throw std::invalid_argument("config: solver.policy must be 'strict' or 'ridge'");
        }
        c.ridge_lambda = sj.value("ridge_lambda", c.ridge_lambda);
    }
    if (root.contains("output")) {
        const json& oj = root["output"];
        check_keys(oj, "output", {"timing"});
        c.timing = oj.value("timing", c.timing);
    }
    return c;
}

std::string ExperimentConfig::to_json() const {
    ordered_json j;
    j["model"] = {{"kind", model_kind}, {"d", d}, {"sigma", sigma},
                  {"potential_amp", potential_amp}, {"rho_hat", rho_hat}, {"rate", ou_rate}};
    j["reward"] = {{"coeffs", coeffs_to_json(reward_coeffs)}, {"eps_noise", eps_noise}};
    j["discretization"] = {{"nus", nus}, {"etas", etas}, {"beta", beta},
                           {"admissibility_c0", admissibility_c0}};
    j["basis"] = {{"ns", ns}};
    j["trajectory"] = {{"Ts", Ts}, {"seed_base", seed_base}, {"num_seeds", num_seeds},
                       {"substeps", substeps}};
    j["solver"] = {{"policy", policy == SolvePolicy::Ridge ? "ridge" : "strict"},
                   {"ridge_lambda", ridge_lambda}};
    j["output"] = {{"timing", timing}};
    return j.dump(2);
}

void ExperimentConfig::validate() const {
    if (model_kind != "torus-brownian" && model_kind != "langevin-torus" && model_kind != "ou")
        throw std::invalid_argument("config: unknown model kind '" + model_kind + "'");
    if (d < 1) throw std::invalid_argument("config: d must be >= 1");
    if (!(sigma > 0.0)) throw std::invalid_argument("config: sigma must be positive");
    if (nus.empty() || etas.empty() || ns.empty() || Ts.empty())
        throw std::invalid_argument("config: every grid axis must be nonempty");
    for (int nu : nus)
        if (nu < 2 || nu > 8)
            throw std::invalid_argument("config: nu must lie in [2, 8]");
    for (double eta : etas)
        if (!(eta > 0.0)) throw std::invalid_argument("config: eta must be positive");
    if (!(beta > 0.0)) throw std::invalid_argument("config: beta must be positive");
    for (int n : ns)
        if (n < 0) throw std::invalid_argument("config: basis degree n must be >= 0");
    for (double T : Ts)
        if (!(T > 0.0)) throw std::invalid_argument("config: T must be positive");
    if (num_seeds < 1) throw std::invalid_argument("config: num_seeds must be >= 1");
    if (substeps < 1) throw std::invalid_argument("config: substeps must be >= 1");
    if (eps_noise < 0.0) throw std::invalid_argument("config: eps_noise must be >= 0");
    if (!(admissibility_c0 > 0.0))
        throw std::invalid_argument("config: admissibility_c0 must be positive");
    for (const auto& [alpha, c] : reward_coeffs) {
        (void)c;
        if (static_cast<int>(alpha.size()) != d)
            throw std::invalid_argument("config: reward multi-index length must equal d");
    }
    const RewardSpec probe = RewardSpec::from_fourier(reward_coeffs, eps_noise);
    if (probe.sup_bound + eps_noise > 1.0 + 1e-12)
        throw std::invalid_argument("config: sup|r| + eps_noise exceeds the unit reward bound");
}

std::vector<std::string> ExperimentConfig::admissibility_warnings() const {
    std::vector<std::string> out;
    for (int n : ns) {
        const long m = static_cast<long>(MultiIndexSet::build(d, n).size());
        const double limit = admissibility_c0 * std::pow(static_cast<double>(m), -4.0 / d);
        for (double eta : etas) {
            if (eta > limit) {
                std::ostringstream os;
                os << "stepsize eta=" << format_g17(eta) << " exceeds c0*m^(-4/d)="
                   << format_g17(limit) << " at n=" << n << " (m=" << m << ")";
                out.push_back(os.str());
            }
        }
    }
    return out;
}

DiffusionModel build_model(const ExperimentConfig& config) {
    if (config.model_kind == "torus-brownian")
        return DiffusionModel::torus_brownian(config.d, config.sigma);
    if (config.model_kind == "langevin-torus") {
        const double amp = config.potential_amp;
        auto grad_potential = [amp](const Eigen::VectorXd& x) {
            Eigen::VectorXd g(x.size());
            for (long i = 0; i < x.size(); ++i)
                g[i] = -2.0 * M_PI * amp * std::sin(2.0 * M_PI * x[i]);
            return g;
        };
        return DiffusionModel::langevin_torus(config.d, config.sigma, grad_potential,
                                              config.rho_hat);
    }
    if (config.model_kind == "ou")
        return DiffusionModel::ou_euclidean(config.d, config.ou_rate, config.sigma);
    throw std::invalid_argument("config: unknown model kind '" + config.model_kind + "'");
}

RewardSpec build_reward(const ExperimentConfig& config) {
    return RewardSpec::from_fourier(config.reward_coeffs, config.eps_noise);
}

std::string ResultRow::csv_header() {
    return "model,d,sigma,n,m,nu,eta,beta,T,seed,l2_err,h1_err,h2_err,approx_h1,stat_h1,cond,"
           "flag,wall_ms";
}

std::string ResultRow::to_csv() const {
    std::ostringstream os;
    os << model << ',' << d << ',' << format_g17(sigma) << ',' << n << ',' << m << ',' << nu << ','
       << format_g17(eta) << ',' << format_g17(beta) << ',' << format_g17(T) << ',' << seed << ','
       << format_g17(l2_err) << ',' << format_g17(h1_err) << ',' << format_g17(h2_err) << ','
       << format_g17(approx_h1) << ',' << format_g17(stat_h1) << ',' << format_g17(cond) << ','
       << flag << ',' << format_g17(wall_ms);
    return os.str();
}

std::string rows_to_csv(const std::vector<ResultRow>& rows) {
    std::ostringstream os;
    os << ResultRow::csv_header() << '\n';
    for (const ResultRow& r : rows) os << r.to_csv() << '\n';
    return os.str();
}

std::vector<ResultRow> run_experiment(const ExperimentConfig& config) {
    config.validate();
    if (config.model_kind != "torus-brownian")
        throw std::invalid_argument(
            "run_experiment: error sweeps need a closed-form oracle; use the torus-brownian model "
            "(other kinds remain available through simulate)");
    for (const std::string& w : config.admissibility_warnings())
        std::fprintf(stderr, "warning: %s\n", w.c_str());

    const DiffusionModel model = build_model(config);
    const RewardSpec reward = build_reward(config);

    std::vector<FourierBasis> bases;
    bases.reserve(config.ns.size());
    for (int n : config.ns) bases.push_back(FourierBasis::build(config.d, n));

    const std::size_t n_nu = config.nus.size();
    const std::size_t n_eta = config.etas.size();
    const std::size_t n_n = config.ns.size();
    const std::size_t n_T = config.Ts.size();
    const std::size_t n_seed = static_cast<std::size_t>(config.num_seeds);

    std::vector<std::vector<DiscretizationScheme>> schemes(n_nu);
    std::vector<std::vector<CoeffMap>> cbars(n_nu);
    for (std::size_t i = 0; i < n_nu; ++i) {
        for (std::size_t e = 0; e < n_eta; ++e) {
            schemes[i].push_back(
                DiscretizationScheme::build(config.nus[i], config.etas[e], config.beta));
            cbars[i].push_back(
                discretized_fixed_point_coeffs(schemes[i][e], model.spectrum, config.reward_coeffs));
        }
    }
    const CoeffMap cstar = true_value_coeffs(model.spectrum, config.reward_coeffs, config.beta);

    auto row_index = [&](std::size_t inu, std::size_t ieta, std::size_t in, std::size_t iT,
                         std::size_t is) {
        return ((((inu * n_eta) + ieta) * n_n + in) * n_T + iT) * n_seed + is;
    };

    std::vector<ResultRow> rows(n_nu * n_eta * n_n * n_T * n_seed);
    const double nan = std::numeric_limits<double>::quiet_NaN();

    // One simulation serves every (nu, n) cell at fixed (eta, T, seed):
    // common random numbers across basis sizes and orders.
    struct Task {
        std::size_t ieta, iT, is;
    };
    std::vector<Task> tasks;
    tasks.reserve(n_eta * n_T * n_seed);
    for (std::size_t e = 0; e < n_eta; ++e)
        for (std::size_t t = 0; t < n_T; ++t)
            for (std::size_t s = 0; s < n_seed; ++s) tasks.push_back({e, t, s});

    auto run_task = [&](const Task& task) {
        const double eta = config.etas[task.ieta];
        const double T = config.Ts[task.iT];
        const std::uint64_t seed = config.seed_base + task.is;

        auto stamp_row = [&](std::size_t inu, std::size_t in) -> ResultRow& {
            ResultRow& row = rows[row_index(inu, task.ieta, in, task.iT, task.is)];
            row.model = config.model_kind;
            row.d = config.d;
            row.sigma = config.sigma;
            row.n = bases[in].n();
            row.m = bases[in].m();
            row.nu = config.nus[inu];
            row.eta = eta;
            row.beta = config.beta;
            row.T = T;
            row.seed = seed;
            return row;
        };

        Trajectory traj;
        bool simulated = false;
        try {
            traj = simulate_trajectory(model, reward, T, eta, config.substeps, seed);
            simulated = true;
        } catch (const std::exception&) {
        }

        for (std::size_t inu = 0; inu < n_nu; ++inu) {
            for (std::size_t in = 0; in < n_n; ++in) {
                ResultRow& row = stamp_row(inu, in);
                if (!simulated) {
                    row.l2_err = row.h1_err = row.h2_err = row.approx_h1 = row.stat_h1 = nan;
                    row.cond = nan;
                    row.flag = 2;
                    continue;
                }
                const auto t0 = std::chrono::steady_clock::now();
                try {
                    const LstdEstimate est = lstd_estimate(traj, bases[in], schemes[inu][task.ieta],
                                                           config.policy, config.ridge_lambda);
                    const ErrorReport rep = measure_errors(est.theta_hat, bases[in],
                                                           cbars[inu][task.ieta], cstar);
                    row.l2_err = rep.l2_err;
                    row.h1_err = rep.h1_err;
                    row.h2_err = rep.h2_err;
                    row.approx_h1 = rep.approx_h1;
                    row.stat_h1 = rep.stat_h1;
                    row.cond = est.condition_estimate;
                    row.flag = est.flagged ? 1 : 0;
                } catch (const SolveError& e) {
                    row.l2_err = row.h1_err = row.h2_err = row.approx_h1 = row.stat_h1 = nan;
                    row.cond = e.condition;
                    row.flag = 2;
                } catch (const std::exception&) {
                    row.l2_err = row.h1_err = row.h2_err = row.approx_h1 = row.stat_h1 = nan;
                    row.cond = nan;
                    row.flag = 2;
                }
                if (config.timing) {
                    const auto t1 = std::chrono::steady_clock::now();
                    row.wall_ms =
                        std::chrono::duration_cast<std::chrono::duration<double, std::milli>>(t1 -
                                                                                              t0)
                            .count();
                }
            }
        }
    };

    const int workers = std::min<int>(worker_limit(), static_cast<int>(tasks.size()));
    if (workers <= 1) {
        for (const Task& t : tasks) run_task(t);
    } else {
        std::atomic<std::size_t> next{0};
        auto drain = [&]() {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= tasks.size()) return;
                run_task(tasks[i]);
            }
        };
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(workers));
        for (int w = 0; w < workers; ++w) pool.emplace_back(drain);
        for (std::thread& th : pool) th.join();
    }
    return rows;
}

GroupFit aggregate_and_fit(const std::vector<ResultRow>& rows,
                           const std::function<double(const ResultRow&)>& key,
                           const std::function<double(const ResultRow&)>& response) {
    std::map<double, std::pair<double, long>> acc; // key -> (sum of squares, count)
    for (const ResultRow& row : rows) {
        const double r = response(row);
        if (!std::isfinite(r)) continue; // failed rows never poison the fit
        auto& slot = acc[key(row)];
        slot.first += r * r;
        slot.second += 1;
    }
    GroupFit out;
    std::vector<double> keys, rmses;
    for (const auto& [k, sums] : acc) {
        GroupStat g;
        g.key = k;
        g.count = sums.second;
        g.rms = std::sqrt(sums.first / static_cast<double>(sums.second));
        out.groups.push_back(g);
        keys.push_back(g.key);
        rmses.push_back(g.rms);
    }
    out.fit = fit_rate(keys, rmses);
    return out;
}

} // namespace ctpe
